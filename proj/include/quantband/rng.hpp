#ifndef QUANTBAND_RNG_HPP
#define QUANTBAND_RNG_HPP

#include <array>
#include <cstdint>

namespace quantband {

// One block of the Philox-4x32-10 counter-based generator.  The output is
// a pure function of (counter, key), which is what makes every stream
// reproducible independently of evaluation order or thread schedule.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

// A deterministic random stream identified by (key, stream_id).  Values
// depend only on the identifying pair and on how many variates have been
// consumed, never on global state.  Distinct stream ids under the same key
// yield statistically independent streams.
class RngStream {
 public:
  RngStream(std::uint64_t key, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1); never returns an endpoint, so
  // logs of draws are finite.
  double uniform01();

  // Standard exponential, strictly positive.
  double exponential();

  // Standard normal via the inverse distribution function.
  double normal();

  // Poisson count at rate lambda >= 0 (multiplication method; intended
  // for moderate rates).
  int poisson(double lambda);

  // Uniform integer in {0, ..., n-1}.
  std::uint64_t below(std::uint64_t n);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_id_;
  std::uint64_t block_;
  std::array<std::uint32_t, 4> buf_;
  int pos_;  // next unread 32-bit word in buf_
};

}  // namespace quantband

#endif  // QUANTBAND_RNG_HPP
