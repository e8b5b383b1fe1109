#ifndef QUANTBAND_PARALLEL_HPP
#define QUANTBAND_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <functional>

namespace quantband {

// Runs fn(i) for i in [0, n) on up to `threads` worker threads (0 means
// hardware concurrency).  Work is sharded by index, so results written to
// slot i are identical for every thread count; the first exception thrown
// by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace quantband

#endif  // QUANTBAND_PARALLEL_HPP
