#ifndef QUANTBAND_RESAMPLE_HPP
#define QUANTBAND_RESAMPLE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "quantband/core.hpp"

namespace quantband {

// Exchangeable bootstrap weight schemes: multinomial resampling counts or
// i.i.d. standard-exponential weights.
enum class BootstrapScheme { Multinomial, Exponential };

BootstrapScheme scheme_from_string(const std::string& s);
std::string scheme_to_string(BootstrapScheme s);

struct BootstrapConfig {
  BootstrapScheme scheme = BootstrapScheme::Exponential;
  int draws = 1000;
  std::uint64_t master_seed = 0;
  // With cluster ids present, weights are drawn per cluster and shared by
  // its rows unless this is disabled.
  bool cluster_level = true;
};

// Weight vector of draw `draw_index`, a pure function of
// (master_seed, draw_index): reproducible independently of which draws ran
// before or on which thread.  Empty cluster_ids means unit-level weights.
std::vector<double> draw_weights(const BootstrapConfig& cfg, std::size_t n,
                                 const std::vector<int>& cluster_ids,
                                 int draw_index);

// Bootstrap replicates of K distribution functions on a common grid,
// one slice per (draw, function); every slice is monotone because the
// estimator returns members of the monotone class.
class BootstrapDraws {
 public:
  BootstrapDraws(int draws, int k, Grid grid, BootstrapConfig cfg);

  int draws() const { return draws_; }
  int k() const { return k_; }
  const Grid& grid() const { return grid_; }
  const BootstrapConfig& config() const { return cfg_; }

  double at(int b, int k, int t) const {
    return values_[(static_cast<std::size_t>(b) * k_ + k) * grid_.size() + t];
  }
  double& at(int b, int k, int t) {
    return values_[(static_cast<std::size_t>(b) * k_ + k) * grid_.size() + t];
  }

  // All draws of function k at grid index t.
  std::vector<double> series(int k, int t) const;

  // The single-function view of component k (copies).
  BootstrapDraws slice(int k) const;

 private:
  int draws_;
  int k_;
  Grid grid_;
  BootstrapConfig cfg_;
  std::vector<double> values_;
};

// K jointly bootstrapped DF estimates: one weight vector per draw feeds
// the whole estimator, which preserves the dependence between the K
// functions.  The estimator must be a pure function of the weights.
// A failure inside the estimator is rethrown with the draw index attached.
using EstimatorFn =
    std::function<std::vector<MonotoneStepFn>(const std::vector<double>&)>;

BootstrapDraws bootstrap_dfs(const EstimatorFn& estimator, std::size_t n,
                             const std::vector<int>& cluster_ids, int k,
                             const Grid& grid, const BootstrapConfig& cfg,
                             int threads = 1);

}  // namespace quantband

#endif  // QUANTBAND_RESAMPLE_HPP
