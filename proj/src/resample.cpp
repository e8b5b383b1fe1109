#include "quantband/resample.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "quantband/errors.hpp"
#include "quantband/parallel.hpp"
#include "quantband/rng.hpp"

namespace quantband {

BootstrapScheme scheme_from_string(const std::string& s) {
  if (s == "multinomial") return BootstrapScheme::Multinomial;
  if (s == "exponential") return BootstrapScheme::Exponential;
  throw ConfigError("unknown bootstrap scheme '" + s + "'");
}

std::string scheme_to_string(BootstrapScheme s) {
  return s == BootstrapScheme::Multinomial ? "multinomial" : "exponential";
}

std::vector<double> draw_weights(const BootstrapConfig& cfg, std::size_t n,
                                 const std::vector<int>& cluster_ids,
                                 int draw_index) {
  if (n == 0) throw DataError("draw_weights: empty sample");
  if (draw_index < 0 || draw_index >= cfg.draws)
    throw ConfigError("draw_weights: draw index out of range");
  if (!cluster_ids.empty() && cluster_ids.size() != n)
    throw DataError("draw_weights: cluster id length mismatch");

  RngStream stream(cfg.master_seed, static_cast<std::uint64_t>(draw_index));

  const bool clustered = cfg.cluster_level && !cluster_ids.empty();
  std::vector<int> unit_cluster;  // dense cluster index per row
  std::size_t m = n;
  if (clustered) {
    std::vector<int> ids = cluster_ids;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    m = ids.size();
    unit_cluster.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      unit_cluster[i] = static_cast<int>(
          std::lower_bound(ids.begin(), ids.end(), cluster_ids[i]) - ids.begin());
  }

  // Per-cluster weights in sorted cluster order (per-unit when unclustered).
  std::vector<double> cw(m, 0.0);
  if (cfg.scheme == BootstrapScheme::Multinomial) {
    for (std::size_t toss = 0; toss < m; ++toss)
      cw[stream.below(m)] += 1.0;
  } else {
    for (std::size_t j = 0; j < m; ++j) cw[j] = stream.exponential();
  }

  if (!clustered) return cw;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = cw[unit_cluster[i]];
  return w;
}

BootstrapDraws::BootstrapDraws(int draws, int k, Grid grid, BootstrapConfig cfg)
    : draws_(draws), k_(k), grid_(std::move(grid)), cfg_(cfg) {
  if (draws < 2) throw ConfigError("BootstrapDraws: needs at least 2 draws");
  if (k < 1) throw ConfigError("BootstrapDraws: needs at least 1 function");
  values_.assign(static_cast<std::size_t>(draws) * k * grid_.size(), 0.0);
}

std::vector<double> BootstrapDraws::series(int k, int t) const {
  std::vector<double> out(draws_);
  for (int b = 0; b < draws_; ++b) out[b] = at(b, k, t);
  return out;
}

BootstrapDraws BootstrapDraws::slice(int k) const {
  BootstrapDraws out(draws_, 1, grid_, cfg_);
  for (int b = 0; b < draws_; ++b)
    for (std::size_t t = 0; t < grid_.size(); ++t)
      out.at(b, 0, static_cast<int>(t)) = at(b, k, static_cast<int>(t));
  return out;
}

BootstrapDraws bootstrap_dfs(const EstimatorFn& estimator, std::size_t n,
                             const std::vector<int>& cluster_ids, int k,
                             const Grid& grid, const BootstrapConfig& cfg,
                             int threads) {
  if (cfg.draws < 2) throw ConfigError("bootstrap_dfs: needs at least 2 draws");
  BootstrapDraws out(cfg.draws, k, grid, cfg);
  parallel_for(static_cast<std::size_t>(cfg.draws), threads, [&](std::size_t b) {
    const std::vector<double> w =
        draw_weights(cfg, n, cluster_ids, static_cast<int>(b));
    std::vector<MonotoneStepFn> curves;
    try {
      curves = estimator(w);
    } catch (const std::exception& e) {
      throw NumericError("bootstrap draw " + std::to_string(b) +
                         " failed: " + e.what());
    }
    if (curves.size() != static_cast<std::size_t>(k))
      throw NumericError("bootstrap draw " + std::to_string(b) +
                         ": estimator returned wrong number of functions");
    for (int j = 0; j < k; ++j) {
      if (!(curves[j].grid() == grid))
        throw NumericError("bootstrap draw " + std::to_string(b) +
                           ": estimator changed the grid");
      for (std::size_t t = 0; t < grid.size(); ++t)
        out.at(static_cast<int>(b), j, static_cast<int>(t)) =
            curves[j].value(t);
    }
  });
  return out;
}

}  // namespace quantband
