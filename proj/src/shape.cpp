#include "quantband/shape.hpp"

#include <algorithm>
#include <cmath>

#include "quantband/errors.hpp"

namespace quantband {

namespace {

void require_unit(const std::vector<double>& v, const char* who) {
  for (double x : v)
    if (std::isnan(x) || x < 0.0 || x > 1.0)
      throw ConfigError(std::string(who) + ": values must lie in [0,1]");
}

// PAVA with weight-1 observations: merge adjacent blocks whose means
// violate monotonicity, then write each block's mean back.
std::vector<double> pava(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> mean(n);
  std::vector<std::size_t> count(n);
  std::size_t m = 0;  // number of blocks
  for (std::size_t i = 0; i < n; ++i) {
    mean[m] = v[i];
    count[m] = 1;
    ++m;
    while (m > 1 && mean[m - 2] > mean[m - 1]) {
      const double total = mean[m - 2] * count[m - 2] + mean[m - 1] * count[m - 1];
      count[m - 2] += count[m - 1];
      mean[m - 2] = total / count[m - 2];
      --m;
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b = 0; b < m; ++b)
    out.insert(out.end(), count[b], mean[b]);
  return out;
}

}  // namespace

std::vector<double> clip_unit(std::vector<double> f) {
  for (double& x : f) {
    if (std::isnan(x)) throw ConfigError("clip_unit: NaN value");
    x = std::min(1.0, std::max(0.0, x));
  }
  return f;
}

MonotoneStepFn rearrange(const Grid& grid, std::vector<double> values) {
  require_unit(values, "rearrange");
  std::sort(values.begin(), values.end());
  return MonotoneStepFn(grid, std::move(values));
}

MonotoneStepFn isotonize(const Grid& grid, std::vector<double> values) {
  require_unit(values, "isotonize");
  std::vector<double> iso = pava(values);
  // Block means of [0,1] values stay in [0,1]; guard rounding anyway.
  for (double& x : iso) x = std::min(1.0, std::max(0.0, x));
  return MonotoneStepFn(grid, std::move(iso));
}

MonotoneStepFn shape(const Grid& grid, std::vector<double> raw,
                     const ShapeConfig& cfg) {
  if (std::isnan(cfg.isotonization_weight) || cfg.isotonization_weight < 0.0 ||
      cfg.isotonization_weight > 1.0)
    throw ConfigError("shape: isotonization_weight outside [0,1]");
  std::vector<double> clipped = clip_unit(std::move(raw));
  if (cfg.isotonization_weight == 0.0)
    return rearrange(grid, std::move(clipped));
  MonotoneStepFn re = rearrange(grid, clipped);
  MonotoneStepFn iso = isotonize(grid, std::move(clipped));
  const double w = cfg.isotonization_weight;
  std::vector<double> mixed(re.size());
  for (std::size_t i = 0; i < mixed.size(); ++i)
    mixed[i] = (1.0 - w) * re.value(i) + w * iso.value(i);
  return MonotoneStepFn(grid, std::move(mixed));
}

IntersectResult intersect_monotone(const Grid& grid,
                                   std::vector<double> lower_raw,
                                   std::vector<double> upper_raw,
                                   double level) {
  if (lower_raw.size() != grid.size() || upper_raw.size() != grid.size())
    throw ConfigError("intersect_monotone: values/grid size mismatch");
  std::vector<double> lo = clip_unit(std::move(lower_raw));
  std::vector<double> hi = clip_unit(std::move(upper_raw));
  // Smallest nondecreasing majorant: running max from the left.
  for (std::size_t i = 1; i < lo.size(); ++i) lo[i] = std::max(lo[i], lo[i - 1]);
  // Greatest nondecreasing minorant: running min from the right.
  for (std::size_t i = hi.size() - 1; i-- > 0;) hi[i] = std::min(hi[i], hi[i + 1]);
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i]) return {true, std::nullopt};
  return {false,
          DFBand(MonotoneStepFn(grid, std::move(lo)),
                 MonotoneStepFn(grid, std::move(hi)), level)};
}

}  // namespace quantband
