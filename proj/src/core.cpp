#include "quantband/core.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "quantband/errors.hpp"

namespace quantband {

Grid::Grid(std::vector<double> points, std::optional<double> domain_sup)
    : points_(std::move(points)) {
  if (points_.empty()) throw ConfigError("Grid: needs at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (std::isnan(points_[i]) || std::isinf(points_[i]))
      throw ConfigError("Grid: points must be finite");
    if (i > 0 && !(points_[i - 1] < points_[i]))
      throw ConfigError("Grid: points must be strictly increasing");
  }
  domain_sup_ = domain_sup.value_or(points_.back());
  if (std::isnan(domain_sup_) || domain_sup_ < points_.back())
    throw ConfigError("Grid: domain_sup must be >= the largest point");
}

MonotoneStepFn::MonotoneStepFn(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ConfigError("MonotoneStepFn: values/grid size mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (std::isnan(values_[i]) || values_[i] < 0.0 || values_[i] > 1.0)
      throw ConfigError("MonotoneStepFn: values must lie in [0,1]");
    if (i > 0 && values_[i] < values_[i - 1])
      throw ConfigError("MonotoneStepFn: values must be nondecreasing");
  }
}

double MonotoneStepFn::operator()(double y) const {
  const auto& pts = grid_.points();
  auto it = std::upper_bound(pts.begin(), pts.end(), y);
  if (it == pts.begin()) return values_.front();
  return values_[static_cast<std::size_t>(it - pts.begin()) - 1];
}

double MonotoneStepFn::left_inverse(double a) const {
  if (std::isnan(a) || a < 0.0 || a > 1.0)
    throw ConfigError("left_inverse: level outside [0,1]");
  auto it = std::lower_bound(values_.begin(), values_.end(), a);
  if (it == values_.end()) return grid_.domain_sup();
  return grid_.point(static_cast<std::size_t>(it - values_.begin()));
}

double MonotoneStepFn::right_inverse(double y) const {
  // The supremum is attained at 0, at one of the function's own values,
  // or at 1, so scanning those candidates evaluates it exactly.
  double best = 0.0;
  if (left_inverse(1.0) <= y) return 1.0;
  for (double v : values_)
    if (v > best && left_inverse(v) <= y) best = v;
  return best;
}

DFBand::DFBand(MonotoneStepFn lo, MonotoneStepFn hi, double lvl)
    : lower(std::move(lo)), upper(std::move(hi)), level(lvl) {
  if (!(lower.grid() == upper.grid()))
    throw ConfigError("DFBand: lower and upper must share one grid");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (lower.value(i) > upper.value(i))
      throw ConfigError("DFBand: lower exceeds upper");
  if (std::isnan(level) || level < 0.0 || level > 1.0)
    throw ConfigError("DFBand: level outside [0,1]");
}

bool covers(const DFBand& band, const MonotoneStepFn& f) {
  if (!(band.lower.grid() == f.grid()))
    throw ConfigError("covers: band and function grids are incompatible");
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.value(i) < band.lower.value(i) || f.value(i) > band.upper.value(i))
      return false;
  return true;
}

ProbGrid::ProbGrid(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw ConfigError("ProbGrid: needs at least one level");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (std::isnan(levels_[i]) || levels_[i] <= 0.0 || levels_[i] >= 1.0)
      throw ConfigError("ProbGrid: levels must lie strictly inside (0,1)");
    if (i > 0 && !(levels_[i - 1] < levels_[i]))
      throw ConfigError("ProbGrid: levels must be strictly increasing");
  }
}

ProbGrid ProbGrid::default_grid() { return regular(0.01, 0.99, 0.01); }

ProbGrid ProbGrid::regular(double lo, double hi, double step) {
  if (!(step > 0.0) || !(lo <= hi))
    throw ConfigError("ProbGrid: invalid range or step");
  std::vector<double> levels;
  const long long n = std::llround((hi - lo) / step);
  for (long long i = 0; i <= n; ++i) {
    // Rebuild each level from integer multiples to avoid drift.
    const double a = lo + static_cast<double>(i) * step;
    if (a > 0.0 && a < 1.0) levels.push_back(a);
  }
  return ProbGrid(std::move(levels));
}

ProbGrid ProbGrid::merged(const std::vector<double>& extra) const {
  // Extra levels outside the existing range are dropped so that a caller's
  // chosen level range survives the merge.
  const double lo = levels_.empty() ? 0.0 : levels_.front();
  const double hi = levels_.empty() ? 1.0 : levels_.back();
  std::vector<double> all = levels_;
  for (double v : extra)
    if (v > 0.0 && v < 1.0 && v >= lo && v <= hi && !std::isnan(v))
      all.push_back(v);
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return ProbGrid(std::move(all));
}

}  // namespace quantband
