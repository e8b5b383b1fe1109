#ifndef QUANTBAND_CORE_HPP
#define QUANTBAND_CORE_HPP

#include <cstddef>
#include <optional>
#include <vector>

namespace quantband {

// Finite, strictly increasing evaluation grid together with the supremum
// of the outcome domain.  The domain supremum is the fallback value of
// generalized inverses when a level is never reached on the grid; it
// defaults to the largest grid point and may be +infinity for outcomes
// with unbounded support.
class Grid {
 public:
  // domain_sup: pass nothing to default to the largest point.
  explicit Grid(std::vector<double> points,
                std::optional<double> domain_sup = std::nullopt);

  std::size_t size() const { return points_.size(); }
  double point(std::size_t i) const { return points_[i]; }
  const std::vector<double>& points() const { return points_; }
  double domain_sup() const { return domain_sup_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.points_ == b.points_ && a.domain_sup_ == b.domain_sup_;
  }

 private:
  std::vector<double> points_;
  double domain_sup_;
};

// Right-continuous nondecreasing step function on a Grid with values in
// [0,1]: the canonical representation of every distribution function,
// band edge, and population truth handled by this library.  Construction
// validates monotonicity and range exactly.
class MonotoneStepFn {
 public:
  MonotoneStepFn(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double value(std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  double sup() const { return values_.back(); }

  // Step evaluation at the largest grid point <= y; below the first grid
  // point the first value is returned.
  double operator()(double y) const;

  // Generalized (left) inverse: the smallest grid point where the function
  // reaches a, or domain_sup when it never does.  Requires a in [0,1].
  double left_inverse(double a) const;

  // sup{a in [0,1] : left_inverse(a) <= y}, floored at 0.  Computed from
  // left_inverse alone, which makes it an independent check of the
  // inverse composition identity.
  double right_inverse(double y) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

// Two-sided simultaneous band for a distribution function: lower and
// upper envelopes on a common grid with lower <= upper pointwise.
struct DFBand {
  MonotoneStepFn lower;
  MonotoneStepFn upper;
  double level;

  DFBand(MonotoneStepFn lo, MonotoneStepFn hi, double lvl);
};

// True when lower <= f <= upper at every grid point; throws on grid
// mismatch.
bool covers(const DFBand& band, const MonotoneStepFn& f);

// Strictly increasing probability levels inside the open unit interval.
class ProbGrid {
 public:
  explicit ProbGrid(std::vector<double> levels);

  // {0.01, 0.02, ..., 0.99}
  static ProbGrid default_grid();

  // Evenly spaced levels from lo to hi inclusive (snapped to step
  // multiples), all inside (0,1).
  static ProbGrid regular(double lo, double hi, double step);

  // This grid merged with the given extra levels (those inside (0,1)).
  ProbGrid merged(const std::vector<double>& extra) const;

  std::size_t size() const { return levels_.size(); }
  double level(std::size_t i) const { return levels_[i]; }
  const std::vector<double>& levels() const { return levels_; }

 private:
  std::vector<double> levels_;
};

// Interval-valued band for a quantile function, sampled on a ProbGrid.
// lo/hi are the interval endpoints per level (both nondecreasing).  When
// a support restriction has been applied, admissible[i] lists the support
// points inside interval i (possibly empty) and restricted is true.
struct QuantileBand {
  ProbGrid prob_grid;
  std::vector<double> lo;
  std::vector<double> hi;
  double level = 0.0;
  bool restricted = false;
  std::vector<std::vector<double>> admissible;  // per level when restricted

  bool admissible_empty_at(std::size_t i) const {
    return restricted && admissible[i].empty();
  }
};

// Interval-valued band for a quantile-effect (or quantile-ratio) curve.
// Endpoints need not be monotone in the level.  When both input bands
// were support-restricted, admissible[i] lists the attainable effect
// values at level i.
struct QEBand {
  ProbGrid prob_grid;
  std::vector<double> lo;
  std::vector<double> hi;
  double level = 0.0;
  bool restricted = false;
  std::vector<std::vector<double>> admissible;

  bool admissible_empty_at(std::size_t i) const {
    return restricted && admissible[i].empty();
  }
};

}  // namespace quantband

#endif  // QUANTBAND_CORE_HPP
