#ifndef QUANTBAND_BANDCALC_HPP
#define QUANTBAND_BANDCALC_HPP

#include <functional>
#include <optional>
#include <vector>

#include "quantband/core.hpp"
#include "quantband/resample.hpp"
#include "quantband/shape.hpp"

namespace quantband {

// Order-statistic quantile: the ceil(alpha * n)-th smallest value.  This
// one convention is used for every empirical quantile in the library.
double empirical_quantile(std::vector<double> values, double alpha);

// Rescaled bootstrap interquartile range: (q75 - q25) of the draws divided
// by the interquartile range of the standard normal.  Zero exactly when
// the middle half of the draws is constant.
double robust_se(const std::vector<double>& draws_at_point);

// Point estimates entering the band construction: K curves on a common
// grid, plus optional degeneracy flags per (function, grid point) that
// force exclusion from the critical-value maximum (empty means none).
struct PointEstimates {
  std::vector<MonotoneStepFn> curves;
  std::vector<std::vector<char>> degenerate;
};

struct CriticalValueReport {
  double c = 0.0;
  double level = 0.0;
  int draws = 0;
  std::vector<std::vector<double>> se;      // K x |grid|
  std::vector<std::vector<char>> excluded;  // K x |grid|
};

// Bootstrap critical value: the level-p empirical quantile over draws of
// the maximal studentized deviation across all non-excluded
// (function, grid point) pairs.  A point is excluded when its robust SE is
// zero or its degeneracy flag is set; excluding everything is an error.
CriticalValueReport critical_value(const BootstrapDraws& draws,
                                   const PointEstimates& estimates,
                                   const std::vector<std::vector<double>>& se,
                                   double p);

// Joint simultaneous DF bands: estimate +/- c(p) * se, zero-width at
// excluded points, then all curves pushed through the shape operator.
struct BandSet {
  std::vector<MonotoneStepFn> estimates;  // shaped point estimates
  std::vector<DFBand> bands;
  CriticalValueReport report;
};

BandSet df_bands_joint(const PointEstimates& estimates,
                       const BootstrapDraws& draws, double p,
                       const ShapeConfig& shape_cfg = {});

// Single-function version (draws must hold exactly one function).
BandSet df_band_single(const MonotoneStepFn& estimate,
                       const BootstrapDraws& draws, double p,
                       const ShapeConfig& shape_cfg = {});

// Band inversion: the quantile band [upper^-, lower^-] sampled on the
// probability grid augmented with every distinct band edge value, so no
// jump between user levels is lost.
QuantileBand invert_band(const DFBand& band, const ProbGrid& prob_grid);

// Intersects each quantile interval with the support set; endpoints
// tighten to the extreme admissible points, empty intersections keep the
// unrestricted endpoints and are flagged.
QuantileBand restrict_support(const QuantileBand& band,
                              std::vector<double> support);

// Pointwise interval difference band for Q_j - Q_m on a shared
// probability grid.  When both inputs are support-restricted the
// admissible effect values are enumerated pairwise; the optional filter
// keeps only pairs it accepts.
QEBand qe_band(const QuantileBand& j, const QuantileBand& m,
               const std::function<bool(double, double)>* pair_filter = nullptr);

// Pointwise interval ratio band for Q_j / Q_m; every denominator interval
// must be strictly positive, otherwise the offending level index is named.
QEBand ratio_band(const QuantileBand& j, const QuantileBand& m);

// Uniform equality test: reject when some level's band excludes zero.
// An empty admissible set counts as evidence only if the interval itself
// excludes zero.
struct EqualityTest {
  bool reject = false;
  std::vector<std::size_t> offending;
  bool used_empty_fallback = false;
};

EqualityTest test_equality(const QEBand& band);

}  // namespace quantband

#endif  // QUANTBAND_BANDCALC_HPP
