#include "quantband/bandcalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "quantband/errors.hpp"
#include "quantband/special.hpp"

namespace quantband {

namespace {

const double kNormalIqr = 2.0 * norm_inv(0.75);

void require_common_prob_grid(const QuantileBand& a, const QuantileBand& b,
                              const char* who) {
  if (a.prob_grid.levels() != b.prob_grid.levels())
    throw ConfigError(std::string(who) + ": probability grids differ");
}

}  // namespace

double empirical_quantile(std::vector<double> values, double alpha) {
  if (values.empty()) throw DataError("empirical_quantile: no values");
  if (std::isnan(alpha) || alpha < 0.0 || alpha > 1.0)
    throw ConfigError("empirical_quantile: level outside [0,1]");
  const std::size_t n = values.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(alpha * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[rank - 1];
}

double robust_se(const std::vector<double>& draws_at_point) {
  if (draws_at_point.size() < 2)
    throw DataError("robust_se: needs at least two draws");
  std::vector<double> sorted(draws_at_point);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  auto rank = [n](double alpha) {
    std::size_t r = static_cast<std::size_t>(
        std::ceil(alpha * static_cast<double>(n)));
    if (r < 1) r = 1;
    if (r > n) r = n;
    return r - 1;
  };
  return (sorted[rank(0.75)] - sorted[rank(0.25)]) / kNormalIqr;
}

CriticalValueReport critical_value(const BootstrapDraws& draws,
                                   const PointEstimates& estimates,
                                   const std::vector<std::vector<double>>& se,
                                   double p) {
  const int K = draws.k();
  const std::size_t T = draws.grid().size();
  if (std::isnan(p) || p <= 0.0 || p >= 1.0)
    throw ConfigError("critical_value: level must lie in (0,1)");
  if (estimates.curves.size() != static_cast<std::size_t>(K))
    throw ConfigError("critical_value: estimate count differs from draws");
  if (se.size() != static_cast<std::size_t>(K))
    throw ConfigError("critical_value: SE table has wrong shape");
  for (int k = 0; k < K; ++k) {
    if (!(estimates.curves[k].grid() == draws.grid()))
      throw ConfigError("critical_value: estimate grid differs from draws");
    if (se[k].size() != T)
      throw ConfigError("critical_value: SE table has wrong shape");
  }
  if (!estimates.degenerate.empty() &&
      estimates.degenerate.size() != static_cast<std::size_t>(K))
    throw ConfigError("critical_value: degeneracy flags have wrong shape");

  CriticalValueReport report;
  report.level = p;
  report.draws = draws.draws();
  report.se = se;
  report.excluded.assign(K, std::vector<char>(T, 0));
  bool any_included = false;
  for (int k = 0; k < K; ++k)
    for (std::size_t t = 0; t < T; ++t) {
      const bool flagged = !estimates.degenerate.empty() &&
                           !estimates.degenerate[k].empty() &&
                           estimates.degenerate[k][t];
      report.excluded[k][t] = (se[k][t] == 0.0 || flagged) ? 1 : 0;
      if (!report.excluded[k][t]) any_included = true;
    }
  if (!any_included)
    throw NumericError(
        "critical_value: every grid point is excluded (degenerate bootstrap)");

  std::vector<double> maxima(draws.draws());
  for (int b = 0; b < draws.draws(); ++b) {
    double m = 0.0;
    for (int k = 0; k < K; ++k) {
      const MonotoneStepFn& est = estimates.curves[k];
      for (std::size_t t = 0; t < T; ++t) {
        if (report.excluded[k][t]) continue;
        const double dev =
            std::fabs(draws.at(b, k, static_cast<int>(t)) - est.value(t)) /
            se[k][t];
        if (dev > m) m = dev;
      }
    }
    maxima[b] = m;
  }
  report.c = empirical_quantile(std::move(maxima), p);
  return report;
}

BandSet df_bands_joint(const PointEstimates& estimates,
                       const BootstrapDraws& draws, double p,
                       const ShapeConfig& shape_cfg) {
  const int K = draws.k();
  const std::size_t T = draws.grid().size();
  std::vector<std::vector<double>> se(K, std::vector<double>(T));
  for (int k = 0; k < K; ++k)
    for (std::size_t t = 0; t < T; ++t)
      se[k][t] = robust_se(draws.series(k, static_cast<int>(t)));

  BandSet out;
  out.report = critical_value(draws, estimates, se, p);
  const double c = out.report.c;
  for (int k = 0; k < K; ++k) {
    const MonotoneStepFn& est = estimates.curves[k];
    std::vector<double> lo(T), hi(T);
    for (std::size_t t = 0; t < T; ++t) {
      if (out.report.excluded[k][t]) {
        lo[t] = est.value(t);
        hi[t] = est.value(t);
      } else {
        lo[t] = est.value(t) - c * se[k][t];
        hi[t] = est.value(t) + c * se[k][t];
      }
    }
    MonotoneStepFn shaped_est = shape(draws.grid(), est.values(), shape_cfg);
    MonotoneStepFn lower = shape(draws.grid(), std::move(lo), shape_cfg);
    MonotoneStepFn upper = shape(draws.grid(), std::move(hi), shape_cfg);
    out.estimates.push_back(std::move(shaped_est));
    out.bands.emplace_back(std::move(lower), std::move(upper), p);
  }
  return out;
}

BandSet df_band_single(const MonotoneStepFn& estimate,
                       const BootstrapDraws& draws, double p,
                       const ShapeConfig& shape_cfg) {
  if (draws.k() != 1)
    throw ConfigError("df_band_single: draws must hold exactly one function");
  PointEstimates est;
  est.curves.push_back(estimate);
  return df_bands_joint(est, draws, p, shape_cfg);
}

QuantileBand invert_band(const DFBand& band, const ProbGrid& prob_grid) {
  std::vector<double> edge_values = band.lower.values();
  edge_values.insert(edge_values.end(), band.upper.values().begin(),
                     band.upper.values().end());
  const ProbGrid grid = prob_grid.merged(edge_values);

  QuantileBand out{grid};
  out.level = band.level;
  out.lo.resize(grid.size());
  out.hi.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = grid.level(i);
    out.lo[i] = band.upper.left_inverse(a);
    out.hi[i] = band.lower.left_inverse(a);
  }
  return out;
}

QuantileBand restrict_support(const QuantileBand& band,
                              std::vector<double> support) {
  if (support.empty())
    throw ConfigError("restrict_support: empty support set");
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());

  QuantileBand out = band;
  out.restricted = true;
  out.admissible.assign(band.lo.size(), {});
  for (std::size_t i = 0; i < band.lo.size(); ++i) {
    auto first = std::lower_bound(support.begin(), support.end(), band.lo[i]);
    auto last = std::upper_bound(support.begin(), support.end(), band.hi[i]);
    if (first < last) {
      out.admissible[i].assign(first, last);
      out.lo[i] = out.admissible[i].front();
      out.hi[i] = out.admissible[i].back();
    }
    // Empty intersection: endpoints stay unrestricted, flag via emptiness.
  }
  return out;
}

namespace {

// Interval difference endpoint that treats inf - inf as unbounded rather
// than NaN: such levels carry no information in either direction.
double safe_diff(double a, double b, double sign_inf) {
  const double d = a - b;
  if (std::isnan(d)) return sign_inf;
  return d;
}

}  // namespace

QEBand qe_band(const QuantileBand& j, const QuantileBand& m,
               const std::function<bool(double, double)>* pair_filter) {
  require_common_prob_grid(j, m, "qe_band");
  const std::size_t n = j.lo.size();
  QEBand out{j.prob_grid};
  out.level = std::min(j.level, m.level);
  out.lo.resize(n);
  out.hi.resize(n);
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    out.lo[i] = safe_diff(j.lo[i], m.hi[i], -inf);
    out.hi[i] = safe_diff(j.hi[i], m.lo[i], inf);
  }
  if (j.restricted && m.restricted) {
    out.restricted = true;
    out.admissible.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> vals;
      for (double vj : j.admissible[i])
        for (double vm : m.admissible[i]) {
          if (pair_filter && !(*pair_filter)(vj, vm)) continue;
          vals.push_back(vj - vm);
        }
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      out.admissible[i] = std::move(vals);
    }
  }
  return out;
}

QEBand ratio_band(const QuantileBand& j, const QuantileBand& m) {
  require_common_prob_grid(j, m, "ratio_band");
  const std::size_t n = j.lo.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!(m.lo[i] > 0.0))
      throw ConfigError(
          "ratio_band: denominator band reaches a nonpositive value at level "
          "index " +
          std::to_string(i) + " (a=" + std::to_string(m.prob_grid.level(i)) +
          ")");

  QEBand out{j.prob_grid};
  out.level = std::min(j.level, m.level);
  out.lo.resize(n);
  out.hi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Denominator is positive; the numerator may have either sign.
    out.lo[i] = std::min(j.lo[i] / m.lo[i], j.lo[i] / m.hi[i]);
    out.hi[i] = std::max(j.hi[i] / m.lo[i], j.hi[i] / m.hi[i]);
    if (std::isnan(out.lo[i])) out.lo[i] = 0.0;  // 0/inf corner
    if (std::isnan(out.hi[i])) out.hi[i] = 0.0;
  }
  if (j.restricted && m.restricted) {
    out.restricted = true;
    out.admissible.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> vals;
      for (double vj : j.admissible[i])
        for (double vm : m.admissible[i]) vals.push_back(vj / vm);
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      out.admissible[i] = std::move(vals);
    }
  }
  return out;
}

EqualityTest test_equality(const QEBand& band) {
  EqualityTest out;
  for (std::size_t i = 0; i < band.lo.size(); ++i) {
    bool covered;
    if (band.restricted && !band.admissible[i].empty()) {
      covered = std::binary_search(band.admissible[i].begin(),
                                   band.admissible[i].end(), 0.0);
    } else {
      covered = band.lo[i] <= 0.0 && 0.0 <= band.hi[i];
      if (band.restricted) out.used_empty_fallback = true;
    }
    if (!covered) {
      out.reject = true;
      out.offending.push_back(i);
    }
  }
  return out;
}

}  // namespace quantband
