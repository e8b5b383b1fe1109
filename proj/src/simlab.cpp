#include "quantband/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "quantband/bandcalc.hpp"
#include "quantband/errors.hpp"
#include "quantband/estimate.hpp"
#include "quantband/parallel.hpp"
#include "quantband/special.hpp"

namespace quantband {

std::vector<double> default_ordered_cutoffs() {
  const std::vector<double> cum = {0.10, 0.26, 0.50, 0.74, 0.90};
  std::vector<double> cuts(cum.size());
  for (std::size_t i = 0; i < cum.size(); ++i) cuts[i] = norm_inv(cum[i]);
  return cuts;
}

std::vector<int> gen_poisson(double lambda, int n, RngStream& rng) {
  if (n <= 0) throw ConfigError("gen_poisson: n must be positive");
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = rng.poisson(lambda);
  return y;
}

std::vector<int> gen_ordered(double mu, const std::vector<double>& cutoffs,
                             int n, RngStream& rng) {
  if (n <= 0) throw ConfigError("gen_ordered: n must be positive");
  if (cutoffs.empty()) throw ConfigError("gen_ordered: no cutoffs");
  if (!std::is_sorted(cutoffs.begin(), cutoffs.end()))
    throw ConfigError("gen_ordered: cutoffs must be sorted");
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    const double latent = mu + rng.normal();
    int v = 0;
    while (v < static_cast<int>(cutoffs.size()) && latent > cutoffs[v]) ++v;
    y[i] = v;
  }
  return y;
}

namespace {

const std::uint64_t kNoiseStream = ~std::uint64_t{0};

// Replication-local stream purposes under the design seed.
enum RepPurpose : std::uint64_t {
  kSample0 = 0,
  kSample1 = 1,
  kBootSeed = 2,
  kJitterNoise = 3,
  kCompSeed = 4,
  kJitterSeed = 5,
  kPurposes = 8
};

struct SortedSample {
  std::vector<double> values;       // ascending
  std::vector<std::size_t> order;   // original index per sorted position

  explicit SortedSample(const std::vector<double>& v) {
    order.resize(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    values.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) values[i] = v[order[i]];
  }

  // ceil(a*n)-th order statistic, the left inverse of the sample EDF.
  double quantile(double a) const {
    const std::size_t n = values.size();
    std::size_t r = static_cast<std::size_t>(
        std::ceil(a * static_cast<double>(n)));
    if (r < 1) r = 1;
    if (r > n) r = n;
    return values[r - 1];
  }
};

std::vector<double> to_double(const std::vector<int>& y) {
  return std::vector<double>(y.begin(), y.end());
}

// Bootstrap draw matrix of the weighted QE curve on the grid
// (rows: draws, row-major).  Weight vectors are pooled over both samples
// so one exchangeable draw feeds both quantile functions.  Writes the
// unit-weight QE into *center.
std::vector<double> qe_draw_matrix(const SortedSample& s0,
                                   const SortedSample& s1, int B, double p,
                                   const ProbGrid& grid, BootstrapScheme scheme,
                                   std::uint64_t seed,
                                   std::vector<double>* center) {
  (void)p;
  const std::size_t n0 = s0.values.size();
  const std::size_t n1 = s1.values.size();
  const std::size_t A = grid.size();
  BootstrapConfig cfg;
  cfg.scheme = scheme;
  cfg.draws = B;
  cfg.master_seed = seed;

  center->resize(A);
  for (std::size_t a = 0; a < A; ++a)
    (*center)[a] = s1.quantile(grid.level(a)) - s0.quantile(grid.level(a));

  std::vector<double> mat(static_cast<std::size_t>(B) * A);
  std::vector<double> prefix0(n0), prefix1(n1);
  for (int b = 0; b < B; ++b) {
    const std::vector<double> w = draw_weights(cfg, n0 + n1, {}, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < n0; ++i) {
      acc += w[s0.order[i]];
      prefix0[i] = acc;
    }
    acc = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
      acc += w[n0 + s1.order[i]];
      prefix1[i] = acc;
    }
    if (!(prefix0.back() > 0.0) || !(prefix1.back() > 0.0))
      throw NumericError("qe_draw_matrix: a bootstrap draw wiped out a group");
    for (std::size_t a = 0; a < A; ++a) {
      const double lvl = grid.level(a);
      auto it0 = std::lower_bound(prefix0.begin(), prefix0.end(),
                                  lvl * prefix0.back());
      auto it1 = std::lower_bound(prefix1.begin(), prefix1.end(),
                                  lvl * prefix1.back());
      if (it0 == prefix0.end()) --it0;
      if (it1 == prefix1.end()) --it1;
      mat[static_cast<std::size_t>(b) * A + a] =
          s1.values[static_cast<std::size_t>(it1 - prefix1.begin())] -
          s0.values[static_cast<std::size_t>(it0 - prefix0.begin())];
    }
  }
  return mat;
}

struct ConstantWidthInternal {
  std::vector<double> center;
  double c = 0.0;
  double zero_se_fraction = 0.0;
};

ConstantWidthInternal constant_width_internal(const std::vector<double>& y0,
                                              const std::vector<double>& y1,
                                              int B, double p,
                                              const ProbGrid& grid,
                                              BootstrapScheme scheme,
                                              std::uint64_t seed) {
  const SortedSample s0(y0), s1(y1);
  const std::size_t A = grid.size();
  ConstantWidthInternal out;
  const std::vector<double> mat =
      qe_draw_matrix(s0, s1, B, p, grid, scheme, seed, &out.center);

  std::vector<double> maxdev(B, 0.0);
  for (int b = 0; b < B; ++b) {
    double m = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      const double d =
          std::fabs(mat[static_cast<std::size_t>(b) * A + a] - out.center[a]);
      if (d > m) m = d;
    }
    maxdev[b] = m;
  }
  out.c = empirical_quantile(std::move(maxdev), p);

  // Diagnostic for the (infeasible) studentized variant: how many levels
  // have literally zero bootstrap spread in the raw QE draws.
  std::size_t zeros = 0;
  std::vector<double> col(B);
  for (std::size_t a = 0; a < A; ++a) {
    for (int b = 0; b < B; ++b) col[b] = mat[static_cast<std::size_t>(b) * A + a];
    const double q75 = empirical_quantile(col, 0.75);
    const double q25 = empirical_quantile(col, 0.25);
    if (q75 - q25 == 0.0) ++zeros;
  }
  out.zero_se_fraction = static_cast<double>(zeros) / static_cast<double>(A);
  return out;
}

struct JitterInternal {
  std::vector<double> center_smoothed;
  std::vector<double> center_raw;
  std::vector<double> halfwidth;  // c * s(a), zero where excluded
  double c = 0.0;
  double avg_length = 0.0;
};

JitterInternal jitter_internal(const std::vector<double>& y0,
                               const std::vector<double>& y1,
                               const std::vector<double>& u0,
                               const std::vector<double>& u1, int B, double p,
                               const ProbGrid& grid, BootstrapScheme scheme,
                               std::uint64_t seed) {
  if (u0.size() != y0.size() || u1.size() != y1.size())
    throw ConfigError("jitter_internal: noise length mismatch");
  std::vector<double> v0(y0.size()), v1(y1.size());
  for (std::size_t i = 0; i < y0.size(); ++i) v0[i] = y0[i] + u0[i];
  for (std::size_t i = 0; i < y1.size(); ++i) v1[i] = y1[i] + u1[i];
  const SortedSample j0(v0), j1(v1);
  const SortedSample r0(y0), r1(y1);
  const std::size_t A = grid.size();

  JitterInternal out;
  const std::vector<double> mat =
      qe_draw_matrix(j0, j1, B, p, grid, scheme, seed, &out.center_smoothed);
  out.center_raw.resize(A);
  for (std::size_t a = 0; a < A; ++a)
    out.center_raw[a] =
        r1.quantile(grid.level(a)) - r0.quantile(grid.level(a));

  // Pointwise rescaled-IQR spread of the jittered QE draws.
  std::vector<double> s(A, 0.0);
  std::vector<double> col(B);
  for (std::size_t a = 0; a < A; ++a) {
    for (int b = 0; b < B; ++b) col[b] = mat[static_cast<std::size_t>(b) * A + a];
    s[a] = robust_se(col);
  }
  std::vector<double> maxdev(B, 0.0);
  bool any_included = false;
  for (std::size_t a = 0; a < A; ++a) any_included |= (s[a] > 0.0);
  if (!any_included)
    throw NumericError("competitor_jitter: all levels degenerate");
  for (int b = 0; b < B; ++b) {
    double m = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      if (s[a] == 0.0) continue;
      const double d = std::fabs(mat[static_cast<std::size_t>(b) * A + a] -
                                 out.center_smoothed[a]) /
                       s[a];
      if (d > m) m = d;
    }
    maxdev[b] = m;
  }
  out.c = empirical_quantile(std::move(maxdev), p);
  out.halfwidth.resize(A);
  double total = 0.0;
  for (std::size_t a = 0; a < A; ++a) {
    out.halfwidth[a] = s[a] > 0.0 ? out.c * s[a] : 0.0;
    total += 2.0 * out.halfwidth[a];
  }
  out.avg_length = total / static_cast<double>(A);
  return out;
}

}  // namespace

ConstantWidthBand competitor_constant_width(const std::vector<int>& y0,
                                            const std::vector<int>& y1,
                                            int draws, double p,
                                            const ProbGrid& grid,
                                            BootstrapScheme scheme,
                                            std::uint64_t seed) {
  const ConstantWidthInternal in = constant_width_internal(
      to_double(y0), to_double(y1), draws, p, grid, scheme, seed);
  ConstantWidthBand out{QEBand{grid}};
  out.halfwidth = in.c;
  out.zero_se_fraction = in.zero_se_fraction;
  out.band.level = p;
  out.band.lo.resize(grid.size());
  out.band.hi.resize(grid.size());
  for (std::size_t a = 0; a < grid.size(); ++a) {
    out.band.lo[a] = in.center[a] - in.c;
    out.band.hi[a] = in.center[a] + in.c;
  }
  return out;
}

JitterBand competitor_jitter(const std::vector<int>& y0,
                             const std::vector<int>& y1, int draws, double p,
                             JitterCenter variant, const ProbGrid& grid,
                             BootstrapScheme scheme, std::uint64_t seed) {
  RngStream noise(seed, kNoiseStream);
  std::vector<double> u0(y0.size()), u1(y1.size());
  for (double& u : u0) u = noise.uniform01();
  for (double& u : u1) u = noise.uniform01();
  const JitterInternal in = jitter_internal(to_double(y0), to_double(y1), u0,
                                            u1, draws, p, grid, scheme, seed);
  JitterBand out{QEBand{grid}};
  out.critical = in.c;
  out.avg_length = in.avg_length;
  out.band.level = p;
  out.band.lo.resize(grid.size());
  out.band.hi.resize(grid.size());
  const std::vector<double>& center =
      variant == JitterCenter::Smoothed ? in.center_smoothed : in.center_raw;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    out.band.lo[a] = center[a] - in.halfwidth[a];
    out.band.hi[a] = center[a] + in.halfwidth[a];
  }
  return out;
}

namespace {

// Distinct values of the given step functions inside (lo, hi], plus hi:
// enough levels to decide any piecewise-constant statement on [lo, hi]
// exactly, because generalized inverses only jump at function values.
std::vector<double> closure_levels(
    std::initializer_list<const MonotoneStepFn*> fns, double lo, double hi) {
  std::vector<double> levels;
  for (const MonotoneStepFn* f : fns)
    for (double v : f->values())
      if (v > lo && v <= hi) levels.push_back(v);
  levels.push_back(hi);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

bool qf_covered(const DFBand& band, const MonotoneStepFn& pop, double lo,
                double hi) {
  for (double a : closure_levels({&band.lower, &band.upper, &pop}, lo, hi)) {
    const double q = pop.left_inverse(a);
    if (band.upper.left_inverse(a) > q || band.lower.left_inverse(a) < q)
      return false;
  }
  return true;
}

bool qe_covered(const DFBand& b0, const DFBand& b1, const MonotoneStepFn& pop0,
                const MonotoneStepFn& pop1, double lo, double hi) {
  for (double a : closure_levels(
           {&b0.lower, &b0.upper, &b1.lower, &b1.upper, &pop0, &pop1}, lo, hi)) {
    const double truth = pop1.left_inverse(a) - pop0.left_inverse(a);
    const double qe_lo = b1.upper.left_inverse(a) - b0.lower.left_inverse(a);
    const double qe_hi = b1.lower.left_inverse(a) - b0.upper.left_inverse(a);
    if (truth < qe_lo || truth > qe_hi) return false;
  }
  return true;
}

bool qe_rejects_zero(const DFBand& b0, const DFBand& b1, double lo, double hi) {
  for (double a :
       closure_levels({&b0.lower, &b0.upper, &b1.lower, &b1.upper}, lo, hi)) {
    const double qe_lo = b1.upper.left_inverse(a) - b0.lower.left_inverse(a);
    const double qe_hi = b1.lower.left_inverse(a) - b0.upper.left_inverse(a);
    if (qe_lo > 0.0 || qe_hi < 0.0) return true;
  }
  return false;
}

double qe_average_length(const DFBand& b0, const DFBand& b1, double lo,
                         double hi) {
  const std::vector<double> levels =
      closure_levels({&b0.lower, &b0.upper, &b1.lower, &b1.upper}, lo, hi);
  double integral = 0.0;
  double prev = lo;
  for (double a : levels) {
    const double len = (b1.lower.left_inverse(a) - b0.upper.left_inverse(a)) -
                       (b1.upper.left_inverse(a) - b0.lower.left_inverse(a));
    integral += (a - prev) * len;
    prev = a;
  }
  return integral / (hi - lo);
}

double rate_se(double rate, int nsim) {
  return std::sqrt(std::max(0.0, rate * (1.0 - rate)) /
                   static_cast<double>(nsim));
}

// Simultaneous bands restricted to the quantile-relevant support: the
// critical sup runs only over each sample's [lo, hi] quantile window, and
// each band lives on its windowed grid, so inversion falls back to the
// window top.  Unbounded supports would otherwise feed far-tail lattice
// points into the sup and widen the bands over the range that matters.
struct WindowBands {
  std::vector<DFBand> bands;  // one per group, each on its own window
  double c = 0.0;
};

WindowBands windowed_bands(const Grid& grid,
                           const std::vector<const MonotoneStepFn*>& ests,
                           const std::vector<std::pair<double, double>>& win,
                           const BootstrapDraws& draws, double level) {
  const int K = draws.k();
  const std::size_t T = grid.size();
  // Each band lives on [d_lo, d_hi], one lattice point of slack around the
  // sample quantile window: the slack points carry the inversion's edges at
  // the range endpoints (below, the upper band value can still exceed the
  // low level; above, the lower band value first clears the high level).
  // The critical sup runs over [d_lo, s_hi]: the bottom slack point sits
  // below the low level and belongs to the covered vertical range, while
  // the top slack point's estimate is already above the high level.
  std::vector<std::size_t> d_lo(K, 0), d_hi(K, 0), s_hi(K, 0);
  std::vector<std::vector<double>> se(K);
  for (int k = 0; k < K; ++k) {
    std::size_t a = T, b = 0;
    for (std::size_t t = 0; t < T; ++t)
      if (grid.point(t) >= win[k].first && grid.point(t) <= win[k].second) {
        a = std::min(a, t);
        b = std::max(b, t);
      }
    if (a > b) throw NumericError("windowed_bands: empty support window");
    d_lo[k] = a > 0 ? a - 1 : 0;
    d_hi[k] = std::min(b + 1, T - 1);
    s_hi[k] = b;
    se[k].resize(d_hi[k] - d_lo[k] + 1);
    for (std::size_t t = d_lo[k]; t <= d_hi[k]; ++t)
      se[k][t - d_lo[k]] = robust_se(draws.series(k, static_cast<int>(t)));
  }

  std::vector<double> maxdev(draws.draws(), 0.0);
  bool any = false;
  for (int b = 0; b < draws.draws(); ++b)
    for (int k = 0; k < K; ++k)
      for (std::size_t t = d_lo[k]; t <= s_hi[k]; ++t) {
        const double s = se[k][t - d_lo[k]];
        if (s <= 0.0) continue;
        any = true;
        const double dev =
            std::fabs(draws.at(b, k, static_cast<int>(t)) -
                      ests[k]->value(t)) / s;
        maxdev[b] = std::max(maxdev[b], dev);
      }
  if (!any) throw NumericError("windowed_bands: all window points degenerate");

  WindowBands out;
  out.c = empirical_quantile(maxdev, level);
  for (int k = 0; k < K; ++k) {
    std::vector<double> pts, lo, hi;
    for (std::size_t t = d_lo[k]; t <= d_hi[k]; ++t) {
      pts.push_back(grid.point(t));
      const double s = se[k][t - d_lo[k]];
      const double est = ests[k]->value(t);
      lo.push_back(s > 0.0 ? est - out.c * s : est);
      hi.push_back(s > 0.0 ? est + out.c * s : est);
    }
    const Grid gk(pts);
    out.bands.emplace_back(shape(gk, std::move(lo)), shape(gk, std::move(hi)),
                           level);
  }
  return out;
}

struct RepOutcome {
  char cov_s0 = 0, cov_s1 = 0, cov_all = 0, cov_qe = 0, reject = 0;
  double len = 0.0;
  char boot_cov = 0;
  double boot_len = 0.0;
  char jit1_cov = 0, jit2_cov = 0;
  double jit_len = 0.0;
  double zero_frac = 0.0;
};

}  // namespace

SimReport run_design(const SimDesign& design) {
  if (design.n <= 0) throw ConfigError("run_design: n must be positive");
  if (design.nsim <= 0) throw ConfigError("run_design: nsim must be positive");
  if (design.draws < 2) throw ConfigError("run_design: needs >= 2 draws");
  if (!(design.level > 0.0 && design.level < 1.0))
    throw ConfigError("run_design: level must lie in (0,1)");
  if (!(0.0 < design.prob_lo && design.prob_lo < design.prob_hi &&
        design.prob_hi < 1.0))
    throw ConfigError("run_design: bad probability range");

  // Population distribution functions and the outcome grid.
  std::vector<double> cutoffs = design.cutoffs;
  std::vector<double> points, pop0v, pop1v;
  std::optional<double> domain_sup;
  if (design.family == SimDesign::Family::PoissonCounts) {
    if (!(design.lambda0 > 0.0) || !(design.lambda1 > 0.0))
      throw ConfigError("run_design: rates must be positive");
    int ymax = 0;
    while (!(poisson_cdf(design.lambda0, ymax) > 0.999 &&
             poisson_cdf(design.lambda1, ymax) > 0.999))
      ++ymax;
    for (int y = 0; y <= ymax; ++y) {
      points.push_back(y);
      pop0v.push_back(std::min(1.0, poisson_cdf(design.lambda0, y)));
      pop1v.push_back(std::min(1.0, poisson_cdf(design.lambda1, y)));
    }
    domain_sup = std::numeric_limits<double>::infinity();
  } else {
    if (cutoffs.empty()) cutoffs = default_ordered_cutoffs();
    const int c = static_cast<int>(cutoffs.size());
    for (int v = 0; v <= c; ++v) {
      points.push_back(v);
      pop0v.push_back(v < c ? norm_cdf(cutoffs[v] - design.mu0) : 1.0);
      pop1v.push_back(v < c ? norm_cdf(cutoffs[v] - design.mu1) : 1.0);
    }
  }
  const Grid grid(points, domain_sup);
  const MonotoneStepFn pop0(grid, pop0v);
  const MonotoneStepFn pop1(grid, pop1v);
  const ProbGrid comp_grid =
      ProbGrid::regular(design.prob_lo, design.prob_hi, design.prob_step);

  const int n = design.n;
  std::vector<RepOutcome> reps(design.nsim);

  parallel_for(static_cast<std::size_t>(design.nsim), design.threads,
               [&](std::size_t r) {
    RngStream g0(design.seed, r * kPurposes + kSample0);
    RngStream g1(design.seed, r * kPurposes + kSample1);
    std::vector<int> y0, y1;
    if (design.family == SimDesign::Family::PoissonCounts) {
      y0 = gen_poisson(design.lambda0, n, g0);
      y1 = gen_poisson(design.lambda1, n, g1);
    } else {
      y0 = gen_ordered(design.mu0, cutoffs, n, g0);
      y1 = gen_ordered(design.mu1, cutoffs, n, g1);
    }
    const std::vector<double> yd0 = to_double(y0);
    const std::vector<double> yd1 = to_double(y1);
    const MonotoneStepFn f0 = edf(yd0, {}, grid);
    const MonotoneStepFn f1 = edf(yd1, {}, grid);

    BootstrapConfig cfg;
    cfg.scheme = design.scheme;
    cfg.draws = design.draws;
    cfg.master_seed = RngStream(design.seed, r * kPurposes + kBootSeed).next_u64();

    const EstimatorFn estimator =
        [&](const std::vector<double>& w) -> std::vector<MonotoneStepFn> {
      std::vector<double> w0(w.begin(), w.begin() + n);
      std::vector<double> w1(w.begin() + n, w.end());
      return {edf(yd0, w0, grid), edf(yd1, w1, grid)};
    };
    const BootstrapDraws draws =
        bootstrap_dfs(estimator, 2 * static_cast<std::size_t>(n), {}, 2, grid,
                      cfg, 1);

    const double lo = design.prob_lo, hi = design.prob_hi;
    const SortedSample ss0(yd0), ss1(yd1);
    const std::pair<double, double> win0{ss0.quantile(lo), ss0.quantile(hi)};
    const std::pair<double, double> win1{ss1.quantile(lo), ss1.quantile(hi)};
    const WindowBands joint =
        windowed_bands(grid, {&f0, &f1}, {win0, win1}, draws, design.level);
    const WindowBands single0 =
        windowed_bands(grid, {&f0}, {win0}, draws.slice(0), design.level);
    const WindowBands single1 =
        windowed_bands(grid, {&f1}, {win1}, draws.slice(1), design.level);

    RepOutcome& out = reps[r];
    out.cov_s0 = qf_covered(single0.bands[0], pop0, lo, hi);
    out.cov_s1 = qf_covered(single1.bands[0], pop1, lo, hi);
    const bool j0 = qf_covered(joint.bands[0], pop0, lo, hi);
    const bool j1 = qf_covered(joint.bands[1], pop1, lo, hi);
    out.cov_qe = qe_covered(joint.bands[0], joint.bands[1], pop0, pop1, lo, hi);
    out.cov_all = j0 && j1 && out.cov_qe;
    out.reject = qe_rejects_zero(joint.bands[0], joint.bands[1], lo, hi);
    out.len = qe_average_length(joint.bands[0], joint.bands[1], lo, hi);

    if (!design.competitors) return;

    auto pop_qe = [&](double a) {
      return pop1.left_inverse(a) - pop0.left_inverse(a);
    };

    const std::uint64_t comp_seed =
        RngStream(design.seed, r * kPurposes + kCompSeed).next_u64();
    const ConstantWidthInternal cw = constant_width_internal(
        yd0, yd1, design.draws, design.level, comp_grid, design.scheme,
        comp_seed);
    // Constant-width coverage is exact over the range: the raw QE and the
    // population QE only change values at EDF/population jump levels.
    bool ok = true;
    for (double a :
         closure_levels({&f0, &f1, &pop0, &pop1}, design.prob_lo, design.prob_hi)) {
      const double center = ss1.quantile(a) - ss0.quantile(a);
      if (std::fabs(pop_qe(a) - center) > cw.c) {
        ok = false;
        break;
      }
    }
    out.boot_cov = ok;
    out.boot_len = 2.0 * cw.c;
    out.zero_frac = cw.zero_se_fraction;

    RngStream noise(design.seed, r * kPurposes + kJitterNoise);
    std::vector<double> u0(yd0.size()), u1(yd1.size());
    for (double& u : u0) u = noise.uniform01();
    for (double& u : u1) u = noise.uniform01();
    const std::uint64_t jit_seed =
        RngStream(design.seed, r * kPurposes + kJitterSeed).next_u64();
    const JitterInternal jit =
        jitter_internal(yd0, yd1, u0, u1, design.draws, design.level, comp_grid,
                        design.scheme, jit_seed);
    bool ok1 = true, ok2 = true;
    for (std::size_t a = 0; a < comp_grid.size(); ++a) {
      const double truth = pop_qe(comp_grid.level(a));
      if (std::fabs(truth - jit.center_smoothed[a]) > jit.halfwidth[a])
        ok1 = false;
      if (std::fabs(truth - jit.center_raw[a]) > jit.halfwidth[a]) ok2 = false;
      if (!ok1 && !ok2) break;
    }
    out.jit1_cov = ok1;
    out.jit2_cov = ok2;
    out.jit_len = jit.avg_length;
  });

  SimReport rep;
  rep.design = design;
  rep.design.cutoffs = cutoffs;
  rep.grid_points = points;
  const int m = design.nsim;
  double s0 = 0, s1 = 0, all = 0, qe = 0, rej = 0, len = 0, len2 = 0;
  double bc = 0, bl = 0, bl2 = 0, j1c = 0, j2c = 0, jl = 0, jl2 = 0, zf = 0;
  for (const RepOutcome& o : reps) {
    s0 += o.cov_s0;
    s1 += o.cov_s1;
    all += o.cov_all;
    qe += o.cov_qe;
    rej += o.reject;
    len += o.len;
    len2 += o.len * o.len;
    bc += o.boot_cov;
    bl += o.boot_len;
    bl2 += o.boot_len * o.boot_len;
    j1c += o.jit1_cov;
    j2c += o.jit2_cov;
    jl += o.jit_len;
    jl2 += o.jit_len * o.jit_len;
    zf += o.zero_frac;
  }
  auto mean_se = [m](double sum, double sumsq, double* se) {
    const double mean = sum / m;
    const double var = std::max(0.0, sumsq / m - mean * mean);
    *se = std::sqrt(var / m);
    return mean;
  };
  rep.cov_single0 = s0 / m;
  rep.cov_single0_se = rate_se(rep.cov_single0, m);
  rep.cov_single1 = s1 / m;
  rep.cov_single1_se = rate_se(rep.cov_single1, m);
  rep.cov_joint_all = all / m;
  rep.cov_joint_all_se = rate_se(rep.cov_joint_all, m);
  rep.cov_qe = qe / m;
  rep.cov_qe_se = rate_se(rep.cov_qe, m);
  rep.reject_rate = rej / m;
  rep.reject_rate_se = rate_se(rep.reject_rate, m);
  rep.len_new = mean_se(len, len2, &rep.len_new_se);
  if (design.competitors) {
    rep.boot.coverage = bc / m;
    rep.boot.coverage_se = rate_se(rep.boot.coverage, m);
    rep.boot.avg_length = mean_se(bl, bl2, &rep.boot.avg_length_se);
    rep.jitter1.coverage = j1c / m;
    rep.jitter1.coverage_se = rate_se(rep.jitter1.coverage, m);
    rep.jitter1.avg_length = mean_se(jl, jl2, &rep.jitter1.avg_length_se);
    rep.jitter2.coverage = j2c / m;
    rep.jitter2.coverage_se = rate_se(rep.jitter2.coverage, m);
    rep.jitter2.avg_length = rep.jitter1.avg_length;
    rep.jitter2.avg_length_se = rep.jitter1.avg_length_se;
    rep.direct_zero_se_fraction = zf / m;
  }
  return rep;
}

}  // namespace quantband
