#include <cmath>
#include <vector>

#include "doctest.h"
#include "quantband/core.hpp"
#include "quantband/rng.hpp"
#include "quantband/simlab.hpp"
#include "quantband/special.hpp"

using namespace quantband;

TEST_CASE("ordered-category cutoffs hit the target masses") {
  const auto cuts = default_ordered_cutoffs();
  REQUIRE(cuts.size() == 5);
  const std::vector<double> cum = {0.10, 0.26, 0.50, 0.74, 0.90};
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    CHECK(norm_cdf(cuts[i]) == doctest::Approx(cum[i]).epsilon(1e-12));
    if (i > 0) CHECK(cuts[i - 1] < cuts[i]);
  }
  CHECK(cuts[2] == 0.0);  // the median cut
}

TEST_CASE("synthetic samplers: support, moments, determinism") {
  {
    RngStream r1(7, 0), r2(7, 0);
    const auto a = gen_poisson(2.5, 5000, r1);
    CHECK(gen_poisson(2.5, 5000, r2) == a);
    double mean = 0.0;
    for (int v : a) {
      REQUIRE(v >= 0);
      mean += v;
    }
    CHECK(mean / 5000.0 == doctest::Approx(2.5).epsilon(0.03));
  }
  {
    RngStream r(8, 0);
    const auto cuts = default_ordered_cutoffs();
    const auto y = gen_ordered(0.0, cuts, 20000, r);
    std::vector<int> counts(6, 0);
    for (int v : y) {
      REQUIRE(v >= 0);
      REQUIRE(v <= 5);
      ++counts[v];
    }
    const std::vector<double> mass = {0.10, 0.16, 0.24, 0.24, 0.16, 0.10};
    for (int k = 0; k < 6; ++k)
      CHECK(counts[k] / 20000.0 == doctest::Approx(mass[k]).epsilon(0.12));
  }
  RngStream r(9, 0);
  CHECK_THROWS(gen_poisson(2.0, 0, r));
  CHECK_THROWS(gen_ordered(0.0, {}, 5, r));
  CHECK_THROWS(gen_ordered(0.0, {1.0, -1.0}, 5, r));
}

TEST_CASE("constant-width competitor band") {
  const std::vector<int> y0 = {0, 1, 1, 2, 2, 3, 3, 4, 5, 6, 2, 1, 3, 2, 4,
                               0, 1, 2, 3, 2, 5, 1, 2, 3, 4, 2, 1, 0, 3, 2};
  const std::vector<int> y1 = {1, 2, 2, 3, 3, 4, 4, 5, 6, 7, 3, 2, 4, 3, 5,
                               1, 2, 3, 4, 3, 6, 2, 3, 4, 5, 3, 2, 1, 4, 3};
  const ProbGrid grid = ProbGrid::regular(0.1, 0.9, 0.05);
  const auto band =
      competitor_constant_width(y0, y1, 80, 0.9, grid,
                                BootstrapScheme::Exponential, 11);
  CHECK(band.halfwidth > 0.0);
  CHECK(band.zero_se_fraction >= 0.0);
  CHECK(band.zero_se_fraction <= 1.0);
  // Integer-valued outcomes leave many levels with zero bootstrap spread:
  // the reason the direct studentized version is not computable.
  CHECK(band.zero_se_fraction > 0.2);
  REQUIRE(band.band.lo.size() == grid.size());
  for (std::size_t a = 0; a < grid.size(); ++a) {
    CHECK(band.band.hi[a] - band.band.lo[a] ==
          doctest::Approx(2.0 * band.halfwidth).epsilon(1e-12));
    CHECK(std::isfinite(band.band.lo[a]));
  }
  // Same seed, same band.
  const auto again =
      competitor_constant_width(y0, y1, 80, 0.9, grid,
                                BootstrapScheme::Exponential, 11);
  CHECK(again.band.lo == band.band.lo);
  CHECK(again.halfwidth == band.halfwidth);
}

TEST_CASE("jitter competitor: two centers, one width profile") {
  const std::vector<int> y0 = {0, 1, 1, 2, 2, 3, 3, 4, 5, 6, 2, 1, 3, 2, 4,
                               0, 1, 2, 3, 2, 5, 1, 2, 3, 4, 2, 1, 0, 3, 2};
  const std::vector<int> y1 = {1, 2, 2, 3, 3, 4, 4, 5, 6, 7, 3, 2, 4, 3, 5,
                               1, 2, 3, 4, 3, 6, 2, 3, 4, 5, 3, 2, 1, 4, 3};
  const ProbGrid grid = ProbGrid::regular(0.1, 0.9, 0.05);
  const auto smoothed = competitor_jitter(
      y0, y1, 80, 0.9, JitterCenter::Smoothed, grid,
      BootstrapScheme::Exponential, 11);
  const auto raw = competitor_jitter(
      y0, y1, 80, 0.9, JitterCenter::Raw, grid,
      BootstrapScheme::Exponential, 11);
  CHECK(smoothed.critical > 0.0);
  CHECK(smoothed.critical == raw.critical);
  CHECK(smoothed.avg_length == raw.avg_length);
  bool centers_differ = false;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double w_s = smoothed.band.hi[a] - smoothed.band.lo[a];
    const double w_r = raw.band.hi[a] - raw.band.lo[a];
    CHECK(w_s == doctest::Approx(w_r).epsilon(1e-12));
    if (std::fabs(smoothed.band.lo[a] - raw.band.lo[a]) > 1e-12)
      centers_differ = true;
  }
  CHECK(centers_differ);
  double mean_w = 0.0;
  for (std::size_t a = 0; a < grid.size(); ++a)
    mean_w += smoothed.band.hi[a] - smoothed.band.lo[a];
  mean_w /= static_cast<double>(grid.size());
  CHECK(smoothed.avg_length == doctest::Approx(mean_w).epsilon(1e-12));
}

namespace {

SimDesign tiny_poisson_design() {
  SimDesign d;
  d.family = SimDesign::Family::PoissonCounts;
  d.lambda0 = 3.0;
  d.lambda1 = 3.0;
  d.n = 60;
  d.level = 0.9;
  d.nsim = 6;
  d.draws = 60;
  d.seed = 21;
  return d;
}

}  // namespace

TEST_CASE("replication study smoke: rates, grid, determinism") {
  SimDesign d = tiny_poisson_design();
  d.competitors = true;
  const SimReport rep = run_design(d);
  CHECK_FALSE(rep.grid_points.empty());
  for (double r : {rep.cov_single0, rep.cov_single1, rep.cov_joint_all,
                   rep.cov_qe, rep.reject_rate, rep.boot.coverage,
                   rep.jitter1.coverage, rep.jitter2.coverage}) {
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
  CHECK(rep.len_new > 0.0);
  CHECK(rep.boot.avg_length > 0.0);
  CHECK(rep.jitter1.avg_length > 0.0);
  CHECK(rep.jitter2.avg_length == rep.jitter1.avg_length);
  CHECK(rep.direct_zero_se_fraction > 0.0);
  // Multiples of 1/nsim: every rate is a Monte Carlo frequency.
  for (double r : {rep.cov_single0, rep.cov_joint_all, rep.reject_rate}) {
    const double scaled = r * d.nsim;
    CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-9));
  }

  const SimReport again = run_design(d);
  CHECK(again.cov_single0 == rep.cov_single0);
  CHECK(again.cov_joint_all == rep.cov_joint_all);
  CHECK(again.len_new == rep.len_new);
  CHECK(again.boot.avg_length == rep.boot.avg_length);

  SimDesign threaded = d;
  threaded.threads = 3;
  const SimReport par = run_design(threaded);
  CHECK(par.cov_single0 == rep.cov_single0);
  CHECK(par.cov_qe == rep.cov_qe);
  CHECK(par.len_new == rep.len_new);
  CHECK(par.jitter2.coverage == rep.jitter2.coverage);
}

TEST_CASE("replication study smoke: ordered family") {
  SimDesign d;
  d.family = SimDesign::Family::OrderedLatent;
  d.mu0 = 0.0;
  d.mu1 = 0.3;
  d.n = 60;
  d.level = 0.9;
  d.nsim = 4;
  d.draws = 60;
  d.seed = 22;
  const SimReport rep = run_design(d);
  CHECK(rep.cov_single0 >= 0.0);
  CHECK(rep.cov_single0 <= 1.0);
  CHECK(rep.len_new > 0.0);
  // Ordered outcomes live on {0,...,5}; the evaluation lattice must too.
  for (double g : rep.grid_points) {
    CHECK(g >= 0.0);
    CHECK(g <= 5.0);
  }
}
