#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "quantband/core.hpp"
#include "quantband/errors.hpp"
#include "quantband/rng.hpp"

using namespace quantband;

namespace {

// Random step function on an integer grid with values drawn from the
// lattice {0, 1/m, ..., 1}: exact arithmetic, so inverse identities can be
// checked without tolerances.
MonotoneStepFn random_lattice_fn(RngStream& rng, int max_size, int m,
                                 bool unbounded_domain) {
  const int T = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_size)));
  std::vector<double> pts(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) pts[static_cast<std::size_t>(t)] = t;
  std::vector<double> vals(static_cast<std::size_t>(T));
  int cur = static_cast<int>(rng.below(static_cast<std::uint64_t>(m + 1)));
  for (int t = 0; t < T; ++t) {
    cur = std::min(m, cur + static_cast<int>(rng.below(3)));
    vals[static_cast<std::size_t>(t)] = static_cast<double>(cur) / m;
  }
  std::optional<double> sup;
  if (unbounded_domain) sup = std::numeric_limits<double>::infinity();
  return MonotoneStepFn(Grid(std::move(pts), sup), std::move(vals));
}

}  // namespace

TEST_CASE("grid construction validates its input") {
  CHECK_THROWS_AS(Grid({}), ConfigError);
  CHECK_THROWS_AS(Grid({0.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(Grid({1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(Grid({0.0, std::nan("")}), ConfigError);
  CHECK_THROWS_AS(Grid({0.0, std::numeric_limits<double>::infinity()}),
                  ConfigError);
  CHECK_THROWS_AS(Grid({0.0, 2.0}, 1.0), ConfigError);
  const Grid g({0.0, 2.0});
  CHECK(g.domain_sup() == 2.0);
  const Grid gu({0.0, 2.0}, std::numeric_limits<double>::infinity());
  CHECK(std::isinf(gu.domain_sup()));
}

TEST_CASE("step function construction validates monotonicity and range") {
  const Grid g({0.0, 1.0, 2.0});
  CHECK_THROWS_AS(MonotoneStepFn(g, {0.1, 0.2}), ConfigError);
  CHECK_THROWS_AS(MonotoneStepFn(g, {0.3, 0.2, 0.5}), ConfigError);
  CHECK_THROWS_AS(MonotoneStepFn(g, {-0.1, 0.2, 0.5}), ConfigError);
  CHECK_THROWS_AS(MonotoneStepFn(g, {0.1, 0.2, 1.5}), ConfigError);
  CHECK_NOTHROW(MonotoneStepFn(g, {0.0, 0.0, 1.0}));
}

TEST_CASE("step evaluation on a small example") {
  const MonotoneStepFn f(Grid({0.0, 1.0, 2.0}), {0.4, 0.7, 1.0});
  CHECK(f(-3.0) == 0.4);  // clamped below the grid
  CHECK(f(0.0) == 0.4);
  CHECK(f(0.5) == 0.4);
  CHECK(f(1.0) == 0.7);
  CHECK(f(1.999) == 0.7);
  CHECK(f(2.0) == 1.0);
  CHECK(f(10.0) == 1.0);
}

TEST_CASE("left inverse on a small example") {
  const MonotoneStepFn f(Grid({0.0, 1.0, 2.0}), {0.4, 0.7, 1.0});
  CHECK(f.left_inverse(0.0) == 0.0);
  CHECK(f.left_inverse(0.4) == 0.0);
  CHECK(f.left_inverse(0.41) == 1.0);
  CHECK(f.left_inverse(0.5) == 1.0);
  CHECK(f.left_inverse(0.7) == 1.0);
  CHECK(f.left_inverse(0.71) == 2.0);
  CHECK(f.left_inverse(1.0) == 2.0);
  CHECK_THROWS_AS(f.left_inverse(-0.01), ConfigError);
  CHECK_THROWS_AS(f.left_inverse(1.01), ConfigError);
}

TEST_CASE("left inverse falls back to the domain supremum") {
  const MonotoneStepFn f(Grid({0.0, 1.0}), {0.4, 0.7});
  CHECK(f.left_inverse(0.9) == 1.0);  // default sup = largest point
  const MonotoneStepFn fu(
      Grid({0.0, 1.0}, std::numeric_limits<double>::infinity()), {0.4, 0.7});
  CHECK(std::isinf(fu.left_inverse(0.9)));
  CHECK(fu.left_inverse(0.7) == 1.0);
}

TEST_CASE("degenerate function at one point") {
  const MonotoneStepFn g(Grid({5.0}), {1.0});
  CHECK(g.left_inverse(0.0) == 5.0);
  CHECK(g.left_inverse(1.0) == 5.0);
  CHECK(g.right_inverse(5.0) == 1.0);
  CHECK(g.right_inverse(4.9) == 0.0);
}

TEST_CASE("inverse pair forms a Galois connection") {
  // F^-(a) <= y  iff  F(y) >= a, for every grid point y and lattice level
  // a up to sup F; above sup F the inverse is the domain-supremum
  // fallback (never <= y on unbounded domains, always the top point on
  // bounded ones).  Checked exactly on 400 random lattice step functions.
  RngStream rng(99, 0);
  int checked = 0;
  for (int rep = 0; rep < 400; ++rep) {
    const bool unbounded = rng.below(2) == 1;
    const MonotoneStepFn f = random_lattice_fn(rng, 12, 10, unbounded);
    for (int ai = 0; ai <= 10; ++ai) {
      const double a = ai / 10.0;
      const double ly = f.left_inverse(a);
      if (a > f.sup()) {
        REQUIRE(ly == f.grid().domain_sup());
        continue;
      }
      for (std::size_t t = 0; t < f.size(); ++t) {
        const double y = f.grid().point(t);
        const bool lhs = ly <= y;
        const bool rhs = f(y) >= a;
        REQUIRE(lhs == rhs);
        ++checked;
      }
    }
  }
  CHECK(checked > 10000);
}

TEST_CASE("right inverse recovers the function at grid points") {
  // Exact at every interior point; at the top point of a bounded domain
  // the level-one fallback makes the right inverse 1 even for improper
  // functions, so equality there needs sup F == 1.
  RngStream rng(100, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const MonotoneStepFn f = random_lattice_fn(rng, 12, 10, false);
    const std::size_t top = f.size() - 1;
    for (std::size_t t = 0; t < top; ++t)
      REQUIRE(f.right_inverse(f.grid().point(t)) == f.value(t));
    if (f.sup() == 1.0)
      REQUIRE(f.right_inverse(f.grid().point(top)) == f.value(top));
    else
      REQUIRE(f.right_inverse(f.grid().point(top)) == 1.0);
    REQUIRE(f.right_inverse(f.grid().point(0) - 1.0) == 0.0);
  }
}

TEST_CASE("band construction and coverage predicate") {
  const Grid g({0.0, 1.0, 2.0});
  const MonotoneStepFn lo(g, {0.2, 0.5, 0.9});
  const MonotoneStepFn hi(g, {0.6, 0.9, 1.0});
  const DFBand band(lo, hi, 0.95);
  CHECK(covers(band, MonotoneStepFn(g, {0.4, 0.7, 1.0})));
  CHECK(covers(band, lo));
  CHECK(covers(band, hi));
  CHECK_FALSE(covers(band, MonotoneStepFn(g, {0.1, 0.7, 1.0})));
  CHECK_FALSE(covers(band, MonotoneStepFn(g, {0.2, 0.95, 1.0})));
  CHECK_THROWS_AS(covers(band, MonotoneStepFn(Grid({0.0, 1.0}), {0.3, 0.8})),
                  ConfigError);
  CHECK_THROWS_AS(DFBand(hi, lo, 0.95), ConfigError);
  CHECK_THROWS_AS(DFBand(lo, MonotoneStepFn(Grid({0.0, 1.0}), {0.6, 0.9}), 0.95),
                  ConfigError);
}

TEST_CASE("probability grids validate and build regular ranges") {
  CHECK_THROWS_AS(ProbGrid({}), ConfigError);
  CHECK_THROWS_AS(ProbGrid({0.0, 0.5}), ConfigError);
  CHECK_THROWS_AS(ProbGrid({0.5, 1.0}), ConfigError);
  CHECK_THROWS_AS(ProbGrid({0.5, 0.5}), ConfigError);
  const ProbGrid d = ProbGrid::default_grid();
  CHECK(d.size() == 99);
  CHECK(d.level(0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(d.level(98) == doctest::Approx(0.99).epsilon(1e-15));
  const ProbGrid r = ProbGrid::regular(0.1, 0.9, 0.01);
  CHECK(r.size() == 81);
  CHECK(r.level(0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(r.level(80) == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("merging keeps the level range and deduplicates") {
  const ProbGrid r = ProbGrid::regular(0.2, 0.8, 0.1);
  const ProbGrid m = r.merged({0.25, 0.05, 0.95, 0.2, 0.8, 0.33});
  CHECK(m.levels().front() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(m.levels().back() == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(m.size() == r.size() + 2);  // 0.25 and 0.33 added, rest dropped
  for (std::size_t i = 1; i < m.size(); ++i)
    CHECK(m.level(i - 1) < m.level(i));
}
