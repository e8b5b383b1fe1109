#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "quantband/errors.hpp"
#include "quantband/estimate.hpp"
#include "quantband/resample.hpp"

using namespace quantband;

namespace {

BootstrapConfig cfg_of(BootstrapScheme s, int draws, std::uint64_t seed,
                       bool cluster_level = true) {
  BootstrapConfig cfg;
  cfg.scheme = s;
  cfg.draws = draws;
  cfg.master_seed = seed;
  cfg.cluster_level = cluster_level;
  return cfg;
}

}  // namespace

TEST_CASE("scheme names round trip") {
  CHECK(scheme_from_string("multinomial") == BootstrapScheme::Multinomial);
  CHECK(scheme_from_string("exponential") == BootstrapScheme::Exponential);
  CHECK(scheme_to_string(BootstrapScheme::Multinomial) == "multinomial");
  CHECK(scheme_to_string(BootstrapScheme::Exponential) == "exponential");
  CHECK_THROWS_AS(scheme_from_string("wild"), ConfigError);
}

TEST_CASE("multinomial weights are resampling counts") {
  const auto cfg = cfg_of(BootstrapScheme::Multinomial, 50, 7);
  for (int b = 0; b < 50; ++b) {
    const auto w = draw_weights(cfg, 37, {}, b);
    REQUIRE(w.size() == 37);
    double sum = 0.0;
    for (double x : w) {
      REQUIRE(x >= 0.0);
      REQUIRE(x == std::floor(x));
      sum += x;
    }
    REQUIRE(sum == 37.0);
  }
}

TEST_CASE("exponential weights are positive with unit mean overall") {
  const auto cfg = cfg_of(BootstrapScheme::Exponential, 200, 8);
  double sum = 0.0;
  for (int b = 0; b < 200; ++b) {
    const auto w = draw_weights(cfg, 25, {}, b);
    for (double x : w) {
      REQUIRE(x > 0.0);
      sum += x;
    }
  }
  CHECK(sum / (200.0 * 25.0) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("weights are a pure function of seed and draw index") {
  const auto cfg = cfg_of(BootstrapScheme::Exponential, 10, 99);
  const auto w3 = draw_weights(cfg, 20, {}, 3);
  const auto w5 = draw_weights(cfg, 20, {}, 5);
  CHECK(draw_weights(cfg, 20, {}, 3) == w3);  // call order is irrelevant
  CHECK(w3 != w5);
  const auto other = cfg_of(BootstrapScheme::Exponential, 10, 100);
  CHECK(draw_weights(other, 20, {}, 3) != w3);
}

TEST_CASE("clustered draws share one weight per cluster") {
  const std::vector<int> clusters = {4, 4, 9, 9, 9, 2, 2, 11};
  for (auto scheme :
       {BootstrapScheme::Multinomial, BootstrapScheme::Exponential}) {
    const auto cfg = cfg_of(scheme, 30, 5);
    for (int b = 0; b < 30; ++b) {
      const auto w = draw_weights(cfg, clusters.size(), clusters, b);
      REQUIRE(w[0] == w[1]);
      REQUIRE(w[2] == w[3]);
      REQUIRE(w[3] == w[4]);
      REQUIRE(w[5] == w[6]);
      if (scheme == BootstrapScheme::Multinomial) {
        // Four clusters are resampled four times in total.
        REQUIRE(w[0] + w[2] + w[5] + w[7] == 4.0);
      }
    }
  }
  // Disabling cluster-level draws falls back to row-level weights.
  const auto flat = cfg_of(BootstrapScheme::Exponential, 5, 5, false);
  const auto w = draw_weights(flat, clusters.size(), clusters, 0);
  CHECK(w[0] != w[1]);
}

TEST_CASE("weight drawing validates its input") {
  const auto cfg = cfg_of(BootstrapScheme::Exponential, 10, 1);
  CHECK_THROWS_AS(draw_weights(cfg, 0, {}, 0), DataError);
  CHECK_THROWS_AS(draw_weights(cfg, 5, {}, 10), ConfigError);
  CHECK_THROWS_AS(draw_weights(cfg, 5, {}, -1), ConfigError);
  CHECK_THROWS_AS(draw_weights(cfg, 5, {1, 2}, 0), DataError);
}

TEST_CASE("bootstrap replicate store and slicing") {
  const Grid g({0.0, 1.0, 2.0});
  const std::vector<double> y = {0, 0, 1, 1, 1, 2, 2, 0, 1, 2};
  EstimatorFn est = [&](const std::vector<double>& w) {
    return std::vector<MonotoneStepFn>{edf(y, w, g), edf(y, w, g)};
  };
  const auto cfg = cfg_of(BootstrapScheme::Exponential, 40, 123);
  const BootstrapDraws draws = bootstrap_dfs(est, y.size(), {}, 2, g, cfg, 1);
  REQUIRE(draws.draws() == 40);
  REQUIRE(draws.k() == 2);

  for (int b = 0; b < draws.draws(); ++b)
    for (int k = 0; k < 2; ++k)
      for (std::size_t t = 0; t < g.size(); ++t) {
        const double v = draws.at(b, k, static_cast<int>(t));
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        if (t > 0) REQUIRE(v >= draws.at(b, k, static_cast<int>(t) - 1));
        // Both components got the same weights, so they are identical.
        REQUIRE(draws.at(b, 0, static_cast<int>(t)) ==
                draws.at(b, 1, static_cast<int>(t)));
        // Everything at or past the sample maximum is exactly one.
        REQUIRE(draws.at(b, k, 2) == 1.0);
      }

  const auto s = draws.series(0, 1);
  REQUIRE(s.size() == 40);
  for (int b = 0; b < 40; ++b) REQUIRE(s[b] == draws.at(b, 0, 1));

  const BootstrapDraws one = draws.slice(1);
  REQUIRE(one.k() == 1);
  for (int b = 0; b < 40; ++b)
    for (int t = 0; t < 3; ++t)
      REQUIRE(one.at(b, 0, t) == draws.at(b, 1, t));
}

TEST_CASE("replicates are identical for every thread count") {
  const Grid g({0.0, 1.0, 2.0, 3.0});
  const std::vector<double> y = {0, 1, 1, 2, 3, 3, 2, 1, 0, 2, 3, 1};
  EstimatorFn est = [&](const std::vector<double>& w) {
    return std::vector<MonotoneStepFn>{edf(y, w, g)};
  };
  const auto cfg = cfg_of(BootstrapScheme::Multinomial, 64, 2024);
  const auto a = bootstrap_dfs(est, y.size(), {}, 1, g, cfg, 1);
  const auto b = bootstrap_dfs(est, y.size(), {}, 1, g, cfg, 3);
  for (int d = 0; d < 64; ++d)
    for (int t = 0; t < 4; ++t)
      REQUIRE(a.at(d, 0, t) == b.at(d, 0, t));
}

TEST_CASE("estimator failures carry the draw index") {
  const Grid g({0.0, 1.0});
  EstimatorFn bad = [&](const std::vector<double>&) -> std::vector<MonotoneStepFn> {
    throw DataError("synthetic failure");
  };
  const auto cfg = cfg_of(BootstrapScheme::Exponential, 4, 1);
  CHECK_THROWS_WITH_AS(bootstrap_dfs(bad, 5, {}, 1, g, cfg, 1),
                       doctest::Contains("bootstrap draw"), NumericError);

  EstimatorFn wrong_k = [&](const std::vector<double>& w) {
    return std::vector<MonotoneStepFn>{edf({0, 1}, {w[0], w[1]}, g),
                                       edf({0, 1}, {w[0], w[1]}, g)};
  };
  CHECK_THROWS_AS(bootstrap_dfs(wrong_k, 5, {}, 1, g, cfg, 1), NumericError);

  EstimatorFn wrong_grid = [&](const std::vector<double>&) {
    return std::vector<MonotoneStepFn>{edf({0, 1}, {}, Grid({0.0, 5.0}))};
  };
  CHECK_THROWS_AS(bootstrap_dfs(wrong_grid, 5, {}, 1, g, cfg, 1), NumericError);
}
