#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "quantband/errors.hpp"
#include "quantband/estimate.hpp"
#include "quantband/special.hpp"

using namespace quantband;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Eigen::VectorXd ones(Eigen::Index n) { return Eigen::VectorXd::Ones(n); }

Eigen::MatrixXd intercept_design(Eigen::Index n) {
  return Eigen::MatrixXd::Ones(n, 1);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

TEST_CASE("empirical distribution function basics") {
  const Grid g({0.0, 1.0, 2.0, 3.0});
  {
    const auto f = edf({0, 1, 1, 3}, {}, g);
    CHECK(f.values() == std::vector<double>{0.25, 0.75, 0.75, 1.0});
  }
  {
    const auto f = edf({0, 1, 1, 3}, {2, 1, 1, 0}, g);
    CHECK(f.values() == std::vector<double>{0.5, 1.0, 1.0, 1.0});
  }
  {
    // Values beyond the top grid point stay in the denominator.
    const auto f = edf({0, 1, 1, 3}, {}, Grid({0.0, 1.0}));
    CHECK(f.values() == std::vector<double>{0.25, 0.75});
  }
  {
    // Mass strictly between grid points attaches to the next point up,
    // and mass below the first point attaches to the first.
    const auto f = edf({-0.5, 0.5, 1.5, 2.0}, {}, g);
    CHECK(f.values() == std::vector<double>{0.25, 0.5, 1.0, 1.0});
  }
  CHECK_THROWS_AS(edf({}, {}, g), DataError);
  CHECK_THROWS_AS(edf({0, 1}, {0, 0}, g), DataError);
  CHECK_THROWS_AS(edf({0, 1}, {1, 1, 1}, g), DataError);
}

TEST_CASE("edf reaches exactly one when no mass lies beyond the grid") {
  // The weights sum inexactly in floating point; the top value must still
  // be bitwise 1.0 because the degenerate-point exclusion compares there.
  const Grid g({0.0, 1.0, 2.0});
  const auto f =
      edf({0, 1, 2, 1, 0, 2, 1}, {0.1, 0.2, 0.3, 0.4, 0.1, 0.2, 0.3}, g);
  CHECK(f.value(2) == 1.0);
}

TEST_CASE("intercept-only binary fits invert the weighted mean") {
  const Eigen::VectorXd z = vec({1, 1, 1, 0});
  const Eigen::MatrixXd X = intercept_design(4);
  {
    const auto fit = fit_binary(z, X, ones(4), LinkFunction::logit());
    CHECK(fit.beta[0] == doctest::Approx(std::log(3.0)).epsilon(1e-9));
    CHECK_FALSE(fit.separation);
  }
  {
    const auto fit = fit_binary(vec({0, 1}), intercept_design(2), vec({1, 3}),
                                LinkFunction::logit());
    CHECK(fit.beta[0] == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  }
  {
    const auto fit = fit_binary(vec({1, 0, 1, 0}), intercept_design(4), ones(4),
                                LinkFunction::probit());
    CHECK(fit.beta[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  }
  {
    const auto fit = fit_binary(z, X, ones(4), LinkFunction::probit());
    CHECK(fit.beta[0] == doctest::Approx(norm_inv(0.75)).epsilon(1e-9));
  }
  {
    // Identity link is fitted by weighted least squares.
    const auto fit = fit_binary(z, X, ones(4), LinkFunction::linear());
    CHECK(fit.beta[0] == doctest::Approx(0.75).epsilon(1e-12));
  }
}

TEST_CASE("two-cell logit fit matches the closed form") {
  // With a binary regressor the model is saturated: coefficients are the
  // within-cell log odds and their difference.
  Eigen::VectorXd z(8), x(8);
  z << 0, 0, 1, 1, 0, 1, 1, 1;
  x << 0, 0, 0, 0, 1, 1, 1, 1;
  Eigen::MatrixXd X(8, 2);
  X.col(0).setOnes();
  X.col(1) = x;
  const auto fit = fit_binary(z, X, ones(8), LinkFunction::logit());
  const double b0 = logit(0.5);
  const double b1 = logit(0.75) - b0;
  CHECK(fit.beta[0] == doctest::Approx(b0).scale(1.0).epsilon(1e-8));
  CHECK(fit.beta[1] == doctest::Approx(b1).epsilon(1e-7));
  CHECK_FALSE(fit.separation);
}

TEST_CASE("perfect separation is flagged, not fatal") {
  // Margin 0.5 on the link scale: the gradient stays above tolerance until
  // the coefficient cap engages, so the fit returns capped and flagged.
  Eigen::VectorXd z(4), x(4);
  z << 0, 0, 1, 1;
  x << -1.0, -0.5, 0.5, 1.0;
  Eigen::MatrixXd X(4, 2);
  X.col(0).setOnes();
  X.col(1) = x;
  const auto fit = fit_binary(z, X, ones(4), LinkFunction::logit());
  CHECK(fit.separation);
  CHECK(fit.beta.lpNorm<Eigen::Infinity>() == doctest::Approx(30.0));

  // Margin 1: the same separated pattern meets the gradient tolerance
  // below the cap and returns unflagged; predictions are still
  // numerically 0/1, which is all downstream code consumes.
  Eigen::VectorXd x2(4);
  x2 << -2, -1, 1, 2;
  Eigen::MatrixXd X2(4, 2);
  X2.col(0).setOnes();
  X2.col(1) = x2;
  const auto fit2 = fit_binary(z, X2, ones(4), LinkFunction::logit());
  CHECK_FALSE(fit2.separation);
  CHECK(fit2.beta.lpNorm<Eigen::Infinity>() < 30.0);
  const LinkFunction logit_link = LinkFunction::logit();
  CHECK(logit_link.prob(fit2.beta[0] + 2.0 * fit2.beta[1]) > 1.0 - 1e-6);
  CHECK(logit_link.prob(fit2.beta[0] - 2.0 * fit2.beta[1]) < 1e-6);
}

TEST_CASE("binary fit input validation") {
  CHECK_THROWS_AS(fit_binary(vec({0, 2}), intercept_design(2), ones(2),
                             LinkFunction::logit()),
                  DataError);
  CHECK_THROWS_AS(fit_binary(vec({0, 1}), intercept_design(2), vec({0, 0}),
                             LinkFunction::logit()),
                  DataError);
  CHECK_THROWS_AS(fit_binary(vec({0, 1}), intercept_design(3), ones(2),
                             LinkFunction::logit()),
                  DataError);
}

TEST_CASE("link functions: ranges, derivatives, inverses") {
  for (const LinkFunction lf :
       {LinkFunction::logit(), LinkFunction::probit(),
        LinkFunction::gamma_incomplete(2.0)}) {
    for (double u : {-4.0, -1.0, 0.0, 0.5, 2.0, 5.0}) {
      const double p = lf.prob(u);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      // Central finite difference vs the analytic derivative.
      const double h = 1e-6;
      const double num = (lf.prob(u + h) - lf.prob(u - h)) / (2.0 * h);
      CHECK(lf.dprob(u) == doctest::Approx(num).epsilon(1e-4).scale(1.0));
      CHECK(lf.inverse(p) == doctest::Approx(u).epsilon(1e-6).scale(1.0));
    }
  }
  // The count link is decreasing in the linear index.
  const LinkFunction gf = LinkFunction::gamma_incomplete(3.0);
  CHECK(gf.prob(0.0) > gf.prob(1.0));
  CHECK(gf.prob(0.0) == doctest::Approx(poisson_cdf(1.0, 3.0)).epsilon(1e-13));
  const LinkFunction lin = LinkFunction::linear();
  CHECK(lin.prob(-0.5) == 0.0);
  CHECK(lin.prob(0.25) == 0.25);
  CHECK(lin.prob(1.5) == 1.0);
}

TEST_CASE("design expansion: indicators, interactions, intercept") {
  Dataset data;
  data.outcome = {1, 2, 3, 4};
  Column xc;
  xc.name = "x";
  xc.values = {1.5, 2.0, -1.0, 0.0};
  Column cc;
  cc.name = "c";
  cc.categorical = true;
  cc.labels = {"a", "b", "c"};
  cc.values = {0, 1, 2, 1};
  data.covariates = {xc, cc};
  const std::vector<std::size_t> rows = {0, 1, 2, 3};

  DesignSpec spec;
  spec.columns = {"x", "c"};
  spec.interactions = {{"x", "c"}};
  std::vector<std::string> names;
  const Eigen::MatrixXd X = build_design(data, rows, spec, &names);
  REQUIRE(names == std::vector<std::string>{"(intercept)", "x", "c=b", "c=c",
                                            "x:c=b", "x:c=c"});
  REQUIRE(X.rows() == 4);
  REQUIRE(X.cols() == 6);
  CHECK(X(0, 0) == 1.0);
  CHECK(X(0, 1) == 1.5);
  CHECK(X(0, 2) == 0.0);  // level "a" is the dropped baseline
  CHECK(X(1, 2) == 1.0);
  CHECK(X(2, 3) == 1.0);
  CHECK(X(1, 4) == 2.0);  // x * 1{c=b}
  CHECK(X(2, 5) == -1.0);
  CHECK(X(3, 4) == 0.0);

  DesignSpec no_int;
  no_int.intercept = false;
  no_int.columns = {"x"};
  const Eigen::MatrixXd X2 = build_design(data, {1, 2}, no_int, nullptr);
  REQUIRE(X2.cols() == 1);
  CHECK(X2(0, 0) == 2.0);
  CHECK(X2(1, 0) == -1.0);

  DesignSpec missing;
  missing.columns = {"zzz"};
  CHECK_THROWS_AS(build_design(data, rows, missing, nullptr), DataError);
  DesignSpec bad_inter;
  bad_inter.columns = {"x"};
  bad_inter.interactions = {{"x", "c"}};
  CHECK_THROWS_AS(build_design(data, rows, bad_inter, nullptr), ConfigError);
}

TEST_CASE("intercept-only distribution regression reproduces the edf") {
  Dataset data;
  data.outcome = {0, 1, 1, 2, 3, 5};
  const Grid g({0.0, 1.0, 2.0, 3.0, 5.0});
  const auto rows = data.rows_of("");
  const auto ref = edf(data.outcome, {}, g);
  DesignSpec spec;  // intercept only
  for (LinkKind link : {LinkKind::Logit, LinkKind::Probit, LinkKind::Linear,
                        LinkKind::GammaIncomplete}) {
    const DRFit fit = dr_fit(data, rows, g, link, spec);
    // Thresholds at or above the sample maximum skip the fit entirely.
    CHECK(fit.degenerate == std::vector<int>{-1, -1, -1, -1, 1});
    const auto pred = dr_predict(fit, vec({1.0}));
    for (std::size_t t = 0; t < g.size(); ++t)
      CHECK(pred.value(t) == doctest::Approx(ref.value(t)).epsilon(5e-7));
  }
}

TEST_CASE("degeneracy flags cover both constant-indicator directions") {
  Dataset data;
  data.outcome = {2, 3, 4};
  const Grid g({0.0, 2.0, 3.0, 4.0, 9.0});
  const DRFit fit =
      dr_fit(data, data.rows_of(""), g, LinkKind::Logit, DesignSpec{});
  CHECK(fit.degenerate == std::vector<int>{0, -1, -1, 1, 1});
  const auto pred = dr_predict(fit, vec({1.0}));
  CHECK(pred.value(0) == 0.0);
  CHECK(pred.value(3) == 1.0);
  CHECK(pred.value(4) == 1.0);
}

TEST_CASE("saturated distribution regression equals the cell edfs") {
  Dataset data;
  data.outcome = {0, 1, 2, 2, 1, 3, 3, 4};
  Column cc;
  cc.name = "c";
  cc.categorical = true;
  cc.labels = {"a", "b"};
  cc.values = {0, 0, 0, 0, 1, 1, 1, 1};
  data.covariates = {cc};
  const Grid g({0.0, 1.0, 2.0, 3.0, 4.0});
  DesignSpec spec;
  spec.columns = {"c"};
  const auto rows = data.rows_of("");
  const DRFit fit = dr_fit(data, rows, g, LinkKind::Logit, spec);

  const auto f_a = edf({0, 1, 2, 2}, {}, g);
  const auto f_b = edf({1, 3, 3, 4}, {}, g);
  const auto p_a = dr_predict(fit, vec({1.0, 0.0}));
  const auto p_b = dr_predict(fit, vec({1.0, 1.0}));
  for (std::size_t t = 0; t < g.size(); ++t) {
    CHECK(p_a.value(t) == doctest::Approx(f_a.value(t)).epsilon(1e-8));
    CHECK(p_b.value(t) == doctest::Approx(f_b.value(t)).epsilon(1e-8));
  }

  // The counterfactual over rows with shares (1/4, 3/4) is the matching
  // mixture of cell edfs.
  const std::vector<std::size_t> mix_rows = {0, 4, 5, 6};
  const auto cf = counterfactual(fit, data, mix_rows);
  for (std::size_t t = 0; t < g.size(); ++t)
    CHECK(cf.value(t) ==
          doctest::Approx(0.25 * f_a.value(t) + 0.75 * f_b.value(t))
              .epsilon(1e-8));
}

TEST_CASE("weighting a row twice equals duplicating it") {
  Dataset dup;
  dup.outcome = {0, 0, 1, 2, 2, 2};
  Dataset wtd;
  wtd.outcome = {0, 1, 2};
  wtd.weights = {2, 1, 3};
  const Grid g({0.0, 1.0, 2.0});
  const auto rows3 = wtd.rows_of("");
  const DRFit fd =
      dr_fit(dup, dup.rows_of(""), g, LinkKind::Logit, DesignSpec{});
  const DRFit fw = dr_fit(wtd, rows3, g, LinkKind::Logit, DesignSpec{});
  const auto pd = dr_predict(fd, vec({1.0}));
  const auto pw = dr_predict(fw, vec({1.0}));
  for (std::size_t t = 0; t < g.size(); ++t)
    CHECK(pd.value(t) == doctest::Approx(pw.value(t)).epsilon(1e-8));
  const auto ed = edf(dup.outcome, {}, g);
  const auto ew = edf(wtd.outcome, wtd.weights, g);
  for (std::size_t t = 0; t < g.size(); ++t)
    CHECK(ed.value(t) == doctest::Approx(ew.value(t)).epsilon(1e-15));
}

TEST_CASE("poisson regression: closed forms and validation") {
  {
    // Intercept only: the rate estimate is the sample mean.
    const auto fit = poisson_fit(vec({1, 2, 3, 6}), intercept_design(4), ones(4));
    CHECK(fit.beta[0] == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  }
  {
    // Binary regressor: saturated, so coefficients are cell log means.
    Eigen::VectorXd y(6), x(6);
    y << 1, 2, 3, 4, 5, 6;
    x << 0, 0, 0, 1, 1, 1;
    Eigen::MatrixXd X(6, 2);
    X.col(0).setOnes();
    X.col(1) = x;
    const auto fit = poisson_fit(y, X, ones(6));
    CHECK(fit.beta[0] == doctest::Approx(std::log(2.0)).epsilon(1e-8));
    CHECK(fit.beta[1] == doctest::Approx(std::log(5.0 / 2.0)).epsilon(1e-8));
  }
  {
    // Weighted mean via weights.
    const auto fit =
        poisson_fit(vec({1, 5}), intercept_design(2), vec({3, 1}));
    CHECK(fit.beta[0] == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(poisson_fit(vec({1.5, 2}), intercept_design(2), ones(2)),
                  DataError);
  CHECK_THROWS_AS(poisson_fit(vec({-1, 2}), intercept_design(2), ones(2)),
                  DataError);
  CHECK_THROWS_AS(poisson_fit(vec({1, 2}), intercept_design(2), vec({1, -1})),
                  DataError);
}

TEST_CASE("count-model distribution curves nest the closed-form family") {
  // A fit whose every threshold carries the same constant coefficient must
  // predict exactly the Poisson distribution function at that rate.
  const double lambda = 2.5;
  std::vector<double> pts;
  for (int t = 0; t <= 12; ++t) pts.push_back(t);
  const Grid g(pts);
  DRFit fit{g};
  fit.link = LinkKind::GammaIncomplete;
  fit.design_names = {"(intercept)"};
  fit.coef.assign(g.size(), vec({std::log(lambda)}));
  fit.degenerate.assign(g.size(), -1);
  fit.separation.assign(g.size(), false);
  const auto pred = dr_predict(fit, vec({1.0}));
  for (std::size_t t = 0; t < g.size(); ++t)
    CHECK(pred.value(t) ==
          doctest::Approx(poisson_cdf(lambda, g.point(t))).epsilon(1e-12));
}

TEST_CASE("counterfactual shift: zero delta is the identity") {
  Dataset data;
  data.outcome = {0, 1, 2, 3, 1, 2};
  Column xc;
  xc.name = "x";
  xc.values = {0.0, 0.5, 1.0, 1.5, 0.25, 0.75};
  data.covariates = {xc};
  const Grid g({0.0, 1.0, 2.0, 3.0});
  DesignSpec spec;
  spec.columns = {"x"};
  const auto rows = data.rows_of("");
  const DRFit fit = dr_fit(data, rows, g, LinkKind::Logit, spec);
  const auto base = counterfactual(fit, data, rows);
  const auto shifted = counterfactual_shift(fit, data, rows, "x", 0.0);
  for (std::size_t t = 0; t < g.size(); ++t)
    CHECK(base.value(t) == doctest::Approx(shifted.value(t)).epsilon(1e-14));
  CHECK_THROWS_AS(counterfactual_shift(fit, data, rows, "nope", 1.0),
                  DataError);
}

TEST_CASE("two-group decomposition triplet with intercept-only structure") {
  Dataset data;
  data.outcome = {0, 1, 2, 3, 2, 3, 4, 5};
  data.group = {"j", "j", "j", "j", "m", "m", "m", "m"};
  const Grid g({0.0, 1.0, 2.0, 3.0, 4.0, 5.0});
  const auto trip =
      decomposition_triplet(data, g, "j", "m", LinkKind::Logit, DesignSpec{});
  const auto f_j = edf({0, 1, 2, 3}, {}, g);
  const auto f_m = edf({2, 3, 4, 5}, {}, g);
  for (std::size_t t = 0; t < g.size(); ++t) {
    CHECK(trip.f_jj.value(t) == doctest::Approx(f_j.value(t)).epsilon(1e-7));
    CHECK(trip.f_mm.value(t) == doctest::Approx(f_m.value(t)).epsilon(1e-7));
    // Without covariates the counterfactual collapses to group j's own DF.
    CHECK(trip.f_jm.value(t) == doctest::Approx(f_j.value(t)).epsilon(1e-7));
  }
}

TEST_CASE("dataset validation rejects inconsistent columns") {
  Dataset d;
  CHECK_THROWS_AS(d.validate(), DataError);
  d.outcome = {1, 2};
  CHECK_NOTHROW(d.validate());
  d.group = {"a"};
  CHECK_THROWS_AS(d.validate(), DataError);
  d.group = {"a", "b"};
  d.weights = {1.0, -0.5};
  CHECK_THROWS_AS(d.validate(), DataError);
  d.weights = {1.0, 0.5};
  CHECK_NOTHROW(d.validate());
  CHECK(d.group_labels() == std::vector<std::string>{"a", "b"});
  CHECK(d.rows_of("b") == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(d.rows_of("zzz"), DataError);
  CHECK_THROWS_AS(d.column("x"), DataError);
}
