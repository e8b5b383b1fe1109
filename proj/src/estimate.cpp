#include "quantband/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "quantband/errors.hpp"
#include "quantband/special.hpp"

namespace quantband {

namespace {

constexpr double kCoefCap = 30.0;
constexpr double kGradTol = 1e-8;
constexpr int kMaxIter = 100;
constexpr double kProbEps = 1e-12;

std::vector<double> effective_weights(const Dataset& data,
                                      const std::vector<double>& extern_w) {
  const std::size_t n = data.rows();
  std::vector<double> w(n, 1.0);
  if (!data.weights.empty()) {
    if (data.weights.size() != n)
      throw DataError("weights column length mismatch");
    w = data.weights;
  }
  if (!extern_w.empty()) {
    if (extern_w.size() != n)
      throw DataError("external weight vector length mismatch");
    for (std::size_t i = 0; i < n; ++i) w[i] *= extern_w[i];
  }
  for (double x : w)
    if (std::isnan(x) || x < 0.0) throw DataError("weights must be nonnegative");
  return w;
}

Eigen::VectorXd clamp_coef(Eigen::VectorXd b) {
  for (Eigen::Index j = 0; j < b.size(); ++j)
    b[j] = std::min(kCoefCap, std::max(-kCoefCap, b[j]));
  return b;
}

double binary_loglik(const Eigen::VectorXd& z, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& w, const LinkFunction& link,
                     const Eigen::VectorXd& b) {
  const Eigen::VectorXd eta = X * b;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (w[i] == 0.0) continue;
    double p = link.prob(eta[i]);
    p = std::min(1.0 - kProbEps, std::max(kProbEps, p));
    ll += w[i] * (z[i] * std::log(p) + (1.0 - z[i]) * std::log(1.0 - p));
  }
  return ll;
}

}  // namespace

void Dataset::validate() const {
  const std::size_t n = rows();
  if (n == 0) throw DataError("dataset has no rows");
  for (const auto& c : covariates) {
    if (c.values.size() != n)
      throw DataError("covariate column '" + c.name + "' length mismatch");
    if (c.categorical) {
      for (double v : c.values) {
        const double r = std::round(v);
        if (std::fabs(v - r) > 1e-9 || r < 0.0 ||
            r >= static_cast<double>(c.labels.size()))
          throw DataError("categorical codes out of range in '" + c.name + "'");
      }
    }
  }
  if (!group.empty() && group.size() != n)
    throw DataError("group column length mismatch");
  if (!cluster_ids.empty() && cluster_ids.size() != n)
    throw DataError("cluster column length mismatch");
  if (!weights.empty()) {
    if (weights.size() != n) throw DataError("weights column length mismatch");
    for (double w : weights)
      if (std::isnan(w) || w < 0.0) throw DataError("weights must be nonnegative");
  }
  for (double y : outcome)
    if (std::isnan(y)) throw DataError("outcome contains missing values");
}

std::vector<std::string> Dataset::group_labels() const {
  if (group.empty()) return {""};
  std::set<std::string> s(group.begin(), group.end());
  return {s.begin(), s.end()};
}

std::vector<std::size_t> Dataset::rows_of(const std::string& g) const {
  std::vector<std::size_t> idx;
  if (group.empty()) {
    if (!g.empty()) throw DataError("no group column, but a label was requested");
    idx.resize(rows());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
  }
  for (std::size_t i = 0; i < group.size(); ++i)
    if (group[i] == g) idx.push_back(i);
  if (idx.empty()) throw DataError("group '" + g + "' has no rows");
  return idx;
}

const Column& Dataset::column(const std::string& name) const {
  for (const auto& c : covariates)
    if (c.name == name) return c;
  throw DataError("unknown covariate column '" + name + "'");
}

LinkKind link_from_string(const std::string& s) {
  if (s == "logit") return LinkKind::Logit;
  if (s == "probit") return LinkKind::Probit;
  if (s == "linear") return LinkKind::Linear;
  if (s == "gamma" || s == "gamma-incomplete") return LinkKind::GammaIncomplete;
  throw ConfigError("unknown link '" + s + "'");
}

std::string link_to_string(LinkKind k) {
  switch (k) {
    case LinkKind::Logit: return "logit";
    case LinkKind::Probit: return "probit";
    case LinkKind::Linear: return "linear";
    case LinkKind::GammaIncomplete: return "gamma-incomplete";
  }
  return "?";
}

double LinkFunction::prob(double u) const {
  switch (kind) {
    case LinkKind::Logit: {
      if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
      const double e = std::exp(u);
      return e / (1.0 + e);
    }
    case LinkKind::Probit: return norm_cdf(u);
    case LinkKind::Linear: return std::min(1.0, std::max(0.0, u));
    case LinkKind::GammaIncomplete: return poisson_cdf(std::exp(u), threshold);
  }
  return 0.0;
}

double LinkFunction::dprob(double u) const {
  switch (kind) {
    case LinkKind::Logit: {
      const double p = prob(u);
      return p * (1.0 - p);
    }
    case LinkKind::Probit: return norm_pdf(u);
    case LinkKind::Linear: return (u > 0.0 && u < 1.0) ? 1.0 : 0.0;
    case LinkKind::GammaIncomplete: {
      // d/du P(Y <= t; e^u) = -e^u * pmf(t; e^u)
      if (threshold < 0.0) return 0.0;
      const double lam = std::exp(u);
      return -std::exp(u + poisson_log_pmf(lam, std::floor(threshold)));
    }
  }
  return 0.0;
}

double LinkFunction::inverse(double p) const {
  if (std::isnan(p)) throw NumericError("link inverse: NaN probability");
  p = std::min(1.0, std::max(0.0, p));
  switch (kind) {
    case LinkKind::Logit: {
      const double q = std::min(1.0 - kProbEps, std::max(kProbEps, p));
      return std::log(q / (1.0 - q));
    }
    case LinkKind::Probit: {
      const double q = std::min(1.0 - kProbEps, std::max(kProbEps, p));
      return norm_inv(q);
    }
    case LinkKind::Linear: return p;
    case LinkKind::GammaIncomplete: {
      // prob is continuous and decreasing in u; bisect on [-30, 30].
      double lo = -kCoefCap, hi = kCoefCap;
      if (prob(lo) <= p) return lo;
      if (prob(hi) >= p) return hi;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (prob(mid) > p) lo = mid; else hi = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

Eigen::MatrixXd build_design(const Dataset& data,
                             const std::vector<std::size_t>& rows,
                             const DesignSpec& spec,
                             std::vector<std::string>* names) {
  // Expand each named column into one or more numeric columns first.
  struct Block {
    std::vector<std::string> names;
    std::vector<const Column*> source;   // per expanded column
    std::vector<int> level;              // categorical level, -1 for numeric
  };
  std::vector<Block> blocks;
  std::vector<std::string> block_of;  // column name per block
  for (const auto& name : spec.columns) {
    const Column& c = data.column(name);
    Block b;
    if (c.categorical) {
      // One indicator per level except the first.
      for (std::size_t lvl = 1; lvl < c.labels.size(); ++lvl) {
        b.names.push_back(c.name + "=" + c.labels[lvl]);
        b.source.push_back(&c);
        b.level.push_back(static_cast<int>(lvl));
      }
    } else {
      b.names.push_back(c.name);
      b.source.push_back(&c);
      b.level.push_back(-1);
    }
    blocks.push_back(std::move(b));
    block_of.push_back(name);
  }

  auto expanded_value = [](const Block& b, std::size_t j, std::size_t row) {
    const Column& c = *b.source[j];
    if (b.level[j] < 0) return c.values[row];
    return (static_cast<int>(std::llround(c.values[row])) == b.level[j]) ? 1.0
                                                                         : 0.0;
  };

  std::size_t cols = spec.intercept ? 1 : 0;
  for (const auto& b : blocks) cols += b.names.size();
  std::vector<std::pair<std::size_t, std::size_t>> inter_blocks;
  for (const auto& [l, r] : spec.interactions) {
    std::size_t li = block_of.size(), ri = block_of.size();
    for (std::size_t i = 0; i < block_of.size(); ++i) {
      if (block_of[i] == l) li = i;
      if (block_of[i] == r) ri = i;
    }
    if (li == block_of.size() || ri == block_of.size())
      throw ConfigError("interaction references a column not in the design");
    inter_blocks.emplace_back(li, ri);
    cols += blocks[li].names.size() * blocks[ri].names.size();
  }

  Eigen::MatrixXd X(rows.size(), cols);
  std::vector<std::string> out_names;
  std::size_t col = 0;
  if (spec.intercept) {
    X.col(col).setOnes();
    out_names.push_back("(intercept)");
    ++col;
  }
  for (const auto& b : blocks) {
    for (std::size_t j = 0; j < b.names.size(); ++j, ++col) {
      for (std::size_t i = 0; i < rows.size(); ++i)
        X(i, col) = expanded_value(b, j, rows[i]);
      out_names.push_back(b.names[j]);
    }
  }
  for (const auto& [li, ri] : inter_blocks) {
    const Block& bl = blocks[li];
    const Block& br = blocks[ri];
    for (std::size_t jl = 0; jl < bl.names.size(); ++jl)
      for (std::size_t jr = 0; jr < br.names.size(); ++jr, ++col) {
        for (std::size_t i = 0; i < rows.size(); ++i)
          X(i, col) =
              expanded_value(bl, jl, rows[i]) * expanded_value(br, jr, rows[i]);
        out_names.push_back(bl.names[jl] + ":" + br.names[jr]);
      }
  }
  if (names) *names = std::move(out_names);
  return X;
}

BinaryFit fit_binary(const Eigen::VectorXd& z, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& w, const LinkFunction& link) {
  const Eigen::Index n = z.size();
  const Eigen::Index d = X.cols();
  if (X.rows() != n || w.size() != n)
    throw DataError("fit_binary: dimension mismatch");
  const double wtot = w.sum();
  if (!(wtot > 0.0)) throw DataError("fit_binary: zero total weight");
  for (Eigen::Index i = 0; i < n; ++i)
    if (w[i] > 0.0 && z[i] != 0.0 && z[i] != 1.0)
      throw DataError("fit_binary: indicators must be 0 or 1");

  if (link.kind == LinkKind::Linear) {
    // Identity-link likelihood is unbounded off [0,1]; the standard
    // estimator here is weighted least squares.
    Eigen::MatrixXd xtx = X.transpose() * w.asDiagonal() * X;
    Eigen::VectorXd xtz = X.transpose() * (w.array() * z.array()).matrix();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    if (ldlt.info() != Eigen::Success)
      throw NumericError("fit_binary: singular design (linear link)");
    BinaryFit fit;
    fit.beta = ldlt.solve(xtz);
    fit.grad_norm = (xtz - xtx * fit.beta).lpNorm<Eigen::Infinity>();
    fit.iterations = 1;
    if (fit.grad_norm > 1e-6)
      throw NumericError("fit_binary: weighted least squares did not solve");
    return fit;
  }

  // Start from the intercept-only fit when the design carries a constant
  // column; otherwise from zero.
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    if ((X.col(j).array() == 1.0).all()) {
      const double zbar = (w.array() * z.array()).sum() / wtot;
      b[j] = std::min(kCoefCap, std::max(-kCoefCap, link.inverse(zbar)));
      break;
    }
  }

  double ll = binary_loglik(z, X, w, link, b);
  BinaryFit fit;
  fit.beta = b;
  for (int iter = 1; iter <= kMaxIter; ++iter) {
    const Eigen::VectorXd eta = X * b;
    Eigen::VectorXd score_w(n), info_w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w[i] == 0.0) {
        score_w[i] = 0.0;
        info_w[i] = 0.0;
        continue;
      }
      double p = link.prob(eta[i]);
      p = std::min(1.0 - kProbEps, std::max(kProbEps, p));
      const double dp = link.dprob(eta[i]);
      const double var = p * (1.0 - p);
      score_w[i] = w[i] * (z[i] - p) * dp / var;
      info_w[i] = w[i] * dp * dp / var;
    }
    const Eigen::VectorXd score = X.transpose() * score_w;
    const double gnorm = score.lpNorm<Eigen::Infinity>();
    fit.iterations = iter;
    fit.grad_norm = gnorm;
    if (gnorm <= kGradTol) {
      fit.beta = b;
      fit.separation = (b.lpNorm<Eigen::Infinity>() >= kCoefCap);
      return fit;
    }
    Eigen::MatrixXd info = X.transpose() * info_w.asDiagonal() * X;
    // Fisher scoring can flatten under extreme coefficients; a small ridge
    // keeps the solve defined without moving the optimum materially.
    for (Eigen::Index j = 0; j < d; ++j) info(j, j) += 1e-10;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success)
      throw NumericError("fit_binary: singular information matrix");
    const Eigen::VectorXd step = ldlt.solve(score);
    // Near the optimum the true gain of a full step is ~gnorm^2 and falls
    // below the rounding error of the log-likelihood sum; rejecting such
    // steps freezes the iterate just short of the gradient tolerance.
    // Accept any step whose decrease is within rounding resolution.
    const double ll_slack = 1e-12 * (1.0 + std::abs(ll));
    double t = 1.0;
    Eigen::VectorXd cand = clamp_coef(b + t * step);
    double ll_cand = binary_loglik(z, X, w, link, cand);
    while (ll_cand < ll - ll_slack && t > 1e-10) {
      t *= 0.5;
      cand = clamp_coef(b + t * step);
      ll_cand = binary_loglik(z, X, w, link, cand);
    }
    b = cand;
    ll = ll_cand;
  }
  fit.beta = b;
  fit.separation = (b.lpNorm<Eigen::Infinity>() >= kCoefCap);
  if (!fit.separation)
    throw NumericError("fit_binary: no convergence after 100 iterations");
  return fit;
}

DRFit dr_fit(const Dataset& data, const std::vector<std::size_t>& rows,
             const Grid& grid, LinkKind link, const DesignSpec& spec,
             const std::vector<double>& weights, const ShapeConfig& shape_cfg) {
  data.validate();
  if (rows.empty()) throw DataError("dr_fit: no rows selected");
  const std::vector<double> w_all = effective_weights(data, weights);

  DRFit fit{grid};
  fit.link = link;
  fit.design = spec;
  fit.shape_cfg = shape_cfg;
  fit.coef.resize(grid.size());
  fit.degenerate.assign(grid.size(), -1);
  fit.separation.assign(grid.size(), false);

  const Eigen::MatrixXd X = build_design(data, rows, spec, &fit.design_names);
  Eigen::VectorXd w(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) w[i] = w_all[rows[i]];
  if (!(w.sum() > 0.0)) throw DataError("dr_fit: zero total weight");

  for (std::size_t t = 0; t < grid.size(); ++t) {
    const double yt = grid.point(t);
    Eigen::VectorXd z(rows.size());
    bool any0 = false, any1 = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      z[i] = (data.outcome[rows[i]] <= yt) ? 1.0 : 0.0;
      if (w[i] > 0.0) (z[i] > 0.5 ? any1 : any0) = true;
    }
    if (!any0 || !any1) {
      fit.degenerate[t] = any1 ? 1 : 0;
      continue;
    }
    const LinkFunction lf =
        (link == LinkKind::GammaIncomplete)
            ? LinkFunction::gamma_incomplete(yt)
            : LinkFunction{link, 0.0};
    BinaryFit bf = fit_binary(z, X, w, lf);
    fit.coef[t] = std::move(bf.beta);
    fit.separation[t] = bf.separation;
  }
  return fit;
}

namespace {

std::vector<double> dr_raw_curve(const DRFit& fit,
                                 const Eigen::VectorXd& design_row) {
  std::vector<double> raw(fit.grid.size());
  for (std::size_t t = 0; t < fit.grid.size(); ++t) {
    if (fit.degenerate[t] >= 0) {
      raw[t] = static_cast<double>(fit.degenerate[t]);
      continue;
    }
    const LinkFunction lf =
        (fit.link == LinkKind::GammaIncomplete)
            ? LinkFunction::gamma_incomplete(fit.grid.point(t))
            : LinkFunction{fit.link, 0.0};
    raw[t] = lf.prob(design_row.dot(fit.coef[t]));
  }
  return raw;
}

}  // namespace

MonotoneStepFn dr_predict(const DRFit& fit, const Eigen::VectorXd& design_row) {
  if (design_row.size() != static_cast<Eigen::Index>(fit.design_names.size()))
    throw ConfigError("dr_predict: design row has wrong length");
  return shape(fit.grid, dr_raw_curve(fit, design_row), fit.shape_cfg);
}

MonotoneStepFn edf(const std::vector<double>& y, const std::vector<double>& w,
                   const Grid& grid) {
  if (!w.empty() && w.size() != y.size())
    throw DataError("edf: weight length mismatch");
  if (y.empty()) throw DataError("edf: empty sample");
  const auto& pts = grid.points();
  std::vector<double> bucket(pts.size(), 0.0);
  double out_mass = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    if (std::isnan(y[i])) throw DataError("edf: missing outcome");
    auto it = std::lower_bound(pts.begin(), pts.end(), y[i]);
    if (it != pts.end())
      bucket[static_cast<std::size_t>(it - pts.begin())] += wi;
    else
      out_mass += wi;
  }
  // The denominator sums the buckets in grid order so that, with no mass
  // beyond the top point, the final ratio is bitwise exactly one: bootstrap
  // draws must agree there exactly or the degenerate-point exclusion fails.
  double in_mass = 0.0;
  for (double b : bucket) in_mass += b;
  const double total = in_mass + out_mass;
  if (!(total > 0.0)) throw DataError("edf: zero total weight");
  std::vector<double> values(pts.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < pts.size(); ++t) {
    acc += bucket[t];
    values[t] = std::min(1.0, acc / total);
  }
  return MonotoneStepFn(grid, std::move(values));
}

PoissonFit poisson_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& w) {
  const Eigen::Index n = y.size();
  const Eigen::Index d = X.cols();
  if (X.rows() != n || w.size() != n)
    throw DataError("poisson_fit: dimension mismatch");
  double wtot = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (w[i] < 0.0) throw DataError("poisson_fit: negative weight");
    if (w[i] == 0.0) continue;
    wtot += w[i];
    if (y[i] < 0.0 || std::fabs(y[i] - std::round(y[i])) > 1e-9)
      throw DataError("poisson_fit: outcomes must be nonnegative integers");
  }
  if (!(wtot > 0.0)) throw DataError("poisson_fit: zero total weight");

  auto loglik = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd eta = X * b;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w[i] == 0.0) continue;
      ll += w[i] * (y[i] * eta[i] - std::exp(eta[i]));
    }
    return ll;
  };

  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  const double ybar = (w.array() * y.array()).sum() / wtot;
  for (Eigen::Index j = 0; j < d; ++j)
    if ((X.col(j).array() == 1.0).all()) {
      b[j] = std::min(kCoefCap, std::max(-kCoefCap, std::log(std::max(ybar, 1e-12))));
      break;
    }

  double ll = loglik(b);
  PoissonFit fit;
  for (int iter = 1; iter <= kMaxIter; ++iter) {
    const Eigen::VectorXd eta = X * b;
    Eigen::VectorXd mu(n);
    for (Eigen::Index i = 0; i < n; ++i) mu[i] = std::exp(eta[i]);
    const Eigen::VectorXd score =
        X.transpose() * (w.array() * (y - mu).array()).matrix();
    const double gnorm = score.lpNorm<Eigen::Infinity>();
    fit.iterations = iter;
    fit.grad_norm = gnorm;
    if (gnorm <= kGradTol) {
      fit.beta = b;
      fit.separation = (b.lpNorm<Eigen::Infinity>() >= kCoefCap);
      return fit;
    }
    Eigen::MatrixXd info =
        X.transpose() * (w.array() * mu.array()).matrix().asDiagonal() * X;
    for (Eigen::Index j = 0; j < d; ++j) info(j, j) += 1e-10;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success)
      throw NumericError("poisson_fit: singular information matrix");
    const Eigen::VectorXd step = ldlt.solve(score);
    // Same rounding-resolution slack as fit_binary: near the optimum the
    // true gain of a step can be smaller than the log-likelihood's rounding
    // error, and rejecting it stalls the iteration.
    const double ll_slack = 1e-12 * (1.0 + std::abs(ll));
    double t = 1.0;
    Eigen::VectorXd cand = clamp_coef(b + t * step);
    double ll_cand = loglik(cand);
    while (ll_cand < ll - ll_slack && t > 1e-10) {
      t *= 0.5;
      cand = clamp_coef(b + t * step);
      ll_cand = loglik(cand);
    }
    b = cand;
    ll = ll_cand;
  }
  fit.beta = b;
  fit.separation = (b.lpNorm<Eigen::Infinity>() >= kCoefCap);
  if (!fit.separation)
    throw NumericError("poisson_fit: no convergence after 100 iterations");
  return fit;
}

MonotoneStepFn counterfactual(const DRFit& fit, const Dataset& data,
                              const std::vector<std::size_t>& rows,
                              const std::vector<double>& weights) {
  if (rows.empty()) throw DataError("counterfactual: no rows selected");
  const std::vector<double> w_all = effective_weights(data, weights);
  const Eigen::MatrixXd X = build_design(data, rows, fit.design, nullptr);
  if (X.cols() != static_cast<Eigen::Index>(fit.design_names.size()))
    throw ConfigError("counterfactual: design width differs from the fit");

  std::vector<double> acc(fit.grid.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double wi = w_all[rows[i]];
    if (wi == 0.0) continue;
    total += wi;
    const MonotoneStepFn curve = dr_predict(fit, X.row(i).transpose());
    for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += wi * curve.value(t);
  }
  if (!(total > 0.0)) throw DataError("counterfactual: zero total weight");
  for (double& v : acc) v = std::min(1.0, std::max(0.0, v / total));
  return MonotoneStepFn(fit.grid, std::move(acc));
}

MonotoneStepFn counterfactual_shift(const DRFit& fit, const Dataset& data,
                                    const std::vector<std::size_t>& rows,
                                    const std::string& column, double delta,
                                    const std::vector<double>& weights) {
  Dataset shifted = data;
  bool found = false;
  for (auto& c : shifted.covariates) {
    if (c.name != column) continue;
    if (c.categorical)
      throw ConfigError("counterfactual_shift: cannot shift a categorical column");
    for (double& v : c.values) v += delta;
    found = true;
  }
  if (!found) throw DataError("counterfactual_shift: unknown column '" + column + "'");
  return counterfactual(fit, shifted, rows, weights);
}

DecompositionTriplet decomposition_triplet(
    const Dataset& data, const Grid& grid, const std::string& group_j,
    const std::string& group_m, LinkKind link, const DesignSpec& spec,
    const std::vector<double>& weights, const ShapeConfig& shape_cfg) {
  const std::vector<std::size_t> rows_j = data.rows_of(group_j);
  const std::vector<std::size_t> rows_m = data.rows_of(group_m);
  const std::vector<double> w_all = effective_weights(data, weights);

  auto group_edf = [&](const std::vector<std::size_t>& rows) {
    std::vector<double> y(rows.size()), w(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      y[i] = data.outcome[rows[i]];
      w[i] = w_all[rows[i]];
    }
    return edf(y, w, grid);
  };

  DecompositionTriplet out{
      group_edf(rows_j), group_edf(rows_m),
      MonotoneStepFn(grid, std::vector<double>(grid.size(), 0.0)),
      dr_fit(data, rows_j, grid, link, spec, weights, shape_cfg)};
  out.f_jm = counterfactual(out.fit_j, data, rows_m, weights);
  return out;
}

}  // namespace quantband
