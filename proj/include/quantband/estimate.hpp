#ifndef QUANTBAND_ESTIMATE_HPP
#define QUANTBAND_ESTIMATE_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "quantband/core.hpp"
#include "quantband/shape.hpp"

namespace quantband {

// One covariate column.  Categorical columns store integer level codes in
// `values` and the code-to-label mapping in `labels`.
struct Column {
  std::string name;
  std::vector<double> values;
  bool categorical = false;
  std::vector<std::string> labels;
};

// Rectangular sample: outcome plus optional covariates, group labels,
// cluster ids and base weights.  Empty group/cluster/weights vectors mean
// single group / independent rows / unit weights.
struct Dataset {
  std::vector<double> outcome;
  std::vector<Column> covariates;
  std::vector<std::string> group;
  std::vector<int> cluster_ids;
  std::vector<double> weights;

  std::size_t rows() const { return outcome.size(); }
  void validate() const;
  std::vector<std::string> group_labels() const;        // sorted distinct
  std::vector<std::size_t> rows_of(const std::string& g) const;
  const Column& column(const std::string& name) const;
};

enum class LinkKind { Logit, Probit, Linear, GammaIncomplete };

LinkKind link_from_string(const std::string& s);
std::string link_to_string(LinkKind k);

// Map from the linear index to a conditional probability.  The
// gamma-incomplete member is the Poisson distribution function at the
// stored outcome threshold evaluated at rate exp(u); it is decreasing in
// u, the others are nondecreasing.
struct LinkFunction {
  LinkKind kind = LinkKind::Logit;
  double threshold = 0.0;  // used by GammaIncomplete only

  double prob(double u) const;
  double dprob(double u) const;
  double inverse(double p) const;  // solves prob(u) = p on [-30, 30]

  static LinkFunction logit() { return {LinkKind::Logit, 0.0}; }
  static LinkFunction probit() { return {LinkKind::Probit, 0.0}; }
  static LinkFunction linear() { return {LinkKind::Linear, 0.0}; }
  static LinkFunction gamma_incomplete(double y) {
    return {LinkKind::GammaIncomplete, y};
  }
};

// Declarative design: named columns, optional categorical indicator
// expansion (first level dropped) and pairwise interactions, with an
// intercept unless disabled.
struct DesignSpec {
  bool intercept = true;
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::string>> interactions;
};

// Expands the design for the given rows; column names go to *names when
// non-null.
Eigen::MatrixXd build_design(const Dataset& data,
                             const std::vector<std::size_t>& rows,
                             const DesignSpec& spec,
                             std::vector<std::string>* names = nullptr);

struct BinaryFit {
  Eigen::VectorXd beta;
  bool separation = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

// Weighted binary maximum likelihood via Fisher scoring with step
// halving, started from the intercept-only fit.  Coefficients are capped
// at sup-norm 30; hitting the cap sets the separation flag instead of
// failing.  Without separation, non-convergence after 100 iterations is a
// NumericError.  The linear link is fitted by weighted least squares.
BinaryFit fit_binary(const Eigen::VectorXd& z, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& w, const LinkFunction& link);

// Threshold-indexed binary fits that together estimate a conditional
// distribution function.  degenerate[t] is -1 normally, or 0/1 when every
// positively weighted indicator at threshold t equals that constant (no
// fit is run there).
struct DRFit {
  Grid grid;
  LinkKind link = LinkKind::Logit;
  DesignSpec design;
  std::vector<std::string> design_names;
  std::vector<Eigen::VectorXd> coef;
  std::vector<int> degenerate;
  std::vector<bool> separation;
  ShapeConfig shape_cfg;
};

// weights: effective weight per dataset row (empty -> dataset weights or
// unit weights).  Rows outside `rows` are ignored.
DRFit dr_fit(const Dataset& data, const std::vector<std::size_t>& rows,
             const Grid& grid, LinkKind link, const DesignSpec& spec,
             const std::vector<double>& weights = {},
             const ShapeConfig& shape_cfg = {});

// Conditional DF estimate at one expanded design row, shaped into the
// monotone class.
MonotoneStepFn dr_predict(const DRFit& fit, const Eigen::VectorXd& design_row);

// Weighted empirical distribution function on the grid.  Throws on zero
// total weight.
MonotoneStepFn edf(const std::vector<double>& y, const std::vector<double>& w,
                   const Grid& grid);

struct PoissonFit {
  Eigen::VectorXd beta;
  bool separation = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

// Weighted Poisson regression with log link (Newton with step halving).
// Outcomes must be nonnegative integers.
PoissonFit poisson_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& w);

// Counterfactual distribution: weighted average over the given rows of
// the shaped conditional DF predictions from `fit`.
MonotoneStepFn counterfactual(const DRFit& fit, const Dataset& data,
                              const std::vector<std::size_t>& rows,
                              const std::vector<double>& weights = {});

// Counterfactual under a covariate shift: the named numeric column is
// translated by delta before prediction.
MonotoneStepFn counterfactual_shift(const DRFit& fit, const Dataset& data,
                                    const std::vector<std::size_t>& rows,
                                    const std::string& column, double delta,
                                    const std::vector<double>& weights = {});

// The three distributions of a two-group decomposition: the observed DF
// of each group and the counterfactual that applies group j's conditional
// DF to group m's covariates.
struct DecompositionTriplet {
  MonotoneStepFn f_jj;  // group j outcome structure, group j covariates
  MonotoneStepFn f_mm;  // group m outcome structure, group m covariates
  MonotoneStepFn f_jm;  // group j outcome structure, group m covariates
  DRFit fit_j;
};

DecompositionTriplet decomposition_triplet(
    const Dataset& data, const Grid& grid, const std::string& group_j,
    const std::string& group_m, LinkKind link, const DesignSpec& spec,
    const std::vector<double>& weights = {}, const ShapeConfig& shape_cfg = {});

}  // namespace quantband

#endif  // QUANTBAND_ESTIMATE_HPP
