#ifndef QUANTBAND_SIMLAB_HPP
#define QUANTBAND_SIMLAB_HPP

#include <cstdint>
#include <vector>

#include "quantband/core.hpp"
#include "quantband/resample.hpp"
#include "quantband/rng.hpp"

namespace quantband {

// Two-sample synthetic designs: Poisson counts with rates (lambda0,
// lambda1), or ordered categories from latent normals N(mu_k, 1) cut at
// fixed thresholds.
struct SimDesign {
  enum class Family { PoissonCounts, OrderedLatent };
  Family family = Family::PoissonCounts;
  double lambda0 = 3.0;
  double lambda1 = 3.0;
  double mu0 = 0.0;
  double mu1 = 0.0;
  std::vector<double> cutoffs;  // empty -> default_ordered_cutoffs()

  int n = 400;          // per-group sample size
  double level = 0.95;  // band level p
  int nsim = 1000;      // Monte Carlo replications
  int draws = 500;      // bootstrap draws per replication
  double prob_lo = 0.1;
  double prob_hi = 0.9;
  double prob_step = 0.01;  // evaluation grid for competitor bands
  std::uint64_t seed = 0;
  BootstrapScheme scheme = BootstrapScheme::Exponential;
  bool competitors = false;
  int threads = 1;
};

// Latent-normal cut points chosen so a standard normal yields category
// masses {.10, .16, .24, .24, .16, .10}.
std::vector<double> default_ordered_cutoffs();

std::vector<int> gen_poisson(double lambda, int n, RngStream& rng);
std::vector<int> gen_ordered(double mu, const std::vector<double>& cutoffs,
                             int n, RngStream& rng);

struct MethodReport {
  double coverage = 0.0;
  double coverage_se = 0.0;
  double avg_length = 0.0;
  double avg_length_se = 0.0;
};

struct SimReport {
  SimDesign design;
  std::vector<double> grid_points;

  // Simultaneous coverage over the probability range of the single-group
  // quantile bands, the joint everything-at-once event (both QFs and the
  // QE function from the joint bands), and the QE band alone.
  double cov_single0 = 0.0, cov_single0_se = 0.0;
  double cov_single1 = 0.0, cov_single1_se = 0.0;
  double cov_joint_all = 0.0, cov_joint_all_se = 0.0;
  double cov_qe = 0.0, cov_qe_se = 0.0;

  double reject_rate = 0.0, reject_rate_se = 0.0;
  double len_new = 0.0, len_new_se = 0.0;

  // Competitors (populated when design.competitors).
  MethodReport boot;     // constant-width QE bootstrap band
  MethodReport jitter1;  // sup-t band around the smoothed (jittered) QE
  MethodReport jitter2;  // same width around the raw QE
  // Mean fraction of evaluation levels whose raw (unjittered) QE bootstrap
  // draws have zero spread: why a direct studentized band is not computable.
  double direct_zero_se_fraction = 0.0;
};

SimReport run_design(const SimDesign& design);

// Constant-width competitor: bootstrap the raw QE curve on the grid, take
// the level-p quantile of the sup deviation, and widen the raw QE by that
// constant.  zero_se_fraction diagnoses the infeasible studentized
// variant on the same draws.
struct ConstantWidthBand {
  QEBand band;
  double halfwidth = 0.0;
  double zero_se_fraction = 0.0;
};

ConstantWidthBand competitor_constant_width(const std::vector<int>& y0,
                                            const std::vector<int>& y1,
                                            int draws, double p,
                                            const ProbGrid& grid,
                                            BootstrapScheme scheme,
                                            std::uint64_t seed);

// Jittering competitor: add uniform noise on [0,1) to the outcomes (drawn
// once, reused across bootstrap draws), bootstrap the jittered QE, and
// build a studentized sup-t band.  Smoothed centers the band at the
// jittered QE, Raw at the unjittered sample QE.
enum class JitterCenter { Smoothed, Raw };

struct JitterBand {
  QEBand band;
  double critical = 0.0;
  double avg_length = 0.0;
};

JitterBand competitor_jitter(const std::vector<int>& y0,
                             const std::vector<int>& y1, int draws, double p,
                             JitterCenter variant, const ProbGrid& grid,
                             BootstrapScheme scheme, std::uint64_t seed);

}  // namespace quantband

#endif  // QUANTBAND_SIMLAB_HPP
