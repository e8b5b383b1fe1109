#ifndef QUANTBAND_COMMANDS_HPP
#define QUANTBAND_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace quantband {

// Value-set configuration: a named mode or an explicit list.
//   grid:     "auto" (observed outcome values) | "list"
//   support:  "auto" | "none" | "list"
struct ValueListSpec {
  std::string mode = "auto";
  std::vector<double> values;
};

// Probability levels: "default" (0.01..0.99 by 0.01), "range", or "list".
struct ProbGridSpec {
  std::string mode = "default";
  double lo = 0.0, hi = 0.0, step = 0.0;
  std::vector<double> levels;
};

struct DataSpec {
  std::string data;     // CSV path
  std::string outcome;  // required column
  std::string group, weight, cluster;           // optional columns
  std::vector<std::string> covariates;          // design columns
  std::vector<std::string> categorical;         // forced-categorical subset
  std::vector<std::string> interactions;        // "a:b" entries
};

struct BandsConfig {
  DataSpec input;
  std::string estimator = "edf";  // edf | dr | poisson
  std::string link = "logit";
  double iso_weight = 0.0;  // shape operator: rearrangement/isotonization mix
  double level = 0.95;
  int draws = 1000;
  std::uint64_t seed = 0;
  std::string scheme = "exponential";
  bool cluster_level = true;
  ValueListSpec grid{"auto", {}};
  std::optional<double> domain_sup;
  ValueListSpec support{"auto", {}};
  ProbGridSpec prob_grid;
  std::string counterfactual_over = "own";  // own | pooled (model estimators)
  std::string baseline;                     // QE baseline group; empty = first
  bool ratio = false;                       // quantile ratios instead of differences
  std::string out = ".";
  bool plots = false;
  bool timing = false;
  int threads = 0;  // 0 = hardware concurrency
};

struct DecomposeConfig {
  DataSpec input;
  std::string group_j, group_m;  // decomposition: j's structure, m's baseline
  std::string link = "logit";
  double iso_weight = 0.0;
  double level = 0.95;
  int draws = 1000;
  std::uint64_t seed = 0;
  std::string scheme = "exponential";
  bool cluster_level = true;
  ValueListSpec grid{"auto", {}};
  std::optional<double> domain_sup;
  ValueListSpec support{"auto", {}};
  ProbGridSpec prob_grid;
  std::string out = ".";
  bool plots = false;
  bool timing = false;
  int threads = 0;
};

struct SimulateConfig {
  std::string family = "counts";  // counts | ordered
  double lambda0 = 3.0, lambda1 = 3.0;
  double mu0 = 0.0, mu1 = 0.0;
  std::vector<double> cutoffs;         // ordered family; empty = default
  std::vector<int> n = {400};          // sweep
  std::vector<double> level = {0.95};  // sweep
  int nsim = 1000;
  int draws = 500;
  double prob_lo = 0.1, prob_hi = 0.9, prob_step = 0.01;
  std::uint64_t seed = 0;
  std::string scheme = "exponential";
  bool competitors = false;
  std::string out = ".";
  bool timing = false;
  int threads = 1;
};

// Command-line overrides; a set field wins over the config-file value.
struct CliOverrides {
  std::optional<std::string> data, outcome, group, weight, cluster;
  std::optional<std::string> covariates;  // comma-separated
  std::optional<std::string> estimator, link, scheme;
  std::optional<double> level;
  std::optional<int> draws, nsim, threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> grid;       // auto | v1,v2,...
  std::optional<std::string> support;    // auto | none | v1,v2,...
  std::optional<std::string> prob_grid;  // default | lo:hi:step | a1,a2,...
  std::optional<std::string> baseline, group_j, group_m, out;
  std::optional<bool> ratio, plots, timing;
};

// Config-file parsing (unknown keys rejected) and flag application.
BandsConfig parse_bands_config(const nlohmann::json& file_config);
DecomposeConfig parse_decompose_config(const nlohmann::json& file_config);
SimulateConfig parse_simulate_config(const nlohmann::json& file_config);
void apply_overrides(BandsConfig& cfg, const CliOverrides& ov);
void apply_overrides(DecomposeConfig& cfg, const CliOverrides& ov);
void apply_overrides(SimulateConfig& cfg, const CliOverrides& ov);

// Canonical effective-config serializations (hashed into every output).
// Thread count, output directory, and the plot/timing toggles are excluded:
// the hash identifies the analysis, and parallelism or destination must not
// change output bytes.
nlohmann::json config_json(const BandsConfig& cfg);
nlohmann::json config_json(const DecomposeConfig& cfg);
nlohmann::json config_json(const SimulateConfig& cfg);

// Band computation for grouped data; decomposition bands for a group
// pair; Monte Carlo design sweeps.  Each writes its report files under
// cfg.out and throws ConfigError/DataError/NumericError on failure.
void cmd_bands(const BandsConfig& cfg);
void cmd_decompose(const DecomposeConfig& cfg);
void cmd_simulate(const SimulateConfig& cfg);

}  // namespace quantband

#endif  // QUANTBAND_COMMANDS_HPP
