#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "quantband/commands.hpp"
#include "quantband/errors.hpp"
#include "quantband/version.hpp"

namespace {

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw quantband::ConfigError("cannot read config file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw quantband::ConfigError(path + ": " + e.what());
  }
}

void add_run_flags(CLI::App* cmd, std::string& config_path,
                   quantband::CliOverrides& ov) {
  cmd->add_option("--config", config_path, "JSON configuration file");
  cmd->add_option("--level", ov.level, "simultaneous level p in (0,1)");
  cmd->add_option("--draws", ov.draws, "bootstrap draws");
  cmd->add_option("--seed", ov.seed, "master seed");
  cmd->add_option("--scheme", ov.scheme,
                  "bootstrap weights: exponential | multinomial");
  cmd->add_option("--threads", ov.threads, "worker threads (0 = all cores)");
  cmd->add_option("--out", ov.out, "output directory");
  cmd->add_flag_callback(
      "--timing", [&ov] { ov.timing = true; },
      "embed wall time in outputs (breaks byte-reproducibility)");
}

void add_data_flags(CLI::App* cmd, quantband::CliOverrides& ov) {
  cmd->add_option("--data", ov.data, "input CSV file");
  cmd->add_option("--outcome", ov.outcome, "outcome column");
  cmd->add_option("--group", ov.group, "group column");
  cmd->add_option("--weight", ov.weight, "weight column");
  cmd->add_option("--cluster", ov.cluster, "cluster column");
  cmd->add_option("--covariates", ov.covariates,
                  "comma-separated covariate columns");
  cmd->add_option("--grid", ov.grid, "outcome grid: auto | v1,v2,...");
  cmd->add_option("--support", ov.support,
                  "outcome support: auto | none | v1,v2,...");
  cmd->add_option("--prob-grid", ov.prob_grid,
                  "probability levels: default | lo:hi:step | a1,a2,...");
  cmd->add_flag_callback(
      "--plots", [&ov] { ov.plots = true; }, "also write SVG step plots");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simultaneous confidence bands for distribution, quantile and "
      "quantile-effect functions of possibly discrete outcomes"};
  app.set_version_flag("--version",
                       std::string("quantband ") + quantband::kVersion);
  app.require_subcommand(1);

  std::string bands_config, dec_config, sim_config;
  quantband::CliOverrides bands_ov, dec_ov, sim_ov;

  CLI::App* bands = app.add_subcommand(
      "bands", "Joint DF, quantile and quantile-effect bands from a CSV sample");
  add_run_flags(bands, bands_config, bands_ov);
  add_data_flags(bands, bands_ov);
  bands->add_option("--estimator", bands_ov.estimator,
                    "edf | dr | poisson");
  bands->add_option("--link", bands_ov.link,
                    "dr link: logit | probit | linear | gamma");
  bands->add_option("--baseline", bands_ov.baseline,
                    "baseline group for quantile effects");
  bands->add_flag_callback(
      "--ratio", [&bands_ov] { bands_ov.ratio = true; },
      "quantile ratios instead of differences");

  CLI::App* dec = app.add_subcommand(
      "decompose",
      "Two-group decomposition: observed gap, composition and unexplained "
      "quantile-effect bands");
  add_run_flags(dec, dec_config, dec_ov);
  add_data_flags(dec, dec_ov);
  dec->add_option("--link", dec_ov.link,
                  "model link: logit | probit | linear | gamma");
  dec->add_option("--group-j", dec_ov.group_j,
                  "group whose outcome structure is reweighted");
  dec->add_option("--group-m", dec_ov.group_m, "reference group");

  CLI::App* sim = app.add_subcommand(
      "simulate", "Coverage and length study on synthetic two-sample designs");
  add_run_flags(sim, sim_config, sim_ov);
  sim->add_option("--nsim", sim_ov.nsim, "Monte Carlo replications");

  try {
    app.parse(argc, argv);
    if (bands->parsed()) {
      quantband::BandsConfig cfg =
          quantband::parse_bands_config(load_config(bands_config));
      quantband::apply_overrides(cfg, bands_ov);
      quantband::cmd_bands(cfg);
    } else if (dec->parsed()) {
      quantband::DecomposeConfig cfg =
          quantband::parse_decompose_config(load_config(dec_config));
      quantband::apply_overrides(cfg, dec_ov);
      quantband::cmd_decompose(cfg);
    } else if (sim->parsed()) {
      quantband::SimulateConfig cfg =
          quantband::parse_simulate_config(load_config(sim_config));
      quantband::apply_overrides(cfg, sim_ov);
      quantband::cmd_simulate(cfg);
    }
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const quantband::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const quantband::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const quantband::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
