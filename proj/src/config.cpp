#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "quantband/commands.hpp"
#include "quantband/csv.hpp"
#include "quantband/errors.hpp"

namespace quantband {

namespace {

// Object reader that tracks which keys were consumed and rejects the rest,
// so typos in config files fail loudly.
class JsonReader {
 public:
  explicit JsonReader(const nlohmann::json& j) : j_(j) {
    if (!j.is_object())
      throw ConfigError("config must be a JSON object");
  }

  const nlohmann::json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    const nlohmann::json* v = find(key);
    if (!v) return fallback;
    try {
      return v->get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError("unknown config key '" + it.key() + "'");
  }

 private:
  const nlohmann::json& j_;
  std::set<std::string> seen_;
};

std::vector<double> number_array(const nlohmann::json& v,
                                 const std::string& key) {
  if (!v.is_array())
    throw ConfigError("config key '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      throw ConfigError("config key '" + key + "' must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

ValueListSpec value_list(JsonReader& r, const std::string& key,
                         const char* fallback_mode, bool allow_none) {
  ValueListSpec spec{fallback_mode, {}};
  const nlohmann::json* v = r.find(key);
  if (!v) return spec;
  if (v->is_string()) {
    const std::string s = v->get<std::string>();
    if (s == "auto" || (allow_none && s == "none")) {
      spec.mode = s;
      return spec;
    }
    throw ConfigError("config key '" + key + "': unknown mode '" + s + "'");
  }
  spec.mode = "list";
  spec.values = number_array(*v, key);
  return spec;
}

ProbGridSpec prob_grid_spec(JsonReader& r) {
  ProbGridSpec spec;
  const nlohmann::json* v = r.find("prob_grid");
  if (!v) return spec;
  if (v->is_string()) {
    if (v->get<std::string>() != "default")
      throw ConfigError("config key 'prob_grid': unknown mode");
    return spec;
  }
  if (v->is_object()) {
    JsonReader pr(*v);
    spec.mode = "range";
    spec.lo = pr.get<double>("lo", 0.0);
    spec.hi = pr.get<double>("hi", 0.0);
    spec.step = pr.get<double>("step", 0.0);
    pr.finish();
    return spec;
  }
  spec.mode = "list";
  spec.levels = number_array(*v, "prob_grid");
  return spec;
}

std::optional<double> domain_sup_value(JsonReader& r) {
  const nlohmann::json* v = r.find("domain_sup");
  if (!v) return std::nullopt;
  if (v->is_string()) {
    if (v->get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    throw ConfigError("config key 'domain_sup' must be a number or \"inf\"");
  }
  if (!v->is_number())
    throw ConfigError("config key 'domain_sup' must be a number or \"inf\"");
  return v->get<double>();
}

DataSpec data_spec(JsonReader& r) {
  DataSpec d;
  d.data = r.get<std::string>("data", "");
  d.outcome = r.get<std::string>("outcome", "");
  d.group = r.get<std::string>("group", "");
  d.weight = r.get<std::string>("weight", "");
  d.cluster = r.get<std::string>("cluster", "");
  d.covariates = r.get<std::vector<std::string>>("covariates", {});
  d.categorical = r.get<std::vector<std::string>>("categorical", {});
  d.interactions = r.get<std::vector<std::string>>("interactions", {});
  return d;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> parse_number_list(const std::string& s,
                                      const std::string& what) {
  std::vector<double> out;
  for (const std::string& item : split(s, ','))
    out.push_back(parse_double(item, what));
  return out;
}

ValueListSpec value_list_from_flag(const std::string& s,
                                   const std::string& what, bool allow_none) {
  if (s == "auto") return {"auto", {}};
  if (allow_none && s == "none") return {"none", {}};
  return {"list", parse_number_list(s, what)};
}

ProbGridSpec prob_grid_from_flag(const std::string& s) {
  if (s == "default") return {};
  if (s.find(':') != std::string::npos) {
    const std::vector<std::string> parts = split(s, ':');
    if (parts.size() != 3)
      throw ConfigError("--prob-grid range must be lo:hi:step");
    ProbGridSpec spec;
    spec.mode = "range";
    spec.lo = parse_double(parts[0], "--prob-grid lo");
    spec.hi = parse_double(parts[1], "--prob-grid hi");
    spec.step = parse_double(parts[2], "--prob-grid step");
    return spec;
  }
  ProbGridSpec spec;
  spec.mode = "list";
  spec.levels = parse_number_list(s, "--prob-grid");
  return spec;
}

void apply_data_overrides(DataSpec& d, const CliOverrides& ov) {
  if (ov.data) d.data = *ov.data;
  if (ov.outcome) d.outcome = *ov.outcome;
  if (ov.group) d.group = *ov.group;
  if (ov.weight) d.weight = *ov.weight;
  if (ov.cluster) d.cluster = *ov.cluster;
  if (ov.covariates) {
    d.covariates.clear();
    if (!ov.covariates->empty())
      for (const std::string& c : split(*ov.covariates, ','))
        d.covariates.push_back(c);
  }
}

nlohmann::json value_list_json(const ValueListSpec& s) {
  if (s.mode == "list") return s.values;
  return s.mode;
}

nlohmann::json prob_grid_json(const ProbGridSpec& s) {
  if (s.mode == "default") return "default";
  if (s.mode == "range")
    return nlohmann::json{{"lo", s.lo}, {"hi", s.hi}, {"step", s.step}};
  return s.levels;
}

nlohmann::json domain_sup_json(const std::optional<double>& d) {
  if (!d) return nullptr;
  if (std::isinf(*d)) return "inf";
  return *d;
}

void data_spec_json(nlohmann::json& j, const DataSpec& d) {
  j["data"] = d.data;
  j["outcome"] = d.outcome;
  j["group"] = d.group;
  j["weight"] = d.weight;
  j["cluster"] = d.cluster;
  j["covariates"] = d.covariates;
  j["categorical"] = d.categorical;
  j["interactions"] = d.interactions;
}

}  // namespace

BandsConfig parse_bands_config(const nlohmann::json& file_config) {
  JsonReader r(file_config);
  BandsConfig cfg;
  cfg.input = data_spec(r);
  cfg.estimator = r.get<std::string>("estimator", cfg.estimator);
  cfg.link = r.get<std::string>("link", cfg.link);
  cfg.iso_weight = r.get<double>("iso_weight", cfg.iso_weight);
  cfg.level = r.get<double>("level", cfg.level);
  cfg.draws = r.get<int>("draws", cfg.draws);
  cfg.seed = r.get<std::uint64_t>("seed", cfg.seed);
  cfg.scheme = r.get<std::string>("scheme", cfg.scheme);
  cfg.cluster_level = r.get<bool>("cluster_level", cfg.cluster_level);
  cfg.grid = value_list(r, "grid", "auto", false);
  cfg.domain_sup = domain_sup_value(r);
  cfg.support = value_list(r, "support", "auto", true);
  cfg.prob_grid = prob_grid_spec(r);
  cfg.counterfactual_over =
      r.get<std::string>("counterfactual_over", cfg.counterfactual_over);
  cfg.baseline = r.get<std::string>("baseline", cfg.baseline);
  cfg.ratio = r.get<bool>("ratio", cfg.ratio);
  cfg.out = r.get<std::string>("out", cfg.out);
  cfg.plots = r.get<bool>("plots", cfg.plots);
  cfg.timing = r.get<bool>("timing", cfg.timing);
  cfg.threads = r.get<int>("threads", cfg.threads);
  r.finish();
  return cfg;
}

DecomposeConfig parse_decompose_config(const nlohmann::json& file_config) {
  JsonReader r(file_config);
  DecomposeConfig cfg;
  cfg.input = data_spec(r);
  cfg.group_j = r.get<std::string>("group_j", "");
  cfg.group_m = r.get<std::string>("group_m", "");
  cfg.link = r.get<std::string>("link", cfg.link);
  cfg.iso_weight = r.get<double>("iso_weight", cfg.iso_weight);
  cfg.level = r.get<double>("level", cfg.level);
  cfg.draws = r.get<int>("draws", cfg.draws);
  cfg.seed = r.get<std::uint64_t>("seed", cfg.seed);
  cfg.scheme = r.get<std::string>("scheme", cfg.scheme);
  cfg.cluster_level = r.get<bool>("cluster_level", cfg.cluster_level);
  cfg.grid = value_list(r, "grid", "auto", false);
  cfg.domain_sup = domain_sup_value(r);
  cfg.support = value_list(r, "support", "auto", true);
  cfg.prob_grid = prob_grid_spec(r);
  cfg.out = r.get<std::string>("out", cfg.out);
  cfg.plots = r.get<bool>("plots", cfg.plots);
  cfg.timing = r.get<bool>("timing", cfg.timing);
  cfg.threads = r.get<int>("threads", cfg.threads);
  r.finish();
  return cfg;
}

SimulateConfig parse_simulate_config(const nlohmann::json& file_config) {
  JsonReader r(file_config);
  SimulateConfig cfg;
  cfg.family = r.get<std::string>("family", cfg.family);
  cfg.lambda0 = r.get<double>("lambda0", cfg.lambda0);
  cfg.lambda1 = r.get<double>("lambda1", cfg.lambda1);
  cfg.mu0 = r.get<double>("mu0", cfg.mu0);
  cfg.mu1 = r.get<double>("mu1", cfg.mu1);
  cfg.cutoffs = r.get<std::vector<double>>("cutoffs", {});
  if (const nlohmann::json* v = r.find("n")) {
    if (v->is_number_integer())
      cfg.n = {v->get<int>()};
    else if (v->is_array()) {
      cfg.n.clear();
      for (const auto& e : *v) {
        if (!e.is_number_integer())
          throw ConfigError("config key 'n' must hold integers");
        cfg.n.push_back(e.get<int>());
      }
    } else {
      throw ConfigError("config key 'n' must be an integer or integer array");
    }
  }
  if (const nlohmann::json* v = r.find("level")) {
    if (v->is_number())
      cfg.level = {v->get<double>()};
    else
      cfg.level = number_array(*v, "level");
  }
  cfg.nsim = r.get<int>("nsim", cfg.nsim);
  cfg.draws = r.get<int>("draws", cfg.draws);
  cfg.prob_lo = r.get<double>("prob_lo", cfg.prob_lo);
  cfg.prob_hi = r.get<double>("prob_hi", cfg.prob_hi);
  cfg.prob_step = r.get<double>("prob_step", cfg.prob_step);
  cfg.seed = r.get<std::uint64_t>("seed", cfg.seed);
  cfg.scheme = r.get<std::string>("scheme", cfg.scheme);
  cfg.competitors = r.get<bool>("competitors", cfg.competitors);
  cfg.out = r.get<std::string>("out", cfg.out);
  cfg.timing = r.get<bool>("timing", cfg.timing);
  cfg.threads = r.get<int>("threads", cfg.threads);
  r.finish();
  return cfg;
}

void apply_overrides(BandsConfig& cfg, const CliOverrides& ov) {
  apply_data_overrides(cfg.input, ov);
  if (ov.estimator) cfg.estimator = *ov.estimator;
  if (ov.link) cfg.link = *ov.link;
  if (ov.level) cfg.level = *ov.level;
  if (ov.draws) cfg.draws = *ov.draws;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.scheme) cfg.scheme = *ov.scheme;
  if (ov.grid) cfg.grid = value_list_from_flag(*ov.grid, "--grid", false);
  if (ov.support)
    cfg.support = value_list_from_flag(*ov.support, "--support", true);
  if (ov.prob_grid) cfg.prob_grid = prob_grid_from_flag(*ov.prob_grid);
  if (ov.baseline) cfg.baseline = *ov.baseline;
  if (ov.ratio) cfg.ratio = *ov.ratio;
  if (ov.out) cfg.out = *ov.out;
  if (ov.plots) cfg.plots = *ov.plots;
  if (ov.timing) cfg.timing = *ov.timing;
  if (ov.threads) cfg.threads = *ov.threads;
}

void apply_overrides(DecomposeConfig& cfg, const CliOverrides& ov) {
  apply_data_overrides(cfg.input, ov);
  if (ov.group_j) cfg.group_j = *ov.group_j;
  if (ov.group_m) cfg.group_m = *ov.group_m;
  if (ov.link) cfg.link = *ov.link;
  if (ov.level) cfg.level = *ov.level;
  if (ov.draws) cfg.draws = *ov.draws;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.scheme) cfg.scheme = *ov.scheme;
  if (ov.grid) cfg.grid = value_list_from_flag(*ov.grid, "--grid", false);
  if (ov.support)
    cfg.support = value_list_from_flag(*ov.support, "--support", true);
  if (ov.prob_grid) cfg.prob_grid = prob_grid_from_flag(*ov.prob_grid);
  if (ov.out) cfg.out = *ov.out;
  if (ov.plots) cfg.plots = *ov.plots;
  if (ov.timing) cfg.timing = *ov.timing;
  if (ov.threads) cfg.threads = *ov.threads;
}

void apply_overrides(SimulateConfig& cfg, const CliOverrides& ov) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.draws) cfg.draws = *ov.draws;
  if (ov.nsim) cfg.nsim = *ov.nsim;
  if (ov.level) cfg.level = {*ov.level};
  if (ov.scheme) cfg.scheme = *ov.scheme;
  if (ov.out) cfg.out = *ov.out;
  if (ov.timing) cfg.timing = *ov.timing;
  if (ov.threads) cfg.threads = *ov.threads;
}

nlohmann::json config_json(const BandsConfig& cfg) {
  nlohmann::json j;
  data_spec_json(j, cfg.input);
  j["estimator"] = cfg.estimator;
  j["link"] = cfg.link;
  j["iso_weight"] = cfg.iso_weight;
  j["level"] = cfg.level;
  j["draws"] = cfg.draws;
  j["seed"] = cfg.seed;
  j["scheme"] = cfg.scheme;
  j["cluster_level"] = cfg.cluster_level;
  j["grid"] = value_list_json(cfg.grid);
  j["domain_sup"] = domain_sup_json(cfg.domain_sup);
  j["support"] = value_list_json(cfg.support);
  j["prob_grid"] = prob_grid_json(cfg.prob_grid);
  j["counterfactual_over"] = cfg.counterfactual_over;
  j["baseline"] = cfg.baseline;
  j["ratio"] = cfg.ratio;
  return j;
}

nlohmann::json config_json(const DecomposeConfig& cfg) {
  nlohmann::json j;
  data_spec_json(j, cfg.input);
  j["group_j"] = cfg.group_j;
  j["group_m"] = cfg.group_m;
  j["link"] = cfg.link;
  j["iso_weight"] = cfg.iso_weight;
  j["level"] = cfg.level;
  j["draws"] = cfg.draws;
  j["seed"] = cfg.seed;
  j["scheme"] = cfg.scheme;
  j["cluster_level"] = cfg.cluster_level;
  j["grid"] = value_list_json(cfg.grid);
  j["domain_sup"] = domain_sup_json(cfg.domain_sup);
  j["support"] = value_list_json(cfg.support);
  j["prob_grid"] = prob_grid_json(cfg.prob_grid);
  return j;
}

nlohmann::json config_json(const SimulateConfig& cfg) {
  nlohmann::json j;
  j["family"] = cfg.family;
  j["lambda0"] = cfg.lambda0;
  j["lambda1"] = cfg.lambda1;
  j["mu0"] = cfg.mu0;
  j["mu1"] = cfg.mu1;
  j["cutoffs"] = cfg.cutoffs;
  j["n"] = cfg.n;
  j["level"] = cfg.level;
  j["nsim"] = cfg.nsim;
  j["draws"] = cfg.draws;
  j["prob_lo"] = cfg.prob_lo;
  j["prob_hi"] = cfg.prob_hi;
  j["prob_step"] = cfg.prob_step;
  j["seed"] = cfg.seed;
  j["scheme"] = cfg.scheme;
  j["competitors"] = cfg.competitors;
  return j;
}

}  // namespace quantband
