#include "quantband/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "quantband/bandcalc.hpp"
#include "quantband/csv.hpp"
#include "quantband/errors.hpp"
#include "quantband/estimate.hpp"
#include "quantband/report.hpp"
#include "quantband/resample.hpp"
#include "quantband/simlab.hpp"
#include "quantband/special.hpp"

namespace quantband {

namespace {

struct LoadedData {
  Dataset data;
  std::size_t dropped = 0;
};

bool parses_as_number(const std::string& s) {
  try {
    parse_double(s, "");
    return true;
  } catch (const DataError&) {
    return false;
  }
}

LoadedData load_dataset(const DataSpec& spec) {
  if (spec.data.empty())
    throw ConfigError("no data file given (config key 'data' or --data)");
  if (spec.outcome.empty())
    throw ConfigError("no outcome column given (config key 'outcome')");
  const auto rows = read_csv_file(spec.data);
  if (rows.empty()) throw DataError(spec.data + ": empty file");
  const std::vector<std::string>& header = rows.front();

  std::vector<std::string> wanted = {spec.outcome};
  auto add_optional = [&](const std::string& name) {
    if (!name.empty()) wanted.push_back(name);
  };
  add_optional(spec.group);
  add_optional(spec.weight);
  add_optional(spec.cluster);
  for (const std::string& c : spec.covariates) wanted.push_back(c);

  std::vector<std::size_t> idx(wanted.size());
  for (std::size_t k = 0; k < wanted.size(); ++k) {
    std::size_t found = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] != wanted[k]) continue;
      if (found != header.size())
        throw DataError(spec.data + ": duplicate column '" + wanted[k] + "'");
      found = j;
    }
    if (found == header.size())
      throw DataError(spec.data + ": unknown column '" + wanted[k] + "'");
    idx[k] = found;
  }
  std::size_t next = 0;
  const std::size_t outcome_idx = idx[next++];
  const std::size_t group_idx = spec.group.empty() ? header.size() : idx[next++];
  const std::size_t weight_idx =
      spec.weight.empty() ? header.size() : idx[next++];
  const std::size_t cluster_idx =
      spec.cluster.empty() ? header.size() : idx[next++];
  std::vector<std::size_t> cov_idx(idx.begin() + next, idx.end());

  for (const std::string& c : spec.categorical)
    if (std::find(spec.covariates.begin(), spec.covariates.end(), c) ==
        spec.covariates.end())
      throw ConfigError("categorical column '" + c +
                        "' is not a declared covariate");

  // A covariate is categorical when forced or when any non-missing cell
  // is non-numeric; the decision uses all rows so dropped rows cannot
  // flip the type.
  std::vector<bool> is_cat(cov_idx.size(), false);
  for (std::size_t c = 0; c < cov_idx.size(); ++c) {
    if (std::find(spec.categorical.begin(), spec.categorical.end(),
                  spec.covariates[c]) != spec.categorical.end()) {
      is_cat[c] = true;
      continue;
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (cov_idx[c] >= rows[r].size()) continue;  // caught below
      const std::string& cell = rows[r][cov_idx[c]];
      if (!is_missing(cell) && !parses_as_number(cell)) {
        is_cat[c] = true;
        break;
      }
    }
  }

  LoadedData out;
  Dataset& d = out.data;
  std::vector<std::string> cluster_cells;
  std::vector<std::vector<std::string>> cat_cells(cov_idx.size());
  d.covariates.resize(cov_idx.size());
  for (std::size_t c = 0; c < cov_idx.size(); ++c) {
    d.covariates[c].name = spec.covariates[c];
    d.covariates[c].categorical = is_cat[c];
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::vector<std::string>& row = rows[r];
    if (row.size() != header.size())
      throw DataError(spec.data + ": row " + std::to_string(r) + " has " +
                      std::to_string(row.size()) + " fields, expected " +
                      std::to_string(header.size()));
    bool missing = is_missing(row[outcome_idx]);
    if (group_idx < header.size()) missing |= is_missing(row[group_idx]);
    if (weight_idx < header.size()) missing |= is_missing(row[weight_idx]);
    if (cluster_idx < header.size()) missing |= is_missing(row[cluster_idx]);
    for (std::size_t c = 0; c < cov_idx.size() && !missing; ++c)
      missing |= is_missing(row[cov_idx[c]]);
    if (missing) {
      ++out.dropped;
      continue;
    }

    const std::string where = "', row " + std::to_string(r);
    d.outcome.push_back(
        parse_double(row[outcome_idx], "column '" + spec.outcome + where));
    if (group_idx < header.size()) d.group.push_back(row[group_idx]);
    if (weight_idx < header.size()) {
      const double w =
          parse_double(row[weight_idx], "column '" + spec.weight + where);
      if (!(w >= 0.0) || std::isinf(w))
        throw DataError(spec.data + ": weight must be finite and >= 0 at row " +
                        std::to_string(r));
      d.weights.push_back(w);
    }
    if (cluster_idx < header.size()) cluster_cells.push_back(row[cluster_idx]);
    for (std::size_t c = 0; c < cov_idx.size(); ++c) {
      if (is_cat[c])
        cat_cells[c].push_back(row[cov_idx[c]]);
      else
        d.covariates[c].values.push_back(parse_double(
            row[cov_idx[c]], "column '" + spec.covariates[c] + where));
    }
  }
  if (d.outcome.empty())
    throw DataError(spec.data + ": no usable rows after dropping " +
                    std::to_string(out.dropped) + " incomplete rows");

  for (std::size_t c = 0; c < cov_idx.size(); ++c) {
    if (!is_cat[c]) continue;
    std::set<std::string> labels(cat_cells[c].begin(), cat_cells[c].end());
    d.covariates[c].labels.assign(labels.begin(), labels.end());
    d.covariates[c].values.reserve(cat_cells[c].size());
    for (const std::string& cell : cat_cells[c]) {
      const auto it = labels.find(cell);
      d.covariates[c].values.push_back(
          static_cast<double>(std::distance(labels.begin(), it)));
    }
  }
  if (cluster_idx < header.size()) {
    std::set<std::string> ids(cluster_cells.begin(), cluster_cells.end());
    std::vector<std::string> sorted(ids.begin(), ids.end());
    d.cluster_ids.reserve(cluster_cells.size());
    for (const std::string& cell : cluster_cells)
      d.cluster_ids.push_back(static_cast<int>(
          std::lower_bound(sorted.begin(), sorted.end(), cell) -
          sorted.begin()));
  }
  d.validate();
  return out;
}

Grid make_grid(const ValueListSpec& spec, const std::optional<double>& dsup,
               const std::vector<double>& outcomes) {
  std::vector<double> pts;
  if (spec.mode == "auto") {
    pts = outcomes;
  } else if (spec.mode == "list") {
    pts = spec.values;
  } else {
    throw ConfigError("grid mode must be 'auto' or an explicit list");
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.empty()) throw ConfigError("empty evaluation grid");
  return Grid(std::move(pts),
              dsup ? std::optional<double>(*dsup) : std::nullopt);
}

ProbGrid make_prob_grid(const ProbGridSpec& spec) {
  if (spec.mode == "default") return ProbGrid::default_grid();
  if (spec.mode == "range")
    return ProbGrid::regular(spec.lo, spec.hi, spec.step);
  std::vector<double> levels = spec.levels;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return ProbGrid(std::move(levels));
}

std::optional<std::vector<double>> support_values(
    const ValueListSpec& spec, const std::vector<double>& outcomes) {
  if (spec.mode == "none") return std::nullopt;
  std::vector<double> vals = (spec.mode == "auto") ? outcomes : spec.values;
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  if (vals.empty()) throw ConfigError("empty support set");
  return vals;
}

DesignSpec make_design_spec(const DataSpec& in) {
  DesignSpec s;
  s.columns = in.covariates;
  for (const std::string& pair : in.interactions) {
    const std::size_t sep = pair.find(':');
    if (sep == std::string::npos || sep == 0 || sep + 1 == pair.size() ||
        pair.find(':', sep + 1) != std::string::npos)
      throw ConfigError("interaction '" + pair + "' must look like 'a:b'");
    s.interactions.emplace_back(pair.substr(0, sep), pair.substr(sep + 1));
  }
  return s;
}

std::vector<double> base_weights(const Dataset& data) {
  if (!data.weights.empty()) return data.weights;
  return std::vector<double>(data.rows(), 1.0);
}

struct EstimatorBundle {
  EstimatorFn fn;
  std::vector<MonotoneStepFn> point;
  std::vector<std::vector<char>> degenerate;  // empty when not applicable
  std::vector<std::string> labels;            // display labels
  std::vector<int> degenerate_count;          // per curve, model estimators
  std::vector<int> separation_count;
};

std::vector<std::size_t> all_row_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

EstimatorBundle make_bands_bundle(const Dataset& data, const Grid& grid,
                                  const BandsConfig& cfg) {
  const std::vector<std::string> labels = data.group_labels();
  std::vector<std::vector<std::size_t>> rows;
  rows.reserve(labels.size());
  for (const std::string& g : labels) rows.push_back(data.rows_of(g));
  const std::vector<double> base = base_weights(data);
  const ShapeConfig scfg{cfg.iso_weight};

  EstimatorBundle b;
  for (const std::string& g : labels) b.labels.push_back(g.empty() ? "all" : g);

  if (cfg.estimator == "edf") {
    const Dataset* d = &data;
    b.fn = [d, rows, base, grid](const std::vector<double>& w) {
      std::vector<MonotoneStepFn> out;
      out.reserve(rows.size());
      for (const auto& rk : rows) {
        std::vector<double> y(rk.size()), wk(rk.size());
        for (std::size_t i = 0; i < rk.size(); ++i) {
          y[i] = d->outcome[rk[i]];
          wk[i] = base[rk[i]] * w[rk[i]];
        }
        out.push_back(edf(y, wk, grid));
      }
      return out;
    };
    b.point = b.fn(std::vector<double>(data.rows(), 1.0));
    return b;
  }

  const DesignSpec dspec = make_design_spec(cfg.input);
  if (cfg.counterfactual_over != "own" && cfg.counterfactual_over != "pooled")
    throw ConfigError("counterfactual_over must be 'own' or 'pooled'");
  const bool pooled = cfg.counterfactual_over == "pooled";
  const std::vector<std::size_t> all_rows = all_row_indices(data.rows());

  if (cfg.estimator == "dr") {
    const LinkKind link = link_from_string(cfg.link);
    const Dataset* d = &data;
    b.fn = [d, rows, base, grid, link, dspec, scfg, pooled,
            all_rows](const std::vector<double>& w) {
      std::vector<double> eff(base.size());
      for (std::size_t i = 0; i < base.size(); ++i) eff[i] = base[i] * w[i];
      std::vector<MonotoneStepFn> out;
      out.reserve(rows.size());
      for (const auto& rk : rows) {
        const DRFit fit = dr_fit(*d, rk, grid, link, dspec, eff, scfg);
        out.push_back(counterfactual(fit, *d, pooled ? all_rows : rk, eff));
      }
      return out;
    };
    // Unit-weight pass kept explicit so the fit diagnostics are available.
    for (const auto& rk : rows) {
      const DRFit fit = dr_fit(data, rk, grid, link, dspec, base, scfg);
      b.point.push_back(counterfactual(fit, data, pooled ? all_rows : rk, base));
      std::vector<char> deg(grid.size(), 0);
      int dcount = 0, scount = 0;
      for (std::size_t t = 0; t < grid.size(); ++t) {
        deg[t] = fit.degenerate[t] >= 0;
        dcount += deg[t];
        scount += fit.separation[t] ? 1 : 0;
      }
      b.degenerate.push_back(std::move(deg));
      b.degenerate_count.push_back(dcount);
      b.separation_count.push_back(scount);
    }
    return b;
  }

  if (cfg.estimator == "poisson") {
    // Per-group design matrices are weight-independent: build them once.
    struct GroupDesign {
      Eigen::VectorXd y;
      Eigen::MatrixXd X;
      Eigen::MatrixXd X_target;
      std::vector<std::size_t> fit_rows, target_rows;
    };
    auto designs = std::make_shared<std::vector<GroupDesign>>();
    for (const auto& rk : rows) {
      GroupDesign g;
      g.fit_rows = rk;
      g.target_rows = pooled ? all_rows : rk;
      g.y.resize(rk.size());
      for (std::size_t i = 0; i < rk.size(); ++i) g.y[i] = data.outcome[rk[i]];
      g.X = build_design(data, rk, dspec, nullptr);
      g.X_target = pooled ? build_design(data, all_rows, dspec, nullptr) : g.X;
      designs->push_back(std::move(g));
    }
    b.fn = [designs, base, grid](const std::vector<double>& w) {
      std::vector<MonotoneStepFn> out;
      out.reserve(designs->size());
      for (const GroupDesign& g : *designs) {
        Eigen::VectorXd wk(g.fit_rows.size());
        for (std::size_t i = 0; i < g.fit_rows.size(); ++i)
          wk[i] = base[g.fit_rows[i]] * w[g.fit_rows[i]];
        const PoissonFit fit = poisson_fit(g.y, g.X, wk);
        const Eigen::VectorXd eta = g.X_target * fit.beta;
        std::vector<double> values(grid.size(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < g.target_rows.size(); ++i) {
          const double wi = base[g.target_rows[i]] * w[g.target_rows[i]];
          if (wi == 0.0) continue;
          total += wi;
          const double rate = std::exp(eta[i]);
          for (std::size_t t = 0; t < grid.size(); ++t)
            values[t] += wi * poisson_cdf(rate, grid.point(t));
        }
        if (!(total > 0.0))
          throw NumericError("poisson estimator: zero total weight");
        for (double& v : values) v = std::min(1.0, std::max(0.0, v / total));
        for (std::size_t t = 1; t < values.size(); ++t)
          values[t] = std::max(values[t], values[t - 1]);
        out.emplace_back(grid, std::move(values));
      }
      return out;
    };
    b.point = b.fn(std::vector<double>(data.rows(), 1.0));
    return b;
  }

  throw ConfigError("unknown estimator '" + cfg.estimator +
                    "' (expected edf, dr or poisson)");
}

struct PairSpec {
  std::size_t j, m;
  std::string label;
};

struct PipelineResult {
  BandSet set;
  ProbGrid common;
  std::vector<QuantileBand> qf;
  std::vector<QEBand> qe;
  std::vector<EqualityTest> eq;
  std::vector<std::string> pair_labels;
};

EqualityTest test_ratio_equality(const QEBand& band) {
  QEBand shifted = band;  // ratio == 1 everywhere <=> shifted band covers 0
  for (double& v : shifted.lo) v -= 1.0;
  for (double& v : shifted.hi) v -= 1.0;
  for (auto& vals : shifted.admissible)
    for (double& v : vals) v -= 1.0;
  return test_equality(shifted);
}

PipelineResult run_band_pipeline(
    const Dataset& data, const Grid& grid, const EstimatorBundle& bundle,
    double level, const BootstrapConfig& bcfg, int threads,
    const ProbGridSpec& pgspec,
    const std::optional<std::vector<double>>& support,
    const ShapeConfig& scfg, bool ratio, const std::vector<PairSpec>& pairs) {
  const int k = static_cast<int>(bundle.point.size());
  const BootstrapDraws draws = bootstrap_dfs(
      bundle.fn, data.rows(), data.cluster_ids, k, grid, bcfg, threads);
  PointEstimates pest{bundle.point, bundle.degenerate};
  BandSet set = df_bands_joint(pest, draws, level, scfg);

  std::vector<double> edges;
  for (const DFBand& band : set.bands) {
    edges.insert(edges.end(), band.lower.values().begin(),
                 band.lower.values().end());
    edges.insert(edges.end(), band.upper.values().begin(),
                 band.upper.values().end());
  }
  const ProbGrid common = make_prob_grid(pgspec).merged(edges);

  std::vector<QuantileBand> qf;
  qf.reserve(set.bands.size());
  for (const DFBand& band : set.bands) {
    QuantileBand qb = invert_band(band, common);
    if (support) qb = restrict_support(qb, *support);
    qf.push_back(std::move(qb));
  }

  std::vector<QEBand> qe;
  std::vector<EqualityTest> eq;
  std::vector<std::string> pair_labels;
  for (const PairSpec& p : pairs) {
    const QEBand band = ratio ? ratio_band(qf[p.j], qf[p.m])
                              : qe_band(qf[p.j], qf[p.m]);
    eq.push_back(ratio ? test_ratio_equality(band) : test_equality(band));
    qe.push_back(band);
    pair_labels.push_back(p.label);
  }
  return PipelineResult{std::move(set),       common,        std::move(qf),
                        std::move(qe),        std::move(eq), std::move(pair_labels)};
}

nlohmann::json equality_json(const PipelineResult& res) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < res.eq.size(); ++i) {
    nlohmann::json e;
    e["pair"] = res.pair_labels[i];
    e["reject"] = res.eq[i].reject;
    std::vector<double> levels;
    for (std::size_t idx : res.eq[i].offending)
      levels.push_back(res.common.level(idx));
    e["offending_levels"] = levels;
    e["used_empty_fallback"] = res.eq[i].used_empty_fallback;
    arr.push_back(e);
  }
  return arr;
}

nlohmann::json grid_json(const Grid& grid) {
  nlohmann::json j;
  j["points"] = grid.points();
  j["domain_sup"] = std::isinf(grid.domain_sup())
                        ? nlohmann::json("inf")
                        : nlohmann::json(grid.domain_sup());
  return j;
}

void write_band_outputs(const std::string& out_dir, const RunMetadata& meta,
                        const PipelineResult& res,
                        const std::vector<std::string>& labels, bool plots,
                        nlohmann::json summary_body) {
  std::filesystem::create_directories(out_dir);
  const std::string base = out_dir + "/";
  atomic_write(base + "df_bands.csv",
               render_df_csv(meta, labels, res.set.estimates, res.set.bands));
  atomic_write(base + "qf_bands.csv", render_qf_csv(meta, labels, res.qf));
  if (!res.qe.empty())
    atomic_write(base + "qe_bands.csv",
                 render_qe_csv(meta, res.pair_labels, res.qe));
  summary_body["critical_value"] = res.set.report.c;
  summary_body["prob_levels"] = res.common.size();
  nlohmann::json excluded = nlohmann::json::array();
  for (const auto& ex : res.set.report.excluded) {
    int count = 0;
    for (char e : ex) count += e ? 1 : 0;
    excluded.push_back(count);
  }
  summary_body["excluded_points"] = excluded;
  nlohmann::json rest_empty = nlohmann::json::array();
  for (const QuantileBand& qb : res.qf) {
    int count = 0;
    for (std::size_t i = 0; i < qb.prob_grid.size(); ++i)
      count += qb.admissible_empty_at(i) ? 1 : 0;
    rest_empty.push_back(count);
  }
  summary_body["restricted_empty"] = rest_empty;
  summary_body["equality_tests"] = equality_json(res);
  atomic_write(base + "summary.json",
               render_summary_json(meta, std::move(summary_body)));
  if (plots) {
    atomic_write(base + "df_bands.svg",
                 render_df_svg(meta, labels, res.set.estimates, res.set.bands));
    if (!res.qe.empty())
      atomic_write(base + "qe_bands.svg",
                   render_qe_svg(meta, res.pair_labels, res.qe));
  }
}

void validate_common(double level, int draws, double iso_weight) {
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("level must lie strictly inside (0,1)");
  if (draws < 2) throw ConfigError("draws must be at least 2");
  if (!(iso_weight >= 0.0 && iso_weight <= 1.0))
    throw ConfigError("iso_weight must lie in [0,1]");
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

void cmd_bands(const BandsConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_common(cfg.level, cfg.draws, cfg.iso_weight);
  const BootstrapScheme scheme = scheme_from_string(cfg.scheme);

  const LoadedData ld = load_dataset(cfg.input);
  const Grid grid = make_grid(cfg.grid, cfg.domain_sup, ld.data.outcome);
  const EstimatorBundle bundle = make_bands_bundle(ld.data, grid, cfg);
  const auto support = support_values(cfg.support, ld.data.outcome);

  std::vector<PairSpec> pairs;
  if (bundle.labels.size() >= 2) {
    std::size_t m = 0;
    if (!cfg.baseline.empty()) {
      const auto it = std::find(bundle.labels.begin(), bundle.labels.end(),
                                cfg.baseline);
      if (it == bundle.labels.end())
        throw ConfigError("baseline group '" + cfg.baseline + "' not found");
      m = static_cast<std::size_t>(it - bundle.labels.begin());
    }
    const char* sep = cfg.ratio ? " / " : " - ";
    for (std::size_t j = 0; j < bundle.labels.size(); ++j)
      if (j != m)
        pairs.push_back(
            {j, m, bundle.labels[j] + sep + bundle.labels[m]});
  }

  BootstrapConfig bcfg;
  bcfg.scheme = scheme;
  bcfg.draws = cfg.draws;
  bcfg.master_seed = cfg.seed;
  bcfg.cluster_level = cfg.cluster_level;

  const PipelineResult res = run_band_pipeline(
      ld.data, grid, bundle, cfg.level, bcfg, cfg.threads, cfg.prob_grid,
      support, ShapeConfig{cfg.iso_weight}, cfg.ratio, pairs);

  RunMetadata meta;
  meta.command = "bands";
  meta.seed = cfg.seed;
  meta.config_hash = config_hash_hex(config_json(cfg));
  meta.timing = cfg.timing;
  meta.runtime_seconds = elapsed_seconds(t0);

  nlohmann::json body;
  body["estimator"] = cfg.estimator;
  if (cfg.estimator == "dr") body["link"] = cfg.link;
  body["level"] = cfg.level;
  body["draws"] = cfg.draws;
  body["scheme"] = cfg.scheme;
  body["cluster_level"] = cfg.cluster_level;
  body["groups"] = bundle.labels;
  body["grid"] = grid_json(grid);
  body["rows_used"] = ld.data.rows();
  body["dropped_rows"] = ld.dropped;
  body["support"] = support ? nlohmann::json(*support) : nlohmann::json();
  body["ratio"] = cfg.ratio;
  if (!bundle.degenerate_count.empty()) {
    body["degenerate_points"] = bundle.degenerate_count;
    body["separation_points"] = bundle.separation_count;
  }
  write_band_outputs(cfg.out, meta, res, bundle.labels, cfg.plots,
                     std::move(body));
}

void cmd_decompose(const DecomposeConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_common(cfg.level, cfg.draws, cfg.iso_weight);
  const BootstrapScheme scheme = scheme_from_string(cfg.scheme);
  if (cfg.input.group.empty())
    throw ConfigError("decompose needs a group column");
  if (cfg.group_j.empty() || cfg.group_m.empty())
    throw ConfigError("decompose needs group_j and group_m");
  if (cfg.group_j == cfg.group_m)
    throw ConfigError("group_j and group_m must differ");

  const LoadedData ld = load_dataset(cfg.input);
  const Grid grid = make_grid(cfg.grid, cfg.domain_sup, ld.data.outcome);
  const auto support = support_values(cfg.support, ld.data.outcome);
  const DesignSpec dspec = make_design_spec(cfg.input);
  const LinkKind link = link_from_string(cfg.link);
  const ShapeConfig scfg{cfg.iso_weight};
  const std::vector<double> base = base_weights(ld.data);

  // The three decomposition DFs bootstrapped as one joint system.
  const Dataset* d = &ld.data;
  EstimatorBundle bundle;
  bundle.labels = {cfg.group_j + "|" + cfg.group_j,
                   cfg.group_m + "|" + cfg.group_m,
                   cfg.group_j + "|" + cfg.group_m};
  bundle.fn = [d, base, grid, link, dspec, scfg, j = cfg.group_j,
               m = cfg.group_m](const std::vector<double>& w) {
    std::vector<double> eff(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) eff[i] = base[i] * w[i];
    DecompositionTriplet trip =
        decomposition_triplet(*d, grid, j, m, link, dspec, eff, scfg);
    return std::vector<MonotoneStepFn>{std::move(trip.f_jj),
                                       std::move(trip.f_mm),
                                       std::move(trip.f_jm)};
  };
  {
    DecompositionTriplet trip = decomposition_triplet(
        ld.data, grid, cfg.group_j, cfg.group_m, link, dspec, base, scfg);
    bundle.point = {trip.f_jj, trip.f_mm, trip.f_jm};
    int dcount = 0, scount = 0;
    for (std::size_t t = 0; t < grid.size(); ++t) {
      dcount += trip.fit_j.degenerate[t] >= 0 ? 1 : 0;
      scount += trip.fit_j.separation[t] ? 1 : 0;
    }
    bundle.degenerate_count = {0, 0, dcount};
    bundle.separation_count = {0, 0, scount};
  }

  const std::vector<PairSpec> pairs = {
      {0, 1, "raw"}, {0, 2, "composition"}, {2, 1, "unexplained"}};

  BootstrapConfig bcfg;
  bcfg.scheme = scheme;
  bcfg.draws = cfg.draws;
  bcfg.master_seed = cfg.seed;
  bcfg.cluster_level = cfg.cluster_level;

  const PipelineResult res =
      run_band_pipeline(ld.data, grid, bundle, cfg.level, bcfg, cfg.threads,
                        cfg.prob_grid, support, scfg, false, pairs);

  RunMetadata meta;
  meta.command = "decompose";
  meta.seed = cfg.seed;
  meta.config_hash = config_hash_hex(config_json(cfg));
  meta.timing = cfg.timing;
  meta.runtime_seconds = elapsed_seconds(t0);

  nlohmann::json body;
  body["group_j"] = cfg.group_j;
  body["group_m"] = cfg.group_m;
  body["link"] = cfg.link;
  body["level"] = cfg.level;
  body["draws"] = cfg.draws;
  body["scheme"] = cfg.scheme;
  body["cluster_level"] = cfg.cluster_level;
  body["curves"] = bundle.labels;
  body["pairs"] = nlohmann::json{
      {"raw", bundle.labels[0] + " - " + bundle.labels[1]},
      {"composition", bundle.labels[0] + " - " + bundle.labels[2]},
      {"unexplained", bundle.labels[2] + " - " + bundle.labels[1]}};
  body["grid"] = grid_json(grid);
  body["rows_used"] = ld.data.rows();
  body["dropped_rows"] = ld.dropped;
  body["support"] = support ? nlohmann::json(*support) : nlohmann::json();
  body["degenerate_points"] = bundle.degenerate_count;
  body["separation_points"] = bundle.separation_count;
  write_band_outputs(cfg.out, meta, res, bundle.labels, cfg.plots,
                     std::move(body));
}

void cmd_simulate(const SimulateConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.family != "counts" && cfg.family != "ordered")
    throw ConfigError("family must be 'counts' or 'ordered'");
  if (cfg.family == "counts" && (!(cfg.lambda0 > 0.0) || !(cfg.lambda1 > 0.0)))
    throw ConfigError("count rates must be positive");
  if (cfg.n.empty() || cfg.level.empty())
    throw ConfigError("empty (n, level) sweep");
  const BootstrapScheme scheme = scheme_from_string(cfg.scheme);

  std::vector<SimReport> reports;
  for (const int n : cfg.n) {
    for (const double level : cfg.level) {
      SimDesign design;
      design.family = cfg.family == "counts"
                          ? SimDesign::Family::PoissonCounts
                          : SimDesign::Family::OrderedLatent;
      design.lambda0 = cfg.lambda0;
      design.lambda1 = cfg.lambda1;
      design.mu0 = cfg.mu0;
      design.mu1 = cfg.mu1;
      design.cutoffs = cfg.cutoffs;
      design.n = n;
      design.level = level;
      design.nsim = cfg.nsim;
      design.draws = cfg.draws;
      design.prob_lo = cfg.prob_lo;
      design.prob_hi = cfg.prob_hi;
      design.prob_step = cfg.prob_step;
      design.seed = cfg.seed;
      design.scheme = scheme;
      design.competitors = cfg.competitors;
      design.threads = cfg.threads;
      reports.push_back(run_design(design));
    }
  }

  RunMetadata meta;
  meta.command = "simulate";
  meta.seed = cfg.seed;
  meta.config_hash = config_hash_hex(config_json(cfg));
  meta.timing = cfg.timing;
  meta.runtime_seconds = elapsed_seconds(t0);

  std::filesystem::create_directories(cfg.out);
  atomic_write(cfg.out + "/sim_report.csv", render_sim_csv(meta, reports));
  nlohmann::json body;
  body["reports"] = nlohmann::json::array();
  for (const SimReport& r : reports) body["reports"].push_back(sim_report_json(r));
  atomic_write(cfg.out + "/sim_report.json",
               render_summary_json(meta, std::move(body)));
}

}  // namespace quantband
