#include "quantband/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "quantband/csv.hpp"
#include "quantband/errors.hpp"
#include "quantband/version.hpp"

namespace quantband {

std::string config_hash_hex(const nlohmann::json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string hex(16, '0');
  for (int i = 15; i >= 0; --i) {
    hex[i] = digits[h & 0xf];
    h >>= 4;
  }
  return hex;
}

std::string metadata_comment(const RunMetadata& meta) {
  std::string line = "# quantband " + std::string(kVersion) +
                     " command=" + meta.command +
                     " seed=" + std::to_string(meta.seed) +
                     " config=" + meta.config_hash;
  if (meta.timing)
    line += " runtime_seconds=" + format_double(meta.runtime_seconds);
  return line + "\n";
}

std::string encode_admissible(bool restricted,
                              const std::vector<double>& vals) {
  if (!restricted) return "";
  if (vals.empty()) return "{}";
  std::string out;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out += ';';
    out += format_double(vals[i]);
  }
  return out;
}

std::optional<std::vector<double>> decode_admissible(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  if (cell == "{}") return std::vector<double>{};
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= cell.size()) {
    const std::size_t next = cell.find(';', pos);
    const std::size_t end = (next == std::string::npos) ? cell.size() : next;
    vals.push_back(parse_double(cell.substr(pos, end - pos), "admissible set"));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return vals;
}

std::string render_df_csv(const RunMetadata& meta,
                          const std::vector<std::string>& labels,
                          const std::vector<MonotoneStepFn>& estimates,
                          const std::vector<DFBand>& bands) {
  if (labels.size() != bands.size() || estimates.size() != bands.size())
    throw ConfigError("render_df_csv: label/band count mismatch");
  std::string out = metadata_comment(meta);
  out += "group,y,estimate,lower,upper\n";
  for (std::size_t k = 0; k < bands.size(); ++k) {
    const Grid& grid = estimates[k].grid();
    for (std::size_t t = 0; t < grid.size(); ++t) {
      out += csv_row({csv_field(labels[k]), format_double(grid.point(t)),
                      format_double(estimates[k].value(t)),
                      format_double(bands[k].lower.value(t)),
                      format_double(bands[k].upper.value(t))});
    }
  }
  return out;
}

std::string render_qf_csv(const RunMetadata& meta,
                          const std::vector<std::string>& labels,
                          const std::vector<QuantileBand>& bands) {
  if (labels.size() != bands.size())
    throw ConfigError("render_qf_csv: label/band count mismatch");
  std::string out = metadata_comment(meta);
  out += "group,a,q_lo,q_hi,admissible\n";
  for (std::size_t k = 0; k < bands.size(); ++k) {
    const QuantileBand& b = bands[k];
    for (std::size_t i = 0; i < b.prob_grid.size(); ++i) {
      out += csv_row(
          {csv_field(labels[k]), format_double(b.prob_grid.level(i)),
           format_double(b.lo[i]), format_double(b.hi[i]),
           csv_field(encode_admissible(
               b.restricted, b.restricted ? b.admissible[i]
                                          : std::vector<double>{}))});
    }
  }
  return out;
}

std::string render_qe_csv(const RunMetadata& meta,
                          const std::vector<std::string>& pair_labels,
                          const std::vector<QEBand>& bands) {
  if (pair_labels.size() != bands.size())
    throw ConfigError("render_qe_csv: label/band count mismatch");
  std::string out = metadata_comment(meta);
  out += "pair,a,d_lo,d_hi,admissible\n";
  for (std::size_t k = 0; k < bands.size(); ++k) {
    const QEBand& b = bands[k];
    for (std::size_t i = 0; i < b.prob_grid.size(); ++i) {
      out += csv_row(
          {csv_field(pair_labels[k]), format_double(b.prob_grid.level(i)),
           format_double(b.lo[i]), format_double(b.hi[i]),
           csv_field(encode_admissible(
               b.restricted, b.restricted ? b.admissible[i]
                                          : std::vector<double>{}))});
    }
  }
  return out;
}

std::string render_summary_json(const RunMetadata& meta,
                                nlohmann::json body) {
  body["version"] = kVersion;
  body["command"] = meta.command;
  body["seed"] = meta.seed;
  body["config_hash"] = meta.config_hash;
  if (meta.timing) body["runtime_seconds"] = meta.runtime_seconds;
  return body.dump(2) + "\n";
}

nlohmann::json sim_report_json(const SimReport& r) {
  nlohmann::json d;
  d["family"] = r.design.family == SimDesign::Family::PoissonCounts
                    ? "counts"
                    : "ordered";
  d["lambda0"] = r.design.lambda0;
  d["lambda1"] = r.design.lambda1;
  d["mu0"] = r.design.mu0;
  d["mu1"] = r.design.mu1;
  d["cutoffs"] = r.design.cutoffs;
  d["n"] = r.design.n;
  d["level"] = r.design.level;
  d["nsim"] = r.design.nsim;
  d["draws"] = r.design.draws;
  d["prob_lo"] = r.design.prob_lo;
  d["prob_hi"] = r.design.prob_hi;
  d["prob_step"] = r.design.prob_step;
  d["seed"] = r.design.seed;
  d["scheme"] = scheme_to_string(r.design.scheme);
  d["competitors"] = r.design.competitors;

  nlohmann::json j;
  j["design"] = d;
  j["grid_points"] = r.grid_points;
  j["cov_single0"] = r.cov_single0;
  j["cov_single0_se"] = r.cov_single0_se;
  j["cov_single1"] = r.cov_single1;
  j["cov_single1_se"] = r.cov_single1_se;
  j["cov_joint_all"] = r.cov_joint_all;
  j["cov_joint_all_se"] = r.cov_joint_all_se;
  j["cov_qe"] = r.cov_qe;
  j["cov_qe_se"] = r.cov_qe_se;
  j["reject_rate"] = r.reject_rate;
  j["reject_rate_se"] = r.reject_rate_se;
  j["len_new"] = r.len_new;
  j["len_new_se"] = r.len_new_se;
  if (r.design.competitors) {
    auto method = [](const MethodReport& m) {
      nlohmann::json e;
      e["coverage"] = m.coverage;
      e["coverage_se"] = m.coverage_se;
      e["avg_length"] = m.avg_length;
      e["avg_length_se"] = m.avg_length_se;
      return e;
    };
    j["boot"] = method(r.boot);
    j["jitter1"] = method(r.jitter1);
    j["jitter2"] = method(r.jitter2);
    j["direct_zero_se_fraction"] = r.direct_zero_se_fraction;
  }
  return j;
}

std::string render_sim_csv(const RunMetadata& meta,
                           const std::vector<SimReport>& reports) {
  std::string out = metadata_comment(meta);
  out +=
      "family,lambda0,lambda1,mu0,mu1,n,level,nsim,draws,scheme,"
      "cov_single0,cov_single0_se,cov_single1,cov_single1_se,"
      "cov_joint_all,cov_joint_all_se,cov_qe,cov_qe_se,"
      "reject_rate,reject_rate_se,len_new,len_new_se,"
      "boot_cov,boot_cov_se,boot_len,boot_len_se,"
      "jitter1_cov,jitter1_cov_se,jitter2_cov,jitter2_cov_se,"
      "jitter_len,jitter_len_se,zero_se_fraction\n";
  for (const SimReport& r : reports) {
    std::vector<std::string> f;
    f.push_back(r.design.family == SimDesign::Family::PoissonCounts
                    ? "counts"
                    : "ordered");
    for (double v : {r.design.lambda0, r.design.lambda1, r.design.mu0,
                     r.design.mu1})
      f.push_back(format_double(v));
    f.push_back(std::to_string(r.design.n));
    f.push_back(format_double(r.design.level));
    f.push_back(std::to_string(r.design.nsim));
    f.push_back(std::to_string(r.design.draws));
    f.push_back(scheme_to_string(r.design.scheme));
    for (double v :
         {r.cov_single0, r.cov_single0_se, r.cov_single1, r.cov_single1_se,
          r.cov_joint_all, r.cov_joint_all_se, r.cov_qe, r.cov_qe_se,
          r.reject_rate, r.reject_rate_se, r.len_new, r.len_new_se})
      f.push_back(format_double(v));
    if (r.design.competitors) {
      for (double v :
           {r.boot.coverage, r.boot.coverage_se, r.boot.avg_length,
            r.boot.avg_length_se, r.jitter1.coverage, r.jitter1.coverage_se,
            r.jitter2.coverage, r.jitter2.coverage_se, r.jitter1.avg_length,
            r.jitter1.avg_length_se, r.direct_zero_se_fraction})
        f.push_back(format_double(v));
    } else {
      for (int i = 0; i < 11; ++i) f.push_back("");
    }
    out += csv_row(f);
  }
  return out;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#8c564b", "#e377c2"};
constexpr int kPaletteSize = 6;

constexpr double kW = 720, kH = 440;
constexpr double kML = 64, kMR = 20, kMT = 34, kMB = 48;

struct Scale {
  double lo, hi, a, b;  // pixel = a * value + b
  Scale(double lo_, double hi_, double p0, double p1) : lo(lo_), hi(hi_) {
    if (hi <= lo) hi = lo + 1.0;
    a = (p1 - p0) / (hi - lo);
    b = p0 - a * lo;
  }
  double operator()(double v) const {
    v = std::min(std::max(v, lo), hi);  // clamp unbounded band edges
    return a * v + b;
  }
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

void svg_open(std::string& out, const RunMetadata& meta,
              const std::string& title) {
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<!-- " + metadata_comment(meta).substr(2);
  out.pop_back();  // drop the newline inside the comment
  out += " -->\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) +
         "\" height=\"" + num(kH) + "\" viewBox=\"0 0 " + num(kW) + " " +
         num(kH) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kW / 2) +
         "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">" +
         title + "</text>\n";
}

void svg_axes(std::string& out, const Scale& sx, const Scale& sy,
              const std::string& xlab, const std::string& ylab) {
  out += "<g stroke=\"black\" fill=\"none\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + num(kML) + "\" y1=\"" + num(kH - kMB) + "\" x2=\"" +
         num(kW - kMR) + "\" y2=\"" + num(kH - kMB) + "\"/>\n";
  out += "<line x1=\"" + num(kML) + "\" y1=\"" + num(kMT) + "\" x2=\"" +
         num(kML) + "\" y2=\"" + num(kH - kMB) + "\"/>\n";
  out += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = sx.lo + (sx.hi - sx.lo) * i / 4.0;
    const double yv = sy.lo + (sy.hi - sy.lo) * i / 4.0;
    out += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(kH - kMB + 16) +
           "\" text-anchor=\"middle\">" + num(xv) + "</text>\n";
    out += "<text x=\"" + num(kML - 6) + "\" y=\"" + num(sy(yv) + 4) +
           "\" text-anchor=\"end\">" + num(yv) + "</text>\n";
  }
  out += "<text x=\"" + num((kML + kW - kMR) / 2) + "\" y=\"" +
         num(kH - 10) + "\" text-anchor=\"middle\">" + xlab + "</text>\n";
  out += "<text x=\"16\" y=\"" + num((kMT + kH - kMB) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num((kMT + kH - kMB) / 2) + ")\">" + ylab + "</text>\n";
  out += "</g>\n";
}

// Step path holding each value from its x to the next x (last one to
// xend); move=false continues an existing path in reverse for polygons.
std::string step_points(const std::vector<double>& xs,
                        const std::vector<double>& ys, double xend,
                        const Scale& sx, const Scale& sy, bool reverse) {
  std::string p;
  const std::size_t n = xs.size();
  if (!reverse) {
    for (std::size_t i = 0; i < n; ++i) {
      p += num(sx(xs[i])) + "," + num(sy(ys[i])) + " ";
      const double nx = (i + 1 < n) ? xs[i + 1] : xend;
      p += num(sx(nx)) + "," + num(sy(ys[i])) + " ";
    }
  } else {
    for (std::size_t ii = n; ii-- > 0;) {
      const double nx = (ii + 1 < n) ? xs[ii + 1] : xend;
      p += num(sx(nx)) + "," + num(sy(ys[ii])) + " ";
      p += num(sx(xs[ii])) + "," + num(sy(ys[ii])) + " ";
    }
  }
  return p;
}

void svg_legend(std::string& out, const std::vector<std::string>& labels) {
  double y = kMT + 8;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const char* col = kPalette[k % kPaletteSize];
    out += "<rect x=\"" + num(kW - kMR - 150) + "\" y=\"" + num(y - 9) +
           "\" width=\"12\" height=\"12\" fill=\"" + std::string(col) +
           "\" fill-opacity=\"0.6\"/>\n";
    out += "<text x=\"" + num(kW - kMR - 134) + "\" y=\"" + num(y + 1) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + labels[k] +
           "</text>\n";
    y += 16;
  }
}

}  // namespace

std::string render_df_svg(const RunMetadata& meta,
                          const std::vector<std::string>& labels,
                          const std::vector<MonotoneStepFn>& estimates,
                          const std::vector<DFBand>& bands) {
  if (labels.size() != bands.size() || estimates.size() != bands.size())
    throw ConfigError("render_df_svg: label/band count mismatch");
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  for (const MonotoneStepFn& f : estimates) {
    xmin = std::min(xmin, f.grid().points().front());
    xmax = std::max(xmax, f.grid().points().back());
  }
  const double pad = (xmax > xmin) ? 0.05 * (xmax - xmin) : 0.5;
  const Scale sx(xmin - pad, xmax + pad, kML, kW - kMR);
  const Scale sy(0.0, 1.0, kH - kMB, kMT);

  std::string out;
  svg_open(out, meta, "Distribution function bands");
  svg_axes(out, sx, sy, "y", "F(y)");
  for (std::size_t k = 0; k < bands.size(); ++k) {
    const char* col = kPalette[k % kPaletteSize];
    const std::vector<double>& xs = estimates[k].grid().points();
    const double xend = xmax + pad;
    out += "<polygon fill=\"" + std::string(col) +
           "\" fill-opacity=\"0.25\" stroke=\"none\" points=\"" +
           step_points(xs, bands[k].upper.values(), xend, sx, sy, false) +
           step_points(xs, bands[k].lower.values(), xend, sx, sy, true) +
           "\"/>\n";
    out += "<polyline fill=\"none\" stroke=\"" + std::string(col) +
           "\" stroke-width=\"1.5\" points=\"" +
           step_points(xs, estimates[k].values(), xend, sx, sy, false) +
           "\"/>\n";
  }
  svg_legend(out, labels);
  out += "</svg>\n";
  return out;
}

std::string render_qe_svg(const RunMetadata& meta,
                          const std::vector<std::string>& pair_labels,
                          const std::vector<QEBand>& bands) {
  if (pair_labels.size() != bands.size())
    throw ConfigError("render_qe_svg: label/band count mismatch");
  double xmin = 1.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  for (const QEBand& b : bands) {
    xmin = std::min(xmin, b.prob_grid.levels().front());
    xmax = std::max(xmax, b.prob_grid.levels().back());
    for (double v : b.lo)
      if (std::isfinite(v)) ymin = std::min(ymin, v);
    for (double v : b.hi)
      if (std::isfinite(v)) ymax = std::max(ymax, v);
  }
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  const Scale sx(xmin, xmax, kML, kW - kMR);
  const Scale sy(ymin - ypad, ymax + ypad, kH - kMB, kMT);

  std::string out;
  svg_open(out, meta, "Quantile effect bands");
  svg_axes(out, sx, sy, "a", "QE(a)");
  out += "<line x1=\"" + num(kML) + "\" y1=\"" + num(sy(0.0)) + "\" x2=\"" +
         num(kW - kMR) + "\" y2=\"" + num(sy(0.0)) +
         "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  for (std::size_t k = 0; k < bands.size(); ++k) {
    const char* col = kPalette[k % kPaletteSize];
    const QEBand& b = bands[k];
    const std::vector<double>& xs = b.prob_grid.levels();
    out += "<polygon fill=\"" + std::string(col) +
           "\" fill-opacity=\"0.25\" stroke=\"" + std::string(col) +
           "\" stroke-width=\"0.8\" points=\"" +
           step_points(xs, b.hi, xmax, sx, sy, false) +
           step_points(xs, b.lo, xmax, sx, sy, true) + "\"/>\n";
  }
  svg_legend(out, pair_labels);
  out += "</svg>\n";
  return out;
}

}  // namespace quantband
