#ifndef QUANTBAND_REPORT_HPP
#define QUANTBAND_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "quantband/core.hpp"
#include "quantband/simlab.hpp"

namespace quantband {

// Reproducibility stamp carried by every output file: library version,
// master seed and a hash of the effective configuration.
struct RunMetadata {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;
  bool timing = false;           // opt in: embeds wall time, breaking
  double runtime_seconds = 0.0;  // byte-reproducibility on purpose
};

// FNV-1a (64-bit) over the canonical JSON dump, as 16 hex digits.
std::string config_hash_hex(const nlohmann::json& config);

// Leading '#' line carrying the metadata, for CSV and SVG files.
std::string metadata_comment(const RunMetadata& meta);

// Admissible-set cell: unrestricted -> "", restricted empty -> "{}",
// otherwise semicolon-joined values.
std::string encode_admissible(bool restricted, const std::vector<double>& vals);
// nullopt means unrestricted.
std::optional<std::vector<double>> decode_admissible(const std::string& cell);

// CSV renderers.  Column sets:
//   DF bands:  group,y,estimate,lower,upper
//   QF bands:  group,a,q_lo,q_hi,admissible
//   QE bands:  pair,a,d_lo,d_hi,admissible
std::string render_df_csv(const RunMetadata& meta,
                          const std::vector<std::string>& labels,
                          const std::vector<MonotoneStepFn>& estimates,
                          const std::vector<DFBand>& bands);
std::string render_qf_csv(const RunMetadata& meta,
                          const std::vector<std::string>& labels,
                          const std::vector<QuantileBand>& bands);
std::string render_qe_csv(const RunMetadata& meta,
                          const std::vector<std::string>& pair_labels,
                          const std::vector<QEBand>& bands);

// Body merged with the metadata fields, pretty-printed.
std::string render_summary_json(const RunMetadata& meta,
                                nlohmann::json body);

nlohmann::json sim_report_json(const SimReport& report);
std::string render_sim_csv(const RunMetadata& meta,
                           const std::vector<SimReport>& reports);

// Static step-function plots with shaded band regions.
std::string render_df_svg(const RunMetadata& meta,
                          const std::vector<std::string>& labels,
                          const std::vector<MonotoneStepFn>& estimates,
                          const std::vector<DFBand>& bands);
std::string render_qe_svg(const RunMetadata& meta,
                          const std::vector<std::string>& pair_labels,
                          const std::vector<QEBand>& bands);

}  // namespace quantband

#endif  // QUANTBAND_REPORT_HPP
