#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "fracpass/config.hpp"
#include "fracpass/grid.hpp"

namespace fracpass {

/// One run artifact: the command that produced it, the fully resolved
/// configuration it ran under, and a free-form `outputs` object filled by the
/// command implementation.
struct Report {
  std::string command;
  RunConfig config;
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
  double wall_clock_s = 0.0;
};

/// Full JSON envelope: artifact tag, versions, command, timestamps, the
/// resolved config, and the outputs block. Non-finite numbers serialize as
/// null. The keys `generated_unix_ms` and `wall_clock_s` are the only
/// run-to-run volatile entries; everything else is deterministic for a fixed
/// config.
nlohmann::ordered_json report_envelope(const Report& report);

/// Flatten the outputs block to `key,value` CSV lines with dotted paths
/// (arrays use numeric components). Strings are quoted only when needed.
std::string outputs_to_csv(const nlohmann::ordered_json& outputs);

/// Write report.json (always) plus report.csv when format == "csv" into
/// out_dir, creating the directory if needed. format must be json or csv.
void write_report_files(const Report& report, const std::string& out_dir,
                        const std::string& format);

/// Cap a trace at `cap` entries by keeping every ceil(n/cap)-th sample plus
/// the final one; short traces pass through unchanged.
std::vector<double> decimate_trace(const std::vector<double>& trace, std::size_t cap = 200);

}  // namespace fracpass
