#include "fracpass/reports.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracpass/version.hpp"

namespace fracpass {
namespace {

using json = nlohmann::ordered_json;

bool csv_needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\n") != std::string::npos;
}

std::string csv_escape(const std::string& s) {
  if (!csv_needs_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

void flatten_into(const json& node, const std::string& prefix, std::ostringstream& out) {
  if (node.is_object()) {
    for (const auto& item : node.items()) {
      const std::string next = prefix.empty() ? item.key() : prefix + "." + item.key();
      flatten_into(item.value(), next, out);
    }
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i)
      flatten_into(node[i], prefix + "." + std::to_string(i), out);
  } else if (node.is_string()) {
    out << prefix << "," << csv_escape(node.get<std::string>()) << "\n";
  } else {
    // numbers, booleans and null all round-trip through dump() unambiguously
    out << prefix << "," << node.dump() << "\n";
  }
}

}  // namespace

json report_envelope(const Report& report) {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  json root;
  root["artifact"] = "fracpass-report";
  root["version"] = kVersion;
  root["schema_version"] = kReportSchemaVersion;
  root["command"] = report.command;
  root["generated_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  root["wall_clock_s"] = report.wall_clock_s;
  root["config"] = json::parse(serialize_config(report.config));
  root["outputs"] = report.outputs;
  return root;
}

std::string outputs_to_csv(const json& outputs) {
  std::ostringstream out;
  out << "key,value\n";
  flatten_into(outputs, "", out);
  return out.str();
}

void write_report_files(const Report& report, const std::string& out_dir,
                        const std::string& format) {
  if (format != "json" && format != "csv")
    throw ConfigError("format: must be json or csv (got '" + format + "')");
  std::filesystem::create_directories(out_dir);
  const json envelope = report_envelope(report);
  {
    std::ofstream out(out_dir + "/report.json");
    if (!out) throw ConfigError("out: cannot write '" + out_dir + "/report.json'");
    out << envelope.dump(2) << "\n";
  }
  if (format == "csv") {
    std::ofstream out(out_dir + "/report.csv");
    if (!out) throw ConfigError("out: cannot write '" + out_dir + "/report.csv'");
    out << outputs_to_csv(report.outputs);
  }
}

std::vector<double> decimate_trace(const std::vector<double>& trace, std::size_t cap) {
  if (cap == 0 || trace.size() <= cap) return trace;
  const std::size_t stride = (trace.size() + cap - 1) / cap;
  std::vector<double> out;
  out.reserve(cap + 1);
  for (std::size_t i = 0; i < trace.size(); i += stride) out.push_back(trace[i]);
  if (out.empty() || out.back() != trace.back()) out.push_back(trace.back());
  return out;
}

}  // namespace fracpass
