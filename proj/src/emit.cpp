#include "fiberphase/emit.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <system_error>

#include "fiberphase/errors.hpp"
#include "json.hpp"

namespace fiberphase {

using nlohmann::json;

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>());
  throw ConfigError("", 0, "expected a number in JSON document");
}

std::vector<double> row_values(const SweepRow& r) {
  return {r.theta,
          r.gravitational_phase,
          r.rotation_linear,
          r.rotation_oscillating,
          r.rotation_total,
          r.rotation_east_west,
          r.pulse_width_1,
          r.pulse_width_3,
          r.visibility,
          r.p_plus,
          r.p_minus,
          r.p_arm2_open[0],
          r.p_arm2_open[1],
          r.p_arm2_open[2],
          r.p_arm3_open[0],
          r.p_arm3_open[1],
          r.p_arm3_open[2],
          r.integration_time_max,
          r.integration_time_quarter,
          r.noise_rms,
          r.noise_margin,
          r.noise_pass ? 1.0 : 0.0};
}

SweepRow row_from(const std::vector<double>& v) {
  SweepRow r;
  std::size_t i = 0;
  r.theta = v[i++];
  r.gravitational_phase = v[i++];
  r.rotation_linear = v[i++];
  r.rotation_oscillating = v[i++];
  r.rotation_total = v[i++];
  r.rotation_east_west = v[i++];
  r.pulse_width_1 = v[i++];
  r.pulse_width_3 = v[i++];
  r.visibility = v[i++];
  r.p_plus = v[i++];
  r.p_minus = v[i++];
  for (double& p : r.p_arm2_open) p = v[i++];
  for (double& p : r.p_arm3_open) p = v[i++];
  r.integration_time_max = v[i++];
  r.integration_time_quarter = v[i++];
  r.noise_rms = v[i++];
  r.noise_margin = v[i++];
  r.noise_pass = v[i++] != 0.0;
  return r;
}

const char* provenance_name(PsdProvenance p) {
  return p == PsdProvenance::parametric ? "parametric" : "tabulated";
}

void write_csv_row(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_double(values[i]);
  }
  out << '\n';
}

}  // namespace

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw DomainError("unknown output format '" + text + "' (expected csv or json)");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw DomainError("malformed number '" + text + "'");
  return v;
}

std::vector<double> log_grid(double f_lo, double f_hi, int per_decade) {
  if (!(f_lo > 0.0 && f_lo <= f_hi) || per_decade < 1) throw DomainError("invalid log grid");
  std::vector<double> out;
  const int d0 = static_cast<int>(std::floor(std::log10(f_lo))) - 1;
  const int d1 = static_cast<int>(std::ceil(std::log10(f_hi))) + 1;
  for (int d = d0; d <= d1; ++d) {
    const double decade = std::pow(10.0, d);
    for (int j = 0; j < per_decade; ++j) {
      const double f = j == 0 ? decade : decade * std::pow(10.0, static_cast<double>(j) / per_decade);
      if (f >= f_lo * (1 - 1e-12) && f <= f_hi * (1 + 1e-12)) out.push_back(f);
    }
  }
  return out;
}

std::vector<std::string> sweep_columns() {
  return {"theta_rad",
          "grav_phase_rad",
          "rotation_linear_rad",
          "rotation_oscillating_rad",
          "rotation_total_rad",
          "rotation_east_west_rad",
          "pulse_width_1_s",
          "pulse_width_3_s",
          "visibility",
          "p_plus",
          "p_minus",
          "p_d1_arm2_open",
          "p_d2_arm2_open",
          "p_d3_arm2_open",
          "p_d1_arm3_open",
          "p_d2_arm3_open",
          "p_d3_arm3_open",
          "integration_time_max_s",
          "integration_time_quarter_s",
          "noise_rms_rad",
          "noise_margin",
          "noise_pass"};
}

void write_sweep(const SweepResult& result, OutputFormat format, std::ostream& out) {
  const std::vector<std::string> cols = sweep_columns();
  if (format == OutputFormat::csv) {
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const SweepRow& r : result.rows) write_csv_row(out, row_values(r));
    return;
  }
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["kind"] = "sweep";
  doc["scenario"] = result.scenario;
  doc["modulation_frequency_hz"] = number(result.modulation_frequency);
  doc["detection_bandwidth_hz"] = number(result.detection_bandwidth);
  doc["rows"] = json::array();
  for (const SweepRow& r : result.rows) {
    const std::vector<double> v = row_values(r);
    json row = json::object();
    for (std::size_t i = 0; i < cols.size(); ++i) row[cols[i]] = number(v[i]);
    doc["rows"].push_back(std::move(row));
  }
  out << doc.dump(2) << '\n';
}

SweepResult read_sweep_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", 0, std::string("JSON parse error: ") + e.what());
  }
  if (doc.value("schema", "") != kSchemaVersion)
    throw ConfigError("schema", 0, "expected schema " + std::string(kSchemaVersion));
  if (doc.value("kind", "") != "sweep") throw ConfigError("kind", 0, "not a sweep document");
  SweepResult result;
  result.scenario = doc.at("scenario").get<std::string>();
  result.modulation_frequency = number_from(doc.at("modulation_frequency_hz"));
  result.detection_bandwidth = number_from(doc.at("detection_bandwidth_hz"));
  const std::vector<std::string> cols = sweep_columns();
  for (const json& row : doc.at("rows")) {
    std::vector<double> v;
    for (const std::string& c : cols) {
      if (!row.contains(c)) throw ConfigError(c, 0, "missing column in sweep row");
      v.push_back(number_from(row.at(c)));
    }
    result.rows.push_back(row_from(v));
  }
  return result;
}

void write_psd(const NoisePsdModel& psd, const std::vector<double>& freqs, OutputFormat format,
               std::ostream& out) {
  if (format == OutputFormat::csv) {
    out << "freq_hz,amp_rad_per_sqrthz\n";
    for (double f : freqs) write_csv_row(out, {f, psd.amplitude(f)});
    return;
  }
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["kind"] = "psd";
  doc["provenance"] = provenance_name(psd.provenance());
  doc["segments"] = json::array();
  for (const PsdSegment& s : psd.segments())
    doc["segments"].push_back({{"f_lo_hz", s.f_lo},
                               {"f_hi_hz", s.f_hi},
                               {"amplitude_at_ref", s.amplitude_at_ref},
                               {"ref_freq_hz", s.ref_freq},
                               {"slope", s.slope}});
  doc["points"] = json::array();
  for (double f : freqs)
    doc["points"].push_back({{"freq_hz", f}, {"amp_rad_per_sqrthz", psd.amplitude(f)}});
  out << doc.dump(2) << '\n';
}

void write_counts(const std::vector<CountRecord>& records, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::csv) {
    out << "bin_index,detector,switch_state,counts\n";
    for (const CountRecord& r : records)
      out << r.bin_index << ',' << to_string(r.detector) << ',' << to_string(r.state) << ','
          << r.counts << '\n';
    return;
  }
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["kind"] = "counts";
  doc["records"] = json::array();
  for (const CountRecord& r : records)
    doc["records"].push_back({{"bin_index", r.bin_index},
                              {"detector", to_string(r.detector)},
                              {"switch_state", to_string(r.state)},
                              {"counts", r.counts}});
  out << doc.dump(2) << '\n';
}

std::vector<CountRecord> read_counts_csv(std::istream& in) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || line != "bin_index,detector,switch_state,counts")
    throw ConfigError("header", 1, "expected header 'bin_index,detector,switch_state,counts'");
  std::vector<CountRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string bin, det, state, counts;
    if (!std::getline(row, bin, ',') || !std::getline(row, det, ',') ||
        !std::getline(row, state, ',') || !std::getline(row, counts))
      throw ConfigError("row", line_no, "expected four columns");
    try {
      CountRecord r;
      r.bin_index = std::stoll(bin);
      r.detector = parse_detector(det);
      r.state = parse_switch_state(state);
      r.counts = std::stoull(counts);
      out.push_back(r);
    } catch (const std::exception& e) {
      throw ConfigError("row", line_no, e.what());
    }
  }
  return out;
}

void write_table(const std::string& kind, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows, OutputFormat format,
                 std::ostream& out) {
  if (format == OutputFormat::csv) {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& r : rows) write_csv_row(out, r);
    return;
  }
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["kind"] = kind;
  doc["rows"] = json::array();
  for (const auto& r : rows) {
    if (r.size() != columns.size()) throw DomainError("table row width does not match the header");
    json row = json::object();
    for (std::size_t i = 0; i < columns.size(); ++i) row[columns[i]] = number(r[i]);
    doc["rows"].push_back(std::move(row));
  }
  out << doc.dump(2) << '\n';
}

void write_values(const std::string& kind, const NamedValues& values, OutputFormat format,
                  std::ostream& out) {
  std::vector<std::string> cols;
  std::vector<double> row;
  for (const auto& kv : values) {
    cols.push_back(kv.first);
    row.push_back(kv.second);
  }
  write_table(kind, cols, {row}, format, out);
}

void emit_to(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::system_error(errno, std::generic_category(), "cannot open " + tmp.string());
    fn(out);
    out.flush();
    if (!out) throw std::system_error(errno, std::generic_category(), "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw std::system_error(ec, "cannot rename to " + target.string());
}

}  // namespace fiberphase
