#pragma once

// CSV and JSON output of sweeps, PSD tables and count records. CSV files have a
// header row and a fixed column order; numbers are written in shortest
// round-trip form. JSON documents carry a "schema" stamp.

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fiberphase/counting.hpp"
#include "fiberphase/noise_budget.hpp"
#include "fiberphase/sweep.hpp"

namespace fiberphase {

inline constexpr const char* kSchemaVersion = "fiberphase/1";

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string& text);

/// Shortest representation that parses back to the same double; "inf", "-inf", "nan".
std::string format_double(double v);
double parse_double(const std::string& text);

/// Grid with `per_decade` points per decade, hitting every power of ten exactly.
std::vector<double> log_grid(double f_lo, double f_hi, int per_decade);

void write_sweep(const SweepResult& result, OutputFormat format, std::ostream& out);
SweepResult read_sweep_json(std::istream& in);
std::vector<std::string> sweep_columns();

void write_psd(const NoisePsdModel& psd, const std::vector<double>& freqs, OutputFormat format,
               std::ostream& out);

void write_counts(const std::vector<CountRecord>& records, OutputFormat format, std::ostream& out);
std::vector<CountRecord> read_counts_csv(std::istream& in);

/// Generic table: CSV with a header row, or JSON {"schema", "kind", "rows": [{col: value}]}.
void write_table(const std::string& kind, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows, OutputFormat format,
                 std::ostream& out);

/// One-row table.
using NamedValues = std::vector<std::pair<std::string, double>>;
void write_values(const std::string& kind, const NamedValues& values, OutputFormat format,
                  std::ostream& out);

/// Writes through `fn` to `path`, or to stdout when path is empty or "-".
/// The target file is written to a temporary sibling and renamed on success.
void emit_to(const std::string& path, const std::function<void(std::ostream&)>& fn);

}  // namespace fiberphase
