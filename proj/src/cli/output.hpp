#pragma once

// Tabular results and their CSV / JSON renderings. Every rendering opens
// with the reproducibility header: version, command and resolved parameters.

#include <string>
#include <variant>
#include <vector>

#include "cli/config.hpp"

namespace thermoswitch::cli {

/// Empty cells render as nothing in CSV and null in JSON.
using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  /// Index of a column by name; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
};

/// %.17g: every double round-trips.
std::string format_double(double x);

/// Version, command and parameters; I/O-only settings (out, threads, format)
/// are left out so identical physics gives identical bytes.
Json header_object(const RunConfig& cfg);
std::string header_line(const RunConfig& cfg);

std::string render_csv(const Table& table, const RunConfig& cfg);
/// {"_header": {...}, "columns": [...], "rows": [[...], ...]}
std::string render_json(const Table& table, const RunConfig& cfg);
std::string render(const Table& table, const RunConfig& cfg);

/// Writes to cfg.out, or stdout when it is empty or "-".
void write_text(const std::string& text, const std::string& path);

/// Gnuplot script plotting every column against the first.
std::string plot_script(const Table& table, const std::string& data_path, const std::string& command);

}  // namespace thermoswitch::cli
