#include "cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "thermoswitch/version.hpp"

namespace thermoswitch::cli {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width does not match the column count");
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::out_of_range("no column '" + name + "'");
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json header_object(const RunConfig& cfg) {
  return Json{{"version", std::string(version)}, {"command", cfg.command}, {"parameters", cfg.params}};
}

std::string header_line(const RunConfig& cfg) {
  return "# thermoswitch " + std::string(version) + " " + cfg.command + " " + cfg.params.dump();
}

namespace {

std::string csv_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double x) const { return format_double(x); }
    std::string operator()(long long x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string quoted = "\"";
      for (char ch : s) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return quoted + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

Json json_cell(const Cell& c) {
  struct Visitor {
    Json operator()(std::monostate) const { return nullptr; }
    // JSON has no NaN or infinity.
    Json operator()(double x) const { return std::isfinite(x) ? Json(x) : Json(nullptr); }
    Json operator()(long long x) const { return x; }
    Json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace

std::string render_csv(const Table& table, const RunConfig& cfg) {
  std::ostringstream out;
  out << header_line(cfg) << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
  return out.str();
}

std::string render_json(const Table& table, const RunConfig& cfg) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r = Json::array();
    for (const auto& c : row) r.push_back(json_cell(c));
    rows.push_back(std::move(r));
  }
  const Json doc{{"_header", header_object(cfg)}, {"columns", table.columns}, {"rows", std::move(rows)}};
  return doc.dump(1) + "\n";
}

std::string render(const Table& table, const RunConfig& cfg) {
  return cfg.format == Format::json ? render_json(table, cfg) : render_csv(table, cfg);
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    if (!std::cout) throw IoError("cannot write to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("cannot write '" + path + "'");
}

std::string plot_script(const Table& table, const std::string& data_path, const std::string& command) {
  std::ostringstream s;
  s << "# gnuplot script for thermoswitch " << command << "\n"
    << "set datafile separator ','\n"
    << "set key autotitle columnhead\n"
    << "set xlabel '" << table.columns.front() << "'\n"
    << "plot ";
  for (std::size_t i = 1; i < table.columns.size(); ++i)
    s << (i > 1 ? ", \\\n     " : "") << "'" << data_path << "' using 1:" << i + 1 << " with lines";
  s << "\n";
  return s.str();
}

}  // namespace thermoswitch::cli
