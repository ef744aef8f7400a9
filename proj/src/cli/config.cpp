#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace thermoswitch::cli {

namespace {

using T = ParamType;

const std::vector<std::string> io_keys = {"out", "format", "threads", "plot_script"};

std::vector<ParamSpec> initial_state_params(const std::string& default_case, const std::string& cases) {
  return {{"case", T::text, default_case, "initial state: " + cases},
          {"epsilon", T::number, 0.01, "E+(0) weight of the epsilon case"},
          {"populations", T::number_list, nullptr, "custom populations over E-(0),E-(pi),E+(0),E+(pi)"}};
}

std::vector<ParamSpec> kinetic_params(double t_final) {
  return {{"beta_e1", T::number, 30.0, "beta E1"},
          {"beta_de", T::number, 1.5, "beta Delta E"},
          {"rate_trans", T::number, 1.0, "beta hbar rate E+(0) -> E-(pi)"},
          {"rate_cis", T::number, 0.01, "beta hbar rate E+(0) -> E-(0)"},
          {"rate_upper", T::number, 0.01, "beta hbar rate E+(pi) -> E+(0)"},
          {"t_final", T::number, t_final, "end time in units of beta hbar"},
          {"dt", T::number, 1e-3, "RK4 step"},
          {"sample_dt", T::number, 0.1, "output spacing"}};
}

template <typename... Lists>
std::vector<ParamSpec> concat(Lists... lists) {
  std::vector<ParamSpec> out;
  (out.insert(out.end(), lists.begin(), lists.end()), ...);
  return out;
}

const std::map<std::string, std::vector<ParamSpec>>& schemas() {
  static const std::map<std::string, std::vector<ParamSpec>> table = [] {
    std::map<std::string, std::vector<ParamSpec>> m;
    m["bound"] = concat(initial_state_params("full", "full|half|epsilon|custom"),
                        std::vector<ParamSpec>{
                            {"beta_e1", T::number, 30.0, "beta E1"},
                            {"beta_de", T::number_list, nullptr, "explicit beta Delta E grid (overrides the range)"},
                            {"beta_de_min", T::number, 0.01, "first beta Delta E"},
                            {"beta_de_max", T::number, 3.0, "last beta Delta E"},
                            {"beta_de_step", T::number, 0.01, "beta Delta E spacing"}});
    m["kinetics"] = concat(initial_state_params("full", "full|half|epsilon|custom"), kinetic_params(100.0));
    m["lz"] = {{"v", T::number_list, nullptr, "explicit sweep-rate grid (overrides the range)"},
               {"v_min", T::number, 0.1, "smallest sweep rate"},
               {"v_max", T::number, 10.0, "largest sweep rate"},
               {"v_steps", T::integer, 20, "log-spaced sweep rates"},
               {"gamma", T::number_list, Json::array({0.0, 0.1, 0.3, 1.0, 3.0, 10.0}), "dephasing rates"},
               {"lambda", T::number, 1.0, "diabatic coupling"},
               {"hbar", T::number, 1.0, "reduced Planck constant"},
               {"t_final", T::number, 50.0, "half sweep duration"},
               {"dt", T::number, 0.0, "RK4 step; 0 selects the phase-resolved default"}};
    m["monotone"] = concat(std::vector<ParamSpec>{{"source", T::text, "kinetics", "trajectory: kinetics|lz"},
                                                  {"monotones", T::text, "fisher,modes", "comma list of fisher, modes"}},
                           initial_state_params("superposition", "full|half|epsilon|superposition|custom"),
                           kinetic_params(20.0),
                           std::vector<ParamSpec>{{"v", T::number, 1.0, "lz sweep rate"},
                                                  {"gamma", T::number, 0.3, "lz dephasing rate"},
                                                  {"lambda", T::number, 1.0, "lz diabatic coupling"}});
    m["work"] = concat(initial_state_params("full", "full|half|epsilon|gibbs|custom"),
                       std::vector<ParamSpec>{
                           {"energies", T::number_list, nullptr, "custom level energies (overrides the four-level spectrum)"},
                           {"beta", T::number, 1.0, "inverse temperature"},
                           {"beta_e1", T::number, 30.0, "beta E1"},
                           {"beta_de", T::number, 1.5, "beta Delta E"}});
    m["clock"] = {{"f", T::integer, 256, "steps over the half turn"},
                  {"delta_t", T::number, 1.0, "time per step"},
                  {"p_dissipate", T::number, 1.0, "tick dissipation probability"},
                  {"w0", T::number, 1.0, "cis-surface rise"},
                  {"w1", T::number, 1.0, "trans-surface drop"},
                  {"e1", T::number, 1.0, "vertical excitation energy"},
                  {"lambda", T::number, 1.0, "diabatic coupling"},
                  {"hbar", T::number, 1.0, "reduced Planck constant"},
                  {"initial", T::text, "upper", "initial electronic state: upper|lower|psi0|psi1|mixed"}};
    return m;
  }();
  return table;
}

const ParamSpec* find_spec(const std::vector<ParamSpec>& schema, const std::string& key) {
  for (const auto& s : schema)
    if (s.key == key) return &s;
  return nullptr;
}

bool known_anywhere(const std::string& key) {
  for (const auto& [name, schema] : schemas())
    if (find_spec(schema, key)) return true;
  return false;
}

bool is_io_key(const std::string& key) { return std::find(io_keys.begin(), io_keys.end(), key) != io_keys.end(); }

double finite_number(const Json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
  return x;
}

/// Type-checks a config value. A one-element list stands for a scalar and a
/// scalar for a one-element list, so a shared top-level key serves commands
/// that sweep it and commands that take a single value.
Json coerce(const ParamSpec& spec, const Json& v) {
  switch (spec.type) {
    case T::number:
      if (v.is_array() && v.size() == 1) return finite_number(v[0], spec.key);
      return finite_number(v, spec.key);
    case T::integer: {
      const Json& x = v.is_array() && v.size() == 1 ? v[0] : v;
      if (x.is_number_integer()) return x.get<long long>();
      if (x.is_number_float() && std::floor(x.get<double>()) == x.get<double>()) return (long long)(x.get<double>());
      throw ConfigError("'" + spec.key + "' must be an integer");
    }
    case T::text:
      if (!v.is_string()) throw ConfigError("'" + spec.key + "' must be a string");
      return v;
    case T::number_list: {
      if (v.is_null()) return v;
      Json out = Json::array();
      if (v.is_array()) {
        if (v.empty()) throw ConfigError("'" + spec.key + "' must not be empty");
        for (const auto& x : v) out.push_back(finite_number(x, spec.key));
      } else {
        out.push_back(finite_number(v, spec.key));
      }
      return out;
    }
  }
  throw ConfigError("unhandled parameter type for '" + spec.key + "'");
}

double parse_double(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("--" + flag_name(key) + ": '" + text + "' is not a number");
  }
  if (used != text.size()) throw ConfigError("--" + flag_name(key) + ": '" + text + "' is not a number");
  return x;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"bound", "kinetics", "lz", "monotone", "work", "clock"};
  return names;
}

const std::vector<ParamSpec>& command_schema(const std::string& command) {
  const auto it = schemas().find(command);
  if (it == schemas().end()) throw ConfigError("unknown command '" + command + "'");
  return it->second;
}

std::string flag_name(const std::string& key) {
  std::string out = key;
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

Json parse_flag_value(const ParamSpec& spec, const std::vector<std::string>& raw) {
  if (raw.empty()) throw ConfigError("--" + flag_name(spec.key) + " needs a value");
  switch (spec.type) {
    case T::text:
      return raw.back();
    case T::integer: {
      const double x = parse_double(raw.back(), spec.key);
      return coerce(spec, Json(x));
    }
    case T::number:
      return coerce(spec, Json(parse_double(raw.back(), spec.key)));
    case T::number_list: {
      Json list = Json::array();
      for (const auto& r : raw) list.push_back(parse_double(r, spec.key));
      return coerce(spec, list);
    }
  }
  throw ConfigError("unhandled parameter type for '" + spec.key + "'");
}

bool RunConfig::has(const std::string& key) const { return params.contains(key) && !params.at(key).is_null(); }

double RunConfig::number(const std::string& key) const {
  if (!has(key)) throw ConfigError("missing parameter '" + key + "'");
  return params.at(key).get<double>();
}

long long RunConfig::integer(const std::string& key) const {
  if (!has(key)) throw ConfigError("missing parameter '" + key + "'");
  return params.at(key).get<long long>();
}

std::string RunConfig::text(const std::string& key) const {
  if (!has(key)) throw ConfigError("missing parameter '" + key + "'");
  return params.at(key).get<std::string>();
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  if (!has(key)) throw ConfigError("missing parameter '" + key + "'");
  return params.at(key).get<std::vector<double>>();
}

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file '" + path + "' must hold an object");
  return doc;
}

unsigned resolve_threads(std::optional<int> flag, std::optional<int> config) {
  std::optional<int> n = flag ? flag : config;
  if (!n) {
    if (const char* env = std::getenv("THERMOSWITCH_THREADS"); env && *env) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (*end != '\0') throw ConfigError(std::string("THERMOSWITCH_THREADS='") + env + "' is not an integer");
      n = int(v);
    }
  }
  if (!n) return std::max(1u, std::thread::hardware_concurrency());
  if (*n < 1) throw ConfigError("thread count must be at least 1");
  return unsigned(*n);
}

RunConfig resolve(const std::string& command, const Json& file, const Json& flags, const IoOverrides& io) {
  const auto& schema = command_schema(command);
  RunConfig cfg;
  cfg.command = command;
  cfg.params = Json::object();
  for (const auto& s : schema) cfg.params[s.key] = s.default_value;

  Json file_io = Json::object();
  auto apply = [&](const Json& obj, bool section) {
    for (const auto& [key, value] : obj.items()) {
      if (is_io_key(key)) {
        file_io[key] = value;
      } else if (const ParamSpec* s = find_spec(schema, key)) {
        cfg.params[key] = coerce(*s, value);
      } else if (!section && std::find(command_names().begin(), command_names().end(), key) != command_names().end()) {
        if (!value.is_object()) throw ConfigError("section '" + key + "' must be an object");
      } else if (section || !known_anywhere(key)) {
        throw ConfigError("unknown config key '" + key + "'" + (section ? " in section '" + command + "'" : ""));
      }
    }
  };
  apply(file, false);
  if (file.contains(command)) apply(file.at(command), true);
  for (const auto& [key, value] : flags.items()) {
    const ParamSpec* s = find_spec(schema, key);
    if (!s) throw ConfigError("flag --" + flag_name(key) + " does not apply to '" + command + "'");
    cfg.params[key] = coerce(*s, value);
  }

  auto file_text = [&](const char* key) -> std::optional<std::string> {
    if (!file_io.contains(key)) return std::nullopt;
    if (!file_io.at(key).is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
    return file_io.at(key).get<std::string>();
  };
  cfg.out = io.out ? *io.out : file_text("out").value_or("");
  cfg.plot_script = io.plot_script ? *io.plot_script : file_text("plot_script").value_or("");
  const std::optional<std::string> format = io.format ? io.format : file_text("format");
  if (format) {
    if (*format == "csv") cfg.format = Format::csv;
    else if (*format == "json") cfg.format = Format::json;
    else throw ConfigError("format must be csv or json, not '" + *format + "'");
    cfg.format_given = true;
  }
  std::optional<int> file_threads;
  if (file_io.contains("threads")) {
    if (!file_io.at("threads").is_number_integer()) throw ConfigError("'threads' must be an integer");
    file_threads = file_io.at("threads").get<int>();
  }
  cfg.threads = resolve_threads(io.threads, file_threads);
  return cfg;
}

}  // namespace thermoswitch::cli
