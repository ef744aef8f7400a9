#pragma once

// Run configuration: a typed parameter schema per subcommand, resolved as
// built-in defaults, then config-file keys, then command-line flags.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace thermoswitch::cli {

using Json = nlohmann::json;

/// Invalid configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output; maps to exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { csv, json };

enum class ParamType { number, integer, text, number_list };

struct ParamSpec {
  std::string key;      // config key; the flag is --key with '_' replaced by '-'
  ParamType type;
  Json default_value;   // null means unset unless given
  std::string help;
};

const std::vector<std::string>& command_names();

/// Physical parameters accepted by a subcommand.
const std::vector<ParamSpec>& command_schema(const std::string& command);

std::string flag_name(const std::string& key);

/// Converts a flag's raw text to the JSON value its schema entry expects.
Json parse_flag_value(const ParamSpec& spec, const std::vector<std::string>& raw);

struct RunConfig {
  std::string command;
  Json params;  // resolved physical parameters, keys sorted
  std::string out;
  Format format = Format::csv;
  bool format_given = false;
  unsigned threads = 1;
  std::string plot_script;

  bool has(const std::string& key) const;
  double number(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
};

Json load_config_file(const std::string& path);

/// I/O keys set on the command line; unset members defer to the config file.
struct IoOverrides {
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<int> threads;
  std::optional<std::string> plot_script;
};

/// Top-level keys of the file apply to every command that declares them; a
/// section named after the command overrides them. Unknown keys are errors.
RunConfig resolve(const std::string& command, const Json& file, const Json& flags, const IoOverrides& io);

/// --threads, then the config key, then THERMOSWITCH_THREADS, then the core count.
unsigned resolve_threads(std::optional<int> flag, std::optional<int> config);

}  // namespace thermoswitch::cli
