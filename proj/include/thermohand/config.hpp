#pragma once

#include "thermohand/evaluation.hpp"
#include "thermohand/synthetic.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace thermohand {

/// Values of the TOML subset used by config files: strings, integers,
/// floats, booleans and flat arrays of those.
struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
  std::variant<std::string, std::int64_t, double, bool, TomlArray> value;
  int line = 0;

  bool is_string() const { return std::holds_alternative<std::string>(value); }
  bool is_array() const { return std::holds_alternative<TomlArray>(value); }
};

/// Keys are flattened as "table.key".
class TomlDocument {
public:
  static TomlDocument parse(std::string_view text);
  static TomlDocument load(const std::string& path);

  bool contains(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, TomlValue>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_strings(const std::string& key,
                                       const std::vector<std::string>& fallback) const;
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const;

  /// Rejects keys inside `table` that are not listed.
  void check_keys(const std::string& table,
                  const std::vector<std::string>& allowed) const;

private:
  std::map<std::string, TomlValue> values_;
};

/// Reads the [synthetic] table; missing keys keep their defaults.
SyntheticConfig synthetic_config(const TomlDocument& doc);

/// Reads the [pipeline], [segmentation], [registration] and [regions] tables.
PipelineConfig pipeline_config(const TomlDocument& doc);

} // namespace thermohand
