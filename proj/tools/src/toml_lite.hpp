#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace fluidex::app {

// Subset of TOML: [table] / [a.b] headers, key = value, basic and literal
// strings, integers, floats, booleans, arrays (may span lines), comments.
struct TomlValue;
using TomlArray = std::vector<TomlValue>;
using TomlTable = std::map<std::string, TomlValue>;

struct TomlValue {
  std::variant<std::int64_t, double, bool, std::string, std::shared_ptr<TomlArray>, std::shared_ptr<TomlTable>> v;

  bool is_table() const { return std::holds_alternative<std::shared_ptr<TomlTable>>(v); }
  bool is_array() const { return std::holds_alternative<std::shared_ptr<TomlArray>>(v); }
  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_number() const {
    return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
  }
  bool is_bool() const { return std::holds_alternative<bool>(v); }

  const TomlTable& table() const { return *std::get<std::shared_ptr<TomlTable>>(v); }
  const TomlArray& array() const { return *std::get<std::shared_ptr<TomlArray>>(v); }
  double number() const;
  std::int64_t integer() const;
  const std::string& string() const { return std::get<std::string>(v); }
  bool boolean() const { return std::get<bool>(v); }
};

// Throws fluidex::ConfigError with the line number on malformed input.
TomlTable parse_toml(const std::string& text);
TomlTable parse_toml_file(const std::string& path);

}  // namespace fluidex::app
