#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace compass::config {

/// A scalar from the config file. Numbers keep their literal text so decimal
/// prices can be read exactly.
struct Value {
  enum class Kind { String, Integer, Float, Boolean };
  Kind kind = Kind::String;
  std::string text;
  std::size_t line = 0;

  const std::string& as_string() const;
  std::int64_t as_int() const;
  double as_double() const;
  bool as_bool() const;
  /// Strings and numbers both yield their text; used for exact decimals.
  const std::string& as_decimal_text() const;
};

struct Table {
  std::string name;
  std::size_t line = 0;
  std::map<std::string, Value> values;

  const Value* find(std::string_view key) const;
  const Value& at(std::string_view key) const;  // ConfigError if missing
};

/// Parsed subset of TOML: `[table]`, `[[array.of.tables]]`, `key = value`
/// with basic/literal strings, integers, floats and booleans, and `#` comments.
/// Inline tables, arrays and multi-line strings are not supported.
struct Document {
  Table root;
  std::map<std::string, Table> tables;
  std::map<std::string, std::vector<Table>> arrays;

  const Table* table(std::string_view name) const;
  const std::vector<Table>& array(std::string_view name) const;
};

/// Throws ConfigError with the offending line number.
Document parse(std::string_view text);
Document load(const std::filesystem::path& path);

}  // namespace compass::config
