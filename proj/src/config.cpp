#include "compass/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "compass/error.hpp"
#include "compass/text.hpp"

namespace compass::config {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool valid_dotted_name(std::string_view name) {
  if (name.empty()) return false;
  bool last_dot = true;
  for (char c : name) {
    if (c == '.') {
      if (last_dot) return false;
      last_dot = true;
    } else if (is_bare_key_char(c)) {
      last_dot = false;
    } else {
      return false;
    }
  }
  return !last_dot;
}

// Strips a trailing comment that is not inside a string.
std::string strip_comment(std::string_view line) {
  bool in_basic = false, in_literal = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_basic) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_basic = false;
      }
    } else if (in_literal) {
      if (c == '\'') in_literal = false;
    } else if (c == '"') {
      in_basic = true;
    } else if (c == '\'') {
      in_literal = true;
    } else if (c == '#') {
      return std::string(line.substr(0, i));
    }
  }
  return std::string(line);
}

Value parse_value(std::string_view raw, std::size_t line) {
  Value v;
  v.line = line;
  const std::string text = trim(raw);
  if (text.empty()) fail(line, "missing value");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') fail(line, "unterminated string");
    v.kind = Value::Kind::String;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
      char c = text[i];
      if (c == '"') fail(line, "unexpected quote inside string");
      if (c != '\\') {
        v.text.push_back(c);
        continue;
      }
      if (++i + 1 > text.size() - 1) fail(line, "dangling escape");
      switch (text[i]) {
        case 'n': v.text.push_back('\n'); break;
        case 't': v.text.push_back('\t'); break;
        case 'r': v.text.push_back('\r'); break;
        case '"': v.text.push_back('"'); break;
        case '\\': v.text.push_back('\\'); break;
        case 'u': {
          if (i + 4 >= text.size()) fail(line, "short \\u escape");
          const auto cp = std::stoul(text.substr(i + 1, 4), nullptr, 16);
          append_utf8(v.text, static_cast<char32_t>(cp));
          i += 4;
          break;
        }
        default: fail(line, std::string("unknown escape \\") + text[i]);
      }
    }
    return v;
  }
  if (text.front() == '\'') {
    if (text.size() < 2 || text.back() != '\'') fail(line, "unterminated literal string");
    v.kind = Value::Kind::String;
    v.text = text.substr(1, text.size() - 2);
    if (v.text.find('\'') != std::string::npos) fail(line, "unexpected quote inside literal string");
    return v;
  }
  if (text == "true" || text == "false") {
    v.kind = Value::Kind::Boolean;
    v.text = text;
    return v;
  }
  std::string digits;
  for (char c : text) {
    if (c != '_') digits.push_back(c);
  }
  std::size_t pos = 0;
  if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) pos = 1;
  bool seen_digit = false, seen_dot = false, seen_exp = false;
  for (std::size_t i = pos; i < digits.size(); ++i) {
    const char c = digits[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      seen_digit = true;
    } else if (c == '.' && !seen_dot && !seen_exp) {
      seen_dot = true;
    } else if ((c == 'e' || c == 'E') && seen_digit && !seen_exp) {
      seen_exp = true;
      if (i + 1 < digits.size() && (digits[i + 1] == '+' || digits[i + 1] == '-')) ++i;
    } else {
      fail(line, "unsupported value '" + text + "'");
    }
  }
  if (!seen_digit) fail(line, "unsupported value '" + text + "'");
  v.kind = (seen_dot || seen_exp) ? Value::Kind::Float : Value::Kind::Integer;
  v.text = digits;
  return v;
}

}  // namespace

const std::string& Value::as_string() const {
  if (kind != Kind::String) fail(line, "expected a string");
  return text;
}

std::int64_t Value::as_int() const {
  if (kind != Kind::Integer) fail(line, "expected an integer");
  try {
    return std::stoll(text);
  } catch (const std::exception&) {
    fail(line, "integer out of range");
  }
}

double Value::as_double() const {
  if (kind != Kind::Integer && kind != Kind::Float) fail(line, "expected a number");
  return std::stod(text);
}

bool Value::as_bool() const {
  if (kind != Kind::Boolean) fail(line, "expected true or false");
  return text == "true";
}

const std::string& Value::as_decimal_text() const {
  if (kind == Kind::Boolean) fail(line, "expected a decimal");
  return text;
}

const Value* Table::find(std::string_view key) const {
  const auto it = values.find(std::string(key));
  return it == values.end() ? nullptr : &it->second;
}

const Value& Table::at(std::string_view key) const {
  if (const Value* v = find(key)) return *v;
  throw ConfigError("config line " + std::to_string(line) + ": table '" + name + "' is missing key '" +
                    std::string(key) + "'");
}

const Table* Document::table(std::string_view name) const {
  const auto it = tables.find(std::string(name));
  return it == tables.end() ? nullptr : &it->second;
}

const std::vector<Table>& Document::array(std::string_view name) const {
  static const std::vector<Table> kEmpty;
  const auto it = arrays.find(std::string(name));
  return it == arrays.end() ? kEmpty : it->second;
}

Document parse(std::string_view text) {
  Document doc;
  Table* current = &doc.root;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.rfind("[[", 0) == 0) {
      if (line.size() < 4 || line.substr(line.size() - 2) != "]]") fail(line_no, "malformed array-table header");
      const std::string name = trim(line.substr(2, line.size() - 4));
      if (!valid_dotted_name(name)) fail(line_no, "bad table name '" + name + "'");
      if (doc.tables.count(name)) fail(line_no, "'" + name + "' already defined as a table");
      auto& arr = doc.arrays[name];
      arr.push_back(Table{name, line_no, {}});
      current = &arr.back();
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed table header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (!valid_dotted_name(name)) fail(line_no, "bad table name '" + name + "'");
      if (doc.tables.count(name) || doc.arrays.count(name)) fail(line_no, "table '" + name + "' defined twice");
      current = &doc.tables.emplace(name, Table{name, line_no, {}}).first->second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty() || !std::all_of(key.begin(), key.end(), is_bare_key_char)) {
      fail(line_no, "bad key '" + key + "'");
    }
    if (current->values.count(key)) fail(line_no, "duplicate key '" + key + "'");
    current->values.emplace(key, parse_value(line.substr(eq + 1), line_no));
  }
  return doc;
}

Document load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace compass::config
