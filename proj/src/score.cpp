#include "compass/score.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace compass {
namespace {

constexpr std::size_t kExcerptLimit = 80;

std::string excerpt(std::string_view raw) {
  if (raw.size() <= kExcerptLimit) return std::string(raw);
  return std::string(raw.substr(0, kExcerptLimit)) + "...";
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Consumes [+-]?DIGITS('.'DIGITS)? at pos; returns false if absent.
bool read_number(std::string_view s, std::size_t& pos, double& value) {
  const std::size_t start = pos;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
  const std::size_t int_start = pos;
  while (pos < s.size() && is_digit(s[pos])) ++pos;
  if (pos == int_start) return false;
  if (pos < s.size() && s[pos] == '.') {
    const std::size_t frac_start = ++pos;
    while (pos < s.size() && is_digit(s[pos])) ++pos;
    if (pos == frac_start) return false;
  }
  std::string_view num = s.substr(start, pos - start);
  if (num.front() == '+') num.remove_prefix(1);
  // from_chars: locale-independent.
  const auto res = std::from_chars(num.data(), num.data() + num.size(), value);
  if (res.ec != std::errc() || res.ptr != num.data() + num.size()) return false;
  if (value == 0.0) value = 0.0;  // drop negative zero
  return true;
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

void check_range(Axis axis, double v) {
  if (!std::isfinite(v) || v < -10.0 || v > 10.0) throw RangeError(axis, v);
}

std::string format_value(double v) {
  if (v == std::floor(v)) return std::to_string(static_cast<long long>(v));
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int round_half_away(double v) {
  const double r = std::round(v);  // std::round is half away from zero
  return static_cast<int>(std::clamp(r, -10.0, 10.0));
}

}  // namespace

std::string_view axis_name(Axis axis) { return axis == Axis::Economic ? "economic" : "democracy"; }

RangeError::RangeError(Axis axis, double value)
    : Error("score out of range on " + std::string(axis_name(axis)) + " axis: " + format_value(value)),
      axis_(axis),
      value_(value) {}

CompassScore::CompassScore(double economic, double democracy) : economic_(economic), democracy_(democracy) {
  check_range(Axis::Economic, economic);
  check_range(Axis::Democracy, democracy);
  if (economic_ == 0.0) economic_ = 0.0;
  if (democracy_ == 0.0) democracy_ = 0.0;
}

bool CompassScore::is_integer_pair() const {
  return economic_ == std::floor(economic_) && democracy_ == std::floor(democracy_);
}

CompassScore parse_score(std::string_view raw) {
  std::size_t pos = 0;
  while (pos < raw.size() && is_ws(raw[pos])) ++pos;
  double a = 0, b = 0;
  auto fail = [&]() -> FormatError { return FormatError(excerpt(raw)); };
  if (pos >= raw.size() || raw[pos] != '[') throw fail();
  ++pos;
  if (!read_number(raw, pos, a)) throw fail();
  while (pos < raw.size() && raw[pos] == ' ') ++pos;
  if (pos >= raw.size() || raw[pos] != ',') throw fail();
  ++pos;
  while (pos < raw.size() && raw[pos] == ' ') ++pos;
  if (!read_number(raw, pos, b)) throw fail();
  if (pos >= raw.size() || raw[pos] != ']') throw fail();
  ++pos;
  while (pos < raw.size() && is_ws(raw[pos])) ++pos;
  if (pos != raw.size()) throw fail();
  return CompassScore(a, b);
}

std::string format_score(const CompassScore& score) {
  return "[" + format_value(score.economic()) + ", " + format_value(score.democracy()) + "]";
}

std::pair<int, int> score_to_bin(const CompassScore& score) {
  return {round_half_away(score.economic()), round_half_away(score.democracy())};
}

}  // namespace compass
