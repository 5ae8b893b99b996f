#include "compass/money.hpp"

#include <cctype>
#include <limits>
#include <stdexcept>

namespace compass {

Money Money::parse(std::string_view decimal) {
  const std::string original(decimal);
  if (decimal.empty()) throw std::invalid_argument("empty amount");
  if (decimal.front() == '+') decimal.remove_prefix(1);
  const auto dot = decimal.find('.');
  const std::string_view whole = decimal.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : decimal.substr(dot + 1);
  if (whole.empty() || (dot != std::string_view::npos && frac.empty()) || frac.size() > 12) {
    throw std::invalid_argument("not a plain nonnegative decimal: " + original);
  }
  auto digits_only = [](std::string_view s) {
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  };
  if (!digits_only(whole) || !digits_only(frac)) {
    throw std::invalid_argument("not a plain nonnegative decimal: " + original);
  }
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  std::int64_t w = 0;
  for (char c : whole) {
    if (w > (kMax - (c - '0')) / 10) throw std::invalid_argument("amount too large: " + original);
    w = w * 10 + (c - '0');
  }
  if (w > kMax / kScale) throw std::invalid_argument("amount too large: " + original);
  std::int64_t f = 0;
  std::int64_t place = kScale;
  for (char c : frac) {
    place /= 10;
    f += (c - '0') * place;
  }
  return Money(w * kScale + f);
}

std::string Money::to_string() const {
  std::string out = std::to_string(units_ / kScale);
  std::int64_t frac = units_ % kScale;
  if (frac == 0) return out;
  std::string digits = std::to_string(frac);
  digits.insert(0, 12 - digits.size(), '0');
  while (!digits.empty() && digits.back() == '0') digits.pop_back();
  return out + "." + digits;
}

}  // namespace compass
