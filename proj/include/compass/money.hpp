#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace compass {

/// Exact nonnegative currency amount in units of 1e-12. Per-token prices are
/// tiny decimals, and cost ratios between models must come out exact, which
/// binary floating point cannot promise.
class Money {
 public:
  static constexpr std::int64_t kScale = 1'000'000'000'000;

  constexpr Money() = default;
  static constexpr Money from_units(std::int64_t picounits) { return Money(picounits); }

  /// Parses a plain decimal such as "0.00003" or "12". Throws std::invalid_argument
  /// on anything else, including negatives and more than 12 fractional digits.
  static Money parse(std::string_view decimal);

  constexpr std::int64_t units() const { return units_; }
  double to_double() const { return static_cast<double>(units_) / static_cast<double>(kScale); }

  /// Shortest exact decimal rendering ("1.1", "0", "0.00003").
  std::string to_string() const;

  friend constexpr Money operator+(Money a, Money b) { return Money(a.units_ + b.units_); }
  Money& operator+=(Money o) {
    units_ += o.units_;
    return *this;
  }
  friend constexpr Money operator*(Money a, std::int64_t n) { return Money(a.units_ * n); }
  friend constexpr Money operator*(std::int64_t n, Money a) { return a * n; }
  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  constexpr explicit Money(std::int64_t u) : units_(u) {}
  std::int64_t units_ = 0;
};

}  // namespace compass
