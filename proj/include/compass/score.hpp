#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "compass/error.hpp"

namespace compass {

enum class Axis { Economic, Democracy };
std::string_view axis_name(Axis axis);

/// Position on the two-axis compass, each axis in [-10, 10].
class CompassScore {
 public:
  /// Throws RangeError when either value lies outside [-10, 10] or is not finite.
  CompassScore(double economic, double democracy);

  double economic() const { return economic_; }
  double democracy() const { return democracy_; }
  double on(Axis axis) const { return axis == Axis::Economic ? economic_ : democracy_; }
  /// Both values have zero fractional part.
  bool is_integer_pair() const;

  friend bool operator==(const CompassScore&, const CompassScore&) = default;

 private:
  double economic_;
  double democracy_;
};

class FormatError : public Error {
 public:
  explicit FormatError(std::string excerpt)
      : Error("response is not a bracketed score pair: \"" + excerpt + "\""), excerpt_(std::move(excerpt)) {}
  const std::string& excerpt() const { return excerpt_; }

 private:
  std::string excerpt_;
};

class RangeError : public Error {
 public:
  RangeError(Axis axis, double value);
  Axis axis() const { return axis_; }
  double value() const { return value_; }

 private:
  Axis axis_;
  double value_;
};

/// Strict grammar:  ws* '[' NUM ' '* ',' ' '* NUM ']' ws*
/// with NUM = [+-]? DIGITS ('.' DIGITS)?. Anything else is a FormatError;
/// a well-formed pair with a value outside [-10, 10] is a RangeError.
CompassScore parse_score(std::string_view raw);

/// Canonical "[a, b]" rendering; integers print without a fractional part.
std::string format_score(const CompassScore& score);

/// Each axis rounded half away from zero, landing in [-10, 10].
std::pair<int, int> score_to_bin(const CompassScore& score);

}  // namespace compass
