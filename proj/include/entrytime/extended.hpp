#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "entrytime/errors.hpp"

namespace entrytime {

/// A nonnegative-or-finite real extended by a distinguished +infinity.
///
/// Infinity is a separate state, not an IEEE value that arithmetic happened to
/// produce; constructing from a non-finite double is rejected.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;

  explicit ExtendedReal(double value) : value_(value) {
    if (!std::isfinite(value)) {
      throw InvalidArgument("ExtendedReal: finite value required, use ExtendedReal::infinity()");
    }
  }

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_infinite() const noexcept { return infinite_; }
  constexpr bool is_finite() const noexcept { return !infinite_; }

  /// Finite value; throws on infinity.
  double value() const {
    if (infinite_) throw InvalidArgument("ExtendedReal: value() on infinity");
    return value_;
  }

  /// IEEE view, +inf for infinity. For output and comparisons only.
  constexpr double to_double() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

/// Difference of later minus earlier time with the infinity convention of
/// relative entry times: infinite whenever either operand is.
inline ExtendedReal relative_difference(const ExtendedReal& later, const ExtendedReal& earlier) {
  if (later.is_infinite() || earlier.is_infinite()) return ExtendedReal::infinity();
  return ExtendedReal(later.value() - earlier.value());
}

/// "%.12g" rendering with infinity as the literal `inf`.
std::string format_extended(const ExtendedReal& x);
std::string format_number(double x);

}  // namespace entrytime
