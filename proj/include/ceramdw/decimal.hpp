#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ceramdw {

/// Exact fixed-point decimal with ten fractional digits.
///
/// Source values carry at most six fractional digits, so every value and every
/// wt% <-> ppm conversion (a factor of 10^4) is representable without rounding.
/// Sums are accumulated in 128 bits; aggregation results are therefore exact and
/// independent of summation order.
class Decimal {
 public:
  static constexpr int kScaleDigits = 10;
  static constexpr std::int64_t kScale = 10'000'000'000;
  static constexpr int kMaxInputFractionDigits = 6;
  /// Largest magnitude accepted from text; keeps raw values inside int64.
  static constexpr std::int64_t kMaxInputMagnitude = 900'000'000;

  constexpr Decimal() = default;

  static constexpr Decimal from_raw(__int128 raw) {
    Decimal d;
    d.raw_ = raw;
    return d;
  }
  static constexpr Decimal from_int(std::int64_t v) { return from_raw(static_cast<__int128>(v) * kScale); }

  /// Parses `[-]digits[.digits]`. Returns nullopt on any syntax error, on more than
  /// six fractional digits, or on magnitudes above kMaxInputMagnitude.
  static std::optional<Decimal> parse(std::string_view text);

  constexpr __int128 raw() const { return raw_; }
  double to_double() const;
  /// Canonical text: no exponent, trailing fractional zeros trimmed ("22.5", "3", "-0.25").
  std::string to_string() const;

  constexpr bool is_negative() const { return raw_ < 0; }

  friend constexpr Decimal operator+(Decimal a, Decimal b) { return from_raw(a.raw_ + b.raw_); }
  friend constexpr Decimal operator-(Decimal a, Decimal b) { return from_raw(a.raw_ - b.raw_); }
  constexpr Decimal& operator+=(Decimal o) {
    raw_ += o.raw_;
    return *this;
  }
  /// Multiplies by 10^exp (exp >= 0) or divides by 10^-exp. Division is exact for
  /// unit conversions of parsed input; otherwise it truncates toward zero.
  Decimal scaled_pow10(int exp) const;

  friend constexpr bool operator==(Decimal a, Decimal b) { return a.raw_ == b.raw_; }
  friend constexpr std::strong_ordering operator<=>(Decimal a, Decimal b) {
    return a.raw_ <=> b.raw_;
  }

 private:
  __int128 raw_ = 0;
};

}  // namespace ceramdw
