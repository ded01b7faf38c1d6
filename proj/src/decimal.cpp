#include "ceramdw/decimal.hpp"

#include <algorithm>

namespace ceramdw {

std::optional<Decimal> Decimal::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  __int128 int_part = 0;
  std::size_t int_digits = 0;
  while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
    int_part = int_part * 10 + (text[pos] - '0');
    if (int_part > kMaxInputMagnitude) return std::nullopt;
    ++pos;
    ++int_digits;
  }
  __int128 frac = 0;
  int frac_digits = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (++frac_digits > kMaxInputFractionDigits) return std::nullopt;
      frac = frac * 10 + (text[pos] - '0');
      ++pos;
    }
    if (frac_digits == 0 && int_digits == 0) return std::nullopt;
  }
  if (pos != text.size() || (int_digits == 0 && frac_digits == 0)) return std::nullopt;
  for (int i = frac_digits; i < kScaleDigits; ++i) frac *= 10;
  __int128 raw = int_part * kScale + frac;
  if (raw > static_cast<__int128>(kMaxInputMagnitude) * kScale) return std::nullopt;
  return from_raw(negative ? -raw : raw);
}

double Decimal::to_double() const {
  // Split to keep the integer part exact before the final division.
  const __int128 ip = raw_ / kScale;
  const __int128 fp = raw_ % kScale;
  return static_cast<double>(ip) + static_cast<double>(fp) / static_cast<double>(kScale);
}

std::string Decimal::to_string() const {
  __int128 v = raw_;
  const bool negative = v < 0;
  if (negative) v = -v;
  __int128 ip = v / kScale;
  __int128 fp = v % kScale;

  std::string int_text;
  do {
    int_text.push_back(static_cast<char>('0' + static_cast<int>(ip % 10)));
    ip /= 10;
  } while (ip != 0);
  std::reverse(int_text.begin(), int_text.end());

  std::string out = negative ? "-" + int_text : int_text;
  if (fp != 0) {
    std::string frac_text(kScaleDigits, '0');
    for (int i = kScaleDigits - 1; i >= 0; --i) {
      frac_text[static_cast<std::size_t>(i)] = static_cast<char>('0' + static_cast<int>(fp % 10));
      fp /= 10;
    }
    while (!frac_text.empty() && frac_text.back() == '0') frac_text.pop_back();
    out += '.';
    out += frac_text;
  }
  return out;
}

Decimal Decimal::scaled_pow10(int exp) const {
  __int128 v = raw_;
  for (; exp > 0; --exp) v *= 10;
  for (; exp < 0; ++exp) v /= 10;
  return from_raw(v);
}

}  // namespace ceramdw
