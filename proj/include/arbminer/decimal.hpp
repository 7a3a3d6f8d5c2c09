#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace arbminer {

// Fixed-point decimal that keeps the scale it was written with, so "10.0"
// prints back as "10.0". Equality and hashing compare numeric value only.
class Decimal {
public:
  using Rep = __int128;
  static constexpr int kMaxScale = 18;

  constexpr Decimal() = default;
  Decimal(long long units) : mantissa_(units), scale_(0) {}

  static Decimal from_parts(Rep mantissa, int scale);
  static std::optional<Decimal> parse(std::string_view text);
  // Rounds half away from zero.
  static Decimal from_double(double value, int scale);

  Rep mantissa() const noexcept { return mantissa_; }
  int scale() const noexcept { return scale_; }

  std::string to_string() const;
  double to_double() const;
  long double to_long_double() const;

  int sign() const noexcept { return mantissa_ > 0 ? 1 : (mantissa_ < 0 ? -1 : 0); }
  bool is_zero() const noexcept { return mantissa_ == 0; }
  Decimal abs() const { return mantissa_ < 0 ? from_parts(-mantissa_, scale_) : *this; }

  // Rounds half away from zero when shrinking the scale.
  Decimal rescaled(int scale) const;
  // Strips trailing fractional zeros.
  Decimal normalized() const;
  // Mantissa expressed at a larger scale; caller guarantees scale >= this->scale().
  Rep mantissa_at(int scale) const;

  friend Decimal operator+(const Decimal& a, const Decimal& b);
  friend Decimal operator-(const Decimal& a, const Decimal& b);
  friend Decimal operator-(const Decimal& a) { return from_parts(-a.mantissa_, a.scale_); }
  // Exact product; the scale is capped at kMaxScale with rounding.
  friend Decimal operator*(const Decimal& a, const Decimal& b);
  Decimal& operator+=(const Decimal& o) { return *this = *this + o; }
  Decimal& operator-=(const Decimal& o) { return *this = *this - o; }

  friend bool operator==(const Decimal& a, const Decimal& b);
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);

  std::size_t hash() const noexcept;

private:
  Rep mantissa_ = 0;
  int scale_ = 0;
};

Decimal::Rep pow10_i128(int n);

} // namespace arbminer

template <>
struct std::hash<arbminer::Decimal> {
  std::size_t operator()(const arbminer::Decimal& d) const noexcept { return d.hash(); }
};
