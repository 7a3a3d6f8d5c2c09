#include "arbminer/decimal.hpp"

#include <cmath>
#include <stdexcept>

namespace arbminer {

namespace {

constexpr int kMaxDigits = 36;

Decimal::Rep round_div(Decimal::Rep value, Decimal::Rep divisor) {
  Decimal::Rep q = value / divisor;
  Decimal::Rep r = value % divisor;
  if (r < 0) r = -r;
  if (2 * r >= divisor) q += value < 0 ? -1 : 1;
  return q;
}

} // namespace

Decimal::Rep pow10_i128(int n) {
  Decimal::Rep p = 1;
  for (int i = 0; i < n; ++i) p *= 10;
  return p;
}

Decimal Decimal::from_parts(Rep mantissa, int scale) {
  if (scale < 0 || scale > 2 * kMaxScale) throw std::out_of_range("Decimal scale out of range");
  Decimal d;
  d.mantissa_ = mantissa;
  d.scale_ = scale;
  return d;
}

std::optional<Decimal> Decimal::parse(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  Rep mantissa = 0;
  int digits = 0;
  int scale = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    any_digit = true;
    if (++digits > kMaxDigits) return std::nullopt;
    mantissa = mantissa * 10 + (c - '0');
    if (seen_point) ++scale;
  }
  if (!any_digit || scale > kMaxScale) return std::nullopt;
  return from_parts(negative ? -mantissa : mantissa, scale);
}

Decimal Decimal::from_double(double value, int scale) {
  if (!std::isfinite(value)) throw std::domain_error("Decimal from non-finite double");
  long double scaled = static_cast<long double>(value) * static_cast<long double>(pow10_i128(scale));
  long double r = std::round(scaled);
  if (std::fabs(r) > 1e36L) throw std::overflow_error("Decimal overflow");
  return from_parts(static_cast<Rep>(r), scale);
}

std::string Decimal::to_string() const {
  Rep m = mantissa_ < 0 ? -mantissa_ : mantissa_;
  std::string digits;
  do {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(m % 10)));
    m /= 10;
  } while (m != 0);
  if (static_cast<int>(digits.size()) <= scale_)
    digits.insert(digits.begin(), static_cast<std::size_t>(scale_ - digits.size() + 1), '0');
  if (scale_ > 0) digits.insert(digits.end() - scale_, '.');
  if (mantissa_ < 0) digits.insert(digits.begin(), '-');
  return digits;
}

double Decimal::to_double() const { return static_cast<double>(to_long_double()); }

long double Decimal::to_long_double() const {
  return static_cast<long double>(mantissa_) / static_cast<long double>(pow10_i128(scale_));
}

Decimal Decimal::rescaled(int scale) const {
  if (scale == scale_) return *this;
  if (scale > scale_) return from_parts(mantissa_ * pow10_i128(scale - scale_), scale);
  return from_parts(round_div(mantissa_, pow10_i128(scale_ - scale)), scale);
}

Decimal Decimal::normalized() const {
  Rep m = mantissa_;
  int s = scale_;
  while (s > 0 && m % 10 == 0) {
    m /= 10;
    --s;
  }
  return from_parts(m, s);
}

Decimal::Rep Decimal::mantissa_at(int scale) const {
  return mantissa_ * pow10_i128(scale - scale_);
}

Decimal operator+(const Decimal& a, const Decimal& b) {
  int s = std::max(a.scale_, b.scale_);
  return Decimal::from_parts(a.mantissa_at(s) + b.mantissa_at(s), s);
}

Decimal operator-(const Decimal& a, const Decimal& b) {
  int s = std::max(a.scale_, b.scale_);
  return Decimal::from_parts(a.mantissa_at(s) - b.mantissa_at(s), s);
}

Decimal operator*(const Decimal& a, const Decimal& b) {
  Decimal p = Decimal::from_parts(a.mantissa_ * b.mantissa_, a.scale_ + b.scale_);
  return p.scale_ > Decimal::kMaxScale ? p.rescaled(Decimal::kMaxScale) : p;
}

bool operator==(const Decimal& a, const Decimal& b) {
  int s = std::max(a.scale_, b.scale_);
  return a.mantissa_at(s) == b.mantissa_at(s);
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  int s = std::max(a.scale_, b.scale_);
  Decimal::Rep x = a.mantissa_at(s);
  Decimal::Rep y = b.mantissa_at(s);
  if (x < y) return std::strong_ordering::less;
  if (x > y) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::size_t Decimal::hash() const noexcept {
  Decimal n = normalized();
  auto u = static_cast<unsigned __int128>(n.mantissa_);
  std::size_t h = std::hash<std::uint64_t>{}(static_cast<std::uint64_t>(u));
  h ^= std::hash<std::uint64_t>{}(static_cast<std::uint64_t>(u >> 64)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h ^ (static_cast<std::size_t>(n.scale_) * 0x100000001b3ULL);
}

} // namespace arbminer
