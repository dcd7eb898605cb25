#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

namespace pv {

/// Exact non-negative rational; metric scores are kept exact so equality
/// checks against independent oracles need no tolerance.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    normalize();
  }

  static constexpr Rational zero() { return Rational(0, 1); }
  static constexpr Rational one() { return Rational(1, 1); }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }

  constexpr double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend constexpr Rational operator+(Rational a, Rational b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend constexpr Rational operator*(Rational a, Rational b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend constexpr Rational operator/(Rational a, Rational b) {
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend constexpr bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend constexpr auto operator<=>(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
  }

  /// Tenths of a percent, rounded half away from zero: 0.965 -> 965.
  constexpr std::int64_t percent_tenths() const {
    std::int64_t n = num_ * 1000;
    if (n >= 0) return (2 * n + den_) / (2 * den_);
    return -((-2 * n + den_) / (2 * den_));
  }

  /// "96.5" style rendering used by reports.
  std::string percent_1dp() const {
    std::int64_t t = percent_tenths();
    std::string sign = t < 0 ? "-" : "";
    if (t < 0) t = -t;
    return sign + std::to_string(t / 10) + "." + std::to_string(t % 10);
  }

 private:
  constexpr void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace pv
