#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>

#include "ncspace/errors.hpp"

namespace ncspace {

/// Exact rational number num/den with den > 0, kept in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t n, std::int64_t d) {
    if (d == 0) throw DomainError("Rational: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    return g > 1 ? Rational{n / g, d / g} : Rational{n, d};
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Rational operator+(Rational a, Rational b) {
    return make(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rational operator-(Rational a, Rational b) {
    return make(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rational operator*(Rational a, Rational b) { return make(a.num * b.num, a.den * b.den); }
  friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
};

/// A Lebesgue / Schatten exponent p in (0, ∞].
///
/// The exponent is stored through its reciprocal 1/p, so p = ∞ is the tagged
/// value 1/p = 0 rather than a large float. When p is rational with a small
/// denominator (at most 12), the reciprocal is additionally tracked as an
/// exact fraction, and harmonic arithmetic (1/γ = 1/r + 1/s and friends)
/// stays exact as long as both operands are exact.
class Exponent {
 public:
  static constexpr int kMaxDetectedDenominator = 12;

  Exponent() : Exponent(Rational{1, 1}) {}

  /// p = value; accepts +inf. Throws DomainError for p <= 0 or NaN.
  explicit Exponent(double value) {
    if (std::isnan(value) || value <= 0.0) {
      throw DomainError("exponent must be positive, got " + std::to_string(value));
    }
    if (std::isinf(value)) {
      inv_ = 0.0;
      exact_ = Rational{0, 1};
      return;
    }
    inv_ = 1.0 / value;
    for (std::int64_t den = 1; den <= kMaxDetectedDenominator; ++den) {
      const double scaled = value * static_cast<double>(den);
      const double num = std::round(scaled);
      if (num >= 1.0 && std::abs(scaled - num) <= 1e-12 * scaled) {
        exact_ = Rational::make(den, static_cast<std::int64_t>(num));
        inv_ = exact_->value();
        break;
      }
    }
  }

  static Exponent infinity() { return Exponent(Rational{0, 1}); }

  /// Builds p from 1/p. inv = 0 gives p = ∞.
  static Exponent from_reciprocal(double inv) {
    if (std::isnan(inv) || inv < 0.0) throw DomainError("reciprocal exponent must be >= 0");
    if (inv == 0.0) return infinity();
    return Exponent(1.0 / inv);
  }
  static Exponent from_reciprocal(Rational inv) {
    if (inv.num < 0) throw DomainError("reciprocal exponent must be >= 0");
    return Exponent(Rational::make(inv.num, inv.den));
  }

  bool is_infinite() const { return inv_ == 0.0; }
  /// p itself (+inf when infinite).
  double value() const {
    return is_infinite() ? std::numeric_limits<double>::infinity() : 1.0 / inv_;
  }
  double reciprocal() const { return inv_; }
  const std::optional<Rational>& exact_reciprocal() const { return exact_; }

  /// Hölder conjugate p' with 1/p + 1/p' = 1. Requires p >= 1.
  Exponent conjugate() const {
    require_at_least_one("conjugate");
    if (exact_) return from_reciprocal(Rational{1, 1} - *exact_);
    return from_reciprocal(std::max(0.0, 1.0 - inv_));
  }

  /// γ with 1/γ = 1/a + 1/b.
  static Exponent harmonic_sum(const Exponent& a, const Exponent& b) {
    if (a.exact_ && b.exact_) return from_reciprocal(*a.exact_ + *b.exact_);
    return from_reciprocal(a.inv_ + b.inv_);
  }
  /// t with 1/t = 1/a − 1/b. Requires 1/a >= 1/b.
  static Exponent harmonic_difference(const Exponent& a, const Exponent& b) {
    if (a.exact_ && b.exact_) {
      const Rational d = *a.exact_ - *b.exact_;
      if (d.num < 0) throw DomainError("harmonic difference would be negative");
      return from_reciprocal(d);
    }
    const double d = a.inv_ - b.inv_;
    if (d < -1e-15) throw DomainError("harmonic difference would be negative");
    return from_reciprocal(std::max(0.0, d));
  }

  /// c·p (c > 0); keeps exactness.
  Exponent scaled(std::int64_t num, std::int64_t den = 1) const {
    if (exact_) return from_reciprocal(*exact_ * Rational::make(den, num));
    return from_reciprocal(inv_ * static_cast<double>(den) / static_cast<double>(num));
  }

  void require_at_least_one(const char* what) const {
    if (inv_ > 1.0 + 1e-15) {
      throw DomainError(std::string(what) + ": exponent must be >= 1, got " +
                        std::to_string(value()));
    }
  }

  friend bool operator==(const Exponent& a, const Exponent& b) {
    if (a.exact_ && b.exact_) return *a.exact_ == *b.exact_;
    return a.inv_ == b.inv_;
  }
  friend bool operator<(const Exponent& a, const Exponent& b) { return a.inv_ > b.inv_; }
  friend bool operator<=(const Exponent& a, const Exponent& b) { return a.inv_ >= b.inv_; }

  std::string to_string() const {
    if (is_infinite()) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value());
    return buf;
  }
  friend std::ostream& operator<<(std::ostream& os, const Exponent& e) { return os << e.to_string(); }

 private:
  explicit Exponent(Rational inv) : inv_(inv.value()), exact_(inv) {}

  double inv_ = 1.0;
  std::optional<Rational> exact_;
};

/// Parses "inf"/"infinity"/"∞" or a positive number.
inline Exponent parse_exponent(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf" || text == "∞") {
    return Exponent::infinity();
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError("cannot parse exponent '" + text + "'");
  }
  if (used != text.size()) throw ParseError("cannot parse exponent '" + text + "'");
  return Exponent(v);
}

}  // namespace ncspace
