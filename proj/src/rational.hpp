#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

namespace poisntt {

// Exact rational with 64-bit numerator/denominator. Arithmetic is checked:
// any operation that would overflow returns nullopt and the caller keeps the
// unfolded expression instead. Invariant: den > 0, gcd(|num|, den) == 1.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  static std::optional<Rational> make(std::int64_t num, std::int64_t den) {
    if (den == 0) return std::nullopt;
    if (num == INT64_MIN || den == INT64_MIN) return std::nullopt;
    if (den < 0) {
      num = -num;
      den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    Rational r;
    r.num_ = num;
    r.den_ = den;
    return r;
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  bool negative() const { return num_ < 0; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  static std::optional<Rational> add(const Rational& a, const Rational& b) {
    __int128 num = static_cast<__int128>(a.num_) * b.den_ +
                   static_cast<__int128>(b.num_) * a.den_;
    __int128 den = static_cast<__int128>(a.den_) * b.den_;
    return from128(num, den);
  }
  static std::optional<Rational> sub(const Rational& a, const Rational& b) {
    return add(a, Rational::negate(b));
  }
  static std::optional<Rational> mul(const Rational& a, const Rational& b) {
    __int128 num = static_cast<__int128>(a.num_) * b.num_;
    __int128 den = static_cast<__int128>(a.den_) * b.den_;
    return from128(num, den);
  }
  static std::optional<Rational> div(const Rational& a, const Rational& b) {
    if (b.num_ == 0) return std::nullopt;
    __int128 num = static_cast<__int128>(a.num_) * b.den_;
    __int128 den = static_cast<__int128>(a.den_) * b.num_;
    return from128(num, den);
  }
  static Rational negate(const Rational& a) {
    Rational r;
    r.num_ = -a.num_;  // num_ != INT64_MIN by construction
    r.den_ = a.den_;
    return r;
  }
  static Rational abs(const Rational& a) {
    return a.num_ < 0 ? negate(a) : a;
  }
  // a^k for integer k (k may be negative when a != 0).
  static std::optional<Rational> pow(const Rational& a, std::int64_t k) {
    if (k == 0) return Rational(1);
    if (a.is_zero()) {
      if (k < 0) return std::nullopt;
      return Rational(0);
    }
    bool invert = k < 0;
    std::uint64_t e = invert ? static_cast<std::uint64_t>(-(k + 1)) + 1
                             : static_cast<std::uint64_t>(k);
    Rational acc(1);
    Rational base = a;
    while (e > 0) {
      if (e & 1) {
        auto m = mul(acc, base);
        if (!m) return std::nullopt;
        acc = *m;
      }
      e >>= 1;
      if (e > 0) {
        auto m = mul(base, base);
        if (!m) return std::nullopt;
        base = *m;
      }
    }
    if (invert) return div(Rational(1), acc);
    return acc;
  }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static std::optional<Rational> from128(__int128 num, __int128 den) {
    if (den == 0) return std::nullopt;
    if (den < 0) {
      num = -num;
      den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
    if (num > INT64_MAX || num < -INT64_MAX || den > INT64_MAX) {
      return std::nullopt;
    }
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace poisntt
