#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "premlog/errors.hpp"

namespace premlog {

// Exact rational arithmetic on a 64-bit numerator/denominator pair.
// Always normalized: den > 0 and gcd(|num|, den) == 1. Intermediate products
// use 128-bit arithmetic; results that do not fit back into 64 bits throw
// Error(overflow) rather than wrapping or rounding. This exactness is what
// makes interpretation equality (and therefore the PreM comparisons) decidable.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(std::int64_t n, std::int64_t d) { *this = make(n, d); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  bool is_positive() const { return num_ > 0; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == 1 && b.den_ == 1) {  // integer fast path: no gcd needed
      std::int64_t s;
      if (__builtin_add_overflow(a.num_, b.num_, &s) || s == INT64_MIN)
        throw Error(ErrorCode::overflow, "rational exceeds 64-bit range");
      return raw(s, 1);
    }
    return normalize(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                     i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    if (a.den_ == 1 && b.den_ == 1) {
      std::int64_t s;
      if (__builtin_sub_overflow(a.num_, b.num_, &s) || s == INT64_MIN)
        throw Error(ErrorCode::overflow, "rational exceeds 64-bit range");
      return raw(s, 1);
    }
    return normalize(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                     i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    if (a.den_ == 1 && b.den_ == 1) {
      std::int64_t s;
      if (__builtin_mul_overflow(a.num_, b.num_, &s) || s == INT64_MIN)
        throw Error(ErrorCode::overflow, "rational exceeds 64-bit range");
      return raw(s, 1);
    }
    return normalize(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error(ErrorCode::division_by_zero, "rational division by zero");
    return normalize(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;  // num_ > INT64_MIN always: |num_| came through a range check
    r.den_ = den_;
    return r;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return a.num_ <=> b.num_;  // common case: both integers
    i128 lhs = i128(a.num_) * b.den_;
    i128 rhs = i128(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  std::size_t hash() const {
    std::uint64_t h = mix(static_cast<std::uint64_t>(num_));
    h ^= mix(static_cast<std::uint64_t>(den_)) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }

  // Accepts "42", "-7", "3.14" (stored exactly, e.g. 157/50) and "p/q".
  static Rational parse(std::string_view text) {
    std::size_t pos = 0;
    bool neg = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
      neg = text[pos] == '-';
      ++pos;
    }
    i128 num = 0;
    i128 den = 1;
    std::size_t digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      num = num * 10 + (text[pos] - '0');
      if (num > kMax128) throw Error(ErrorCode::overflow, "numeric literal too large");
      ++pos;
      ++digits;
    }
    if (digits == 0) throw Error(ErrorCode::invalid_argument, "malformed number: " + std::string(text));
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      std::size_t frac_digits = 0;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        num = num * 10 + (text[pos] - '0');
        den *= 10;
        if (num > kMax128 || den > kMax128) throw Error(ErrorCode::overflow, "numeric literal too large");
        ++pos;
        ++frac_digits;
      }
      if (frac_digits == 0) throw Error(ErrorCode::invalid_argument, "malformed decimal: " + std::string(text));
    } else if (pos < text.size() && text[pos] == '/') {
      ++pos;
      i128 d = 0;
      std::size_t den_digits = 0;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        d = d * 10 + (text[pos] - '0');
        if (d > kMax128) throw Error(ErrorCode::overflow, "numeric literal too large");
        ++pos;
        ++den_digits;
      }
      if (den_digits == 0) throw Error(ErrorCode::invalid_argument, "malformed fraction: " + std::string(text));
      den = d;
    }
    if (pos != text.size()) throw Error(ErrorCode::invalid_argument, "malformed number: " + std::string(text));
    return normalize(neg ? -num : num, den);
  }

 private:
  using i128 = __int128;
  static constexpr i128 kMax128 = (i128(1) << 100);  // generous bound for parse accumulation

  static Rational make(std::int64_t n, std::int64_t d) { return normalize(i128(n), i128(d)); }

  // Bypasses normalization for values already known to satisfy the invariant.
  static Rational raw(std::int64_t n, std::int64_t d) {
    Rational r;
    r.num_ = n;
    r.den_ = d;
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational normalize(i128 n, i128 d) {
    if (d == 0) throw Error(ErrorCode::division_by_zero, "zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    if (n == 0) d = 1;
    if (d != 1) {  // d == 1 needs no gcd
      i128 g = gcd128(n, d);
      if (g > 1) {
        n /= g;
        d /= g;
      }
    }
    constexpr i128 lo = i128(INT64_MIN), hi = i128(INT64_MAX);
    if (n < lo || n > hi || d > hi) throw Error(ErrorCode::overflow, "rational exceeds 64-bit range");
    if (n == lo) throw Error(ErrorCode::overflow, "rational exceeds 64-bit range");  // keep -x representable
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace premlog
