#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dps {

// Exact rational on 64-bit words. All intermediates go through __int128 and
// are range-checked; the algebra in this library keeps numbers far below the
// bound, so a failed check is a bug, not an expected condition.
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;  // > 0, gcd(|num|, den) == 1

  constexpr Rat() = default;
  constexpr Rat(std::int64_t n) : num(n), den(1) {}
  Rat(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("Rat: zero denominator");
    __int128 nn = n, dd = d;
    if (dd < 0) { nn = -nn; dd = -dd; }
    *this = make(nn, dd);
  }

  static std::int64_t checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("Rat: 64-bit overflow");
    return static_cast<std::int64_t>(v);
  }

  static Rat make(__int128 n, __int128 d) {
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b) { __int128 t = a % b; a = b; b = t; }
    if (a == 0) a = 1;
    Rat r;
    r.num = checked(n / a);
    r.den = checked(d / a);
    return r;
  }

  friend Rat operator+(const Rat& x, const Rat& y) {
    return make((__int128)x.num * y.den + (__int128)y.num * x.den, (__int128)x.den * y.den);
  }
  friend Rat operator-(const Rat& x, const Rat& y) {
    return make((__int128)x.num * y.den - (__int128)y.num * x.den, (__int128)x.den * y.den);
  }
  friend Rat operator*(const Rat& x, const Rat& y) {
    return make((__int128)x.num * y.num, (__int128)x.den * y.den);
  }
  friend Rat operator/(const Rat& x, const Rat& y) {
    if (y.num == 0) throw std::domain_error("Rat: division by zero");
    return make((__int128)x.num * y.den, (__int128)x.den * y.num);
  }
  Rat operator-() const { Rat r; r.num = -num; r.den = den; return r; }
  Rat& operator+=(const Rat& y) { return *this = *this + y; }
  Rat& operator-=(const Rat& y) { return *this = *this - y; }
  Rat& operator*=(const Rat& y) { return *this = *this * y; }
  Rat& operator/=(const Rat& y) { return *this = *this / y; }

  friend bool operator==(const Rat& x, const Rat& y) { return x.num == y.num && x.den == y.den; }
  friend bool operator!=(const Rat& x, const Rat& y) { return !(x == y); }
  friend bool operator<(const Rat& x, const Rat& y) {
    return (__int128)x.num * y.den < (__int128)y.num * x.den;
  }
  friend bool operator>(const Rat& x, const Rat& y) { return y < x; }
  friend bool operator<=(const Rat& x, const Rat& y) { return !(y < x); }
  friend bool operator>=(const Rat& x, const Rat& y) { return !(x < y); }

  bool is_zero() const { return num == 0; }
  bool is_integer() const { return den == 1; }
  int sign() const { return num > 0 ? 1 : num < 0 ? -1 : 0; }

  // Reduction into [0, 1); the representative of this rational mod Z.
  Rat mod1() const {
    std::int64_t r = num % den;
    if (r < 0) r += den;
    Rat out;
    out.num = r;
    out.den = den;
    if (r == 0) out.den = 1;
    return out;
  }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  // Accepts "p" or "p/q".
  static Rat parse(const std::string& s) {
    auto pos = s.find('/');
    if (pos == std::string::npos) return Rat(std::stoll(s));
    return Rat(std::stoll(s.substr(0, pos)), std::stoll(s.substr(pos + 1)));
  }
};

inline Rat rat_pow(const Rat& base, std::int64_t e) {
  if (e < 0) return Rat(1) / rat_pow(base, -e);
  Rat acc(1), b = base;
  while (e) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  // a >= 0, b > 0
  return (a + b - 1) / b;
}

}  // namespace dps

template <>
struct std::hash<dps::Rat> {
  size_t operator()(const dps::Rat& r) const {
    return std::hash<std::int64_t>()(r.num) * 1000003u ^ std::hash<std::int64_t>()(r.den);
  }
};
