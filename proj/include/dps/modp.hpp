#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace dps {

// Arithmetic mod a prime below 2^31: products fit in uint64.
struct Fp {
  std::uint64_t p;

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= p ? s - p : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + p - b; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return a * b % p; }
  std::uint64_t neg(std::uint64_t a) const { return a ? p - a : 0; }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = 1;
    a %= p;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  std::uint64_t inv(std::uint64_t a) const {
    if (a == 0) throw std::domain_error("Fp::inv(0)");
    return pow(a, p - 2);
  }
  // Image of a rational num/den.
  std::uint64_t from_rat(std::int64_t num, std::int64_t den) const {
    std::uint64_t n = static_cast<std::uint64_t>(num >= 0 ? num : -num) % p;
    if (num < 0) n = neg(n);
    std::uint64_t d = static_cast<std::uint64_t>(den) % p;
    if (d == 0) throw std::domain_error("Fp: denominator divisible by p");
    return mul(n, inv(d));
  }
};

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull})
    if (n % q == 0) return n == q;
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  auto mulmod = [&](std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % n);
  };
  auto powmod = [&](std::uint64_t a, std::uint64_t e) {
    std::uint64_t x = 1;
    a %= n;
    while (e) {
      if (e & 1) x = mulmod(x, a);
      a = mulmod(a, a);
      e >>= 1;
    }
    return x;
  };
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (a % n == 0) continue;
    std::uint64_t x = powmod(a, d);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

// Deterministic stream of 31-bit primes from a seed.
inline std::uint64_t random_prime31(std::mt19937_64& rng) {
  for (;;) {
    std::uint64_t c = (rng() % ((1ull << 31) - (1ull << 30))) + (1ull << 30);
    c |= 1;
    if (is_prime_u64(c)) return c;
  }
}

}  // namespace dps
