#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dps/modp.hpp"
#include "dps/rational.hpp"

namespace dps {

// Sign-magnitude arbitrary-precision integer, base 2^32 limbs. Sized for the
// kernel certification work: numbers of a few thousand bits, schoolbook
// multiplication.
class BigInt {
 public:
  BigInt() = default;
  BigInt(std::int64_t v) {
    if (v < 0) {
      neg_ = true;
      set_u64(static_cast<std::uint64_t>(-(v + 1)) + 1);
    } else {
      set_u64(static_cast<std::uint64_t>(v));
    }
  }

  bool is_zero() const { return limbs_.empty(); }
  bool negative() const { return neg_; }
  int sign() const { return is_zero() ? 0 : neg_ ? -1 : 1; }

  static int cmp_mag(const BigInt& a, const BigInt& b) {
    if (a.limbs_.size() != b.limbs_.size()) return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
    for (std::size_t i = a.limbs_.size(); i-- > 0;)
      if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
    return 0;
  }
  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.neg_ == b.neg_ && a.limbs_ == b.limbs_;
  }
  friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
  friend bool operator<(const BigInt& a, const BigInt& b) {
    if (a.neg_ != b.neg_) return a.neg_;
    int c = cmp_mag(a, b);
    return a.neg_ ? c > 0 : c < 0;
  }

  friend BigInt operator+(const BigInt& a, const BigInt& b) {
    BigInt r;
    if (a.neg_ == b.neg_) {
      r.limbs_ = add_mag(a.limbs_, b.limbs_);
      r.neg_ = a.neg_;
    } else {
      int c = cmp_mag(a, b);
      if (c == 0) return BigInt();
      if (c > 0) {
        r.limbs_ = sub_mag(a.limbs_, b.limbs_);
        r.neg_ = a.neg_;
      } else {
        r.limbs_ = sub_mag(b.limbs_, a.limbs_);
        r.neg_ = b.neg_;
      }
    }
    r.trim();
    return r;
  }
  friend BigInt operator-(const BigInt& a, const BigInt& b) {
    BigInt nb = b;
    if (!nb.is_zero()) nb.neg_ = !nb.neg_;
    return a + nb;
  }
  friend BigInt operator*(const BigInt& a, const BigInt& b) {
    if (a.is_zero() || b.is_zero()) return BigInt();
    BigInt r;
    r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
      std::uint64_t carry = 0;
      std::uint64_t ai = a.limbs_[i];
      if (!ai) continue;
      for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
        std::uint64_t cur = r.limbs_[i + j] + ai * static_cast<std::uint64_t>(b.limbs_[j]) + carry;
        r.limbs_[i + j] = static_cast<std::uint32_t>(cur);
        carry = cur >> 32;
      }
      std::size_t k = i + b.limbs_.size();
      while (carry) {
        std::uint64_t cur = r.limbs_[k] + carry;
        r.limbs_[k] = static_cast<std::uint32_t>(cur);
        carry = cur >> 32;
        ++k;
      }
    }
    r.neg_ = a.neg_ != b.neg_;
    r.trim();
    return r;
  }

  BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
  BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
  BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

  // Fused accumulate: *this += m * c with a machine-size c. The workhorse
  // of the exact null-vector verification, so it avoids temporaries on the
  // multiply side.
  void add_mul(const BigInt& m, std::int64_t c) {
    if (c == 0 || m.is_zero()) return;
    bool cneg = c < 0;
    std::uint64_t mag = cneg ? static_cast<std::uint64_t>(-(c + 1)) + 1 : static_cast<std::uint64_t>(c);
    BigInt t;
    t.limbs_.assign(m.limbs_.size() + 2, 0);
    std::uint64_t lo = mag & 0xffffffffull, hi = mag >> 32;
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < m.limbs_.size(); ++i) {
      std::uint64_t cur = t.limbs_[i] + lo * m.limbs_[i] + carry;
      t.limbs_[i] = static_cast<std::uint32_t>(cur);
      carry = cur >> 32;
    }
    t.limbs_[m.limbs_.size()] += static_cast<std::uint32_t>(carry);
    if (hi) {
      carry = 0;
      for (std::size_t i = 0; i < m.limbs_.size(); ++i) {
        std::uint64_t cur = t.limbs_[i + 1] + hi * m.limbs_[i] + carry;
        t.limbs_[i + 1] = static_cast<std::uint32_t>(cur);
        carry = cur >> 32;
      }
      t.limbs_[m.limbs_.size() + 1] += static_cast<std::uint32_t>(carry);
    }
    t.neg_ = m.neg_ != cneg;
    t.trim();
    *this = *this + t;
  }

  // Quotient and remainder; remainder has the sign of the dividend.
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.is_zero()) throw std::domain_error("BigInt: division by zero");
    if (cmp_mag(a, b) < 0) {
      q = BigInt();
      r = a;
      return;
    }
    // base-2^32 schoolbook long division on magnitudes
    std::vector<std::uint32_t> quot(a.limbs_.size(), 0);
    BigInt rem;
    for (std::size_t i = a.limbs_.size(); i-- > 0;) {
      rem.shift_limb_up();
      rem.limbs_[0] = a.limbs_[i];
      rem.trim();
      // binary search the quotient limb
      std::uint64_t lo = 0, hi = 0xffffffffull;
      while (lo < hi) {
        std::uint64_t mid = (lo + hi + 1) >> 1;
        BigInt t = b.abs() * BigInt(static_cast<std::int64_t>(mid));
        if (cmp_mag(t, rem) <= 0)
          lo = mid;
        else
          hi = mid - 1;
      }
      quot[i] = static_cast<std::uint32_t>(lo);
      if (lo) rem = rem - b.abs() * BigInt(static_cast<std::int64_t>(lo));
    }
    q.limbs_ = std::move(quot);
    q.neg_ = a.neg_ != b.neg_;
    q.trim();
    r = rem;
    r.neg_ = a.neg_ && !r.is_zero();
  }

  BigInt abs() const {
    BigInt r = *this;
    r.neg_ = false;
    return r;
  }

  static BigInt gcd(BigInt a, BigInt b) {
    a.neg_ = b.neg_ = false;
    while (!b.is_zero()) {
      BigInt q, r;
      divmod(a, b, q, r);
      a = b;
      b = r;
    }
    return a;
  }

  std::uint64_t mod_u64(std::uint64_t m) const {
    std::uint64_t r = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) r = ((r << 32) | limbs_[i]) % m;
    if (neg_ && r) r = m - r;
    return r;
  }

  std::size_t bits() const {
    if (limbs_.empty()) return 0;
    std::size_t b = (limbs_.size() - 1) * 32;
    std::uint32_t top = limbs_.back();
    while (top) {
      ++b;
      top >>= 1;
    }
    return b;
  }

  // Only valid when the value fits.
  std::int64_t to_i64() const {
    if (bits() > 62) throw std::overflow_error("BigInt::to_i64");
    std::int64_t v = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) v = (v << 32) | limbs_[i];
    return neg_ ? -v : v;
  }

  std::string str() const {
    if (is_zero()) return "0";
    BigInt t = abs(), q, r;
    std::string digits;
    BigInt ten(10);
    while (!t.is_zero()) {
      divmod(t, ten, q, r);
      digits += static_cast<char>('0' + (r.is_zero() ? 0 : r.limbs_[0]));
      t = q;
    }
    if (neg_) digits += '-';
    std::reverse(digits.begin(), digits.end());
    return digits;
  }

 private:
  std::vector<std::uint32_t> limbs_;  // little-endian
  bool neg_ = false;

  void set_u64(std::uint64_t v) {
    limbs_.clear();
    if (v) limbs_.push_back(static_cast<std::uint32_t>(v));
    if (v >> 32) limbs_.push_back(static_cast<std::uint32_t>(v >> 32));
  }
  void shift_limb_up() { limbs_.insert(limbs_.begin(), 0); }
  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) neg_ = false;
  }

  static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> r(std::max(a.size(), b.size()) + 1, 0);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::uint64_t s = carry;
      if (i < a.size()) s += a[i];
      if (i < b.size()) s += b[i];
      r[i] = static_cast<std::uint32_t>(s);
      carry = s >> 32;
    }
    return r;
  }
  // requires |a| >= |b|
  static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> r = a;
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::int64_t s = static_cast<std::int64_t>(r[i]) - borrow - (i < b.size() ? b[i] : 0);
      borrow = 0;
      if (s < 0) {
        s += 1ll << 32;
        borrow = 1;
      }
      r[i] = static_cast<std::uint32_t>(s);
    }
    return r;
  }
};

// Chinese remainder accumulation: value congruent to r_i mod p_i.
struct CrtAccumulator {
  BigInt value;    // canonical representative in [0, modulus)
  BigInt modulus{1};

  void add(std::uint64_t residue, std::uint64_t prime) {
    if (modulus == BigInt(1)) {
      value = BigInt(static_cast<std::int64_t>(residue % prime));
      modulus = BigInt(static_cast<std::int64_t>(prime));
      return;
    }
    // t = (residue - value) * inv(modulus) mod prime
    std::uint64_t vm = value.mod_u64(prime);
    std::uint64_t diff = (residue % prime + prime - vm) % prime;
    Fp fp{prime};
    std::uint64_t minv = fp.inv(modulus.mod_u64(prime));
    std::uint64_t t = fp.mul(diff, minv);
    value = value + modulus * BigInt(static_cast<std::int64_t>(t));
    modulus = modulus * BigInt(static_cast<std::int64_t>(prime));
  }
};

inline bool cmpge(const BigInt& a, const BigInt& b) { return !(a < b); }

// Rational reconstruction: find n/d = value mod modulus with |n|, d <= bound,
// via the half-extended Euclidean algorithm. Returns false when none exists.
inline bool rational_reconstruct(const BigInt& value, const BigInt& modulus, BigInt& num,
                                 BigInt& den) {
  BigInt bound_sq = modulus;  // compare via 2*n^2 < modulus style bound
  BigInt r0 = modulus, r1 = value.abs();
  BigInt t0(0), t1(1);
  // loop while r1^2 * 2 >= modulus
  for (;;) {
    BigInt twice = r1 * r1 * BigInt(2);
    if (cmpge(modulus, twice)) break;
    BigInt q, rem;
    BigInt::divmod(r0, r1, q, rem);
    BigInt t2 = t0 - q * t1;
    r0 = r1;
    r1 = rem;
    t0 = t1;
    t1 = t2;
    if (r1.is_zero()) return false;
  }
  BigInt dcheck = t1.abs();
  BigInt twice_d = dcheck * dcheck * BigInt(2);
  if (!cmpge(modulus, twice_d)) return false;
  num = t1.negative() ? BigInt() - r1 : r1;
  if (value.negative()) num = BigInt() - num;
  den = dcheck;
  if (den.is_zero()) return false;
  BigInt g = BigInt::gcd(num, den);
  if (!(g == BigInt(1))) {
    BigInt q, rem;
    BigInt::divmod(num, g, q, rem);
    num = q;
    BigInt::divmod(den, g, q, rem);
    den = q;
  }
  return true;
}

// Exact rational with BigInt parts; only what certification needs.
struct BigRat {
  BigInt num;
  BigInt den{1};

  static BigRat from(const Rat& r) {
    BigRat b;
    b.num = BigInt(r.num);
    b.den = BigInt(r.den);
    return b;
  }
  bool is_zero() const { return num.is_zero(); }
};

}  // namespace dps
