#pragma once

#include <cstdint>
#include <map>
#include <thread>
#include <vector>

#include "dps/charlat.hpp"
#include "dps/rootsys.hpp"

namespace dps {

// Finite-support multiplicity function X(T) -> N. Keys are the canonical
// serialized coordinate tuples, so iteration order is deterministic.
class ExponentFunction {
 public:
  using Key = std::vector<std::int64_t>;
  using Map = std::map<Key, std::pair<CharacterX, std::int64_t>>;

  std::int64_t mult(const CharacterX& lam) const {
    auto it = support_.find(lam.key());
    return it == support_.end() ? 0 : it->second.second;
  }

  void add(const CharacterX& lam, std::int64_t m) {
    if (m == 0) return;
    auto key = lam.key();
    auto it = support_.find(key);
    if (it == support_.end()) {
      support_.emplace(std::move(key), std::make_pair(lam, m));
    } else {
      it->second.second += m;
      if (it->second.second == 0) support_.erase(it);
    }
  }

  void set(const CharacterX& lam, std::int64_t m) {
    auto key = lam.key();
    if (m == 0) {
      support_.erase(key);
      return;
    }
    support_[key] = {lam, m};
  }

  std::uint64_t total_mass() const {
    std::uint64_t s = 0;
    for (const auto& [k, v] : support_) s += static_cast<std::uint64_t>(v.second);
    return s;
  }

  std::size_t support_size() const { return support_.size(); }
  const Map& entries() const { return support_; }

  bool leq(const ExponentFunction& other) const {
    for (const auto& [k, v] : support_) {
      auto it = other.support_.find(k);
      std::int64_t o = it == other.support_.end() ? 0 : it->second.second;
      if (v.second > o) return false;
    }
    return true;
  }

  friend bool operator==(const ExponentFunction& a, const ExponentFunction& b) {
    if (a.support_.size() != b.support_.size()) return false;
    auto ia = a.support_.begin();
    auto ib = b.support_.begin();
    for (; ia != a.support_.end(); ++ia, ++ib)
      if (ia->first != ib->first || ia->second.second != ib->second.second) return false;
    return true;
  }
  friend bool operator!=(const ExponentFunction& a, const ExponentFunction& b) { return !(a == b); }

 private:
  Map support_;
};

// Exponents of i_M^G at lambda_0 via the Geometric Lemma with L = T:
// f(mu) = #{ w in W^{M,T} : w . lambda_0 = mu }, total mass |W^{M,T}|.
inline ExponentFunction dps_exponents(const RootDatum& datum, const LeviSpec& theta_m,
                                      const CharacterX& lambda0,
                                      const std::vector<WeylElement>* reps_hint = nullptr,
                                      int workers = 1) {
  for (int j : theta_m.theta) {
    const Coord& c = lambda0.coords[j - 1];
    if (!(c.re == Rat(-1) && c.tors.is_zero()))
      throw precondition_error("dps_exponents: coordinate " + std::to_string(j) +
                               " of lambda_0 is not -1 on Delta_M");
  }
  std::vector<WeylElement> local;
  const std::vector<WeylElement>* reps = reps_hint;
  if (!reps) {
    local = min_double_coset_reps(datum, theta_m, LeviSpec{});
    reps = &local;
  }

  auto run = [&](std::size_t lo, std::size_t hi, ExponentFunction& out) {
    for (std::size_t r = lo; r < hi; ++r) out.add(weyl_act((*reps)[r], lambda0), 1);
  };

  ExponentFunction f;
  if (workers <= 1 || reps->size() < 512) {
    run(0, reps->size(), f);
    return f;
  }
  std::size_t nw = static_cast<std::size_t>(workers);
  std::vector<ExponentFunction> parts(nw);
  std::vector<std::thread> threads;
  std::size_t chunk = (reps->size() + nw - 1) / nw;
  for (std::size_t t = 0; t < nw; ++t) {
    std::size_t lo = t * chunk, hi = std::min(reps->size(), lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&, lo, hi, t] { run(lo, hi, parts[t]); });
  }
  for (auto& th : threads) th.join();
  // Merge is commutative addition, so the result is worker-count independent.
  for (const auto& part : parts)
    for (const auto& [k, v] : part.entries()) f.add(v.first, v.second);
  return f;
}

inline std::int64_t multiplicity(const ExponentFunction& f, const CharacterX& lam) {
  return f.mult(lam);
}

}  // namespace dps
