#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "dps/rational.hpp"
#include "dps/rootsys.hpp"

namespace dps {

struct precondition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One coordinate of a character of T: exact real part plus a finite-order
// part reduced into [0,1).
struct Coord {
  Rat re;
  Rat tors;

  friend bool operator==(const Coord& a, const Coord& b) { return a.re == b.re && a.tors == b.tors; }
  friend bool operator!=(const Coord& a, const Coord& b) { return !(a == b); }
  friend bool operator<(const Coord& a, const Coord& b) {
    if (a.re != b.re) return a.re < b.re;
    return a.tors < b.tors;
  }
};

// Character of T in fundamental-weight coordinates: lambda = sum c_i . w_i.
struct CharacterX {
  std::vector<Coord> coords;

  CharacterX() = default;
  explicit CharacterX(int n) : coords(n) {}

  int rank() const { return static_cast<int>(coords.size()); }

  static CharacterX real(const std::vector<Rat>& re) {
    CharacterX c(static_cast<int>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) c.coords[i].re = re[i];
    return c;
  }
  static CharacterX real_int(const IVec& re) {
    CharacterX c(static_cast<int>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) c.coords[i].re = Rat(re[i]);
    return c;
  }

  bool is_real() const {
    for (const auto& c : coords)
      if (!c.tors.is_zero()) return false;
    return true;
  }

  friend bool operator==(const CharacterX& a, const CharacterX& b) { return a.coords == b.coords; }
  friend bool operator!=(const CharacterX& a, const CharacterX& b) { return !(a == b); }
  friend bool operator<(const CharacterX& a, const CharacterX& b) { return a.coords < b.coords; }

  CharacterX operator+(const CharacterX& o) const {
    CharacterX r(rank());
    for (int i = 0; i < rank(); ++i) {
      r.coords[i].re = coords[i].re + o.coords[i].re;
      r.coords[i].tors = (coords[i].tors + o.coords[i].tors).mod1();
    }
    return r;
  }
  CharacterX operator-(const CharacterX& o) const {
    CharacterX r(rank());
    for (int i = 0; i < rank(); ++i) {
      r.coords[i].re = coords[i].re - o.coords[i].re;
      r.coords[i].tors = (coords[i].tors - o.coords[i].tors).mod1();
    }
    return r;
  }

  // Flat integer key (num/den alternating), canonical since coords are reduced.
  std::vector<std::int64_t> key() const {
    std::vector<std::int64_t> k;
    k.reserve(coords.size() * 4);
    for (const auto& c : coords) {
      k.push_back(c.re.num);
      k.push_back(c.re.den);
      k.push_back(c.tors.num);
      k.push_back(c.tors.den);
    }
    return k;
  }

  std::string str() const {
    std::string s = "[";
    for (int i = 0; i < rank(); ++i) {
      if (i) s += ",";
      s += coords[i].re.str();
      if (!coords[i].tors.is_zero()) s += "+" + coords[i].tors.str() + "t";
    }
    return s + "]";
  }
};

// A point of a degenerate principal series: parabolic index i, exact s, and
// the order k of the finite-order twist (modelled as torsion 1/k).
struct DPSPoint {
  int i = 1;
  Rat s;
  std::int64_t k = 1;

  std::string str() const {
    return "[" + std::to_string(i) + "," + s.str() + "," + std::to_string(k) + "]";
  }
};

inline CharacterX weyl_act(const WeylElement& w, const CharacterX& lam) {
  int n = w.rank();
  if (lam.rank() != n) throw dimension_error("weyl_act: rank mismatch");
  CharacterX out(n);
  for (int i = 0; i < n; ++i) {
    Rat re(0), tors(0);
    for (int j = 0; j < n; ++j) {
      std::int64_t m = w.mat[i * n + j];
      if (!m) continue;
      re += Rat(m) * lam.coords[j].re;
      tors += Rat(m) * lam.coords[j].tors;
    }
    out.coords[i].re = re;
    out.coords[i].tors = tors.mod1();
  }
  return out;
}

// Apply the simple reflection s_i (1-based) in place.
inline void reflect_char(const RootDatum& datum, int i1, CharacterX& lam) {
  Coord ci = lam.coords[i1 - 1];
  if (ci.re.is_zero() && ci.tors.is_zero()) return;
  for (int r = 0; r < datum.n; ++r) {
    std::int64_t m = datum.a(r, i1 - 1);
    if (!m) continue;
    lam.coords[r].re -= Rat(m) * ci.re;
    lam.coords[r].tors = (lam.coords[r].tors - Rat(m) * ci.tors).mod1();
  }
}

// rho_M: half sum of the positive roots of the Levi, in weight coordinates.
inline CharacterX rho_levi(const RootDatum& datum, const LeviSpec& theta) {
  IVec acc(datum.n, 0);
  for (std::size_t r = 0; r < datum.num_positive_roots(); ++r) {
    const IVec& c = datum.pos_root_coeffs[r];
    bool in = true;
    for (int j = 0; j < datum.n && in; ++j)
      if (c[j] != 0 && !theta.contains(j + 1)) in = false;
    if (!in) continue;
    for (int j = 0; j < datum.n; ++j) acc[j] += datum.pos_root_weights[r][j];
  }
  CharacterX out(datum.n);
  for (int j = 0; j < datum.n; ++j) out.coords[j].re = Rat(acc[j], 2);
  return out;
}

// lambda_0 = (s + 1/k torsion) . w_i - rho_M; every Delta_M coordinate is -1.
inline CharacterX leading_exponent(const RootDatum& datum, const DPSPoint& p) {
  LeviSpec theta = LeviSpec::maximal(datum.n, p.i);
  CharacterX lam = rho_levi(datum, theta);
  for (auto& c : lam.coords) c.re = -c.re;
  lam.coords[p.i - 1].re += p.s;
  if (p.k > 1) lam.coords[p.i - 1].tors = Rat(1, p.k).mod1();
  return lam;
}

// <lambda, gamma^vee> for a positive root (by index); by the simply-laced
// mirror the coroot coefficients equal the root coefficients.
inline Coord pairing(const RootDatum& datum, const CharacterX& lam, std::size_t root_index) {
  const IVec& m = datum.pos_root_coeffs[root_index];
  Coord out;
  for (int j = 0; j < datum.n; ++j) {
    if (!m[j]) continue;
    out.re += Rat(m[j]) * lam.coords[j].re;
    out.tors += Rat(m[j]) * lam.coords[j].tors;
  }
  out.tors = out.tors.mod1();
  return out;
}

struct AntiDominant {
  CharacterX lambda_ad;
  WeylElement w;  // w . lambda = lambda_ad
  std::uint64_t stab_order = 1;
  std::vector<WeylElement> stab_gens;
};

namespace detail {
inline std::string char_pack(const CharacterX& c) {
  std::string s;
  for (const auto& k : c.key()) {
    s += std::to_string(k);
    s += ',';
  }
  return s;
}
}  // namespace detail

// Anti-dominant normal form with the stabilizer of Eq. Stab(lambda_ad) =
// { u in Stab(Re lambda_ad) : u . Im lambda_ad = Im lambda_ad }.
//
// When torsion makes the anti-dominant representative non-unique, the
// lexicographically least (re, tors) coordinate tuple over the W_{Theta_0}
// orbit is returned, so keys are deterministic.
inline AntiDominant antidominant_with_stabilizer(const RootDatum& datum, const CharacterX& lam,
                                                 bool want_generators = true) {
  AntiDominant out;
  CharacterX x = lam;
  WeylElement w = datum.identity();
  for (;;) {
    int pick = 0;
    for (int i = 1; i <= datum.n; ++i)
      if (x.coords[i - 1].re.sign() > 0) {
        pick = i;
        break;
      }
    if (!pick) break;
    reflect_char(datum, pick, x);
    w = datum.simple(pick) * w;
  }

  // Simple roots pairing to zero on the real part span Stab(Re lambda_ad).
  std::vector<int> theta0;
  for (int i = 1; i <= datum.n; ++i)
    if (x.coords[i - 1].re.is_zero()) theta0.push_back(i);

  // Orbit of x under W_{Theta_0}; only torsion moves. The transversal is kept
  // as parent pointers; Schreier generators of the stabilizer come from the
  // non-tree edges.
  struct Node {
    CharacterX point;
    int parent;
    int letter;
  };
  std::deque<int> queue;
  std::vector<Node> orbit;
  std::unordered_map<std::string, int> index;
  orbit.push_back({x, -1, 0});
  index[detail::char_pack(x)] = 0;
  queue.push_back(0);
  auto transversal = [&](int id) {
    // u with u . x = orbit[id]
    WeylElement u = datum.identity();
    while (orbit[id].parent >= 0) {
      u = u * datum.simple(orbit[id].letter);  // letters accumulate right to left
      id = orbit[id].parent;
    }
    return u;
  };
  struct Edge {
    int from, to, letter;
  };
  std::vector<Edge> nontree;
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    for (int i : theta0) {
      CharacterX next = orbit[cur].point;
      reflect_char(datum, i, next);
      auto key = detail::char_pack(next);
      auto it = index.find(key);
      if (it == index.end()) {
        int id = static_cast<int>(orbit.size());
        index.emplace(key, id);
        orbit.push_back({std::move(next), cur, i});
        queue.push_back(id);
      } else if (want_generators && nontree.size() < 4096) {
        nontree.push_back({cur, it->second, i});
      }
    }
  }

  int best = 0;
  for (int i = 1; i < static_cast<int>(orbit.size()); ++i)
    if (orbit[i].point < orbit[best].point) best = i;

  std::uint64_t wth = datum.levi_weyl_order(LeviSpec(theta0));
  if (wth % orbit.size() != 0) throw std::logic_error("orbit size does not divide |W_Theta0|");

  WeylElement u_best = transversal(best);
  out.lambda_ad = orbit[best].point;
  out.w = u_best * w;
  out.stab_order = wth / orbit.size();
  if (want_generators) {
    std::vector<WeylElement> gens;
    for (const auto& e : nontree) {
      if (gens.size() >= 64) break;
      WeylElement g = transversal(e.to).inverse() * (datum.simple(e.letter) * transversal(e.from));
      if (g.is_identity()) continue;
      // Conjugate from the stabilizer of x to the stabilizer of lambda_ad.
      g = u_best * g * u_best.inverse();
      bool dup = false;
      for (const auto& h : gens)
        if (h == g) {
          dup = true;
          break;
        }
      if (!dup) gens.push_back(g);
    }
    out.stab_gens = std::move(gens);
  }
  return out;
}

inline CharacterX antidominant_form(const RootDatum& datum, const CharacterX& lam) {
  return antidominant_with_stabilizer(datum, lam, false).lambda_ad;
}

}  // namespace dps
