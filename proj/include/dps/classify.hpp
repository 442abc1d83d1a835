#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dps/jacquet.hpp"

namespace dps {

enum class Regularity { regular, non_regular };
enum class Verdict { irreducible, reducible, reducible_regular, inconclusive };

inline const char* to_string(Regularity r) {
  return r == Regularity::regular ? "regular" : "non_regular";
}
inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::irreducible: return "irreducible";
    case Verdict::reducible: return "reducible";
    case Verdict::reducible_regular: return "reducible_regular";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

inline bool is_regular(const RootDatum& datum, const DPSPoint& p) {
  auto ad = antidominant_with_stabilizer(datum, leading_exponent(datum, p), false);
  return ad.stab_order == 1;
}

struct RegularReducibility {
  bool reducible = false;
  std::optional<std::size_t> witness_root;  // index into pos_root_coeffs
};

// Criterion REG3: reducible iff <lambda_0, gamma^vee> = +-1 (with trivial
// torsion) for some positive root outside Phi_M.
inline RegularReducibility regular_reducibility(const RootDatum& datum, const DPSPoint& p) {
  if (!is_regular(datum, p))
    throw precondition_error("regular_reducibility: point is not regular");
  CharacterX lam0 = leading_exponent(datum, p);
  RegularReducibility out;
  for (std::size_t r = 0; r < datum.num_positive_roots(); ++r) {
    if (datum.pos_root_coeffs[r][p.i - 1] == 0) continue;  // gamma in Phi_M
    Coord pr = pairing(datum, lam0, r);
    if (!pr.tors.is_zero()) continue;
    if (pr.re == Rat(1) || pr.re == Rat(-1)) {
      out.reducible = true;
      out.witness_root = r;
      return out;
    }
  }
  return out;
}

enum class SpecialClass { regular_reducible, non_regular };

struct SpecialPoint {
  Rat s;
  SpecialClass cls;
};

// Candidate s <= 0 solved exactly from s*m_i(gamma) - <rho_M, gamma^vee> in
// {0, +-1} over gamma in Phi^+ \ Phi_M (the +-1 branch needs k | m_i so the
// torsion part of the pairing vanishes); each candidate is then verified by
// the stabilizer and REG3 tests. Positive s mirror by contragredience.
inline std::vector<SpecialPoint> enumerate_special_points(const RootDatum& datum, int i,
                                                          std::int64_t k) {
  CharacterX rho = rho_levi(datum, LeviSpec::maximal(datum.n, i));
  std::set<Rat> candidates;
  for (std::size_t r = 0; r < datum.num_positive_roots(); ++r) {
    std::int64_t m = datum.pos_root_coeffs[r][i - 1];
    if (m == 0) continue;
    Rat c = pairing(datum, rho, r).re;
    candidates.insert(c / Rat(m));
    if (m % k == 0) {
      candidates.insert((c + Rat(1)) / Rat(m));
      candidates.insert((c - Rat(1)) / Rat(m));
    }
  }
  std::vector<SpecialPoint> out;
  for (const Rat& s : candidates) {
    if (s.sign() > 0) continue;
    DPSPoint p{i, s, k};
    if (is_regular(datum, p)) {
      if (regular_reducibility(datum, p).reducible) out.push_back({s, SpecialClass::regular_reducible});
    } else {
      out.push_back({s, SpecialClass::non_regular});
    }
  }
  return out;  // std::set iterates ascending, so out is sorted by s
}

// A comparison representation for the Tadic test: one-dimensional on a
// standard Levi. Corank-1 [j,t,k] parameterizes by the character coefficient
// t and twist order k, as for the point itself. Corank-2 triples
// [(j1,j2),(s1,s2),(e1,e2)] give the leading-exponent coordinates s_m at
// positions j_m directly, with torsion e_m/k from exponents of the point's
// own twist; every corank-2 table entry decodes to the right Weyl orbit
// under this reading and to no orbit at all under the coefficient one.
struct CandidateSpec {
  std::vector<int> js;
  std::vector<Rat> ss;
  std::vector<Rat> torsions;  // reduced mod 1
  bool coords_given = false;  // corank-2: ss are lambda_0 coordinates

  static CandidateSpec corank1(int j, Rat t, std::int64_t k) {
    CandidateSpec c;
    c.js = {j};
    c.ss = {t};
    c.torsions = {k > 1 ? Rat(1, k).mod1() : Rat(0)};
    return c;
  }
  static CandidateSpec corank2(int j1, int j2, Rat s1, Rat s2, std::int64_t e1, std::int64_t e2,
                               std::int64_t k_pi) {
    CandidateSpec c;
    c.js = {j1, j2};
    c.ss = {s1, s2};
    c.torsions = {Rat(e1, k_pi).mod1(), Rat(e2, k_pi).mod1()};
    c.coords_given = true;
    return c;
  }

  LeviSpec levi(int rank) const {
    LeviSpec l;
    for (int j = 1; j <= rank; ++j)
      if (std::find(js.begin(), js.end(), j) == js.end()) l.theta.push_back(j);
    return l;
  }

  CharacterX leading_exponent(const RootDatum& datum) const {
    CharacterX lam = rho_levi(datum, levi(datum.n));
    for (auto& c : lam.coords) c.re = -c.re;
    for (std::size_t m = 0; m < js.size(); ++m) {
      if (coords_given)
        lam.coords[js[m] - 1].re = ss[m];
      else
        lam.coords[js[m] - 1].re += ss[m];
      lam.coords[js[m] - 1].tors = (lam.coords[js[m] - 1].tors + torsions[m]).mod1();
    }
    return lam;
  }

  std::string str() const {
    std::string s = "[";
    for (std::size_t m = 0; m < js.size(); ++m) {
      if (m) s += ";";
      s += std::to_string(js[m]) + "," + ss[m].str() + "," + torsions[m].str();
    }
    return s + "]";
  }
};

enum class TadicOutcome { reducible_confirmed, inconclusive };

struct TadicResult {
  TadicOutcome outcome = TadicOutcome::inconclusive;
  std::optional<CharacterX> witness_mu;  // condition (3) witness
  std::int64_t mult_pi = 0, mult_sigma = 0;
  std::uint64_t stab_order = 0;
  bool cond2_equality = false;  // f_pi(l_ad) == f_sigma(l_ad) == |Stab|
};

// Tadic reducibility test against a comparison series sigma = i_L^G(tau).
// Condition (1) is the orbit match (checked, an error when violated),
// condition (2) uses the anti-dominant multiplicity law, condition (3) looks
// for an exponent with strictly larger multiplicity in pi than in sigma.
inline TadicResult tadic_test(const RootDatum& datum, const DPSPoint& p,
                              const CandidateSpec& cand,
                              const ExponentFunction* f_pi_hint = nullptr) {
  CharacterX lam0_pi = leading_exponent(datum, p);
  CharacterX lam0_sigma = cand.leading_exponent(datum);

  auto ad_pi = antidominant_with_stabilizer(datum, lam0_pi, false);
  auto ad_sigma = antidominant_with_stabilizer(datum, lam0_sigma, false);
  if (!(ad_pi.lambda_ad == ad_sigma.lambda_ad))
    throw precondition_error("tadic_test: candidate exponents lie outside the W-orbit of pi");

  ExponentFunction f_pi = f_pi_hint ? *f_pi_hint
                                    : dps_exponents(datum, LeviSpec::maximal(datum.n, p.i), lam0_pi);
  ExponentFunction f_sigma = dps_exponents(datum, cand.levi(datum.n), lam0_sigma);

  TadicResult res;
  res.stab_order = ad_pi.stab_order;
  std::int64_t at_ad_pi = f_pi.mult(ad_pi.lambda_ad);
  std::int64_t at_ad_sigma = f_sigma.mult(ad_pi.lambda_ad);
  res.cond2_equality = at_ad_pi == static_cast<std::int64_t>(ad_pi.stab_order) &&
                       at_ad_sigma == static_cast<std::int64_t>(ad_pi.stab_order);
  bool cond2 = at_ad_pi + at_ad_sigma > static_cast<std::int64_t>(ad_pi.stab_order);
  if (!cond2) return res;

  for (const auto& [key, entry] : f_pi.entries()) {
    std::int64_t msig = f_sigma.mult(entry.first);
    if (entry.second > msig) {
      res.outcome = TadicOutcome::reducible_confirmed;
      res.witness_mu = entry.first;
      res.mult_pi = entry.second;
      res.mult_sigma = msig;
      return res;
    }
  }
  return res;
}

}  // namespace dps
