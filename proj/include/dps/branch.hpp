#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dps/jacquet.hpp"

namespace dps {

enum class RuleKind { OR, A1, A2, A3, A3a, An, D5 };

// One rule: an applicability pattern on a Levi sub-diagram plus an output
// multiplicity template. Words are in pattern letters (1-based), composition
// order: entry word [w1..wk] targets s_{w1} ... s_{wk} . lambda.
struct BranchRule {
  std::string name;
  RuleKind kind = RuleKind::A1;
  std::string pattern;  // Coxeter label of the pattern sub-diagram ("" for OR)
  int pattern_rank = 0;
  struct Entry {
    std::vector<int> word;
    std::int64_t mult;
  };
  std::vector<Entry> templ;  // the empty-word entry carries the divisor value
};

inline std::vector<BranchRule> builtin_rules() {
  std::vector<BranchRule> rules;
  rules.push_back({"OR", RuleKind::OR, "", 0, {{{}, 1}}});
  rules.push_back({"A1", RuleKind::A1, "A1", 1, {{{}, 1}, {{1}, 1}}});
  rules.push_back({"A2", RuleKind::A2, "A2", 2, {{{}, 2}, {{1}, 1}}});
  rules.push_back({"A3", RuleKind::A3, "A3", 3, {{{}, 2}, {{1}, 1}, {{3}, 1}, {{1, 3}, 2}}});
  rules.push_back({"A3a", RuleKind::A3a, "A3", 3, {{{}, 6}, {{1}, 4}, {{2, 1}, 2}}});
  for (int n = 2; n <= 6; ++n) {
    BranchRule r;
    r.name = "An" + std::to_string(n);
    r.kind = RuleKind::An;
    r.pattern = "A" + std::to_string(n);
    r.pattern_rank = n;
    std::int64_t fac = 1;
    for (int j = 2; j < n; ++j) fac *= j;  // (n-1)!
    for (int l = 0; l <= n; ++l) {
      std::int64_t m = (n - l) * fac;
      if (m == 0) continue;
      std::vector<int> word;
      for (int j = l; j >= 1; --j) word.push_back(j);  // s_l ... s_1
      r.templ.push_back({word, m});
    }
    rules.push_back(std::move(r));
  }
  // D5 with chain 1-2-3 and fork tips 4,5 on node 3; lambda = +-w_5.
  rules.push_back({"D5",
                   RuleKind::D5,
                   "D5",
                   5,
                   {{{}, 120},
                    {{5}, 96},
                    {{3, 5}, 72},
                    {{2, 3, 5}, 48},
                    {{4, 3, 5}, 48},
                    {{4, 2, 3, 5}, 32},
                    {{1, 2, 3, 5}, 24},
                    {{3, 2, 4, 3, 5}, 16},
                    {{1, 2, 4, 3, 5}, 16},
                    {{3, 1, 2, 4, 3, 5}, 8}}});
  return rules;
}

// Injective maps of the pattern diagram into the datum diagram preserving
// adjacency and non-adjacency (type-preserving sub-diagram embeddings).
inline std::vector<std::vector<int>> enumerate_embeddings(const RootDatum& datum,
                                                          const std::string& pattern) {
  Diagram pat = Diagram::make(pattern);
  std::vector<std::vector<int>> out;
  std::vector<int> img(pat.rank, 0);  // pattern node -> 1-based datum index
  std::vector<char> used(datum.n + 1, 0);
  auto rec = [&](auto&& self, int node) -> void {
    if (node == pat.rank) {
      out.push_back(img);
      return;
    }
    for (int cand = 1; cand <= datum.n; ++cand) {
      if (used[cand]) continue;
      bool ok = true;
      for (int prev = 0; prev < node && ok; ++prev) {
        bool pat_adj = pat.adjacent(node, prev);
        bool dat_adj = datum.diagram.adjacent(cand - 1, img[prev] - 1);
        if (pat_adj != dat_adj) ok = false;
      }
      if (!ok) continue;
      used[cand] = 1;
      img[node] = cand;
      self(self, node + 1);
      used[cand] = 0;
    }
  };
  rec(rec, 0);
  return out;
}

// All (rule, embedding) instances for one datum; built once and shared.
struct RuleContext {
  const RootDatum* datum;
  std::vector<BranchRule> rules;
  struct Instance {
    int rule;
    std::vector<int> img;  // empty for OR
  };
  std::vector<Instance> instances;

  explicit RuleContext(const RootDatum& d) : datum(&d), rules(builtin_rules()) {
    for (std::size_t r = 0; r < rules.size(); ++r) {
      if (rules[r].kind == RuleKind::OR) {
        instances.push_back({static_cast<int>(r), {}});
        continue;
      }
      if (rules[r].pattern_rank > d.n) continue;
      for (auto& img : enumerate_embeddings(d, rules[r].pattern))
        instances.push_back({static_cast<int>(r), img});
    }
  }
};

namespace detail {

inline bool coord_is(const Coord& c, std::int64_t v) {
  return c.re == Rat(v) && c.tors.is_zero();
}
inline bool coord_pm1(const Coord& c) { return coord_is(c, 1) || coord_is(c, -1); }

// Guard of a rule instance at lambda; pairings with embedded simple coroots
// are plain coordinates in the fundamental-weight basis.
inline bool guard_passes(const BranchRule& rule, const std::vector<int>& img,
                         const CharacterX& lam) {
  auto at = [&](int node) -> const Coord& { return lam.coords[img[node - 1] - 1]; };
  switch (rule.kind) {
    case RuleKind::OR:
      return true;
    case RuleKind::A1:
      return !coord_pm1(at(1));
    case RuleKind::A2:
      return coord_pm1(at(1)) && coord_is(at(2), 0);
    case RuleKind::A3: {
      const Coord& a = at(1);
      const Coord& c = at(3);
      if (!coord_is(at(2), 0)) return false;
      if (!a.tors.is_zero() || !c.tors.is_zero()) return false;
      return (a.re == Rat(1) && c.re == Rat(-1)) || (a.re == Rat(-1) && c.re == Rat(1));
    }
    case RuleKind::A3a:
      return coord_pm1(at(1)) && coord_is(at(2), 0) && coord_is(at(3), 0);
    case RuleKind::An: {
      if (!coord_pm1(at(1))) return false;
      for (int j = 2; j <= rule.pattern_rank; ++j)
        if (!coord_is(at(j), 0)) return false;
      return true;
    }
    case RuleKind::D5: {
      for (int j = 1; j <= 4; ++j)
        if (!coord_is(at(j), 0)) return false;
      return coord_pm1(at(5));
    }
  }
  return false;
}

}  // namespace detail

struct TraceStep {
  std::string rule;
  std::vector<int> levi;  // embedded datum indices (sorted); empty for OR
  CharacterX lambda;
  CharacterX mu;
  std::int64_t before = 0;
  std::int64_t after = 0;
};

struct SaturationState {
  ExponentFunction f;
  std::vector<TraceStep> trace;
};

struct ApplyOutcome {
  bool applicable = false;
  std::vector<CharacterX> increased;
};

// One triple application, Eq. g(mu) = max(f(mu), ceil(f(lambda)/divisor) *
// template(mu)), clamped pointwise by f_pi. Template targets falling on the
// same character are merged first; the divisor is the merged value at lambda.
inline ApplyOutcome apply_triple(SaturationState& st, const CharacterX& lam,
                                 const std::vector<int>& img, const BranchRule& rule,
                                 const ExponentFunction& f_pi, const RootDatum& datum,
                                 bool record_trace = true) {
  ApplyOutcome out;
  std::int64_t base = st.f.mult(lam);
  if (base == 0) return out;

  std::vector<std::pair<CharacterX, std::int64_t>> merged;
  auto add_target = [&](const CharacterX& mu, std::int64_t m) {
    for (auto& [c, v] : merged)
      if (c == mu) {
        v += m;
        return;
      }
    merged.emplace_back(mu, m);
  };

  std::int64_t divisor = 1;
  if (rule.kind == RuleKind::OR) {
    std::vector<int> zero;
    for (int i = 1; i <= datum.n; ++i)
      if (detail::coord_is(lam.coords[i - 1], 0)) zero.push_back(i);
    if (zero.empty()) return out;
    divisor = static_cast<std::int64_t>(datum.levi_weyl_order(LeviSpec(zero)));
    add_target(lam, divisor);
  } else {
    if (!detail::guard_passes(rule, img, lam)) return out;
    for (const auto& entry : rule.templ) {
      CharacterX mu = lam;
      for (auto it = entry.word.rbegin(); it != entry.word.rend(); ++it)
        reflect_char(datum, img[*it - 1], mu);
      add_target(mu, entry.mult);
    }
    divisor = 0;
    for (auto& [c, v] : merged)
      if (c == lam) divisor = v;
    if (divisor <= 0) throw std::logic_error("rule template lacks the identity entry");
  }
  out.applicable = true;

  std::int64_t scale = ceil_div(base, divisor);
  for (auto& [mu, t] : merged) {
    std::int64_t cap = f_pi.mult(mu);
    std::int64_t val = std::min(scale * t, cap);  // F1 clamp
    std::int64_t cur = st.f.mult(mu);
    if (val > cur) {
      st.f.set(mu, val);
      out.increased.push_back(mu);
      if (record_trace) {
        TraceStep ts;
        ts.rule = rule.name;
        if (!img.empty()) {
          ts.levi = img;
          std::sort(ts.levi.begin(), ts.levi.end());
        }
        ts.lambda = lam;
        ts.mu = mu;
        ts.before = cur;
        ts.after = val;
        st.trace.push_back(std::move(ts));
      }
    }
  }
  return out;
}

// Worklist fixed point over all (lambda, embedding, rule) with lambda in the
// current support. Monotone and bounded by f_pi, so it terminates; the final
// f is independent of the application order.
inline SaturationState saturate(const ExponentFunction& f0, const ExponentFunction& f_pi,
                                const RuleContext& ctx, std::uint64_t order_seed = 0,
                                bool record_trace = false) {
  if (!f0.leq(f_pi)) throw precondition_error("saturate: seed exceeds f_pi");
  SaturationState st;
  st.f = f0;

  std::deque<CharacterX> work;
  std::set<std::vector<std::int64_t>> queued;
  auto push = [&](const CharacterX& c) {
    if (queued.insert(c.key()).second) work.push_back(c);
  };
  for (const auto& [k, v] : f0.entries()) push(v.first);

  std::mt19937_64 rng(order_seed);
  while (!work.empty()) {
    std::size_t pick = order_seed ? rng() % work.size() : 0;
    CharacterX lam = work[pick];
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(pick));
    queued.erase(lam.key());

    for (const auto& inst : ctx.instances) {
      auto res = apply_triple(st, lam, inst.img, ctx.rules[inst.rule], f_pi, *ctx.datum,
                              record_trace);
      for (const auto& mu : res.increased) push(mu);
      if (!res.increased.empty()) push(lam);
    }
  }
  return st;
}

enum class Irreducibility { irreducible, inconclusive };
enum class Uniqueness { unique, inconclusive };

inline Irreducibility check_irreducible(const RootDatum& datum, const DPSPoint& p,
                                        const RuleContext& ctx,
                                        SaturationState* state_out = nullptr,
                                        const ExponentFunction* f_pi_hint = nullptr) {
  CharacterX lam0 = leading_exponent(datum, p);
  ExponentFunction f_pi = f_pi_hint ? *f_pi_hint
                                    : dps_exponents(datum, LeviSpec::maximal(datum.n, p.i), lam0);
  CharacterX lam_ad = antidominant_form(datum, lam0);
  ExponentFunction f0;
  f0.add(lam_ad, 1);
  auto st = saturate(f0, f_pi, ctx);
  bool full = st.f == f_pi;
  if (state_out) *state_out = std::move(st);
  return full ? Irreducibility::irreducible : Irreducibility::inconclusive;
}

inline Uniqueness check_unique_subrep(const RootDatum& datum, const DPSPoint& p,
                                      const RuleContext& ctx) {
  if (p.s.sign() > 0) return Uniqueness::unique;  // positive side is automatic
  CharacterX lam0 = leading_exponent(datum, p);
  ExponentFunction f_pi = dps_exponents(datum, LeviSpec::maximal(datum.n, p.i), lam0);
  if (f_pi.mult(lam0) == 1) return Uniqueness::unique;
  CharacterX lam_ad = antidominant_form(datum, lam0);
  ExponentFunction f0;
  f0.add(lam_ad, 1);
  auto st = saturate(f0, f_pi, ctx);
  return st.f.mult(lam0) == f_pi.mult(lam0) ? Uniqueness::unique : Uniqueness::inconclusive;
}

}  // namespace dps
