#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "dps/jacquet.hpp"

using namespace dps;

namespace {

CharacterX chr(std::vector<std::int64_t> re) { return CharacterX::real_int(IVec(re.begin(), re.end())); }

std::vector<WeylElement> whole_group(const RootDatum& d) {
  std::vector<WeylElement> all{d.identity()};
  std::set<IVec> seen{all[0].canonical_key()};
  for (std::size_t head = 0; head < all.size(); ++head)
    for (int i = 1; i <= d.n; ++i) {
      WeylElement next = all[head] * d.simple(i);
      if (seen.insert(next.canonical_key()).second) all.push_back(next);
    }
  return all;
}

// Oracle: enumerate all of W, keep the shortest element of each coset w W_M,
// then count images of lambda_0.
ExponentFunction brute_exponents(const RootDatum& d, const LeviSpec& theta,
                                 const CharacterX& lam0) {
  auto all = whole_group(d);
  std::map<IVec, WeylElement> best;
  for (const auto& w : all) {
    IVec x0(d.n);
    for (int i = 0; i < d.n; ++i) x0[i] = theta.contains(i + 1) ? 0 : i + 1;
    IVec key = w.act(x0);
    auto it = best.find(key);
    if (it == best.end() || w.length() < it->second.length()) best.insert_or_assign(key, w);
  }
  ExponentFunction f;
  for (const auto& [k, w] : best) f.add(weyl_act(w, lam0), 1);
  return f;
}

}  // namespace

TEST_CASE("mass equals the coset count") {
  auto e7 = build_root_datum("E7");
  for (int i : {4, 5}) {
    auto theta = LeviSpec::maximal(7, i);
    auto lam0 = leading_exponent(*e7, {i, Rat(0), 1});
    auto f = dps_exponents(*e7, theta, lam0);
    CHECK(f.total_mass() == (i == 4 ? 10080u : 4032u));
  }
}

TEST_CASE("(5,0,1) multiplicities from the proposition") {
  auto e7 = build_root_datum("E7");
  auto lam0 = leading_exponent(*e7, {5, Rat(0), 1});
  auto f = dps_exponents(*e7, LeviSpec::maximal(7, 5), lam0);

  auto lam_ad = chr({0, 0, 0, -1, 0, 0, 0});
  CHECK(f.mult(lam_ad) == 288);
  CHECK(f.mult(weyl_act(e7->simple(4), lam_ad)) == 216);  // lambda_1
  CHECK(f.mult(chr({1, -1, 0, 0, -1, 0, 0})) == 72);      // lambda_2
  CHECK(f.mult(lam0) == 2);

  CHECK(f.mult(chr({9, 9, 9, 9, 9, 9, 9})) == 0);
}

TEST_CASE("(2,-1,1) leading exponent has multiplicity 2") {
  auto e7 = build_root_datum("E7");
  auto lam0 = leading_exponent(*e7, {2, Rat(-1), 1});
  auto f = dps_exponents(*e7, LeviSpec::maximal(7, 2), lam0);
  CHECK(f.total_mass() == 576u);
  CHECK(f.mult(lam0) == 2);
}

TEST_CASE("anti-dominant law: f(lambda_ad) = |Stab|") {
  auto e7 = build_root_datum("E7");
  for (auto [i, s] : std::vector<std::pair<int, Rat>>{{5, Rat(0)}, {2, Rat(-1)}, {4, Rat(0)},
                                                      {7, Rat(-2)}, {1, Rat(-1, 2)}}) {
    DPSPoint p{i, s, 1};
    auto lam0 = leading_exponent(*e7, p);
    auto f = dps_exponents(*e7, LeviSpec::maximal(7, i), lam0);
    auto ad = antidominant_with_stabilizer(*e7, lam0, false);
    CHECK(f.mult(ad.lambda_ad) == static_cast<std::int64_t>(ad.stab_order));
  }
}

TEST_CASE("orbit closure: support lies in one Weyl orbit") {
  auto e7 = build_root_datum("E7");
  auto lam0 = leading_exponent(*e7, {7, Rat(-1), 1});
  auto f = dps_exponents(*e7, LeviSpec::maximal(7, 7), lam0);
  auto ref = antidominant_form(*e7, lam0);
  for (const auto& [k, v] : f.entries()) CHECK(antidominant_form(*e7, v.first) == ref);
}

TEST_CASE("positive s: leading exponent has multiplicity 1") {
  auto e7 = build_root_datum("E7");
  for (auto [i, s] : std::vector<std::pair<int, Rat>>{{2, Rat(1)}, {5, Rat(1, 2)}, {7, Rat(3)}}) {
    DPSPoint p{i, s, 1};
    auto lam0 = leading_exponent(*e7, p);
    auto f = dps_exponents(*e7, LeviSpec::maximal(7, i), lam0);
    CHECK(f.mult(lam0) == 1);
  }
}

TEST_CASE("precondition: Delta_M coordinates must be -1") {
  auto e7 = build_root_datum("E7");
  auto bad = chr({0, 0, 0, 0, 4, 0, 0});
  CHECK_THROWS_AS(dps_exponents(*e7, LeviSpec::maximal(7, 5), bad), precondition_error);
}

TEST_CASE("brute-force oracle on small ranks") {
  struct Conf {
    const char* label;
    int i;
    Rat s;
    std::int64_t k;
  };
  for (const Conf& c : {Conf{"A2", 1, Rat(-1), 1}, Conf{"A3", 2, Rat(-1, 2), 1},
                        Conf{"A3", 1, Rat(0), 2}, Conf{"D4", 2, Rat(0), 1},
                        Conf{"D4", 1, Rat(-1), 2}}) {
    auto d = build_root_datum(c.label);
    auto theta = LeviSpec::maximal(d->n, c.i);
    auto lam0 = leading_exponent(*d, {c.i, c.s, c.k});
    auto fast = dps_exponents(*d, theta, lam0);
    auto slow = brute_exponents(*d, theta, lam0);
    CHECK(fast == slow);
  }
}

TEST_CASE("sharded computation matches serial") {
  auto e7 = build_root_datum("E7");
  auto lam0 = leading_exponent(*e7, {4, Rat(-1), 1});
  auto serial = dps_exponents(*e7, LeviSpec::maximal(7, 4), lam0, nullptr, 1);
  auto parallel = dps_exponents(*e7, LeviSpec::maximal(7, 4), lam0, nullptr, 4);
  CHECK(serial == parallel);
}
