#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "dps/charlat.hpp"

using namespace dps;

namespace {

CharacterX chr(const RootDatum&, std::vector<std::int64_t> re) {
  return CharacterX::real_int(IVec(re.begin(), re.end()));
}

}  // namespace

TEST_CASE("rho of a Levi") {
  auto e7 = build_root_datum("E7");
  auto rho_g = rho_levi(*e7, LeviSpec::full(7));
  for (int j = 0; j < 7; ++j) CHECK(rho_g.coords[j].re == Rat(1));

  auto rho_empty = rho_levi(*e7, LeviSpec{});
  for (int j = 0; j < 7; ++j) CHECK(rho_empty.coords[j].re == Rat(0));

  auto rho_m5 = rho_levi(*e7, LeviSpec::maximal(7, 5));
  CHECK(rho_m5.coords[4].re == Rat(-4));
  for (int j : LeviSpec::maximal(7, 5).theta) CHECK(rho_m5.coords[j - 1].re == Rat(1));
}

TEST_CASE("leading exponents match the tables") {
  auto e7 = build_root_datum("E7");
  CHECK(leading_exponent(*e7, {5, Rat(0), 1}) == chr(*e7, {-1, -1, -1, -1, 4, -1, -1}));
  CHECK(leading_exponent(*e7, {2, Rat(-1), 1}) == chr(*e7, {-1, 5, -1, -1, -1, -1, -1}));
  CHECK(leading_exponent(*e7, {4, Rat(0), 1}) == chr(*e7, {-1, -1, -1, 3, -1, -1, -1}));

  auto ramified = leading_exponent(*e7, {4, Rat(0), 2});
  CHECK(ramified.coords[3].re == Rat(3));
  CHECK(ramified.coords[3].tors == Rat(1, 2));
  CHECK(ramified.coords[0].tors == Rat(0));
}

TEST_CASE("pairings") {
  auto e7 = build_root_datum("E7");
  // <rho_G, theta^vee> = 17 for the highest root of E7.
  auto rho_g = rho_levi(*e7, LeviSpec::full(7));
  std::size_t highest = e7->num_positive_roots() - 1;
  Coord p = pairing(*e7, rho_g, highest);
  CHECK(p.re == Rat(17));
  CHECK(p.tors == Rat(0));

  // A leading exponent pairs to -1 with every Delta_M simple coroot.
  auto lam = leading_exponent(*e7, {5, Rat(0), 1});
  for (int j : LeviSpec::maximal(7, 5).theta) CHECK(lam.coords[j - 1].re == Rat(-1));

  // Torsion 1/2 against an even coefficient vanishes.
  CharacterX half(7);
  half.coords[0].tors = Rat(1, 2);
  bool found_even = false;
  for (std::size_t r = 0; r < e7->num_positive_roots(); ++r)
    if (e7->pos_root_coeffs[r][0] == 2) {
      Coord q = pairing(*e7, half, r);
      CHECK(q.tors == Rat(0));
      found_even = true;
      break;
    }
  CHECK(found_even);
}

TEST_CASE("weyl action rows from the proof tables") {
  auto e7 = build_root_datum("E7");
  auto lam_ad = chr(*e7, {0, 0, 0, -1, 0, 0, 0});
  CHECK(weyl_act(e7->simple(4), lam_ad) == chr(*e7, {0, -1, -1, 1, -1, 0, 0}));

  auto lam2 = chr(*e7, {1, -1, 0, 0, -1, 0, 0});
  auto w = e7->simple(3) * e7->simple(1);
  CHECK(weyl_act(w, lam2) == chr(*e7, {0, -1, -1, 1, -1, 0, 0}));

  CHECK(weyl_act(e7->identity(), lam2) == lam2);
}

TEST_CASE("anti-dominant form and stabilizer") {
  auto e7 = build_root_datum("E7");

  SUBCASE("already anti-dominant, trivial stabilizer") {
    auto lam = chr(*e7, {-1, -2, -3, -4, -5, -6, -7});
    auto ad = antidominant_with_stabilizer(*e7, lam);
    CHECK(ad.lambda_ad == lam);
    CHECK(ad.w.is_identity());
    CHECK(ad.stab_order == 1);
    CHECK(ad.stab_gens.empty());
  }

  SUBCASE("(5,0,1): stabilizer 288") {
    auto lam0 = leading_exponent(*e7, {5, Rat(0), 1});
    auto ad = antidominant_with_stabilizer(*e7, lam0);
    CHECK(ad.lambda_ad == chr(*e7, {0, 0, 0, -1, 0, 0, 0}));
    CHECK(ad.stab_order == 288);
    CHECK(weyl_act(ad.w, lam0) == ad.lambda_ad);
    for (const auto& g : ad.stab_gens) CHECK(weyl_act(g, ad.lambda_ad) == ad.lambda_ad);
  }

  SUBCASE("(2,-1,1): stabilizer 24") {
    auto lam0 = leading_exponent(*e7, {2, Rat(-1), 1});
    auto ad = antidominant_with_stabilizer(*e7, lam0);
    CHECK(ad.lambda_ad == chr(*e7, {-1, 0, 0, -1, 0, 0, -1}));
    CHECK(ad.stab_order == 24);
    CHECK(weyl_act(ad.w, lam0) == ad.lambda_ad);
  }

  SUBCASE("(4,0,1): anti-dominant form for the second Iwahori case") {
    auto lam0 = leading_exponent(*e7, {4, Rat(0), 1});
    auto ad = antidominant_with_stabilizer(*e7, lam0);
    CHECK(ad.lambda_ad == chr(*e7, {0, 0, 0, 0, -1, 0, 0}));
  }

  SUBCASE("stab order divides |W| and generators act trivially") {
    std::mt19937 rng(3);
    for (int t = 0; t < 8; ++t) {
      CharacterX lam(7);
      for (int j = 0; j < 7; ++j) {
        lam.coords[j].re = Rat(static_cast<std::int64_t>(rng() % 5) - 2);
        if (rng() % 3 == 0) lam.coords[j].tors = Rat(1, 2);
      }
      auto ad = antidominant_with_stabilizer(*e7, lam);
      CHECK(e7->weyl_order() % ad.stab_order == 0);
      CHECK(weyl_act(ad.w, lam) == ad.lambda_ad);
      for (const auto& g : ad.stab_gens) CHECK(weyl_act(g, ad.lambda_ad) == ad.lambda_ad);
      for (int j = 0; j < 7; ++j) CHECK(ad.lambda_ad.coords[j].re.sign() <= 0);
    }
  }
}

TEST_CASE("real orbit has a unique anti-dominant element (small rank)") {
  for (const char* label : {"A3", "D4"}) {
    auto d = build_root_datum(label);
    std::mt19937 rng(17);
    CharacterX lam(d->n);
    for (int j = 0; j < d->n; ++j) lam.coords[j].re = Rat(static_cast<std::int64_t>(rng() % 7) - 3);
    std::set<std::vector<std::int64_t>> seen;
    std::vector<CharacterX> orbit{lam};
    seen.insert(lam.key());
    int anti = 0;
    for (std::size_t h = 0; h < orbit.size(); ++h) {
      bool is_anti = true;
      for (int j = 0; j < d->n; ++j)
        if (orbit[h].coords[j].re.sign() > 0) is_anti = false;
      if (is_anti) ++anti;
      for (int i = 1; i <= d->n; ++i) {
        CharacterX next = orbit[h];
        reflect_char(*d, i, next);
        if (seen.insert(next.key()).second) orbit.push_back(next);
      }
    }
    CHECK(anti == 1);
    auto ad = antidominant_form(*d, lam);
    CHECK(seen.count(ad.key()) == 1);
  }
}

TEST_CASE("weyl action preserves the pairing multiset") {
  auto e7 = build_root_datum("E7");
  std::mt19937 rng(23);
  CharacterX lam(7);
  for (int j = 0; j < 7; ++j) {
    lam.coords[j].re = Rat(static_cast<std::int64_t>(rng() % 9) - 4, 1 + rng() % 2);
    if (rng() % 2) lam.coords[j].tors = Rat(1, 3);
  }
  WeylElement w = e7->identity();
  for (int k = 0; k < 12; ++k) w = w * e7->simple(1 + rng() % 7);
  CharacterX wl = weyl_act(w, lam);
  auto multiset = [&](const CharacterX& c) {
    std::multiset<std::pair<Rat, Rat>> m;
    for (std::size_t r = 0; r < e7->num_positive_roots(); ++r) {
      Coord p = pairing(*e7, c, r);
      m.insert({p.re, p.tors});
      m.insert({-p.re, (-p.tors).mod1()});
    }
    return m;
  };
  CHECK(multiset(lam) == multiset(wl));
}
