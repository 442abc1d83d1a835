#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "dps/rootsys.hpp"

using namespace dps;

namespace {

// Every element of a small Weyl group, by closure under right multiplication.
std::vector<WeylElement> whole_group(const RootDatum& d) {
  std::vector<WeylElement> all{d.identity()};
  std::set<IVec> seen{all[0].canonical_key()};
  for (std::size_t head = 0; head < all.size(); ++head) {
    for (int i = 1; i <= d.n; ++i) {
      WeylElement next = all[head] * d.simple(i);
      if (seen.insert(next.canonical_key()).second) all.push_back(next);
    }
  }
  return all;
}

}  // namespace

TEST_CASE("root counts and Weyl orders") {
  auto e7 = build_root_datum("E7");
  CHECK(e7->num_positive_roots() == 63);
  CHECK(e7->weyl_order() == 2903040ull);

  auto a1 = build_root_datum("A1");
  CHECK(a1->num_positive_roots() == 1);
  CHECK(a1->weyl_order() == 2ull);

  auto d6 = build_root_datum("D6");
  CHECK(d6->num_positive_roots() == 30);
  CHECK(d6->weyl_order() == 23040ull);

  auto e6 = build_root_datum("E6");
  CHECK(e6->num_positive_roots() == 36);
  CHECK(e6->weyl_order() == 51840ull);

  CHECK_THROWS_AS(build_root_datum("B3"), config_error);
  CHECK_THROWS_AS(build_root_datum("Z9"), config_error);
}

TEST_CASE("simply laced datum invariants") {
  auto e7 = build_root_datum("E7");
  for (int i = 0; i < e7->n; ++i) {
    CHECK(e7->a(i, i) == 2);
    for (int j = 0; j < e7->n; ++j)
      if (i != j) CHECK((e7->a(i, j) == 0 || e7->a(i, j) == -1));
  }
  // Every positive root is nonnegative over the simple roots.
  for (const auto& c : e7->pos_root_coeffs)
    for (auto x : c) CHECK(x >= 0);
}

TEST_CASE("length by descent equals roots sent negative") {
  auto a2 = build_root_datum("A2");
  CHECK(a2->identity().length() == 0);
  CHECK(a2->simple(1).length() == 1);
  CHECK(a2->simple(2).length() == 1);
  auto all = whole_group(*a2);
  CHECK(all.size() == 6);
  int longest = 0;
  for (const auto& w : all) longest = std::max(longest, w.length());
  CHECK(longest == 3);
}

TEST_CASE("reduced word round trip") {
  auto e7 = build_root_datum("E7");
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    WeylElement w = e7->identity();
    int steps = static_cast<int>(rng() % 25);
    for (int k = 0; k < steps; ++k) w = w * e7->simple(1 + rng() % 7);
    auto word = w.reduced_word();
    CHECK(static_cast<int>(word.size()) == w.length());
    CHECK(e7->from_word(word) == w);
  }
}

TEST_CASE("action permutes the roots") {
  auto e7 = build_root_datum("E7");
  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    WeylElement w = e7->identity();
    for (int k = 0; k < 15; ++k) w = w * e7->simple(1 + rng() % 7);
    for (std::size_t r = 0; r < e7->num_positive_roots(); ++r)
      CHECK(e7->root_id(w.act(e7->pos_root_weights[r])) != 0);
  }
}

TEST_CASE("minimal coset representatives, small ranks") {
  auto a2 = build_root_datum("A2");
  auto reps = min_double_coset_reps(*a2, LeviSpec{1}, LeviSpec{});
  REQUIRE(reps.size() == 3);
  CHECK(reps[0].length() == 0);
  CHECK(reps[1].length() == 1);
  CHECK(reps[2].length() == 2);

  // Brute force: minimal length in each coset w W_M.
  auto all = whole_group(*a2);
  std::set<IVec> got;
  for (const auto& w : reps) got.insert(w.canonical_key());
  std::set<IVec> expect;
  for (const auto& w : all) {
    WeylElement best = w;
    WeylElement ws = w * a2->simple(1);
    if (ws.length() < best.length()) best = ws;
    expect.insert(best.canonical_key());
  }
  CHECK(got == expect);

  // Theta_M = Delta and Theta_L = Delta leaves only the identity.
  auto full = min_double_coset_reps(*a2, LeviSpec::full(2), LeviSpec::full(2));
  REQUIRE(full.size() == 1);
  CHECK(full[0].is_identity());
}

TEST_CASE("E7 maximal parabolic coset counts") {
  auto e7 = build_root_datum("E7");
  const std::uint64_t expected[7] = {126, 576, 2016, 10080, 4032, 756, 56};
  for (int i = 1; i <= 7; ++i) {
    auto theta = LeviSpec::maximal(7, i);
    auto reps = min_double_coset_reps(*e7, theta, LeviSpec{});
    CHECK(reps.size() == expected[i - 1]);
    // |W^{M,T}| * |W_M| = |W|
    CHECK(reps.size() * e7->levi_weyl_order(theta) == e7->weyl_order());
    // Spot check: every representative keeps Theta_M positive.
    for (std::size_t k = 0; k < reps.size(); k += std::max<std::size_t>(1, reps.size() / 16))
      for (int j : theta.theta) CHECK_FALSE(reps[k].sends_simple_negative(j));
  }
}

TEST_CASE("general double cosets") {
  auto e7 = build_root_datum("E7");
  // W^{M,L} for two maximal Levis; sanity: sizes multiply out to double coset
  // counts, each rep keeps both sides positive.
  auto reps = min_double_coset_reps(*e7, LeviSpec::maximal(7, 7), LeviSpec::maximal(7, 1));
  CHECK(!reps.empty());
  for (const auto& w : reps) {
    for (int j : LeviSpec::maximal(7, 7).theta) CHECK_FALSE(w.sends_simple_negative(j));
    WeylElement inv = w.inverse();
    for (int j : LeviSpec::maximal(7, 1).theta) CHECK_FALSE(inv.sends_simple_negative(j));
  }
  // Shortest representative of a nonempty double coset is unique: count
  // matches brute force in A3.
  auto a3 = build_root_datum("A3");
  auto all = whole_group(*a3);
  auto brute = [&](const LeviSpec& m, const LeviSpec& l) {
    std::set<IVec> keys;
    for (const auto& w : all) {
      bool ok = true;
      for (int j : m.theta)
        if (w.sends_simple_negative(j)) ok = false;
      WeylElement inv = w.inverse();
      for (int j : l.theta)
        if (inv.sends_simple_negative(j)) ok = false;
      if (ok) keys.insert(w.canonical_key());
    }
    return keys.size();
  };
  for (auto m : {LeviSpec{1}, LeviSpec{1, 2}, LeviSpec{1, 3}})
    for (auto l : {LeviSpec{}, LeviSpec{2}, LeviSpec{1, 2}}) {
      auto fast = min_double_coset_reps(*a3, m, l);
      CHECK(fast.size() == brute(m, l));
    }
}
