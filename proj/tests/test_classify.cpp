#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dps/classify.hpp"

using namespace dps;

TEST_CASE("regularity of table points") {
  auto e7 = build_root_datum("E7");
  CHECK(is_regular(*e7, {1, Rat(-17, 2), 1}));
  CHECK_FALSE(is_regular(*e7, {5, Rat(0), 1}));
  CHECK(is_regular(*e7, {1, Rat(-1), 1}));
}

TEST_CASE("regular reducibility criterion") {
  auto e7 = build_root_datum("E7");
  auto r1 = regular_reducibility(*e7, {1, Rat(-17, 2), 1});
  CHECK(r1.reducible);
  CHECK(r1.witness_root.has_value());
  // verify the witness pairing directly
  auto lam0 = leading_exponent(*e7, {1, Rat(-17, 2), 1});
  Coord pr = pairing(*e7, lam0, *r1.witness_root);
  CHECK(pr.tors.is_zero());
  CHECK((pr.re == Rat(1) || pr.re == Rat(-1)));

  CHECK_FALSE(regular_reducibility(*e7, {1, Rat(-1), 1}).reducible);
  CHECK(regular_reducibility(*e7, {3, Rat(-1, 2), 3}).reducible);

  CHECK_THROWS_AS(regular_reducibility(*e7, {5, Rat(0), 1}), precondition_error);
}

TEST_CASE("verdict symmetry under s -> -s") {
  auto e7 = build_root_datum("E7");
  for (auto s : {Rat(-17, 2), Rat(-9, 2), Rat(-1), Rat(-5, 2)}) {
    DPSPoint neg{1, s, 1}, pos{1, -s, 1};
    if (is_regular(*e7, neg) && is_regular(*e7, pos))
      CHECK(regular_reducibility(*e7, neg).reducible ==
            regular_reducibility(*e7, pos).reducible);
  }
}

TEST_CASE("special points: (7,1) row of the tables") {
  auto e7 = build_root_datum("E7");
  auto pts = enumerate_special_points(*e7, 7, 1);
  std::vector<Rat> regred, nonreg;
  for (auto& p : pts)
    (p.cls == SpecialClass::regular_reducible ? regred : nonreg).push_back(p.s);
  CHECK(regred == std::vector<Rat>{Rat(-9)});
  std::vector<Rat> expect;
  for (int v = -8; v <= 0; ++v) expect.push_back(Rat(v));
  CHECK(nonreg == expect);
}

TEST_CASE("special points: (1,2) and (4,4) rows") {
  auto e7 = build_root_datum("E7");
  auto pts12 = enumerate_special_points(*e7, 1, 2);
  REQUIRE(pts12.size() == 2);
  CHECK(pts12[0].s == Rat(-1, 2));
  CHECK(pts12[0].cls == SpecialClass::regular_reducible);
  CHECK(pts12[1].s == Rat(0));
  CHECK(pts12[1].cls == SpecialClass::non_regular);

  auto pts44 = enumerate_special_points(*e7, 4, 4);
  REQUIRE(pts44.size() == 3);
  CHECK(pts44[0].s == Rat(-1, 2));
  CHECK(pts44[1].s == Rat(-1, 4));
  CHECK(pts44[2].s == Rat(0));
  for (auto& p : pts44) CHECK(p.cls == SpecialClass::non_regular);
}

TEST_CASE("tadic test confirms table pairs") {
  auto e7 = build_root_datum("E7");

  SUBCASE("pi=(1,-11/2,1) against [2,-5,1]") {
    auto res = tadic_test(*e7, {1, Rat(-11, 2), 1}, CandidateSpec::corank1(2, Rat(-5), 1));
    CHECK(res.outcome == TadicOutcome::reducible_confirmed);
    CHECK(res.witness_mu.has_value());
    CHECK(res.mult_pi > res.mult_sigma);
    CHECK(res.cond2_equality);
  }

  SUBCASE("pi=(5,-2,2) against [2,-2,2]") {
    auto res = tadic_test(*e7, {5, Rat(-2), 2}, CandidateSpec::corank1(2, Rat(-2), 2));
    CHECK(res.outcome == TadicOutcome::reducible_confirmed);
    CHECK(res.cond2_equality);
  }

  SUBCASE("corank-2: pi=(2,-2,1) against [(6,7),(2,4),(0,0)]") {
    auto res = tadic_test(*e7, {2, Rat(-2), 1},
                          CandidateSpec::corank2(6, 7, Rat(2), Rat(4), 0, 0, 1));
    CHECK(res.outcome == TadicOutcome::reducible_confirmed);
  }

  SUBCASE("sigma = pi is inconclusive: condition (3) fails") {
    auto res = tadic_test(*e7, {5, Rat(-2), 2}, CandidateSpec::corank1(5, Rat(-2), 2));
    CHECK(res.outcome == TadicOutcome::inconclusive);
  }

  SUBCASE("orbit mismatch is a precondition error, not inconclusive") {
    CHECK_THROWS_AS(tadic_test(*e7, {1, Rat(-11, 2), 1}, CandidateSpec::corank1(2, Rat(-4), 1)),
                    precondition_error);
  }
}
