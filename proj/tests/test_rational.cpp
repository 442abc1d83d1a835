#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dps/rational.hpp"

using dps::Rat;

TEST_CASE("arithmetic normalizes") {
  CHECK(Rat(2, 4) == Rat(1, 2));
  CHECK(Rat(-2, -4) == Rat(1, 2));
  CHECK(Rat(2, -4) == Rat(-1, 2));
  CHECK(Rat(1, 2) + Rat(1, 3) == Rat(5, 6));
  CHECK(Rat(1, 2) - Rat(1, 2) == Rat(0));
  CHECK(Rat(3, 4) * Rat(2, 3) == Rat(1, 2));
  CHECK(Rat(1, 2) / Rat(1, 4) == Rat(2));
  CHECK(Rat(-7, 2) < Rat(-3));
  CHECK(Rat(0).is_zero());
}

TEST_CASE("mod1 lands in [0,1)") {
  CHECK(Rat(3, 2).mod1() == Rat(1, 2));
  CHECK(Rat(-1, 2).mod1() == Rat(1, 2));
  CHECK(Rat(-5, 3).mod1() == Rat(1, 3));
  CHECK(Rat(4).mod1() == Rat(0));
  CHECK(Rat(0).mod1() == Rat(0));
}

TEST_CASE("parse and print round trip") {
  CHECK(Rat::parse("-17/2") == Rat(-17, 2));
  CHECK(Rat::parse("5") == Rat(5));
  CHECK(Rat(-17, 2).str() == "-17/2");
  CHECK(Rat(3).str() == "3");
}

TEST_CASE("pow") {
  CHECK(dps::rat_pow(Rat(2), 10) == Rat(1024));
  CHECK(dps::rat_pow(Rat(2), -2) == Rat(1, 4));
  CHECK(dps::rat_pow(Rat(2), 0) == Rat(1));
}

TEST_CASE("division by zero throws") {
  CHECK_THROWS_AS(Rat(1) / Rat(0), std::domain_error);
  CHECK_THROWS_AS(Rat(1, 0), std::domain_error);
}
