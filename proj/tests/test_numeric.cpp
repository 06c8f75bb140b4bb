#include <doctest.h>

#include "mevsim/numeric.hpp"
#include "mevsim/slot_time.hpp"

using namespace mevsim;

TEST_CASE("wei parses lossless decimal strings") {
  const WeiAmount v = WeiAmount::parse("770000000000000000000");  // 770 ETH
  CHECK(v.str() == "770000000000000000000");
  CHECK(v == WeiAmount::from_eth(770));

  CHECK_THROWS_AS(WeiAmount::parse("-5"), std::invalid_argument);
  CHECK_THROWS_AS(WeiAmount::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(WeiAmount::parse("12.5"), std::invalid_argument);
  CHECK_THROWS_AS(WeiAmount::parse("0x10"), std::invalid_argument);
  // 2^256 is one past the largest representable value
  CHECK_THROWS_AS(WeiAmount::parse("115792089237316195423570985008687907853"
                                   "269984665640564039457584007913129639936"),
                  std::invalid_argument);
  CHECK(WeiAmount::parse("115792089237316195423570985008687907853"
                         "269984665640564039457584007913129639935")
            .str()
            .size() == 78);
}

TEST_CASE("wei arithmetic is checked") {
  const WeiAmount one(1ull);
  CHECK_THROWS(WeiAmount(0ull) - one);
  const WeiAmount max = WeiAmount::parse(
      "115792089237316195423570985008687907853269984665640564039457584007913129639935");
  CHECK_THROWS(max + one);
  CHECK((one + one).wei == 2u);
}

TEST_CASE("scale_floor floors toward zero wei") {
  const WeiAmount burnt = WeiAmount::parse("633000000000000000");  // 0.633 ETH
  CHECK(scale_floor(burnt, Rational(1, 200)).str() == "3165000000000000");
  CHECK(scale_floor(burnt, Rational(0)).str() == "0");
  CHECK_THROWS_AS(scale_floor(burnt, Rational(-1)), std::invalid_argument);
}

TEST_CASE("leading zeros parse as decimal, never octal") {
  CHECK(WeiAmount::parse("0770").wei == 770u);
  CHECK(WeiAmount::parse("000").wei == 0u);
  CHECK(parse_rational("0.042") == Rational(42, 1000));
  CHECK(parse_rational("0.08") == Rational(8, 100));
  CHECK(parse_rational("007/010") == Rational(7, 10));
}

TEST_CASE("parse_rational handles fractions, decimals, integers") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("0.13") == Rational(13, 100));
  CHECK(parse_rational("-0.5") == Rational(-1, 2));
  CHECK(parse_rational("42") == Rational(42));
  CHECK(parse_rational(" 1/20 ") == Rational(1, 20));
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
}

TEST_CASE("rational_to_decimal is canonical") {
  CHECK(rational_to_decimal(Rational(1, 4)) == "0.25");
  CHECK(rational_to_decimal(Rational(70, 77), 9) == "0.909090909");
  CHECK(rational_to_decimal(Rational(5)) == "5");
  CHECK(rational_to_decimal(Rational(-3, 2)) == "-1.5");
  CHECK(rational_to_decimal(Rational(1, 3), 4) == "0.3333");
  CHECK(rational_to_decimal(Rational(1, 1000000000000000000ll), 6) == "0");
}

TEST_CASE("floor_to_ms truncates toward minus infinity") {
  CHECK(floor_to_ms(Rational(481, 2)).ms == 240);   // 240.5
  CHECK(floor_to_ms(Rational(-481, 2)).ms == -241);  // -240.5
  CHECK(floor_to_ms(Rational(74)).ms == 74);
}
