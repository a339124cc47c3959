#include <gtest/gtest.h>

#include <set>

#include "premlog/errors.hpp"
#include "premlog/rational.hpp"

using premlog::Error;
using premlog::ErrorCode;
using premlog::Rational;

TEST(rational, defaults_to_zero) {
  Rational r;
  EXPECT_TRUE(r.is_zero());
  EXPECT_TRUE(r.is_integer());
  EXPECT_EQ(r.to_string(), "0");
}

TEST(rational, normalizes_on_construction) {
  Rational r(6, 4);
  EXPECT_EQ(r.num(), 3);
  EXPECT_EQ(r.den(), 2);
  Rational neg(3, -6);
  EXPECT_EQ(neg.num(), -1);
  EXPECT_EQ(neg.den(), 2);
}

TEST(rational, zero_denominator_rejected) {
  EXPECT_THROW(Rational(1, 0), Error);
}

TEST(rational, exact_arithmetic) {
  Rational a(1, 3), b(1, 6);
  EXPECT_EQ(a + b, Rational(1, 2));
  EXPECT_EQ(a - b, Rational(1, 6));
  EXPECT_EQ(a * b, Rational(1, 18));
  EXPECT_EQ(a / b, Rational(2));
  EXPECT_EQ(Rational(157, 50) * Rational(2), Rational(157, 25));
}

TEST(rational, division_by_zero_throws) {
  try {
    Rational x = Rational(1) / Rational(0);
    (void)x;
    FAIL() << "expected division_by_zero";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::division_by_zero);
  }
}

TEST(rational, decimal_literals_parse_exactly) {
  EXPECT_EQ(Rational::parse("3.14"), Rational(157, 50));
  EXPECT_EQ(Rational::parse("42"), Rational(42));
  EXPECT_EQ(Rational::parse("-7"), Rational(-7));
  EXPECT_EQ(Rational::parse("3/4"), Rational(3, 4));
  EXPECT_EQ(Rational::parse("-0.5"), Rational(-1, 2));
}

TEST(rational, to_string_roundtrips) {
  EXPECT_EQ(Rational(157, 50).to_string(), "157/50");
  EXPECT_EQ(Rational(3).to_string(), "3");
  EXPECT_EQ(Rational(-1, 2).to_string(), "-1/2");
  EXPECT_EQ(Rational::parse(Rational(157, 50).to_string()), Rational(157, 50));
}

TEST(rational, ordering_is_exact) {
  EXPECT_LT(Rational(1, 3), Rational(34, 100));
  EXPECT_LT(Rational(-1), Rational(0));
  std::set<Rational> s{Rational(1, 2), Rational(2, 4), Rational(1, 3)};
  EXPECT_EQ(s.size(), 2u);
}

TEST(rational, overflow_is_reported_not_wrapped) {
  Rational big(std::numeric_limits<std::int64_t>::max());
  try {
    Rational r = big * big;
    (void)r;
    FAIL() << "expected overflow";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::overflow);
  }
}

TEST(rational, predicates) {
  EXPECT_TRUE(Rational(5).is_positive());
  EXPECT_FALSE(Rational(-5).is_positive());
  EXPECT_FALSE(Rational(0).is_positive());
  EXPECT_TRUE(Rational(4, 2).is_integer());
  EXPECT_FALSE(Rational(1, 2).is_integer());
}
