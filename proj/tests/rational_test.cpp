#include <cmath>

#include <gtest/gtest.h>

#include "bq/errors.hpp"
#include "bq/rational.hpp"

namespace bq {
namespace {

TEST(Rational, ReducesToLowestTerms) {
  const Rational r(6, 4);
  EXPECT_EQ(r.num(), 3);
  EXPECT_EQ(r.den(), 2);
  EXPECT_EQ(r.str(), "3/2");
  EXPECT_EQ(Rational(0, 5), Rational(0));
  EXPECT_TRUE(Rational(4, 2).is_integer());
}

TEST(Rational, ParsesBothForms) {
  EXPECT_EQ(Rational::parse("2/1"), Rational(2));
  EXPECT_EQ(Rational::parse("5"), Rational(5));
  EXPECT_EQ(Rational::parse("10/4"), Rational(5, 2));
  for (const char* bad : {"", "/", "1/", "a/2", "1/0", "-1/2", "1.5", "2/3/4"}) {
    EXPECT_THROW(Rational::parse(bad), PreconditionError) << bad;
  }
}

TEST(Rational, Arithmetic) {
  EXPECT_EQ(Rational(2, 3) * Rational(3, 4), Rational(1, 2));
  EXPECT_EQ(Rational(1) / 5, Rational(1, 5));
  EXPECT_LT(Rational(2, 3), Rational(3, 4));
  EXPECT_GT(Rational(5, 4), Rational(1));
  EXPECT_DOUBLE_EQ(Rational(7, 5).value(), 1.4);
}

TEST(Rational, ConvergentsOfSqrtTwo) {
  const auto c = convergents(std::sqrt(2.0), 30);
  const std::vector<Rational> expected{Rational(1), Rational(3, 2), Rational(7, 5),
                                       Rational(17, 12), Rational(41, 29)};
  EXPECT_EQ(c, expected);
}

TEST(Rational, ConvergentsTerminateOnRationals) {
  const auto c = convergents(0.75, 1000);
  ASSERT_FALSE(c.empty());
  EXPECT_EQ(c.back(), Rational(3, 4));
  EXPECT_EQ(convergents(0.0, 10), std::vector<Rational>{Rational(0)});
  EXPECT_THROW(convergents(-1.0, 10), PreconditionError);
}

TEST(Rational, ConvergentsAlternateAroundTheValue) {
  const double v = M_PI;
  const auto c = convergents(v, 100000);
  ASSERT_GE(c.size(), 4u);
  for (std::size_t i = 1; i < c.size(); ++i) {
    EXPECT_LT(std::abs(c[i].value() - v), std::abs(c[i - 1].value() - v));
    EXPECT_NE(c[i].value() > v, c[i - 1].value() > v);
  }
}

}  // namespace
}  // namespace bq
