#include "support.hpp"

#include <gtest/gtest.h>

using namespace arbtest;

TEST(Decimal, KeepsWrittenScale) {
  EXPECT_EQ(dec("10.0").to_string(), "10.0");
  EXPECT_EQ(dec("586.89").to_string(), "586.89");
  EXPECT_EQ(dec("-0.00000001").to_string(), "-0.00000001");
  EXPECT_EQ(dec("7").to_string(), "7");
}

TEST(Decimal, EqualityIgnoresScale) {
  EXPECT_EQ(dec("10.0"), dec("10"));
  EXPECT_EQ(dec("10.0").hash(), dec("10.000").hash());
  EXPECT_NE(dec("10.01"), dec("10.1"));
  EXPECT_LT(dec("0.95"), dec("1"));
}

TEST(Decimal, RejectsMalformed) {
  for (const char* bad : {"", "-", "1.2.3", "1e5", "abc", " 1", "0x10", "1.0000000000000000001"})
    EXPECT_FALSE(Decimal::parse(bad).has_value()) << bad;
}

TEST(Decimal, ExactArithmetic) {
  EXPECT_EQ(dec("0.1") + dec("0.2"), dec("0.3"));
  EXPECT_EQ(dec("1.05") - dec("0.95"), dec("0.10"));
  EXPECT_EQ(dec("1.5") * dec("2.25"), dec("3.375"));
  EXPECT_EQ((dec("0.1") + dec("0.2")).scale(), 1);
}

TEST(Decimal, RoundsHalfAwayFromZero) {
  EXPECT_EQ(dec("2.345").rescaled(2), dec("2.35"));
  EXPECT_EQ(dec("-2.345").rescaled(2), dec("-2.35"));
  EXPECT_EQ(Decimal::from_double(0.125, 2), dec("0.13"));
  EXPECT_EQ(Decimal::from_double(-1.5, 0), dec("-2"));
}

TEST(Decimal, NormalizedStripsZeros) {
  EXPECT_EQ(dec("12.3400").normalized().to_string(), "12.34");
  EXPECT_EQ(dec("5.000").normalized().to_string(), "5");
}

TEST(DecimalProperty, AddSubtractRoundTrips) {
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    Decimal a = Decimal::from_double(rng.uniform(-1e6, 1e6), static_cast<int>(rng.below(9)));
    Decimal b = Decimal::from_double(rng.uniform(-1e6, 1e6), static_cast<int>(rng.below(9)));
    EXPECT_EQ(a + b - b, a);
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ(Decimal::parse(a.to_string()).value(), a);
    EXPECT_EQ(Decimal::parse(a.to_string())->to_string(), a.to_string());
  }
}
