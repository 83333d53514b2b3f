#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace {

using namespace molwb;
using testing_support::SmallFraction;

constexpr int kIterations = 1000;

Rational random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<long long> num(-20, 20), den(1, 12);
  return Rational(num(rng), den(rng));
}

GaussianRational random_gaussian(std::mt19937_64& rng) { return {random_rational(rng), random_rational(rng)}; }

TEST(Rational, NormalizesToLowestTerms) {
  Rational r(2, 4);
  EXPECT_EQ(r.to_string(), "1/2");
  EXPECT_EQ(Rational(3, -6).to_string(), "-1/2");
  EXPECT_EQ(Rational(0, -5).to_string(), "0");
  EXPECT_EQ(Rational::parse("6/8"), Rational(3, 4));
  EXPECT_EQ(Rational::parse("-7"), Rational(-7));
  EXPECT_EQ(Rational::parse(" +2/3 "), Rational(2, 3));
}

TEST(Rational, RejectsMalformed) {
  EXPECT_THROW(Rational(1, 0), FieldError);
  EXPECT_THROW(Rational::parse("1/0"), FieldError);
  EXPECT_THROW(Rational::parse("abc"), FieldError);
  EXPECT_THROW(Rational::parse(""), FieldError);
  EXPECT_THROW(Rational::parse("1.5"), FieldError);
  EXPECT_THROW(Rational(1) / Rational(0), FieldError);
}

TEST(Rational, AgreesWithSmallFractionOracle) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<long long> num(-50, 50), den(1, 30);
  for (int i = 0; i < kIterations; ++i) {
    long long a = num(rng), b = den(rng), c = num(rng), d = den(rng);
    SmallFraction x(a, b), y(c, d);
    Rational rx(a, b), ry(c, d);
    ASSERT_EQ((rx + ry).to_string(), (x + y).str());
    ASSERT_EQ((rx - ry).to_string(), (x - y).str());
    ASSERT_EQ((rx * ry).to_string(), (x * y).str());
    if (c != 0) ASSERT_EQ((rx / ry).to_string(), (x / y).str());
  }
}

TEST(Rational, NoOverflowOnLargeValues) {
  Rational big(1);
  for (int i = 0; i < 200; ++i) big *= Rational(1'000'003);
  Rational back = big;
  for (int i = 0; i < 200; ++i) back /= Rational(1'000'003);
  EXPECT_EQ(back, Rational(1));
  EXPECT_GT(big.to_string().size(), 1000U);
}

template <class E, class Gen>
void check_field_axioms(Gen gen, const E& zero, const E& one) {
  for (int i = 0; i < kIterations; ++i) {
    E a = gen(), b = gen(), c = gen();
    ASSERT_EQ((a + b) + c, a + (b + c));
    ASSERT_EQ((a * b) * c, a * (b * c));
    ASSERT_EQ(a + b, b + a);
    ASSERT_EQ(a * b, b * a);
    ASSERT_EQ(a * (b + c), a * b + a * c);
    ASSERT_EQ(a + zero, a);
    ASSERT_EQ(a * one, a);
    ASSERT_EQ(a + (-a), zero);
    ASSERT_EQ(a - b, a + (-b));
    if (!a.is_zero()) ASSERT_EQ(a * (one / a), one);
    ASSERT_EQ(a.conj().conj(), a);
    ASSERT_EQ((a * b).conj(), b.conj() * a.conj());
    ASSERT_EQ((a + b).conj(), a.conj() + b.conj());
  }
}

TEST(FieldAxioms, Rationals) {
  std::mt19937_64 rng(2);
  check_field_axioms<Rational>([&] { return random_rational(rng); }, Rational(0), Rational(1));
}

TEST(FieldAxioms, GaussianRationals) {
  std::mt19937_64 rng(3);
  check_field_axioms<GaussianRational>([&] { return random_gaussian(rng); }, GaussianRational(0),
                                       GaussianRational(1));
}

TEST(FieldAxioms, PrimeFields) {
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 101ULL, 1'000'000'007ULL}) {
    std::mt19937_64 rng(p);
    PrimeField f(p);
    std::uniform_int_distribution<long long> val(-1'000'000'000'000LL, 1'000'000'000'000LL);
    check_field_axioms<Residue>([&] { return f.from_int(val(rng)); }, f.zero(), f.one());
  }
}

TEST(FieldAxioms, NormPositiveOffZero) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < kIterations; ++i) {
    auto r = random_rational(rng);
    ASSERT_EQ((r * r.conj()).is_zero(), r.is_zero());
    auto g = random_gaussian(rng);
    auto n = g * g.conj();
    ASSERT_TRUE(n.im().is_zero());
    ASSERT_EQ(n.re().is_zero(), g.is_zero());
    if (!g.is_zero()) ASSERT_EQ(n.re().sign(), 1);
  }
}

TEST(Gaussian, ConjugationExample) {
  GaussianRational z(Rational(1), Rational(2));
  EXPECT_EQ(z.conj(), GaussianRational(Rational(1), Rational(-2)));
  EXPECT_EQ(GaussianField{}.i() * GaussianField{}.i(), GaussianRational(-1));
}

TEST(Gaussian, ParsePrintRoundTrip) {
  EXPECT_EQ(GaussianRational::parse("1/2+3/4i"), GaussianRational(Rational(1, 2), Rational(3, 4)));
  EXPECT_EQ(GaussianRational::parse("-i"), GaussianRational(Rational(0), Rational(-1)));
  EXPECT_EQ(GaussianRational::parse("i"), GaussianField{}.i());
  EXPECT_EQ(GaussianRational::parse("2-5i"), GaussianRational(Rational(2), Rational(-5)));
  EXPECT_EQ(GaussianRational::parse("-3/7"), GaussianRational(Rational(-3, 7)));
  EXPECT_EQ(GaussianRational::parse("4i"), GaussianRational(Rational(0), Rational(4)));
  EXPECT_THROW(GaussianRational::parse("1+2j"), FieldError);
  std::mt19937_64 rng(6);
  for (int i = 0; i < kIterations; ++i) {
    auto g = random_gaussian(rng);
    ASSERT_EQ(GaussianRational::parse(g.to_string()), g) << g.to_string();
  }
}

TEST(Residue, Examples) {
  PrimeField f(5);
  EXPECT_EQ(f.from_int(3) * f.from_int(4), f.from_int(2));
  EXPECT_EQ(f.from_int(-1), f.from_int(4));
  EXPECT_EQ(Residue::parse("3 mod 7").value(), 3U);
  EXPECT_EQ(Residue::parse("3 mod 7").modulus(), 7U);
  EXPECT_EQ(f.parse("12"), f.from_int(2));
  EXPECT_EQ(f.from_int(3).to_string(), "3 mod 5");
}

TEST(Residue, InverseMatchesBruteForce) {
  for (std::uint64_t p : {2ULL, 3ULL, 7ULL, 13ULL, 31ULL}) {
    PrimeField f(p);
    for (std::uint64_t a = 1; a < p; ++a) {
      std::uint64_t inv = 0;
      for (std::uint64_t b = 1; b < p; ++b) {
        if ((a * b) % p == 1) inv = b;
      }
      ASSERT_EQ(f.from_int(static_cast<long long>(a)).inverse().value(), inv);
    }
  }
}

TEST(Residue, Errors) {
  EXPECT_THROW(PrimeField(4), FieldError);
  EXPECT_THROW(PrimeField(1), FieldError);
  PrimeField f5(5), f7(7);
  EXPECT_THROW(f5.one() + f7.one(), FieldError);
  EXPECT_THROW(f5.one() / f5.zero(), FieldError);
  EXPECT_THROW(f5.parse("1 mod 7"), FieldError);
  EXPECT_THROW(f5.parse("x"), FieldError);
  EXPECT_THROW(Residue::parse("3"), FieldError);
}

TEST(Fields, Names) {
  EXPECT_EQ(RationalField{}.name(), "Q");
  EXPECT_EQ(GaussianField{}.name(), "Qi");
  EXPECT_EQ(PrimeField(5).name(), "GF5");
  static_assert(ExactField<RationalField>);
  static_assert(ExactField<GaussianField>);
  static_assert(ExactField<PrimeField>);
}

}  // namespace
