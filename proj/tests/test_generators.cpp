#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support.hpp"

namespace {

using namespace molwb;
using testing_support::qspan;

const RationalField Q;
using QSub = Subspace<RationalField>;

Assignment<QSub> z_assignment(const std::vector<QSub>& values) {
  Assignment<QSub> a;
  for (std::size_t i = 0; i < values.size(); ++i) a.insert_or_assign("z" + std::to_string(i), values[i]);
  return a;
}

template <OrthoModel M>
std::vector<typename M::element_type> diamond_values(const DiamondTerms& dt,
                                                     const Assignment<typename M::element_type>& a, const M& m) {
  std::vector<typename M::element_type> out;
  for (const auto& t : dt.terms) out.push_back(eval_term(t, a, m));
  return out;
}

TEST(DiamondTerms, ShapeAndErrors) {
  auto d2 = diamond_terms(2);
  ASSERT_EQ(d2.terms.size(), 3U);
  EXPECT_EQ(print_term(d2.terms[0]), "(z0 + (z0*z1 + z1*z2 + z0*z2))*((z0 + z1)*(z1 + z2)*(z0 + z2))");
  auto d3 = diamond_terms(3);
  ASSERT_EQ(d3.terms.size(), 4U);
  for (std::size_t i = 0; i < 4; ++i) {
    auto vars = vars_of(d3.terms[i]);
    EXPECT_EQ(vars.front(), "z" + std::to_string(i));
    std::sort(vars.begin(), vars.end());
    EXPECT_EQ(vars, (std::vector<std::string>{"z0", "z1", "z2", "z3"}));
  }
  EXPECT_THROW(diamond_terms(1), GeneratorError);
  EXPECT_THROW(diamond_terms(kMaxDiamondDim + 1), GeneratorError);
}

TEST(DiamondTerms, DistinctAtomsOfMo3AreFixed) {
  auto m = catalog("mo", 3);
  auto dt = diamond_terms(2);
  std::size_t a = m.index_of("a"), b = m.index_of("b"), c = m.index_of("c");
  EXPECT_EQ(diamond_values(dt, {{"z0", a}, {"z1", b}, {"z2", c}}, m), (std::vector<std::size_t>{a, b, c}));
}

TEST(DiamondTerms, RepeatedArgumentCollapses) {
  auto m = catalog("mo", 2);
  auto dt = diamond_terms(2);
  for (std::size_t x = 0; x < m.size(); ++x) {
    for (std::size_t y = 0; y < m.size(); ++y) {
      auto v = diamond_values(dt, {{"z0", x}, {"z1", x}, {"z2", y}}, m);
      EXPECT_TRUE(v[0] == v[1] && v[1] == v[2]);
    }
  }
}

TEST(DiamondTerms, ThreeLinesInTheRationalPlaneAreFixed) {
  SubspaceLattice<RationalField> lat(Q, 2);
  std::vector<QSub> z{qspan(2, {{1, 0}}), qspan(2, {{0, 1}}), qspan(2, {{1, 1}})};
  EXPECT_EQ(diamond_values(diamond_terms(2), z_assignment(z), lat), z);
}

// P1 on a finite model: every assignment of z0..zd.
void check_p1_exhaustive(std::size_t d, const Mol& m) {
  auto dt = diamond_terms(d);
  std::vector<std::size_t> idx(d + 1, 0);
  for (;;) {
    Assignment<std::size_t> a;
    for (std::size_t i = 0; i <= d; ++i) a["z" + std::to_string(i)] = idx[i];
    ASSERT_TRUE(is_diamond(m, diamond_values(dt, a, m)));
    std::size_t k = 0;
    while (k <= d && ++idx[k] == m.size()) idx[k++] = 0;
    if (k > d) break;
  }
}

TEST(DiamondTermsP1, FiniteModelsExhaustive) {
  for (std::size_t d : {2U, 3U}) {
    check_p1_exhaustive(d, catalog("mo", 3));
    check_p1_exhaustive(d, catalog("boolean", 3));
  }
}

TEST(DiamondTermsP1, RandomSubspaces) {
  std::mt19937_64 rng(3);
  for (std::size_t d : {2U, 3U}) {
    auto dt = diamond_terms(d);
    for (std::size_t n : {3U, 4U}) {
      SubspaceLattice<RationalField> lat(Q, n);
      int nontrivial = 0;
      for (int i = 0; i < 150; ++i) {
        std::vector<QSub> z;
        // Mostly lines, which is where nontrivial diamonds live.
        for (std::size_t k = 0; k <= d; ++k) z.push_back(random_subspace(Q, n, i % 3 == 0 ? rng() % (n + 1) : 1, rng()));
        auto v = diamond_values(dt, z_assignment(z), lat);
        ASSERT_TRUE(is_diamond(lat, v));
        if (!(v[0] == v[1])) ++nontrivial;
      }
      if (d == 2) EXPECT_GT(nontrivial, 0) << "n=" << n;
    }
  }
}

TEST(DiamondTermsP2, GenuineDiamondsAreFixed) {
  SubspaceLattice<RationalField> l3(Q, 3), l4(Q, 4);
  std::vector<QSub> d3{qspan(3, {{1, 0, 0}}), qspan(3, {{0, 1, 0}}), qspan(3, {{0, 0, 1}}), qspan(3, {{1, 1, 1}})};
  ASSERT_TRUE(is_diamond(l3, d3));
  EXPECT_EQ(diamond_values(diamond_terms(3), z_assignment(d3), l3), d3);

  // A 3-diamond of planes over a common line in Q^4.
  std::vector<QSub> planes{qspan(4, {{0, 0, 0, 1}, {1, 0, 0, 0}}), qspan(4, {{0, 0, 0, 1}, {0, 1, 0, 0}}),
                           qspan(4, {{0, 0, 0, 1}, {0, 0, 1, 0}}), qspan(4, {{0, 0, 0, 1}, {1, 2, 3, 0}})};
  ASSERT_TRUE(is_diamond(l4, planes));
  EXPECT_EQ(diamond_values(diamond_terms(3), z_assignment(planes), l4), planes);

  // Random 2-diamonds: three distinct lines in a random plane of Q^4.
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    auto plane = random_subspace(Q, 4, 2, rng());
    const auto& p = plane.basis();
    std::vector<QSub> lines;
    for (auto [s, t] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{1 + static_cast<int>(rng() % 3), 1}}) {
      Row<Rational> r;
      for (std::size_t j = 0; j < 4; ++j) r.push_back(Rational(s) * p[0][j] + Rational(t) * p[1][j]);
      lines.push_back(QSub::from_rows(Q, 4, {r}));
    }
    ASSERT_EQ(diamond_values(diamond_terms(2), z_assignment(lines), l4), lines);
  }

  // Diamonds in catalog models: distinct atoms in mo(3), constant tuples anywhere.
  auto m = catalog("mo", 3);
  for (std::size_t a = 2; a < m.size(); ++a) {
    for (std::size_t b = 2; b < m.size(); ++b) {
      for (std::size_t c = 2; c < m.size(); ++c) {
        if (a == b || b == c || a == c) continue;
        EXPECT_EQ(diamond_values(diamond_terms(2), {{"z0", a}, {"z1", b}, {"z2", c}}, m),
                  (std::vector<std::size_t>{a, b, c}));
      }
    }
  }
  auto b3 = catalog("boolean", 3);
  for (std::size_t x = 0; x < b3.size(); ++x) {
    Assignment<std::size_t> a{{"z0", x}, {"z1", x}, {"z2", x}, {"z3", x}};
    EXPECT_EQ(diamond_values(diamond_terms(3), a, b3), std::vector<std::size_t>(4, x));
  }
}

TEST(DeltaDistributive, Examples) {
  EXPECT_EQ(delta_distributive(1), parse_identity("x*(y0+y1) = x*y0 + x*y1"));
  EXPECT_EQ(vars_of(delta_distributive(3)), (std::vector<std::string>{"x", "y0", "y1", "y2", "y3"}));
  EXPECT_THROW(delta_distributive(0), GeneratorError);
  for (std::size_t n = 1; n <= 4; ++n) EXPECT_TRUE(holds(delta_distributive(2), catalog("mo", n)).holds);

  SubspaceLattice<RationalField> lat(Q, 3);
  Assignment<QSub> a{{"x", qspan(3, {{1, 1, 1}})},
                     {"y0", qspan(3, {{1, 0, 0}})},
                     {"y1", qspan(3, {{0, 1, 0}})},
                     {"y2", qspan(3, {{0, 0, 1}})}};
  auto [lhs, rhs] = eval_identity(delta_distributive(2), a, lat);
  EXPECT_EQ(lhs, qspan(3, {{1, 1, 1}}));
  EXPECT_TRUE(rhs.is_zero());
}

TEST(DeltaDiamond, Examples) {
  EXPECT_TRUE(holds(delta_diamond(1), catalog("boolean", 3)).holds);
  SubspaceLattice<RationalField> l2(Q, 2), l3(Q, 3);
  auto [lhs, rhs] = eval_identity(
      delta_diamond(1), z_assignment({qspan(2, {{1, 0}}), qspan(2, {{0, 1}}), qspan(2, {{1, 1}})}), l2);
  EXPECT_NE(lhs, rhs);

  auto valid = refute_random(delta_diamond(2), Q, 2, {.trials = 500, .seed = 4});
  EXPECT_EQ(valid.status, RefutationStatus::ValidUpToBudget);

  auto lines = z_assignment({qspan(3, {{1, 0, 0}}), qspan(3, {{0, 1, 0}}), qspan(3, {{0, 0, 1}}), qspan(3, {{1, 1, 1}})});
  auto [l, r] = eval_identity(delta_diamond(2), lines, l3);
  EXPECT_NE(l, r);
  EXPECT_THROW(delta_diamond(0), GeneratorError);
  EXPECT_THROW(delta_diamond(kMaxDiamondDim), GeneratorError);
}

TEST(DeltaDichotomy, HoldsAtHeightDFailsAboveForSmallD) {
  for (std::size_t d = 1; d <= 3; ++d) {
    for (const auto& id : {delta_distributive(d), delta_diamond(d)}) {
      for (const auto& [name, m] : small_catalog(16)) {
        if (height(m) <= d) EXPECT_TRUE(holds(id, m).holds) << name << " d=" << d;
      }
      auto up = refute_random(id, Q, d + 1, {.trials = 2000, .seed = 1});
      EXPECT_EQ(up.status, RefutationStatus::Refuted) << print_identity(id);
    }
  }
}

TEST(STerm, Examples) {
  SubspaceLattice<RationalField> lat(Q, 2);
  auto z = z_assignment({qspan(2, {{1, 0}}), qspan(2, {{0, 1}}), qspan(2, {{1, 1}})});
  auto s = s_term(2, 1);
  EXPECT_EQ(vars_of(s), (std::vector<std::string>{"z0", "z1", "z2", "x1"}));
  z.insert_or_assign("x1", qspan(2, {{1, 2}}));
  EXPECT_EQ(eval_term(s, z, lat), qspan(2, {{1, 2}}));
  z.insert_or_assign("x1", qspan(2, {{1, 0}}));
  EXPECT_TRUE(eval_term(s, z, lat).is_zero());

  auto b1 = catalog("boolean", 1);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t x = 0; x < 2; ++x) {
      EXPECT_EQ(eval_term(s, {{"z0", c}, {"z1", c}, {"z2", c}, {"x1", x}}, b1), c);
    }
  }
}

TEST(Sigma, ShapeAndErrors) {
  auto s = sigma(2, 3);
  EXPECT_EQ(vars_of(s), (std::vector<std::string>{"z0", "z1", "z2", "x1", "x2", "x3"}));
  EXPECT_THROW(sigma(1, 2), GeneratorError);
  EXPECT_THROW(sigma(2, 1), GeneratorError);
}

TEST(Sigma, DistinctAtomsRefuteAndRepeatedXHolds) {
  SubspaceLattice<RationalField> l2(Q, 2);
  auto z = z_assignment({qspan(2, {{1, 0}}), qspan(2, {{0, 1}}), qspan(2, {{1, 1}})});
  z.insert_or_assign("x1", qspan(2, {{1, 2}}));
  z.insert_or_assign("x2", qspan(2, {{1, 3}}));
  auto [lhs, rhs] = eval_identity(sigma(2, 2), z, l2);
  EXPECT_TRUE(lhs.is_zero());
  EXPECT_EQ(rhs, qspan(2, {{1, 0}}));
  z.insert_or_assign("x2", qspan(2, {{1, 2}}));
  auto [l2s, r2s] = eval_identity(sigma(2, 2), z, l2);
  EXPECT_TRUE(l2s.is_zero());
  EXPECT_TRUE(r2s.is_zero());

  SubspaceLattice<RationalField> l3(Q, 3);
  auto z3 = z_assignment({qspan(3, {{1, 0, 0}}), qspan(3, {{0, 1, 0}}), qspan(3, {{0, 0, 1}}), qspan(3, {{1, 1, 1}})});
  z3.insert_or_assign("x1", qspan(3, {{1, 2, 0}}));
  z3.insert_or_assign("x2", qspan(3, {{1, 3, 0}}));
  auto [l3s, r3s] = eval_identity(sigma(3, 2), z3, l3);
  EXPECT_TRUE(l3s.is_zero());
  EXPECT_EQ(r3s, qspan(3, {{1, 0, 0}}));

  std::mt19937_64 rng(12);
  for (std::size_t d : {2U, 3U}) {
    SubspaceLattice<RationalField> lat(Q, d);
    auto id = sigma(d, 2);
    for (int i = 0; i < 100; ++i) {
      Assignment<QSub> a;
      for (std::size_t k = 0; k <= d; ++k) a.insert_or_assign("z" + std::to_string(k), random_subspace(Q, d, rng() % (d + 1), rng()));
      auto x = random_subspace(Q, d, rng() % (d + 1), rng());
      a.insert_or_assign("x1", x);
      a.insert_or_assign("x2", x);
      auto [l, r] = eval_identity(id, a, lat);
      ASSERT_EQ(l, r);
    }
  }
}

TEST(Sigma, Mo4WithTwoEqualXs) {
  auto m = catalog("mo", 4);
  auto id = sigma(2, 3);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 40; ++i) {
    Assignment<std::size_t> a{{"z0", rng() % 10}, {"z1", rng() % 10}, {"z2", rng() % 10}};
    for (std::size_t x = 0; x < m.size(); ++x) {
      for (std::size_t y = 0; y < m.size(); ++y) {
        a["x1"] = a["x2"] = x;
        a["x3"] = y;
        auto [l, r] = eval_identity(id, a, m);
        ASSERT_EQ(l, r);
      }
    }
  }
}

TEST(Frame, CanonicalExamples) {
  auto f2 = frame_canonical(Q, 2);
  EXPECT_EQ(f2.a[0], qspan(2, {{1, 0}}));
  EXPECT_EQ(f2.a[1], qspan(2, {{0, 1}}));
  EXPECT_EQ(f2.axes[0], qspan(2, {{1, -1}}));
  auto f3 = frame_canonical(Q, 3);
  EXPECT_EQ(join(f3.axes[0], f3.a[1]), join(f3.a[0], f3.a[1]));
  EXPECT_THROW(frame_canonical(Q, 1), GeneratorError);
}

TEST(Frame, InvariantsUpToSix) {
  for (std::size_t d = 2; d <= 6; ++d) {
    auto fq = frame_canonical(Q, d);
    auto fi = frame_canonical(GaussianField{}, d);
    EXPECT_TRUE(check_frame(fq)) << d;
    EXPECT_TRUE(check_frame(fi)) << d;
    // Independent restatement: dimensions add up and each axis is a line
    // in a_1 + a_j distinct from both.
    std::size_t total = 0;
    for (const auto& a : fq.a) total += a.dim();
    EXPECT_EQ(total, d);
    for (std::size_t j = 1; j < d; ++j) {
      const auto& c = fq.axes[j - 1];
      EXPECT_EQ(c.dim(), 1U);
      EXPECT_TRUE(c.leq(join(fq.a[0], fq.a[j])));
      EXPECT_FALSE(c == fq.a[0]);
      EXPECT_FALSE(c == fq.a[j]);
    }
  }
  auto broken = frame_canonical(Q, 3);
  broken.axes[1] = broken.a[0];
  EXPECT_FALSE(check_frame(broken));
}

}  // namespace
