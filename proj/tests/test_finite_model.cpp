#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace {

using namespace molwb;
using testing_support::NaiveEvaluator;

FiniteModel pentagon() {
  // 0 < a < b < 1, 0 < c < 1, c incomparable to a and b.
  FiniteModel m;
  m.elements = {"0", "a", "b", "c", "1"};
  const std::vector<std::pair<int, int>> below{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 4}, {2, 4}, {3, 4}};
  m.leq.assign(5, std::vector<bool>(5, false));
  for (int i = 0; i < 5; ++i) m.leq[i][i] = true;
  for (auto [i, j] : below) m.leq[i][j] = true;
  m.ortho = {4, 3, 3, 1, 0};
  m.bottom = 0;
  m.top = 4;
  return m;
}

TEST(ValidateMol, CatalogExamplesPass) {
  for (auto m : {mo_model(2), boolean_model(3)}) {
    auto report = validate_mol(m);
    EXPECT_TRUE(report.usable());
    EXPECT_EQ(report.checks.size(), 7U);
  }
}

TEST(ValidateMol, PentagonFailsModularityWithWitness) {
  auto n5 = pentagon();
  NaiveEvaluator naive(n5);
  for (auto ortho : {std::vector<std::size_t>{4, 3, 3, 1, 0}, std::vector<std::size_t>{4, 2, 1, 3, 0},
                     std::vector<std::size_t>{0, 1, 2, 3, 4}}) {
    n5.ortho = ortho;
    auto report = validate_mol(n5);
    EXPECT_FALSE(report.usable());
    const auto* mod = report.find("modular law");
    ASSERT_NE(mod, nullptr);
    ASSERT_FALSE(mod->passed);
    ASSERT_EQ(mod->witness.size(), 3U);
    auto [x, y, z] = std::tuple{mod->witness[0], mod->witness[1], mod->witness[2]};
    EXPECT_TRUE(n5.leq[x][z]);
    EXPECT_NE(naive.lub(x, naive.glb(y, z)), naive.glb(naive.lub(x, y), z));
  }
  EXPECT_THROW(Mol::from(pentagon()), ModelError);
}

TEST(ValidateMol, DetectsBrokenOrtho) {
  auto m = mo_model(2);
  std::swap(m.ortho[2], m.ortho[4]);  // a -> b', b -> a'
  auto report = validate_mol(m);
  EXPECT_FALSE(report.usable());
  EXPECT_FALSE(report.find("ortho involution")->passed);
  EXPECT_TRUE(report.find("modular law")->passed);

  auto fixed = boolean_model(2);
  fixed.ortho = {3, 1, 2, 0};  // order-reversing involution, but x*x' != 0
  auto r2 = validate_mol(fixed);
  EXPECT_TRUE(r2.find("ortho involution")->passed);
  EXPECT_FALSE(r2.find("complement laws")->passed);
}

TEST(ValidateMol, DetectsNonLattice) {
  // Two maximal elements below the top are fine; two minimal ones with no meet are not.
  FiniteModel m;
  m.elements = {"p", "q", "1"};
  m.leq = {{true, false, true}, {false, true, true}, {false, false, true}};
  m.ortho = {0, 1, 2};
  m.bottom = 0;
  m.top = 2;
  auto report = validate_mol(m);
  EXPECT_FALSE(report.usable());
  EXPECT_FALSE(report.find("bounds")->passed && report.find("lattice")->passed);
}

TEST(ValidateMol, MalformedTablesThrow) {
  auto m = mo_model(1);
  m.leq.pop_back();
  EXPECT_THROW(validate_mol(m), ModelError);
  auto o = mo_model(1);
  o.ortho[0] = 9;
  EXPECT_THROW(validate_mol(o), ModelError);
  FiniteModel empty;
  EXPECT_THROW(validate_mol(empty), ModelError);
}

TEST(Catalog, Examples) {
  auto b1 = catalog("boolean", 1);
  EXPECT_EQ(b1.size(), 2U);
  EXPECT_TRUE(b1.leq(b1.bottom(), b1.top()));
  EXPECT_EQ(height(b1), 1U);

  auto m2 = catalog("mo", 2);
  EXPECT_EQ(m2.data().elements, (std::vector<std::string>{"0", "1", "a", "a'", "b", "b'"}));
  EXPECT_EQ(m2.complement(m2.index_of("a")), m2.index_of("a'"));

  auto b3 = catalog("boolean", 3);
  EXPECT_EQ(b3.size(), 8U);
  EXPECT_EQ(height(b3), 3U);

  EXPECT_THROW(catalog("chain", 2), ModelError);
  EXPECT_THROW(catalog("mo", 0), ModelError);
}

TEST(Catalog, OperationTablesMatchNaiveOrderScan) {
  for (const auto& [name, m] : small_catalog(16)) {
    NaiveEvaluator naive(m.data());
    for (std::size_t a = 0; a < m.size(); ++a) {
      for (std::size_t b = 0; b < m.size(); ++b) {
        ASSERT_EQ(m.meet(a, b), naive.glb(a, b)) << name;
        ASSERT_EQ(m.join(a, b), naive.lub(a, b)) << name;
      }
    }
  }
}

TEST(Catalog, EveryModelValidatesAndIsTwoDistributive) {
  auto two_dist = parse_identity("x*(y0+y1+y2) = x*(y1+y2) + x*(y0+y2) + x*(y0+y1)");
  auto catalog_models = small_catalog(16);
  EXPECT_EQ(catalog_models.size(), 4U + 7U);
  for (const auto& [name, m] : catalog_models) {
    EXPECT_TRUE(validate_mol(m.data()).usable()) << name;
    NaiveEvaluator naive(m.data());
    EXPECT_FALSE(naive.counterexample(two_dist).has_value()) << name;
  }
}

TEST(Height, Examples) {
  for (std::size_t n = 1; n <= 5; ++n) EXPECT_EQ(height(catalog("boolean", n)), n);
  EXPECT_EQ(height(catalog("mo", 7)), 2U);
  EXPECT_EQ(height(Mol::from(trivial_model())), 0U);
}

TEST(DirectProduct, Examples) {
  auto b1 = catalog("boolean", 1);
  auto b1b1 = direct_product(b1, b1);
  EXPECT_EQ(b1b1.size(), 4U);
  EXPECT_EQ(b1b1.data().leq, catalog("boolean", 2).data().leq);
  EXPECT_EQ(b1b1.data().ortho, catalog("boolean", 2).data().ortho);

  auto mb = direct_product(catalog("mo", 2), b1);
  EXPECT_EQ(mb.size(), 12U);
  EXPECT_TRUE(validate_mol(mb.data()).usable());
  EXPECT_EQ(height(mb), 3U);

  auto m = catalog("mo", 3);
  auto mt = direct_product(m, Mol::from(trivial_model()));
  EXPECT_EQ(mt.data().leq, m.data().leq);
  EXPECT_EQ(mt.data().ortho, m.data().ortho);
}

TEST(DirectProduct, HeightsAdd) {
  auto models = small_catalog(8);
  for (const auto& [n1, a] : models) {
    for (const auto& [n2, b] : models) {
      EXPECT_EQ(height(direct_product(a, b)), height(a) + height(b)) << n1 << " x " << n2;
    }
  }
}

TEST(DirectProduct, RespectsCap) {
  auto m = catalog("mo", 7);
  EXPECT_THROW(direct_product(m, m, 100), ModelError);
  EXPECT_EQ(direct_product(m, m, 256).size(), 256U);
}

TEST(DirectProduct, IdentityHoldsIffBothFactorsDo) {
  std::mt19937_64 rng(17);
  const std::vector<std::pair<Mol, Mol>> pairs{{catalog("mo", 2), catalog("boolean", 1)},
                                                {catalog("boolean", 2), catalog("boolean", 1)},
                                                {catalog("mo", 3), catalog("mo", 2)}};
  int both = 0, not_both = 0;
  for (const auto& [a, b] : pairs) {
    auto p = direct_product(a, b);
    for (int i = 0; i < 60; ++i) {
      auto id = testing_support::random_identity(rng, {"x", "y", "z"}, 3);
      bool ha = holds(id, a).holds, hb = holds(id, b).holds;
      ASSERT_EQ(holds(id, p).holds, ha && hb) << print_identity(id);
      (ha && hb ? both : not_both)++;
    }
  }
  EXPECT_GT(both, 0);
  EXPECT_GT(not_both, 0);
}

TEST(IntervalMol, Examples) {
  auto m2 = catalog("mo", 2);
  auto whole = interval_mol(m2, m2.bottom(), m2.top());
  EXPECT_EQ(whole.data().leq, m2.data().leq);
  EXPECT_EQ(whole.data().ortho, m2.data().ortho);

  auto chain = interval_mol(m2, m2.bottom(), m2.index_of("a"));
  EXPECT_EQ(chain.size(), 2U);
  EXPECT_EQ(chain.complement(chain.bottom()), chain.top());

  auto b3 = catalog("boolean", 3);
  auto upper = interval_mol(b3, b3.index_of("100"), b3.top());
  EXPECT_EQ(upper.size(), 4U);
  EXPECT_EQ(height(upper), 2U);
  EXPECT_TRUE(holds(delta_distributive(1), upper).holds);

  EXPECT_THROW(interval_mol(m2, m2.index_of("a"), m2.index_of("b")), ModelError);
}

TEST(IntervalMol, EveryIntervalOfACatalogModelIsAMol) {
  for (const auto& [name, m] : small_catalog(16)) {
    for (std::size_t b = 0; b < m.size(); ++b) {
      for (std::size_t c = 0; c < m.size(); ++c) {
        if (!m.leq(b, c)) continue;
        auto iv = interval_mol(m, b, c);
        ASSERT_TRUE(validate_mol(iv.data()).usable()) << name << " [" << b << "," << c << "]";
      }
    }
  }
  auto mb = direct_product(catalog("mo", 3), catalog("boolean", 2));
  for (std::size_t c = 0; c < mb.size(); ++c) {
    ASSERT_TRUE(validate_mol(interval_mol(mb, mb.bottom(), c).data()).usable());
  }
}

}  // namespace
