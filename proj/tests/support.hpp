#pragma once

// Test-only helpers: random terms, and oracles that share no code with the
// library paths they check.

#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "molwb/molwb.hpp"

namespace testing_support {

using namespace molwb;

inline Term random_term(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 5);
  int k = pick(rng);
  if (depth <= 0 || k <= 1) {
    std::uniform_int_distribution<int> leaf(0, static_cast<int>(vars.size()) + 1);
    int l = leaf(rng);
    if (l == static_cast<int>(vars.size())) return Term::zero();
    if (l == static_cast<int>(vars.size()) + 1) return Term::one();
    return var(vars[static_cast<std::size_t>(l)]);
  }
  if (k == 2) return comp(random_term(rng, vars, depth - 1));
  if (k == 3) return random_term(rng, vars, depth - 1) * random_term(rng, vars, depth - 1);
  return random_term(rng, vars, depth - 1) + random_term(rng, vars, depth - 1);
}

inline Identity random_identity(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth) {
  return {random_term(rng, vars, depth), random_term(rng, vars, depth)};
}

/// Evaluates directly on the order table: meet and join are found by
/// scanning for the greatest lower / least upper bound.
class NaiveEvaluator {
 public:
  explicit NaiveEvaluator(const FiniteModel& m) : m_(m) {}

  std::size_t glb(std::size_t a, std::size_t b) const {
    std::optional<std::size_t> best;
    for (std::size_t x = 0; x < m_.size(); ++x) {
      if (m_.leq[x][a] && m_.leq[x][b] && (!best || m_.leq[*best][x])) best = x;
    }
    return *best;
  }
  std::size_t lub(std::size_t a, std::size_t b) const {
    std::optional<std::size_t> best;
    for (std::size_t x = 0; x < m_.size(); ++x) {
      if (m_.leq[a][x] && m_.leq[b][x] && (!best || m_.leq[x][*best])) best = x;
    }
    return *best;
  }

  std::size_t eval(const Term& t, const std::map<std::string, std::size_t>& a) const {
    switch (t.kind()) {
      case TermKind::Var: return a.at(t.name());
      case TermKind::Zero: return m_.bottom;
      case TermKind::One: return m_.top;
      case TermKind::Comp: return m_.ortho[eval(t.child(), a)];
      case TermKind::Meet: return glb(eval(t.left(), a), eval(t.right(), a));
      case TermKind::Join: return lub(eval(t.left(), a), eval(t.right(), a));
    }
    return 0;
  }

  /// Every assignment of `vars`; returns the first falsifying one.
  std::optional<std::map<std::string, std::size_t>> counterexample(const Identity& id) const {
    auto vars = vars_of(id);
    std::vector<std::size_t> idx(vars.size(), 0);
    while (true) {
      std::map<std::string, std::size_t> a;
      for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = idx[i];
      if (eval(id.lhs, a) != eval(id.rhs, a)) return a;
      std::size_t k = vars.size();
      while (k > 0) {
        if (++idx[k - 1] < m_.size()) break;
        idx[k - 1] = 0;
        --k;
      }
      if (k == 0) return std::nullopt;
    }
  }

 private:
  const FiniteModel& m_;
};

/// Fractions over int64 for cross-checking the GMP-backed rationals on
/// small values.
struct SmallFraction {
  std::int64_t n = 0, d = 1;
  SmallFraction(std::int64_t num = 0, std::int64_t den = 1) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g == 0) g = 1;
    n = num / g;
    d = den / g;
  }
  friend SmallFraction operator+(SmallFraction a, SmallFraction b) { return {a.n * b.d + b.n * a.d, a.d * b.d}; }
  friend SmallFraction operator-(SmallFraction a, SmallFraction b) { return {a.n * b.d - b.n * a.d, a.d * b.d}; }
  friend SmallFraction operator*(SmallFraction a, SmallFraction b) { return {a.n * b.n, a.d * b.d}; }
  friend SmallFraction operator/(SmallFraction a, SmallFraction b) { return {a.n * b.d, a.d * b.n}; }
  std::string str() const { return d == 1 ? std::to_string(n) : std::to_string(n) + "/" + std::to_string(d); }
};

/// All vectors of GF(p)^d, as value lists.
inline std::vector<std::vector<std::uint64_t>> all_vectors(std::uint64_t p, std::size_t d) {
  std::vector<std::vector<std::uint64_t>> out{{}};
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<std::vector<std::uint64_t>> next;
    for (const auto& v : out) {
      for (std::uint64_t x = 0; x < p; ++x) {
        auto w = v;
        w.push_back(x);
        next.push_back(std::move(w));
      }
    }
    out = std::move(next);
  }
  return out;
}

/// Set of vectors in the span of a GF(p) subspace, by enumerating all
/// coefficient combinations of its basis.
inline std::vector<std::vector<std::uint64_t>> span_elements(const Subspace<PrimeField>& u) {
  const std::uint64_t p = u.field().modulus();
  const std::size_t d = u.ambient_dim();
  std::vector<std::vector<std::uint64_t>> out;
  for (const auto& coeffs : all_vectors(p, u.dim())) {
    std::vector<std::uint64_t> v(d, 0);
    for (std::size_t r = 0; r < u.dim(); ++r) {
      for (std::size_t j = 0; j < d; ++j) v[j] = (v[j] + coeffs[r] * u.basis()[r][j].value()) % p;
    }
    out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <ExactField F>
Row<typename F::element_type> row_of(const F& field, std::initializer_list<long long> xs) {
  Row<typename F::element_type> r;
  for (auto x : xs) r.push_back(field.from_int(x));
  return r;
}

inline Subspace<RationalField> qspan(std::size_t d, std::initializer_list<std::initializer_list<long long>> rows) {
  Matrix<Rational> m;
  for (auto r : rows) m.push_back(row_of(RationalField{}, r));
  return Subspace<RationalField>::from_rows(RationalField{}, d, std::move(m));
}

}  // namespace testing_support
