#pragma once

// Generators for the identity families of the dimension theory of MOLs:
// diamond terms, d-distributive laws, diamond-based dimension identities,
// test-set separating identities and canonical frames.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "molwb/eval.hpp"
#include "molwb/subspace.hpp"
#include "molwb/term.hpp"

namespace molwb {

class GeneratorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Diamond terms are verified by the property suites for d = 2, 3 (and
/// d = 4 through the dimension identities); larger d is best effort.
inline constexpr std::size_t kMaxDiamondDim = 6;

struct DiamondTerms {
  std::size_t d = 0;
  std::vector<Term> terms;  // d + 1 terms in z0..zd
};

inline std::vector<Term> indexed_vars(const std::string& prefix, std::size_t first, std::size_t last) {
  std::vector<Term> out;
  for (std::size_t i = first; i <= last; ++i) out.push_back(var(prefix + std::to_string(i)));
  return out;
}

namespace detail {

/// One normalization round. With
///   u = prod_j sum_{i != j} y_i,
///   v = sum_{i} sum_{j != i} y_i * sum_{k != i,j} y_k,
/// we have v <= u in any lattice, and y_i -> (y_i + v)*u maps into [v, u].
/// A tuple is a fixed point of the round exactly when it is a d-diamond
/// with bottom v and top u, so genuine diamonds are left unchanged.
inline std::vector<Term> normalize_round(const std::vector<Term>& y) {
  const std::size_t n = y.size();
  auto join_except = [&y, n](std::size_t skip1, std::size_t skip2) {
    std::vector<Term> parts;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != skip1 && k != skip2) parts.push_back(y[k]);
    }
    return join_all(parts);
  };
  std::vector<Term> tops;
  for (std::size_t j = 0; j < n; ++j) tops.push_back(join_except(j, j));
  Term upper = meet_all(tops);
  std::vector<Term> lows;
  for (std::size_t i = 0; i < n; ++i) {
    // j descending keeps z0, z1, ... in first-occurrence order.
    for (std::size_t j = n; j-- > 0;) {
      if (j != i) lows.push_back(y[i] * join_except(i, j));
    }
  }
  Term lower = join_all(lows);
  std::vector<Term> out;
  for (const auto& yi : y) out.push_back((yi + lower) * upper);
  return out;
}

}  // namespace detail

/// Terms t^d_0..t^d_d in z0..zd whose values always form a d-diamond and
/// reproduce any assignment that already is one.
///
/// d = 2 is the classical picture of the free modular lattice on three
/// generators: with b = z0*z1 + z1*z2 + z0*z2 and t = (z0+z1)*(z1+z2)*(z0+z2),
/// t_i = (z_i + b)*t. For d >= 3 the same median/upper-median idea is applied
/// to d+1 generators (see `detail::normalize_round`); `rounds` > 1 iterates it.
inline DiamondTerms diamond_terms(std::size_t d, std::size_t rounds = 1) {
  if (d < 2) throw GeneratorError("diamond_terms: d must be >= 2");
  if (d > kMaxDiamondDim) throw GeneratorError("diamond_terms: d > " + std::to_string(kMaxDiamondDim) + " unsupported");
  if (rounds == 0) throw GeneratorError("diamond_terms: rounds must be >= 1");
  auto z = indexed_vars("z", 0, d);
  std::vector<Term> t;
  if (d == 2) {
    Term lower = z[0] * z[1] + z[1] * z[2] + z[0] * z[2];
    Term upper = (z[0] + z[1]) * (z[1] + z[2]) * (z[0] + z[2]);
    for (const auto& zi : z) t.push_back((zi + lower) * upper);
  } else {
    t = detail::normalize_round(z);
  }
  for (std::size_t r = 1; r < rounds; ++r) t = detail::normalize_round(t);
  return {d, std::move(t)};
}

/// x*(y0 + ... + yd) = sum_{j=d..0} x*(sum_{i != j} y_i).
inline Identity delta_distributive(std::size_t d) {
  if (d == 0) throw GeneratorError("delta_distributive: d must be >= 1");
  Term x = var("x");
  auto y = indexed_vars("y", 0, d);
  std::vector<Term> parts;
  for (std::size_t j = d + 1; j-- > 0;) {
    std::vector<Term> others;
    for (std::size_t i = 0; i <= d; ++i) {
      if (i != j) others.push_back(y[i]);
    }
    parts.push_back(x * join_all(others));
  }
  return {x * join_all(y), join_all(parts)};
}

/// prod_i t^{d+1}_i = sum_i t^{d+1}_i: holds exactly in subdirect products
/// of MOLs of height <= d.
inline Identity delta_diamond(std::size_t d) {
  if (d == 0 || d + 1 > kMaxDiamondDim) {
    throw GeneratorError("delta_diamond: d + 1 outside the supported diamond range 2.." +
                         std::to_string(kMaxDiamondDim));
  }
  auto t = diamond_terms(d + 1).terms;
  return {meet_all(t), join_all(t)};
}

/// s^d(x) = (t0*x)'*(t0 + t1)*x + t0*t1 with t = diamond_terms(d).
inline Term s_term(std::size_t d, const std::string& x_name) {
  auto t = diamond_terms(d).terms;
  Term x = var(x_name);
  return comp(t[0] * x) * (t[0] + t[1]) * x + t[0] * t[1];
}

inline Term s_term(std::size_t d, std::size_t j) { return s_term(d, "x" + std::to_string(j)); }

/// t0*t1 = t0 * prod_{j<k} (s_j + s_k) in z0..zd, x1..xm. Fails in every
/// infinite simple MOL of height d, but holds whenever two x's coincide.
inline Identity sigma(std::size_t d, std::size_t m) {
  if (d < 2 || m < 2) throw GeneratorError("sigma: requires d >= 2 and m >= 2");
  auto t = diamond_terms(d).terms;
  std::vector<Term> s;
  for (std::size_t j = 1; j <= m; ++j) {
    Term x = var("x" + std::to_string(j));
    s.push_back(comp(t[0] * x) * (t[0] + t[1]) * x + t[0] * t[1]);
  }
  Term rhs = t[0];
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j + 1; k < m; ++k) rhs = rhs * (s[j] + s[k]);
  }
  return {t[0] * t[1], rhs};
}

/// True iff `a` is a d-diamond (d = a.size() - 1): with bottom = meet of all
/// and top = join of all, every d of them join to top and are independent
/// over bottom.
template <OrthoModel M>
bool is_diamond(const M& model, const std::vector<typename M::element_type>& a) {
  const std::size_t n = a.size();
  if (n < 3) throw std::invalid_argument("is_diamond: need at least 3 elements");
  auto bottom = a[0], top = a[0];
  for (std::size_t i = 1; i < n; ++i) {
    bottom = model.meet(bottom, a[i]);
    top = model.join(top, a[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::optional<typename M::element_type> all;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      all = all ? model.join(*all, a[i]) : a[i];
      std::optional<typename M::element_type> rest;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j || k == i) continue;
        rest = rest ? model.join(*rest, a[k]) : a[k];
      }
      if (!model.equal(model.meet(a[i], *rest), bottom)) return false;
    }
    if (!model.equal(*all, top)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Frames

template <ExactField F>
struct Frame {
  std::size_t d = 0;
  std::vector<Subspace<F>> a;     // a_1..a_d
  std::vector<Subspace<F>> axes;  // c_12..c_1d
};

/// a_i = span{e_i}, c_1j = span{e_1 - e_j}.
template <ExactField F>
Frame<F> frame_canonical(const F& field, std::size_t d) {
  if (d < 2) throw GeneratorError("frame_canonical: d must be >= 2");
  Frame<F> fr;
  fr.d = d;
  auto unit = [&](std::size_t i) {
    Row<typename F::element_type> r(d, field.zero());
    r[i] = field.one();
    return r;
  };
  for (std::size_t i = 0; i < d; ++i) fr.a.push_back(Subspace<F>::from_rows(field, d, {unit(i)}));
  for (std::size_t j = 1; j < d; ++j) {
    auto r = unit(0);
    r[j] = -field.one();
    fr.axes.push_back(Subspace<F>::from_rows(field, d, {r}));
  }
  return fr;
}

/// Frame invariants: a_i independent with join = top; each axis c_1j is a
/// common complement of a_1 and a_j in a_1 + a_j.
template <ExactField F>
bool check_frame(const Frame<F>& fr) {
  if (fr.a.size() != fr.d || fr.axes.size() + 1 != fr.d) return false;
  const auto& field = fr.a.front().field();
  const std::size_t n = fr.a.front().ambient_dim();
  auto zero = Subspace<F>::zero(field, n);
  auto acc = zero;
  for (const auto& ai : fr.a) {
    if (!(meet(acc, ai) == zero)) return false;
    acc = join(acc, ai);
  }
  if (!(acc == Subspace<F>::full(field, n))) return false;
  for (std::size_t j = 1; j < fr.d; ++j) {
    const auto& c = fr.axes[j - 1];
    auto plane = join(fr.a[0], fr.a[j]);
    if (!(meet(c, fr.a[0]) == zero) || !(meet(c, fr.a[j]) == zero)) return false;
    if (!(join(c, fr.a[j]) == plane) || !(join(c, fr.a[0]) == plane)) return false;
  }
  return true;
}

}  // namespace molwb
