#pragma once

// The subspace ortholattice L(F^d) over an exact *-field.
//
// A Subspace stores its basis in reduced row echelon form, which is unique
// for a given row space: lattice equality is representation equality. Meet
// and join never look at the form; only `ortho` does.

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "molwb/field.hpp"

namespace molwb {

class SubspaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class E>
using Row = std::vector<E>;

template <class E>
using Matrix = std::vector<Row<E>>;

namespace detail {

/// In-place Gauss-Jordan; returns pivot columns. Zero rows are dropped.
template <class F>
std::vector<std::size_t> gauss_jordan(const F& field, Matrix<typename F::element_type>& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c].is_zero()) ++p;
    if (p == m.size()) continue;
    std::swap(m[r], m[p]);
    auto inv = field.one() / m[r][c];
    for (std::size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      auto factor = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= factor * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  m.resize(r);
  return pivots;
}

/// Basis of {v : row . v = 0 for every row}.
template <class F>
Matrix<typename F::element_type> right_kernel(const F& field, Matrix<typename F::element_type> rows,
                                              std::size_t cols) {
  auto pivots = gauss_jordan(field, rows, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  Matrix<typename F::element_type> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    Row<typename F::element_type> v(cols, field.zero());
    v[f] = field.one();
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -rows[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace detail

template <ExactField F>
class Subspace {
 public:
  using field_type = F;
  using element_type = typename F::element_type;

  /// Canonical RREF of the row space of `rows`.
  static Subspace from_rows(const F& field, std::size_t d, Matrix<element_type> rows) {
    for (const auto& r : rows) {
      if (r.size() != d) throw SubspaceError("ragged input: row of length " + std::to_string(r.size()) +
                                             " in ambient dimension " + std::to_string(d));
    }
    detail::gauss_jordan(field, rows, d);
    return Subspace(field, d, std::move(rows));
  }

  static Subspace zero(const F& field, std::size_t d) { return Subspace(field, d, {}); }

  static Subspace full(const F& field, std::size_t d) {
    Matrix<element_type> rows(d, Row<element_type>(d, field.zero()));
    for (std::size_t i = 0; i < d; ++i) rows[i][i] = field.one();
    return Subspace(field, d, std::move(rows));
  }

  const F& field() const { return field_; }
  std::size_t ambient_dim() const { return d_; }
  std::size_t dim() const { return basis_.size(); }
  const Matrix<element_type>& basis() const { return basis_; }
  bool is_zero() const { return basis_.empty(); }
  bool is_full() const { return basis_.size() == d_; }

  bool contains(const Row<element_type>& v) const {
    if (v.size() != d_) throw SubspaceError("vector length mismatch");
    auto rows = basis_;
    rows.push_back(v);
    detail::gauss_jordan(field_, rows, d_);
    return rows.size() == basis_.size();
  }

  bool leq(const Subspace& other) const {
    same_space(other);
    for (const auto& r : basis_) {
      if (!other.contains(r)) return false;
    }
    return true;
  }

  void same_space(const Subspace& other) const {
    if (!(field_ == other.field_) || d_ != other.d_) {
      throw SubspaceError("subspaces from different spaces (" + field_.name() + "^" + std::to_string(d_) + " vs " +
                          other.field_.name() + "^" + std::to_string(other.d_) + ")");
    }
  }

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.field_ == b.field_ && a.d_ == b.d_ && a.basis_ == b.basis_;
  }

  std::string to_string() const {
    std::string out = "span{";
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (i) out += ", ";
      out += '(';
      for (std::size_t j = 0; j < d_; ++j) {
        if (j) out += ',';
        out += basis_[i][j].to_string();
      }
      out += ')';
    }
    return out + "}";
  }

 private:
  Subspace(F field, std::size_t d, Matrix<element_type> rref_rows)
      : field_(std::move(field)), d_(d), basis_(std::move(rref_rows)) {}

  F field_;
  std::size_t d_;
  Matrix<element_type> basis_;
};

template <ExactField F>
Subspace<F> rref(const F& field, std::size_t d, Matrix<typename F::element_type> rows) {
  return Subspace<F>::from_rows(field, d, std::move(rows));
}

template <ExactField F>
Subspace<F> join(const Subspace<F>& u, const Subspace<F>& v) {
  u.same_space(v);
  if (u.is_zero() || v.is_full()) return v;
  if (v.is_zero() || u.is_full()) return u;
  auto rows = u.basis();
  rows.insert(rows.end(), v.basis().begin(), v.basis().end());
  return Subspace<F>::from_rows(u.field(), u.ambient_dim(), std::move(rows));
}

/// Intersection via the kernel of the stacked bases: c with
/// sum_k c_k u_k = sum_l c'_l v_l yields the common vector sum_k c_k u_k.
template <ExactField F>
Subspace<F> meet(const Subspace<F>& u, const Subspace<F>& v) {
  u.same_space(v);
  if (u.is_zero() || v.is_full()) return u;
  if (v.is_zero() || u.is_full()) return v;
  const auto& field = u.field();
  const std::size_t d = u.ambient_dim(), r = u.dim(), s = v.dim();
  Matrix<typename F::element_type> stacked_t(d, Row<typename F::element_type>(r + s, field.zero()));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < r; ++k) stacked_t[j][k] = u.basis()[k][j];
    for (std::size_t l = 0; l < s; ++l) stacked_t[j][r + l] = v.basis()[l][j];
  }
  auto kernel = detail::right_kernel(field, std::move(stacked_t), r + s);
  Matrix<typename F::element_type> common;
  common.reserve(kernel.size());
  for (const auto& c : kernel) {
    Row<typename F::element_type> w(d, field.zero());
    for (std::size_t k = 0; k < r; ++k) {
      if (c[k].is_zero()) continue;
      for (std::size_t j = 0; j < d; ++j) w[j] += c[k] * u.basis()[k][j];
    }
    common.push_back(std::move(w));
  }
  return Subspace<F>::from_rows(field, d, std::move(common));
}

// ---------------------------------------------------------------------------
// Forms

enum class Anisotropy { Anisotropic, Isotropic, Unknown };

template <ExactField F>
struct AnisotropyVerdict {
  Anisotropy status = Anisotropy::Unknown;
  Row<typename F::element_type> witness;  // set when Isotropic
  std::uint64_t vectors_scanned = 0;
};

/// Hermitian form <x, y> = sum_ij x_i G_ij conj(y_j). Only forms that passed
/// `check_anisotropic` can be used for orthocomplements.
template <ExactField F>
class Form {
 public:
  using element_type = typename F::element_type;

  Form(F field, Matrix<element_type> gram) : field_(std::move(field)), gram_(std::move(gram)) {
    const std::size_t d = gram_.size();
    for (std::size_t i = 0; i < d; ++i) {
      if (gram_[i].size() != d) throw SubspaceError("Gram matrix is not square");
      for (std::size_t j = 0; j < d; ++j) {
        if (!(gram_[i][j] == gram_[j][i].conj())) throw SubspaceError("Gram matrix is not hermitian");
      }
    }
  }

  /// Identity Gram matrix, i.e. the canonical scalar product.
  static Form canonical(const F& field, std::size_t d) {
    Matrix<element_type> g(d, Row<element_type>(d, field.zero()));
    for (std::size_t i = 0; i < d; ++i) g[i][i] = field.one();
    return Form(field, std::move(g));
  }

  const F& field() const { return field_; }
  std::size_t dim() const { return gram_.size(); }
  const Matrix<element_type>& gram() const { return gram_; }
  bool validated() const { return validated_; }

  element_type apply(const Row<element_type>& x, const Row<element_type>& y) const {
    element_type acc = field_.zero();
    for (std::size_t i = 0; i < dim(); ++i) {
      if (x[i].is_zero()) continue;
      for (std::size_t j = 0; j < dim(); ++j) acc += x[i] * gram_[i][j] * y[j].conj();
    }
    return acc;
  }

 private:
  template <ExactField G>
  friend AnisotropyVerdict<G> check_anisotropic(Form<G>& form, std::uint64_t budget);

  F field_;
  Matrix<element_type> gram_;
  bool validated_ = false;
};

namespace detail {

/// Leading principal minors of a hermitian matrix; real for Q and Q(i).
template <ExactField F>
std::vector<Rational> leading_minors(const F& field, const Matrix<typename F::element_type>& g) {
  std::vector<Rational> out;
  for (std::size_t k = 1; k <= g.size(); ++k) {
    Matrix<typename F::element_type> m(k);
    for (std::size_t i = 0; i < k; ++i) m[i].assign(g[i].begin(), g[i].begin() + static_cast<std::ptrdiff_t>(k));
    typename F::element_type det = field.one();
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t p = c;
      while (p < k && m[p][c].is_zero()) ++p;
      if (p == k) {
        det = field.zero();
        break;
      }
      if (p != c) {
        std::swap(m[p], m[c]);
        det = -det;
      }
      det *= m[c][c];
      for (std::size_t i = c + 1; i < k; ++i) {
        if (m[i][c].is_zero()) continue;
        auto f = m[i][c] / m[c][c];
        for (std::size_t j = c; j < k; ++j) m[i][j] -= f * m[c][j];
      }
    }
    if constexpr (std::is_same_v<F, GaussianField>) {
      out.push_back(det.re());
    } else {
      out.push_back(det);
    }
  }
  return out;
}

inline bool advance_counter(std::vector<long long>& digits, std::size_t from, long long lo, long long hi) {
  for (std::size_t i = from; i < digits.size(); ++i) {
    if (digits[i] < hi) {
      ++digits[i];
      return true;
    }
    digits[i] = lo;
  }
  return false;
}

}  // namespace detail

/// Decides anisotropy of `form` and marks it validated on success.
///
/// Q, Q(i): a definite Gram matrix (Sylvester's criterion) is anisotropic
/// since <x,x> is then a positive combination of norms. Otherwise integer
/// vectors in [-2,2]^d are searched for an isotropic witness while 5^d fits
/// the budget. GF(p): every projective point is scanned when p^d <= budget;
/// points are normalized to a leading 1 and the remaining coordinates count
/// up with the leftmost coordinate fastest.
template <ExactField F>
AnisotropyVerdict<F> check_anisotropic(Form<F>& form, std::uint64_t budget) {
  AnisotropyVerdict<F> verdict;
  const auto& field = form.field();
  const std::size_t d = form.dim();
  auto fits = [budget, d](std::uint64_t base) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < d; ++i) {
      if (total > budget / base) return false;
      total *= base;
    }
    return true;
  };

  if constexpr (is_formally_real_v<F>) {
    auto minors = detail::leading_minors(field, form.gram());
    bool pos = true, neg = true;
    for (std::size_t k = 0; k < minors.size(); ++k) {
      int s = minors[k].sign();
      pos = pos && s > 0;
      neg = neg && s == ((k % 2 == 0) ? -1 : 1);
    }
    if (pos || neg) {
      verdict.status = Anisotropy::Anisotropic;
      form.validated_ = true;
      return verdict;
    }
    if (d == 0 || !fits(5)) return verdict;
    std::vector<long long> digits(d, -2);
    do {
      bool nonzero = false;
      for (auto x : digits) nonzero = nonzero || x != 0;
      if (!nonzero) continue;
      Row<typename F::element_type> v;
      for (auto x : digits) v.push_back(field.from_int(x));
      ++verdict.vectors_scanned;
      if (form.apply(v, v).is_zero()) {
        verdict.status = Anisotropy::Isotropic;
        verdict.witness = std::move(v);
        return verdict;
      }
    } while (detail::advance_counter(digits, 0, -2, 2));
    return verdict;
  } else {
    const auto p = static_cast<long long>(field.modulus());
    if (!fits(static_cast<std::uint64_t>(p))) return verdict;
    for (std::size_t lead = 0; lead < d; ++lead) {
      std::vector<long long> digits(d, 0);
      digits[lead] = 1;
      do {
        Row<typename F::element_type> v;
        for (auto x : digits) v.push_back(field.from_int(x));
        ++verdict.vectors_scanned;
        if (form.apply(v, v).is_zero()) {
          verdict.status = Anisotropy::Isotropic;
          verdict.witness = std::move(v);
          return verdict;
        }
      } while (detail::advance_counter(digits, lead + 1, 0, p - 1));
    }
    verdict.status = Anisotropy::Anisotropic;
    form.validated_ = true;
    return verdict;
  }
}

/// {v : <v,u> = 0 for all u in U}.
template <ExactField F>
Subspace<F> ortho(const Subspace<F>& u, const Form<F>& form) {
  if (!(u.field() == form.field()) || u.ambient_dim() != form.dim()) {
    throw SubspaceError("form and subspace live in different spaces");
  }
  if (!form.validated()) throw SubspaceError("orthocomplement requires a validated anisotropic form");
  const auto& field = u.field();
  const std::size_t d = u.ambient_dim();
  if (u.is_zero()) return Subspace<F>::full(field, d);
  // <v,u> = sum_j v_j w_j with w_j = sum_i G_ji conj(u_i).
  Matrix<typename F::element_type> w;
  for (const auto& b : u.basis()) {
    Row<typename F::element_type> row(d, field.zero());
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < d; ++i) row[j] += form.gram()[j][i] * b[i].conj();
    }
    w.push_back(std::move(row));
  }
  return Subspace<F>::from_rows(field, d, detail::right_kernel(field, std::move(w), d));
}

/// Random k-dimensional subspace with small integer coordinates in [lo, hi]
/// (both real and imaginary parts for Q(i)), deterministic in `seed`.
template <ExactField F>
Subspace<F> random_subspace(const F& field, std::size_t d, std::size_t k, std::uint64_t seed, int lo = -3,
                            int hi = 3) {
  if (k > d) throw SubspaceError("random_subspace: k > d");
  if (k == 0) return Subspace<F>::zero(field, d);
  if (k == d) return Subspace<F>::full(field, d);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coord(lo, hi);
  for (;;) {
    Matrix<typename F::element_type> rows(k);
    for (auto& r : rows) {
      for (std::size_t j = 0; j < d; ++j) {
        if constexpr (std::is_same_v<F, GaussianField>) {
          int re = coord(rng);
          int im = coord(rng);
          r.push_back(GaussianRational(Rational(re), Rational(im)));
        } else {
          r.push_back(field.from_int(coord(rng)));
        }
      }
    }
    auto s = Subspace<F>::from_rows(field, d, std::move(rows));
    if (s.dim() == k) return s;
  }
}

/// L(F^d) with the canonical form, as an ortholattice model.
template <ExactField F>
class SubspaceLattice {
 public:
  using element_type = Subspace<F>;

  SubspaceLattice(F field, std::size_t d, std::uint64_t anisotropy_budget = 1U << 20)
      : SubspaceLattice(Form<F>::canonical(field, d), anisotropy_budget) {}

  explicit SubspaceLattice(Form<F> form, std::uint64_t anisotropy_budget = 1U << 20) : form_(std::move(form)) {
    if (!form_.validated()) {
      auto verdict = check_anisotropic(form_, anisotropy_budget);
      if (verdict.status != Anisotropy::Anisotropic) {
        throw SubspaceError(form_.field().name() + "^" + std::to_string(form_.dim()) +
                            ": form is not known to be anisotropic");
      }
    }
  }

  const F& field() const { return form_.field(); }
  std::size_t dim() const { return form_.dim(); }
  const Form<F>& form() const { return form_; }
  std::string name() const { return "L(" + field().name() + "^" + std::to_string(dim()) + ")"; }

  element_type bottom() const { return Subspace<F>::zero(field(), dim()); }
  element_type top() const { return Subspace<F>::full(field(), dim()); }
  element_type meet(const element_type& a, const element_type& b) const { return molwb::meet(a, b); }
  element_type join(const element_type& a, const element_type& b) const { return molwb::join(a, b); }
  element_type complement(const element_type& a) const { return ortho(a, form_); }
  bool equal(const element_type& a, const element_type& b) const { return a == b; }
  bool leq(const element_type& a, const element_type& b) const { return a.leq(b); }

 private:
  Form<F> form_;
};

/// Underlying real subspace of a Gaussian subspace: C^d = R^2d via
/// z = x + iy -> (x, y). Spanned by the images of b and i*b for each basis
/// row b. Preserves meet, join and orthocomplement.
inline Subspace<RationalField> realify(const Subspace<GaussianField>& u) {
  const std::size_t d = u.ambient_dim();
  Matrix<Rational> rows;
  for (const auto& b : u.basis()) {
    Row<Rational> r1, r2;
    for (const auto& z : b) r1.push_back(z.re());
    for (const auto& z : b) r1.push_back(z.im());
    for (const auto& z : b) r2.push_back(-z.im());
    for (const auto& z : b) r2.push_back(z.re());
    rows.push_back(std::move(r1));
    rows.push_back(std::move(r2));
  }
  return Subspace<RationalField>::from_rows(RationalField{}, 2 * d, std::move(rows));
}

}  // namespace molwb
