#pragma once

// Reduction of "identity fails in L(R^d)" to real polynomial feasibility.
//
// Every subspace is represented by its orthogonal projection P (P = P^T,
// P^2 = P). Complement is I - P and needs no variables. A join J of A and B
// is a fresh projection with
//     J A = A,   J B = B,   J = A X + B Y
// for free witness matrices X, Y, which pins range(J) = range(A) + range(B).
// Meets are rewritten as (a' + b')'. The identity t = s is first turned into
// the tautology T = (t + s)' + t*s, and a witness v with v^T v = 1 and
// v^T (I - T) v = 1 certifies T != 1, i.e. that the identity fails.
//
// All constraints have integer coefficients.

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "molwb/eval.hpp"
#include "molwb/subspace.hpp"
#include "molwb/term.hpp"

namespace molwb {

class FeasError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Sparse integer polynomials

struct Monomial {
  std::int64_t coef = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> exps;  // (var, exponent), sorted by var

  std::uint32_t degree() const {
    std::uint32_t s = 0;
    for (const auto& [v, e] : exps) s += e;
    return s;
  }
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Canonical form: like terms combined, no zero coefficients, sorted by
/// degree (descending) and then by exponent vector.
struct Polynomial {
  std::vector<Monomial> terms;

  static Polynomial constant(std::int64_t c) {
    Polynomial p;
    if (c != 0) p.terms.push_back({c, {}});
    return p;
  }
  static Polynomial variable(std::uint32_t v, std::int64_t coef = 1) {
    Polynomial p;
    if (coef != 0) p.terms.push_back({coef, {{v, 1}}});
    return p;
  }

  bool is_zero() const { return terms.empty(); }

  void canonicalize() {
    std::sort(terms.begin(), terms.end(), [](const Monomial& a, const Monomial& b) {
      auto da = a.degree(), db = b.degree();
      if (da != db) return da > db;
      return a.exps < b.exps;
    });
    std::vector<Monomial> out;
    for (auto& m : terms) {
      if (!out.empty() && out.back().exps == m.exps) {
        out.back().coef += m.coef;
      } else {
        out.push_back(std::move(m));
      }
    }
    std::erase_if(out, [](const Monomial& m) { return m.coef == 0; });
    terms = std::move(out);
  }

  Polynomial& operator+=(const Polynomial& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    canonicalize();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (auto m : o.terms) {
      m.coef = -m.coef;
      terms.push_back(std::move(m));
    }
    canonicalize();
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& x : a.terms) {
      for (const auto& y : b.terms) {
        Monomial m{x.coef * y.coef, {}};
        std::size_t i = 0, j = 0;
        while (i < x.exps.size() || j < y.exps.size()) {
          if (j == y.exps.size() || (i < x.exps.size() && x.exps[i].first < y.exps[j].first)) {
            m.exps.push_back(x.exps[i++]);
          } else if (i == x.exps.size() || y.exps[j].first < x.exps[i].first) {
            m.exps.push_back(y.exps[j++]);
          } else {
            m.exps.emplace_back(x.exps[i].first, x.exps[i].second + y.exps[j].second);
            ++i;
            ++j;
          }
        }
        out.terms.push_back(std::move(m));
      }
    }
    out.canonicalize();
    return out;
  }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  double evaluate(const std::vector<double>& x) const {
    double s = 0;
    for (const auto& m : terms) {
      double t = static_cast<double>(m.coef);
      for (const auto& [v, e] : m.exps) t *= std::pow(x[v], static_cast<double>(e));
      s += t;
    }
    return s;
  }
};

// ---------------------------------------------------------------------------
// The system

/// Affine matrix expression constant * I + sign * P[block]; block < 0 means
/// no projection term.
struct MatRef {
  int constant = 0;  // 0 or 1
  int sign = 0;      // -1, 0, +1
  int block = -1;
  friend bool operator==(const MatRef&, const MatRef&) = default;
  friend auto operator<=>(const MatRef&, const MatRef&) = default;
};

/// Encoding DAG node: a leaf projection for a term variable, or a join.
struct EncNode {
  int id = 0;
  std::string leaf;  // nonempty for leaves
  MatRef a, b;       // join operands
  friend bool operator==(const EncNode&, const EncNode&) = default;
};

struct PolySystem {
  std::size_t d = 0;
  std::vector<std::string> vars;
  std::vector<Polynomial> constraints;
  std::vector<int> provenance;  // constraint -> node id
  std::vector<EncNode> nodes;   // topological order
  int root = -1;

  std::size_t var_index(const std::string& name) const {
    auto it = std::find(vars.begin(), vars.end(), name);
    if (it == vars.end()) throw FeasError("unknown variable '" + name + "'");
    return static_cast<std::size_t>(it - vars.begin());
  }
  std::size_t block_offset(int node) const { return var_index("p_" + std::to_string(node) + "_0_0"); }
  friend bool operator==(const PolySystem&, const PolySystem&) = default;
};

/// Squared Frobenius bound on the join witnesses (X, Y) of one node.
inline std::int64_t witness_bound(std::size_t d) { return 64 * static_cast<std::int64_t>(d * d); }

namespace detail {

class Encoder {
 public:
  explicit Encoder(std::size_t d) { sys_.d = d; }

  PolySystem finish(const Term& tautology) {
    MatRef root = encode(tautology);
    if (root.block < 0 || root.sign != 1 || root.constant != 0) {
      throw FeasError("tautology term did not encode to a projection block");
    }
    sys_.root = root.block;
    // v^T (I - T) v - 1 = 0
    const std::size_t d = sys_.d;
    std::vector<std::uint32_t> v;
    for (std::size_t i = 0; i < d; ++i) v.push_back(new_var("v_" + std::to_string(i)));
    Polynomial q = Polynomial::constant(-1);
    MatRef rest{1, -1, root.block};
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        q += Polynomial::variable(v[i]) * entry(rest, i, j) * Polynomial::variable(v[j]);
      }
    }
    add(std::move(q), root.block);
    // |v| = 1. Without it v can grow while I - T shrinks, and an infeasible
    // system has residual infimum 0.
    Polynomial unit = Polynomial::constant(-1);
    for (std::size_t i = 0; i < d; ++i) unit += Polynomial::variable(v[i]) * Polynomial::variable(v[i]);
    add(std::move(unit), root.block);
    return std::move(sys_);
  }

 private:
  MatRef encode(const Term& t) {
    if (auto it = memo_.find(t.id()); it != memo_.end()) return it->second;
    MatRef out;
    switch (t.kind()) {
      case TermKind::Zero: out = {0, 0, -1}; break;
      case TermKind::One: out = {1, 0, -1}; break;
      case TermKind::Var: {
        if (auto it = leaves_.find(t.name()); it != leaves_.end()) {
          out = it->second;
        } else {
          int id = next_id_++;
          sys_.nodes.push_back({id, t.name(), {}, {}});
          projection_block(id);
          out = {0, 1, id};
          leaves_.emplace(t.name(), out);
        }
        break;
      }
      case TermKind::Comp: out = complement(encode(t.child())); break;
      case TermKind::Join: out = join(encode(t.left()), encode(t.right())); break;
      case TermKind::Meet: out = complement(join(complement(encode(t.left())), complement(encode(t.right())))); break;
    }
    memo_.emplace(t.id(), out);
    return out;
  }

  static MatRef complement(MatRef m) { return {1 - m.constant, -m.sign, m.block}; }

  MatRef join(MatRef a, MatRef b) {
    // Joins with constants simplify without variables.
    auto is_zero = [](const MatRef& m) { return m.constant == 0 && m.sign == 0; };
    auto is_one = [](const MatRef& m) { return m.constant == 1 && m.sign == 0; };
    if (is_one(a) || is_one(b)) return {1, 0, -1};
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    auto key = std::make_pair(a, b);
    if (auto it = joins_.find(key); it != joins_.end()) return it->second;
    int id = next_id_++;
    sys_.nodes.push_back({id, {}, a, b});
    projection_block(id);
    const std::size_t d = sys_.d;
    const std::string sid = std::to_string(id);
    auto xs = matrix_vars("x_" + sid);
    auto ys = matrix_vars("y_" + sid);
    MatRef j{0, 1, id};
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        Polynomial ja, jb, span = entry(j, r, c);
        for (std::size_t k = 0; k < d; ++k) {
          ja += entry(j, r, k) * entry(a, k, c);
          jb += entry(j, r, k) * entry(b, k, c);
          span -= entry(a, r, k) * Polynomial::variable(xs[k * d + c]);
          span -= entry(b, r, k) * Polynomial::variable(ys[k * d + c]);
        }
        add(ja - entry(a, r, c), id);
        add(jb - entry(b, r, c), id);
        add(std::move(span), id);
      }
    }
    // |X|^2 + |Y|^2 + s^2 = bound. Unbounded X, Y can reach outside
    // range(A) + range(B) through near-null directions of an approximate
    // projection, which again makes the residual infimum 0 without a solution.
    std::uint32_t slack = new_var("s_" + sid);
    Polynomial norm = Polynomial::variable(slack) * Polynomial::variable(slack) -
                      Polynomial::constant(witness_bound(d));
    for (std::size_t k = 0; k < d * d; ++k) {
      norm += Polynomial::variable(xs[k]) * Polynomial::variable(xs[k]);
      norm += Polynomial::variable(ys[k]) * Polynomial::variable(ys[k]);
    }
    add(std::move(norm), id);
    joins_.emplace(key, j);
    return j;
  }

  /// P = P^T and P^2 = P for block `id`.
  void projection_block(int id) {
    auto p = matrix_vars("p_" + std::to_string(id));
    const std::size_t d = sys_.d;
    MatRef m{0, 1, id};
    block_base_[id] = p.front();
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        add(Polynomial::variable(p[i * d + j]) - Polynomial::variable(p[j * d + i]), id);
      }
    }
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        Polynomial sq;
        for (std::size_t k = 0; k < d; ++k) sq += entry(m, i, k) * entry(m, k, j);
        add(sq - entry(m, i, j), id);
      }
    }
  }

  Polynomial entry(const MatRef& m, std::size_t i, std::size_t j) const {
    Polynomial out = Polynomial::constant(i == j ? m.constant : 0);
    if (m.sign != 0) out += Polynomial::variable(block_base_.at(m.block) + static_cast<std::uint32_t>(i * sys_.d + j), m.sign);
    return out;
  }

  std::vector<std::uint32_t> matrix_vars(const std::string& prefix) {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < sys_.d; ++i) {
      for (std::size_t j = 0; j < sys_.d; ++j) {
        out.push_back(new_var(prefix + "_" + std::to_string(i) + "_" + std::to_string(j)));
      }
    }
    return out;
  }

  std::uint32_t new_var(std::string name) {
    sys_.vars.push_back(std::move(name));
    return static_cast<std::uint32_t>(sys_.vars.size() - 1);
  }

  void add(Polynomial p, int node) {
    p.canonicalize();
    if (p.is_zero()) return;
    sys_.constraints.push_back(std::move(p));
    sys_.provenance.push_back(node);
  }

  PolySystem sys_;
  int next_id_ = 0;
  std::unordered_map<const void*, MatRef> memo_;
  std::map<std::string, MatRef> leaves_;
  std::map<std::pair<MatRef, MatRef>, MatRef> joins_;
  std::map<int, std::uint32_t> block_base_;
};

}  // namespace detail

/// Polynomial system whose real solutions are refutations of `id` in L(R^d).
inline PolySystem encode(const Identity& id, std::size_t d) {
  if (d == 0) throw FeasError("encode: dimension must be >= 1");
  detail::Encoder enc(d);
  return enc.finish(to_tautology({id}));
}

/// Identities over Q(i) at dimension d are searched at real dimension 2d:
/// L(C^d) embeds into L(R^2d).
inline PolySystem encode_complex(const Identity& id, std::size_t d) { return encode(id, 2 * d); }

// ---------------------------------------------------------------------------
// Residual and gradient

class ResidualFunction {
 public:
  explicit ResidualFunction(const PolySystem& s) : n_(s.vars.size()) {
    for (const auto& p : s.constraints) {
      Poly cp;
      for (const auto& m : p.terms) {
        CMono cm{static_cast<double>(m.coef), {}};
        for (const auto& [v, e] : m.exps) cm.factors.emplace_back(v, e);
        cp.push_back(std::move(cm));
      }
      polys_.push_back(std::move(cp));
    }
  }

  std::size_t size() const { return n_; }

  /// Sum of squared constraint values.
  double value(const std::vector<double>& x) const {
    check(x);
    double r = 0;
    for (const auto& p : polys_) {
      double v = eval(p, x);
      r += v * v;
    }
    return r;
  }

  /// Constraint values r and their Jacobian (rows = constraints).
  void values_and_jacobian(const std::vector<double>& x, Eigen::VectorXd& r, Eigen::MatrixXd& jac) const {
    check(x);
    r.resize(static_cast<Eigen::Index>(polys_.size()));
    jac.setZero(static_cast<Eigen::Index>(polys_.size()), static_cast<Eigen::Index>(n_));
    for (std::size_t c = 0; c < polys_.size(); ++c) {
      const auto row = static_cast<Eigen::Index>(c);
      r(row) = eval(polys_[c], x);
      for (const auto& m : polys_[c]) {
        for (std::size_t f = 0; f < m.factors.size(); ++f) {
          jac(row, m.factors[f].first) += partial(m, f, x);
        }
      }
    }
  }

  /// Residual and its exact gradient.
  double value_and_gradient(const std::vector<double>& x, std::vector<double>& g) const {
    check(x);
    g.assign(n_, 0.0);
    double r = 0;
    for (const auto& p : polys_) {
      double v = eval(p, x);
      r += v * v;
      if (v == 0) continue;
      for (const auto& m : p) {
        for (std::size_t f = 0; f < m.factors.size(); ++f) g[m.factors[f].first] += 2.0 * v * partial(m, f, x);
      }
    }
    return r;
  }

 private:
  struct CMono {
    double coef;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> factors;
  };
  using Poly = std::vector<CMono>;

  static double partial(const CMono& m, std::size_t f, const std::vector<double>& x) {
    const auto [var, e] = m.factors[f];
    double d = m.coef * e * (e == 1 ? 1.0 : std::pow(x[var], e - 1.0));
    for (std::size_t o = 0; o < m.factors.size(); ++o) {
      if (o != f) d *= std::pow(x[m.factors[o].first], static_cast<double>(m.factors[o].second));
    }
    return d;
  }

  static double eval(const Poly& p, const std::vector<double>& x) {
    double s = 0;
    for (const auto& m : p) {
      double t = m.coef;
      for (const auto& [v, e] : m.factors) t *= e == 1 ? x[v] : std::pow(x[v], static_cast<double>(e));
      s += t;
    }
    return s;
  }
  void check(const std::vector<double>& x) const {
    if (x.size() != n_) {
      throw FeasError("point has " + std::to_string(x.size()) + " coordinates, system has " + std::to_string(n_));
    }
  }

  std::size_t n_;
  std::vector<Poly> polys_;
};

inline double residual(const PolySystem& s, const std::vector<double>& point) {
  return ResidualFunction(s).value(point);
}

inline std::vector<double> gradient(const PolySystem& s, const std::vector<double>& point) {
  std::vector<double> g;
  ResidualFunction(s).value_and_gradient(point, g);
  return g;
}

// ---------------------------------------------------------------------------
// Decoding

/// Best rational approximation with denominator <= max_den (continued
/// fractions).
inline Rational rationalize(double x, std::int64_t max_den = 10000) {
  if (!std::isfinite(x)) throw FeasError("cannot rationalize a non-finite value");
  const bool neg = x < 0;
  double r = std::fabs(x);
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    double a_f = std::floor(r);
    if (a_f > 1e15) break;
    auto a = static_cast<std::int64_t>(a_f);
    std::int64_t p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) {
      // Semiconvergent check against the last convergent.
      std::int64_t k = (max_den - q0) / q1;
      std::int64_t ps = k * p1 + p0, qs = k * q1 + q0;
      double err_conv = std::fabs(static_cast<double>(p1) / static_cast<double>(q1) - std::fabs(x));
      double err_semi = std::fabs(static_cast<double>(ps) / static_cast<double>(qs) - std::fabs(x));
      if (k > 0 && err_semi < err_conv) {
        p1 = ps;
        q1 = qs;
      }
      break;
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = r - a_f;
    if (frac < 1e-12) break;
    r = 1.0 / frac;
  }
  return Rational(neg ? -p1 : p1, q1);
}

inline Eigen::MatrixXd block_matrix(const PolySystem& s, const std::vector<double>& point, int node) {
  const std::size_t d = s.d;
  const std::size_t base = s.block_offset(node);
  Eigen::MatrixXd m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = point[base + i * d + j];
  }
  return m;
}

/// Column space of a near-projection as an exact rational subspace:
/// eigenvalues cut at 0.5, eigenvectors row-reduced in floating point and
/// rounded entrywise.
inline Subspace<RationalField> decode_projection(const Eigen::MatrixXd& p, std::int64_t max_den = 10000) {
  const auto d = static_cast<std::size_t>(p.rows());
  Eigen::MatrixXd sym = 0.5 * (p + p.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  std::vector<Eigen::VectorXd> vecs;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (es.eigenvalues()(k) > 0.5) vecs.push_back(es.eigenvectors().col(k));
  }
  const std::size_t r = vecs.size();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < r; ++i) rows.row(static_cast<Eigen::Index>(i)) = vecs[i].transpose();
  // Gauss-Jordan with partial pivoting.
  Eigen::Index lead = 0;
  for (Eigen::Index c = 0; c < rows.cols() && lead < rows.rows(); ++c) {
    Eigen::Index piv;
    double best = rows.col(c).segment(lead, rows.rows() - lead).cwiseAbs().maxCoeff(&piv);
    if (best < 1e-8) continue;
    piv += lead;
    rows.row(lead).swap(rows.row(piv));
    rows.row(lead) /= rows(lead, c);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      if (i != lead) rows.row(i) -= rows(i, c) * rows.row(lead);
    }
    ++lead;
  }
  Matrix<Rational> exact;
  for (Eigen::Index i = 0; i < lead; ++i) {
    Row<Rational> row;
    for (Eigen::Index j = 0; j < rows.cols(); ++j) row.push_back(rationalize(rows(i, j), max_den));
    exact.push_back(std::move(row));
  }
  return Subspace<RationalField>::from_rows(RationalField{}, d, std::move(exact));
}

/// Turns a numeric solution into an exact assignment in L(Q^d) and keeps it
/// only if it falsifies `id` exactly.
inline std::optional<Assignment<Subspace<RationalField>>> rationalize_and_verify(const std::vector<double>& point,
                                                                                  const PolySystem& s,
                                                                                  const Identity& id,
                                                                                  double tol = 1e-9,
                                                                                  std::int64_t max_den = 10000) {
  double res = residual(s, point);
  if (!(res < tol)) {
    throw FeasError("rationalize_and_verify: residual " + std::to_string(res) + " is not below tolerance");
  }
  Assignment<Subspace<RationalField>> a;
  for (const auto& n : s.nodes) {
    if (!n.leaf.empty()) a.emplace(n.leaf, decode_projection(block_matrix(s, point, n.id), max_den));
  }
  SubspaceLattice<RationalField> lat(RationalField{}, s.d);
  for (const auto& v : vars_of(id)) {
    if (!a.count(v)) a.emplace(v, lat.bottom());
  }
  auto [lhs, rhs] = eval_identity(id, a, lat);
  if (lhs == rhs) return std::nullopt;
  return a;
}

/// Orthogonal projection onto an exact rational subspace.
inline Eigen::MatrixXd projection_of(const Subspace<RationalField>& u) {
  const auto d = static_cast<Eigen::Index>(u.ambient_dim());
  if (u.is_zero()) return Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd b(static_cast<Eigen::Index>(u.dim()), d);
  for (std::size_t i = 0; i < u.dim(); ++i) {
    for (std::size_t j = 0; j < u.ambient_dim(); ++j) {
      b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = u.basis()[i][j].to_double();
    }
  }
  return b.transpose() * (b * b.transpose()).inverse() * b;
}

/// Completes leaf projections to a full point of the system: join blocks,
/// their witnesses X, Y and the vector v.
inline std::vector<double> inject(const PolySystem& s, const std::map<std::string, Eigen::MatrixXd>& leaves) {
  const auto d = static_cast<Eigen::Index>(s.d);
  std::vector<double> x(s.vars.size(), 0.0);
  std::map<int, Eigen::MatrixXd> blocks;
  auto value = [&](const MatRef& m) -> Eigen::MatrixXd {
    Eigen::MatrixXd out = static_cast<double>(m.constant) * Eigen::MatrixXd::Identity(d, d);
    if (m.sign != 0) out += static_cast<double>(m.sign) * blocks.at(m.block);
    return out;
  };
  auto store = [&](const std::string& prefix, int id, const Eigen::MatrixXd& m) {
    std::size_t base = s.var_index(prefix + "_" + std::to_string(id) + "_0_0");
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) x[base + static_cast<std::size_t>(i * d + j)] = m(i, j);
    }
  };
  for (const auto& n : s.nodes) {
    Eigen::MatrixXd p;
    if (!n.leaf.empty()) {
      auto it = leaves.find(n.leaf);
      if (it == leaves.end()) throw FeasError("inject: no projection for '" + n.leaf + "'");
      p = it->second;
    } else {
      Eigen::MatrixXd a = value(n.a), b = value(n.b);
      Eigen::MatrixXd ab(d, 2 * d);
      ab << a, b;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(ab, Eigen::ComputeFullU);
      Eigen::Index rank = 0;
      for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) rank += svd.singularValues()(k) > 1e-9 ? 1 : 0;
      Eigen::MatrixXd q = svd.matrixU().leftCols(rank);
      p = q * q.transpose();
      Eigen::MatrixXd xy = ab.completeOrthogonalDecomposition().solve(p);
      store("x", n.id, xy.topRows(d));
      store("y", n.id, xy.bottomRows(d));
      double room = static_cast<double>(witness_bound(s.d)) - xy.squaredNorm();
      x[s.var_index("s_" + std::to_string(n.id))] = std::sqrt(std::max(0.0, room));
    }
    blocks[n.id] = p;
    store("p", n.id, p);
  }
  Eigen::MatrixXd rest = Eigen::MatrixXd::Identity(d, d) - blocks.at(s.root);
  Eigen::Index col = 0;
  double norm = rest.colwise().norm().maxCoeff(&col);
  if (norm > 1e-9) {
    Eigen::VectorXd v = rest.col(col) / norm;
    std::size_t base = s.var_index("v_0");
    for (Eigen::Index i = 0; i < d; ++i) x[base + static_cast<std::size_t>(i)] = v(i);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Penalty solver

/// Uniform: every scalar uniform in [-1, 1]. Propagated: leaf blocks are
/// random projections (eigenvalues of a uniform [-1, 1] symmetric matrix cut
/// at 0.5) and everything else is filled in consistently by `inject`, so
/// descent starts on the constraint manifold minus the witness equations.
enum class StartMode { Uniform, Propagated };

struct SolveParams {
  double tol = 1e-9;
  std::size_t restarts = 32;
  std::size_t iterations = 5000;
  double backtrack = 0.5;
  double armijo = 1e-4;
  std::size_t polish_iterations = 200;  // Levenberg-Marquardt steps after descent; 0 disables
  StartMode start = StartMode::Propagated;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct SolveOutcome {
  bool solved = false;  // residual < tol reached
  std::vector<double> point;
  double residual = 0;
  std::size_t restart = 0;
  std::size_t iterations = 0;
};

namespace detail {

/// Levenberg-Marquardt on the constraint vector. First-order descent
/// stalls on the ill-conditioned valleys of these systems; a few damped
/// Gauss-Newton steps finish the job.
inline double polish(const ResidualFunction& f, std::vector<double>& x, const SolveParams& prm, std::size_t& it) {
  const auto n = static_cast<Eigen::Index>(f.size());
  Eigen::VectorXd r, rn;
  Eigen::MatrixXd jac, jn;
  f.values_and_jacobian(x, r, jac);
  double fx = r.squaredNorm();
  double lambda = 1e-3;
  std::vector<double> xn(x.size());
  for (std::size_t k = 0; k < prm.polish_iterations && fx >= prm.tol; ++k, ++it) {
    Eigen::MatrixXd h = jac.transpose() * jac;
    Eigen::VectorXd g = jac.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 30 && !improved; ++tries) {
      Eigen::MatrixXd a = h;
      a.diagonal().array() += lambda;
      Eigen::VectorXd step = a.ldlt().solve(-g);
      for (Eigen::Index i = 0; i < n; ++i) xn[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + step(i);
      f.values_and_jacobian(xn, rn, jn);
      double fn = rn.squaredNorm();
      if (std::isfinite(fn) && fn < fx) {
        x.swap(xn);
        r.swap(rn);
        jac.swap(jn);
        fx = fn;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!improved) break;
  }
  return fx;
}

/// Gradient descent with Barzilai-Borwein trial steps and Armijo
/// backtracking from a random start in [-1, 1]^n.
inline std::vector<double> start_point(const PolySystem& s, StartMode mode, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> x(s.vars.size());
  for (auto& xi : x) xi = unif(rng);
  if (mode == StartMode::Uniform) return x;
  const auto d = static_cast<Eigen::Index>(s.d);
  std::map<std::string, Eigen::MatrixXd> leaves;
  for (const auto& n : s.nodes) {
    if (n.leaf.empty()) continue;
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = unif(rng);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
      if (es.eigenvalues()(k) > 0.5) p += es.eigenvectors().col(k) * es.eigenvectors().col(k).transpose();
    }
    leaves.emplace(n.leaf, p);
  }
  auto full = inject(s, leaves);
  // inject leaves v = 0 when the identity holds here; keep the random v then.
  const std::size_t v0 = s.var_index("v_0");
  bool v_zero = true;
  for (std::size_t i = 0; i < s.d; ++i) v_zero = v_zero && full[v0 + i] == 0.0;
  if (v_zero) {
    for (std::size_t i = 0; i < s.d; ++i) full[v0 + i] = x[v0 + i];
  }
  return full;
}

inline SolveOutcome descend(const PolySystem& s, const ResidualFunction& f, const SolveParams& prm,
                            std::size_t restart) {
  const std::size_t n = f.size();
  std::mt19937_64 rng(prm.seed + restart);
  std::vector<double> x = start_point(s, prm.start, rng), g, xn(n), gn;
  double fx = f.value_and_gradient(x, g);
  double step = 1.0;
  SolveOutcome out{false, x, fx, restart, 0};
  std::size_t it = 0;
  for (; it < prm.iterations && fx >= prm.tol; ++it) {
    double gg = 0;
    for (double v : g) gg += v * v;
    if (gg == 0) break;
    double a = step;
    double fn = 0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] - a * g[i];
      fn = f.value_and_gradient(xn, gn);
      if (fn <= fx - prm.armijo * a * gg) {
        accepted = true;
        break;
      }
      a *= prm.backtrack;
    }
    if (!accepted) break;
    // Barzilai-Borwein estimate for the next trial step.
    double ss = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double si = xn[i] - x[i], yi = gn[i] - g[i];
      ss += si * si;
      sy += si * yi;
    }
    step = sy > 0 ? std::clamp(ss / sy, 1e-10, 1e6) : std::min(2.0 * a, 1e6);
    x.swap(xn);
    g.swap(gn);
    fx = fn;
  }
  if (fx >= prm.tol && prm.polish_iterations > 0) fx = polish(f, x, prm, it);
  out.point = x;
  out.residual = fx;
  out.iterations = it;
  out.solved = fx < prm.tol;
  return out;
}

}  // namespace detail

/// Multi-restart descent on the residual. Returns the first restart (by
/// index) that reaches tol, or the best point found.
inline SolveOutcome penalty_solve(const PolySystem& s, const SolveParams& prm = {}) {
  ResidualFunction f(s);
  std::vector<std::optional<SolveOutcome>> results(prm.restarts);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_success{prm.restarts};
  auto worker = [&] {
    for (std::size_t r = next++; r < prm.restarts; r = next++) {
      if (r > first_success.load()) break;
      results[r] = detail::descend(s, f, prm, r);
      if (results[r]->solved) {
        std::size_t cur = first_success.load();
        while (r < cur && !first_success.compare_exchange_weak(cur, r)) {
        }
      }
    }
  };
  unsigned threads = std::max(1U, std::min<unsigned>(prm.threads, static_cast<unsigned>(std::max<std::size_t>(1, prm.restarts))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::optional<SolveOutcome> best;
  for (auto& r : results) {
    if (!r) continue;
    if (r->solved) return *r;
    if (!best || r->residual < best->residual) best = r;
  }
  if (!best) return SolveOutcome{false, std::vector<double>(s.vars.size(), 0.0), residual(s, std::vector<double>(s.vars.size(), 0.0)), 0, 0};
  return *best;
}

// ---------------------------------------------------------------------------
// Emission

/// {"d", "vars", "constraints": [{"monomials": [{"coef", "exps"}], "node"}],
///  "root", "nodes"}.
inline std::string emit_json(const PolySystem& s) {
  using ojson = nlohmann::ordered_json;
  ojson j;
  j["d"] = s.d;
  j["vars"] = s.vars;
  ojson cons = ojson::array();
  for (std::size_t c = 0; c < s.constraints.size(); ++c) {
    ojson monos = ojson::array();
    for (const auto& m : s.constraints[c].terms) {
      ojson exps = ojson::object();
      for (const auto& [v, e] : m.exps) exps[s.vars[v]] = e;
      monos.push_back({{"coef", m.coef}, {"exps", exps}});
    }
    cons.push_back({{"monomials", monos}, {"node", s.provenance[c]}});
  }
  j["constraints"] = cons;
  j["root"] = s.root;
  ojson nodes = ojson::array();
  auto ref = [](const MatRef& m) { return ojson::array({m.constant, m.sign, m.block}); };
  for (const auto& n : s.nodes) {
    if (!n.leaf.empty()) {
      nodes.push_back({{"id", n.id}, {"leaf", n.leaf}});
    } else {
      nodes.push_back({{"id", n.id}, {"join", ojson::array({ref(n.a), ref(n.b)})}});
    }
  }
  j["nodes"] = nodes;
  return j.dump();
}

inline PolySystem parse_json(const std::string& text) {
  PolySystem s;
  try {
    auto j = nlohmann::json::parse(text);
    s.d = j.at("d").get<std::size_t>();
    s.vars = j.at("vars").get<std::vector<std::string>>();
    std::unordered_map<std::string, std::uint32_t> index;
    for (std::size_t i = 0; i < s.vars.size(); ++i) index.emplace(s.vars[i], static_cast<std::uint32_t>(i));
    for (const auto& c : j.at("constraints")) {
      Polynomial p;
      for (const auto& m : c.at("monomials")) {
        Monomial mono{m.at("coef").get<std::int64_t>(), {}};
        for (const auto& [name, e] : m.at("exps").items()) {
          auto it = index.find(name);
          if (it == index.end()) throw FeasError("constraint uses undeclared variable '" + name + "'");
          auto exp = e.get<std::int64_t>();
          if (exp < 0) throw FeasError("negative exponent");
          mono.exps.emplace_back(it->second, static_cast<std::uint32_t>(exp));
        }
        std::sort(mono.exps.begin(), mono.exps.end());
        p.terms.push_back(std::move(mono));
      }
      p.canonicalize();
      s.constraints.push_back(std::move(p));
      s.provenance.push_back(c.value("node", -1));
    }
    s.root = j.at("root").get<int>();
    if (j.contains("nodes")) {
      for (const auto& n : j.at("nodes")) {
        EncNode node;
        node.id = n.at("id").get<int>();
        if (n.contains("leaf")) {
          node.leaf = n.at("leaf").get<std::string>();
        } else {
          const auto& jn = n.at("join");
          node.a = {jn.at(0).at(0).get<int>(), jn.at(0).at(1).get<int>(), jn.at(0).at(2).get<int>()};
          node.b = {jn.at(1).at(0).get<int>(), jn.at(1).at(1).get<int>(), jn.at(1).at(2).get<int>()};
        }
        s.nodes.push_back(std::move(node));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FeasError(std::string("malformed system JSON: ") + e.what());
  }
  return s;
}

namespace detail {

inline std::string smt_monomial(const Monomial& m, const std::vector<std::string>& vars, bool absolute) {
  std::int64_t c = absolute ? (m.coef < 0 ? -m.coef : m.coef) : m.coef;
  std::vector<std::string> factors;
  if (c != 1 || m.exps.empty()) factors.push_back(c < 0 ? "(- " + std::to_string(-c) + ")" : std::to_string(c));
  for (const auto& [v, e] : m.exps) {
    for (std::uint32_t k = 0; k < e; ++k) factors.push_back(vars[v]);
  }
  if (factors.size() == 1) return factors.front();
  std::string out = "(*";
  for (const auto& f : factors) out += " " + f;
  return out + ")";
}

}  // namespace detail

/// Polynomial as an SMT-LIB2 term, folded left to right with binary + / -.
inline std::string smt_polynomial(const Polynomial& p, const std::vector<std::string>& vars) {
  if (p.terms.empty()) return "0";
  std::string acc = detail::smt_monomial(p.terms.front(), vars, false);
  for (std::size_t i = 1; i < p.terms.size(); ++i) {
    const auto& m = p.terms[i];
    acc = std::string(m.coef < 0 ? "(- " : "(+ ") + acc + " " + detail::smt_monomial(m, vars, true) + ")";
  }
  return acc;
}

inline std::string emit_smt2(const PolySystem& s) {
  std::string out = "(set-logic QF_NRA)\n";
  for (const auto& v : s.vars) out += "(declare-const " + v + " Real)\n";
  for (const auto& c : s.constraints) out += "(assert (= " + smt_polynomial(c, s.vars) + " 0))\n";
  out += "(check-sat)\n(exit)\n";
  return out;
}

// ---------------------------------------------------------------------------
// SMT-LIB2 syntax check for the fragment emitted above

struct Smt2Check {
  bool ok = false;
  std::string error;
  std::size_t declarations = 0;
  std::size_t assertions = 0;
};

namespace detail {

struct SExpr {
  std::string atom;  // empty for lists
  std::vector<SExpr> items;
  bool is_list() const { return atom.empty(); }
};

class SExprReader {
 public:
  explicit SExprReader(const std::string& text) : t_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    for (skip(); i_ < t_.size(); skip()) out.push_back(read());
    return out;
  }

 private:
  void skip() {
    while (i_ < t_.size()) {
      if (std::isspace(static_cast<unsigned char>(t_[i_]))) {
        ++i_;
      } else if (t_[i_] == ';') {
        while (i_ < t_.size() && t_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }
  SExpr read() {
    skip();
    if (i_ >= t_.size()) throw FeasError("unexpected end of input");
    if (t_[i_] == ')') throw FeasError("unbalanced ')' at offset " + std::to_string(i_));
    SExpr e;
    if (t_[i_] == '(') {
      ++i_;
      for (skip(); i_ < t_.size() && t_[i_] != ')'; skip()) e.items.push_back(read());
      if (i_ >= t_.size()) throw FeasError("unterminated list");
      ++i_;
      return e;
    }
    std::size_t start = i_;
    while (i_ < t_.size() && !std::isspace(static_cast<unsigned char>(t_[i_])) && t_[i_] != '(' && t_[i_] != ')' &&
           t_[i_] != ';') {
      ++i_;
    }
    e.atom = t_.substr(start, i_ - start);
    return e;
  }

  const std::string& t_;
  std::size_t i_ = 0;
};

inline bool is_numeral(const std::string& a) {
  if (a.empty()) return false;
  std::size_t dot = 0;
  for (char c : a) {
    if (c == '.') {
      ++dot;
    } else if (!std::isdigit(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return dot <= 1 && a.front() != '.' && a.back() != '.' && (a.size() == 1 || a.front() != '0' || a[1] == '.');
}

inline bool is_symbol(const std::string& a) {
  if (a.empty() || std::isdigit(static_cast<unsigned char>(a.front()))) return false;
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  for (char c : a) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && extra.find(c) == std::string::npos) return false;
  }
  return true;
}

enum class Sort { Real, Bool };

inline Sort sort_of(const SExpr& e, const std::map<std::string, Sort>& consts) {
  if (!e.is_list()) {
    if (is_numeral(e.atom)) return Sort::Real;
    if (e.atom == "true" || e.atom == "false") return Sort::Bool;
    auto it = consts.find(e.atom);
    if (it == consts.end()) throw FeasError("undeclared symbol '" + e.atom + "'");
    return it->second;
  }
  if (e.items.empty() || e.items.front().is_list()) throw FeasError("malformed application");
  const std::string& op = e.items.front().atom;
  const std::size_t argc = e.items.size() - 1;
  auto args_of = [&](Sort want) {
    for (std::size_t k = 1; k < e.items.size(); ++k) {
      if (sort_of(e.items[k], consts) != want) throw FeasError("ill-sorted argument to '" + op + "'");
    }
  };
  if (op == "+" || op == "*" || op == "/") {
    if (argc < 2) throw FeasError("'" + op + "' needs at least two arguments");
    args_of(Sort::Real);
    return Sort::Real;
  }
  if (op == "-") {
    if (argc < 1) throw FeasError("'-' needs an argument");
    args_of(Sort::Real);
    return Sort::Real;
  }
  if (op == "=" || op == "<=" || op == ">=" || op == "<" || op == ">") {
    if (argc < 2) throw FeasError("'" + op + "' needs at least two arguments");
    args_of(Sort::Real);
    return Sort::Bool;
  }
  if (op == "and" || op == "or" || op == "not") {
    if (argc < 1 || (op == "not" && argc != 1)) throw FeasError("wrong arity for '" + op + "'");
    args_of(Sort::Bool);
    return Sort::Bool;
  }
  throw FeasError("unknown function '" + op + "'");
}

}  // namespace detail

/// Checks the QF_NRA fragment: set-logic / set-option / set-info,
/// declare-const and 0-ary declare-fun of sort Real, assert of Bool terms
/// over + - * / = < <= > >= and or not, check-sat, get-model, exit.
inline Smt2Check check_smt2(const std::string& text) {
  Smt2Check out;
  try {
    std::map<std::string, detail::Sort> consts;
    for (const auto& cmd : detail::SExprReader(text).read_all()) {
      if (!cmd.is_list() || cmd.items.empty() || cmd.items.front().is_list()) {
        throw FeasError("top level must be a command");
      }
      const std::string& head = cmd.items.front().atom;
      const auto n = cmd.items.size();
      if (head == "set-logic") {
        if (n != 2 || cmd.items[1].atom != "QF_NRA") throw FeasError("expected (set-logic QF_NRA)");
      } else if (head == "set-option" || head == "set-info") {
        if (n < 2) throw FeasError("malformed " + head);
      } else if (head == "declare-const" || head == "declare-fun") {
        const bool fun = head == "declare-fun";
        if (n != (fun ? 4U : 3U)) throw FeasError("malformed " + head);
        const auto& name = cmd.items[1].atom;
        if (!detail::is_symbol(name)) throw FeasError("bad symbol '" + name + "'");
        if (fun && !(cmd.items[2].is_list() && cmd.items[2].items.empty())) {
          throw FeasError("only 0-ary declare-fun is supported");
        }
        if (cmd.items[n - 1].atom != "Real") throw FeasError("sort of '" + name + "' must be Real");
        if (!consts.emplace(name, detail::Sort::Real).second) throw FeasError("'" + name + "' declared twice");
        ++out.declarations;
      } else if (head == "assert") {
        if (n != 2) throw FeasError("assert takes one term");
        if (detail::sort_of(cmd.items[1], consts) != detail::Sort::Bool) throw FeasError("asserted term is not Bool");
        ++out.assertions;
      } else if (head == "check-sat" || head == "get-model" || head == "exit") {
        if (n != 1) throw FeasError("'" + head + "' takes no arguments");
      } else {
        throw FeasError("unsupported command '" + head + "'");
      }
    }
    out.ok = true;
  } catch (const FeasError& e) {
    out.error = e.what();
  }
  return out;
}

enum class EmitFormat { Json, Smt };

inline std::string emit(const PolySystem& s, EmitFormat f) { return f == EmitFormat::Json ? emit_json(s) : emit_smt2(s); }

}  // namespace molwb
