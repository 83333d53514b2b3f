#pragma once

// Finite ortholattices given by tables.
//
// `FiniteModel` is raw data (names, order table, complement map, bounds).
// `validate_mol` checks every MOL axiom exhaustively and reports a witness
// per failing family. `Mol` is the validated form: it can only be built from
// a model whose report passes, and it carries memoized meet/join tables.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace molwb {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultModelCap = 512;

struct FiniteModel {
  std::vector<std::string> elements;
  std::vector<std::vector<bool>> leq;  // leq[i][j]: element i <= element j
  std::vector<std::size_t> ortho;
  std::size_t bottom = 0;
  std::size_t top = 0;

  std::size_t size() const { return elements.size(); }

  /// Throws ModelError if the tables are not even well-formed.
  void check_shape() const {
    const std::size_t n = elements.size();
    if (n == 0) throw ModelError("model has no elements");
    if (leq.size() != n) throw ModelError("leq table has wrong number of rows");
    for (const auto& row : leq) {
      if (row.size() != n) throw ModelError("leq table row has wrong length");
    }
    if (ortho.size() != n) throw ModelError("ortho map has wrong length");
    for (auto o : ortho) {
      if (o >= n) throw ModelError("ortho index out of range");
    }
    if (bottom >= n || top >= n) throw ModelError("bound index out of range");
  }
};

struct AxiomCheck {
  std::string family;
  bool passed = true;
  std::vector<std::size_t> witness;  // element indices of a violating tuple
};

struct MolReport {
  std::vector<AxiomCheck> checks;
  bool usable() const {
    return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; });
  }
  const AxiomCheck* find(const std::string& family) const {
    for (const auto& c : checks) {
      if (c.family == family) return &c;
    }
    return nullptr;
  }
};

namespace detail {

/// Meet/join lookup from the raw order table. A least upper bound must have
/// the fewest elements below it among all upper bounds, so one candidate is
/// picked by that count and then verified.
class OrderOps {
 public:
  explicit OrderOps(const FiniteModel& m) : m_(m), below_(m.size(), 0) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = 0; j < m.size(); ++j) below_[i] += m.leq[j][i] ? 1 : 0;
    }
  }

  std::optional<std::size_t> lub(std::size_t i, std::size_t j) const {
    const std::size_t n = m_.size();
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < n; ++k) {
      if (m_.leq[i][k] && m_.leq[j][k] && (!best || below_[k] < below_[*best])) best = k;
    }
    if (!best) return std::nullopt;
    for (std::size_t k = 0; k < n; ++k) {
      if (m_.leq[i][k] && m_.leq[j][k] && !m_.leq[*best][k]) return std::nullopt;
    }
    return best;
  }

  std::optional<std::size_t> glb(std::size_t i, std::size_t j) const {
    const std::size_t n = m_.size();
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < n; ++k) {
      if (m_.leq[k][i] && m_.leq[k][j] && (!best || below_[k] > below_[*best])) best = k;
    }
    if (!best) return std::nullopt;
    for (std::size_t k = 0; k < n; ++k) {
      if (m_.leq[k][i] && m_.leq[k][j] && !m_.leq[k][*best]) return std::nullopt;
    }
    return best;
  }

 private:
  const FiniteModel& m_;
  std::vector<std::size_t> below_;
};

}  // namespace detail

/// Exhaustive check of the MOL axioms. Later families are skipped (reported
/// as failed without witness) when the order is not a lattice.
inline MolReport validate_mol(const FiniteModel& m) {
  m.check_shape();
  const std::size_t n = m.size();
  MolReport report;
  report.checks.reserve(6);
  auto add = [&report](std::string family) -> AxiomCheck& {
    report.checks.push_back({std::move(family), true, {}});
    return report.checks.back();
  };

  auto& order = add("partial order");
  for (std::size_t i = 0; i < n && order.passed; ++i) {
    if (!m.leq[i][i]) order = {"partial order", false, {i}};
    for (std::size_t j = 0; j < n && order.passed; ++j) {
      if (i != j && m.leq[i][j] && m.leq[j][i]) order = {"partial order", false, {i, j}};
      for (std::size_t k = 0; k < n && order.passed; ++k) {
        if (m.leq[i][j] && m.leq[j][k] && !m.leq[i][k]) order = {"partial order", false, {i, j, k}};
      }
    }
  }

  auto& bounds = add("bounds");
  for (std::size_t i = 0; i < n && bounds.passed; ++i) {
    if (!m.leq[m.bottom][i] || !m.leq[i][m.top]) bounds = {"bounds", false, {i}};
  }

  std::vector<std::vector<std::size_t>> mt(n, std::vector<std::size_t>(n)), jn = mt;
  auto& lattice = add("lattice");
  const detail::OrderOps ops(m);
  for (std::size_t i = 0; i < n && lattice.passed; ++i) {
    for (std::size_t j = 0; j < n && lattice.passed; ++j) {
      auto g = ops.glb(i, j);
      auto l = ops.lub(i, j);
      if (!g || !l) {
        lattice = {"lattice", false, {i, j}};
      } else {
        mt[i][j] = *g;
        jn[i][j] = *l;
      }
    }
  }
  const bool is_lattice = order.passed && lattice.passed;

  auto& modular = add("modular law");
  if (!is_lattice) {
    modular.passed = false;
  } else {
    // x <= z  implies  x + y*z = (x + y)*z
    for (std::size_t x = 0; x < n && modular.passed; ++x) {
      for (std::size_t z = 0; z < n && modular.passed; ++z) {
        if (!m.leq[x][z]) continue;
        for (std::size_t y = 0; y < n && modular.passed; ++y) {
          if (jn[x][mt[y][z]] != mt[jn[x][y]][z]) modular = {"modular law", false, {x, y, z}};
        }
      }
    }
  }

  auto& involution = add("ortho involution");
  for (std::size_t i = 0; i < n && involution.passed; ++i) {
    if (m.ortho[m.ortho[i]] != i) involution = {"ortho involution", false, {i}};
  }

  auto& reversing = add("ortho order-reversing");
  for (std::size_t i = 0; i < n && reversing.passed; ++i) {
    for (std::size_t j = 0; j < n && reversing.passed; ++j) {
      if (m.leq[i][j] && !m.leq[m.ortho[j]][m.ortho[i]]) reversing = {"ortho order-reversing", false, {i, j}};
    }
  }

  auto& complement = add("complement laws");
  if (!is_lattice) {
    complement.passed = false;
  } else {
    for (std::size_t i = 0; i < n && complement.passed; ++i) {
      if (mt[i][m.ortho[i]] != m.bottom || jn[i][m.ortho[i]] != m.top) complement = {"complement laws", false, {i}};
    }
  }
  return report;
}

/// Validated modular ortholattice with operation tables.
class Mol {
 public:
  using element_type = std::size_t;

  static Mol from(FiniteModel m, std::size_t cap = kDefaultModelCap) {
    if (m.size() > cap) {
      throw ModelError("model has " + std::to_string(m.size()) + " elements, above the cap of " +
                       std::to_string(cap));
    }
    auto report = validate_mol(m);
    if (!report.usable()) {
      std::string failed;
      for (const auto& c : report.checks) {
        if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.family;
      }
      throw ModelError("not a modular ortholattice: " + failed);
    }
    return Mol(std::move(m));
  }

  const FiniteModel& data() const { return m_; }
  std::size_t size() const { return m_.size(); }
  const std::string& name_of(std::size_t i) const { return m_.elements.at(i); }
  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < m_.size(); ++i) {
      if (m_.elements[i] == name) return i;
    }
    throw ModelError("no element named '" + name + "'");
  }

  std::size_t bottom() const { return m_.bottom; }
  std::size_t top() const { return m_.top; }
  std::size_t meet(std::size_t a, std::size_t b) const { return meet_[a * n_ + b]; }
  std::size_t join(std::size_t a, std::size_t b) const { return join_[a * n_ + b]; }
  std::size_t complement(std::size_t a) const { return m_.ortho[a]; }
  bool equal(std::size_t a, std::size_t b) const { return a == b; }
  bool leq(std::size_t a, std::size_t b) const { return m_.leq[a][b]; }

 private:
  explicit Mol(FiniteModel m) : m_(std::move(m)), n_(m_.size()), meet_(n_ * n_), join_(n_ * n_) {
    const detail::OrderOps ops(m_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        meet_[i * n_ + j] = *ops.glb(i, j);
        join_[i * n_ + j] = *ops.lub(i, j);
      }
    }
  }

  FiniteModel m_;
  std::size_t n_;
  std::vector<std::size_t> meet_;
  std::vector<std::size_t> join_;
};

// ---------------------------------------------------------------------------
// Constructions

/// 2^n: subsets of {0..n-1} as bit strings, complement = set complement.
inline FiniteModel boolean_model(std::size_t n) {
  if (n > 16) throw ModelError("boolean(" + std::to_string(n) + ") is too large");
  const std::size_t size = std::size_t{1} << n;
  FiniteModel m;
  for (std::size_t s = 0; s < size; ++s) {
    std::string name;
    for (std::size_t b = 0; b < n; ++b) name += ((s >> b) & 1U) ? '1' : '0';
    m.elements.push_back(n == 0 ? "0" : name);
  }
  if (n == 1) m.elements = {"0", "1"};
  m.leq.assign(size, std::vector<bool>(size));
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = 0; b < size; ++b) m.leq[a][b] = (a & ~b) == 0;
    m.ortho.push_back(~a & (size - 1));
  }
  m.bottom = 0;
  m.top = size - 1;
  return m;
}

/// MO_n: 0, 1 and n pairs of atoms {a, a'}; height 2.
inline FiniteModel mo_model(std::size_t n) {
  FiniteModel m;
  m.elements = {"0", "1"};
  for (std::size_t k = 0; k < n; ++k) {
    std::string base = n <= 26 ? std::string(1, static_cast<char>('a' + k)) : "a" + std::to_string(k + 1);
    m.elements.push_back(base);
    m.elements.push_back(base + "'");
  }
  const std::size_t size = m.elements.size();
  m.leq.assign(size, std::vector<bool>(size, false));
  for (std::size_t i = 0; i < size; ++i) {
    m.leq[0][i] = true;
    m.leq[i][1] = true;
    m.leq[i][i] = true;
  }
  m.ortho = {1, 0};
  for (std::size_t k = 0; k < n; ++k) {
    m.ortho.push_back(2 + 2 * k + 1);
    m.ortho.push_back(2 + 2 * k);
  }
  m.bottom = 0;
  m.top = 1;
  return m;
}

/// The one-element (degenerate) ortholattice.
inline FiniteModel trivial_model() {
  FiniteModel m;
  m.elements = {"0"};
  m.leq = {{true}};
  m.ortho = {0};
  return m;
}

/// catalog("boolean", n) = 2^n, catalog("mo", n) = MO_n.
inline Mol catalog(const std::string& name, std::size_t parameter) {
  if (parameter < 1) throw ModelError("catalog parameter must be >= 1");
  if (name == "boolean") return Mol::from(boolean_model(parameter), std::size_t{1} << 16);
  if (name == "mo") return Mol::from(mo_model(parameter), 2 * parameter + 2);
  throw ModelError("unknown catalog model '" + name + "'");
}

inline Mol direct_product(const Mol& a, const Mol& b, std::size_t cap = kDefaultModelCap) {
  const std::size_t n1 = a.size(), n2 = b.size(), n = n1 * n2;
  if (n > cap) throw ModelError("product of size " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  FiniteModel m;
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) m.elements.push_back("(" + a.name_of(i) + "," + b.name_of(j) + ")");
  }
  m.leq.assign(n, std::vector<bool>(n));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) m.leq[x][y] = a.leq(x / n2, y / n2) && b.leq(x % n2, y % n2);
    m.ortho.push_back(a.complement(x / n2) * n2 + b.complement(x % n2));
  }
  m.bottom = a.bottom() * n2 + b.bottom();
  m.top = a.top() * n2 + b.top();
  return Mol::from(std::move(m), cap);
}

/// [b, c] with complement x -> (x' * c) + b.
inline Mol interval_mol(const Mol& m, std::size_t b, std::size_t c) {
  if (b >= m.size() || c >= m.size()) throw ModelError("interval bound out of range");
  if (!m.leq(b, c)) throw ModelError("interval [" + m.name_of(b) + ", " + m.name_of(c) + "] is empty: b is not <= c");
  std::vector<std::size_t> members;
  std::vector<std::size_t> local(m.size(), SIZE_MAX);
  for (std::size_t x = 0; x < m.size(); ++x) {
    if (m.leq(b, x) && m.leq(x, c)) {
      local[x] = members.size();
      members.push_back(x);
    }
  }
  FiniteModel out;
  const std::size_t k = members.size();
  out.leq.assign(k, std::vector<bool>(k));
  for (std::size_t i = 0; i < k; ++i) {
    out.elements.push_back(m.name_of(members[i]));
    for (std::size_t j = 0; j < k; ++j) out.leq[i][j] = m.leq(members[i], members[j]);
    out.ortho.push_back(local[m.join(m.meet(m.complement(members[i]), c), b)]);
  }
  out.bottom = local[b];
  out.top = local[c];
  return Mol::from(std::move(out), m.size());
}

/// Length of the longest chain from bottom to top.
inline std::size_t height(const Mol& m) {
  const std::size_t n = m.size();
  // Elements sorted by number of lower bounds is a linear extension.
  std::vector<std::size_t> order(n), below(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = i;
    for (std::size_t j = 0; j < n; ++j) below[i] += m.leq(j, i) ? 1 : 0;
  }
  std::sort(order.begin(), order.end(), [&below](std::size_t x, std::size_t y) { return below[x] < below[y]; });
  std::vector<std::size_t> longest(n, 0);
  for (auto x : order) {
    for (std::size_t y = 0; y < n; ++y) {
      if (y != x && m.leq(y, x)) longest[x] = std::max(longest[x], longest[y] + 1);
    }
  }
  return longest[m.top()];
}

/// Models with at most `max_size` elements from the catalog families:
/// boolean(1..4) and mo(1..7) for the default of 16.
inline std::vector<std::pair<std::string, Mol>> small_catalog(std::size_t max_size = 16) {
  std::vector<std::pair<std::string, Mol>> out;
  for (std::size_t n = 1; (std::size_t{1} << n) <= max_size; ++n) {
    out.emplace_back("boolean(" + std::to_string(n) + ")", catalog("boolean", n));
  }
  for (std::size_t n = 1; 2 * n + 2 <= max_size; ++n) {
    out.emplace_back("mo(" + std::to_string(n) + ")", catalog("mo", n));
  }
  return out;
}

}  // namespace molwb
