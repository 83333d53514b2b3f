#pragma once

// Ortholattice terms: immutable ASTs over variables, 0, 1, meet, join and
// orthocomplement, plus the text grammar used throughout the workbench.
//
//   identity := term "=" term
//   term     := meet ("+" meet)*
//   meet     := unary ("*" unary)*
//   unary    := atom ("'")*
//   atom     := var | "0" | "1" | "(" term ")"
//   var      := letter (letter | digit | "_")*

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace molwb {

enum class TermKind : std::uint8_t { Var, Zero, One, Meet, Join, Comp };

/// Thrown on malformed term or identity text; `position` is a byte offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

inline bool is_identifier(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name.front()))) return false;
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

/// Immutable term handle. Copies share structure, so generated terms are
/// DAGs in memory even though they denote trees.
class Term {
 public:
  static Term var(std::string name) {
    if (!is_identifier(name)) throw std::invalid_argument("invalid variable name '" + name + "'");
    return Term(std::make_shared<const Node>(Node{TermKind::Var, std::move(name), {}, {}}));
  }
  static Term zero() { return leaf(TermKind::Zero); }
  static Term one() { return leaf(TermKind::One); }
  static Term meet(Term lhs, Term rhs) { return binary(TermKind::Meet, std::move(lhs), std::move(rhs)); }
  static Term join(Term lhs, Term rhs) { return binary(TermKind::Join, std::move(lhs), std::move(rhs)); }
  static Term comp(Term child) {
    child.require();
    return Term(std::make_shared<const Node>(Node{TermKind::Comp, {}, std::move(child.node_), {}}));
  }

  TermKind kind() const { return node().kind; }
  bool is_var() const { return kind() == TermKind::Var; }
  const std::string& name() const { return node().name; }
  Term left() const { return Term(node().lhs); }
  Term right() const { return Term(node().rhs); }
  Term child() const { return Term(node().lhs); }

  /// Node identity, stable for the lifetime of any handle sharing the node.
  const void* id() const noexcept { return node_.get(); }
  bool empty() const noexcept { return node_ == nullptr; }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case TermKind::Var: return a.name() == b.name();
      case TermKind::Zero:
      case TermKind::One: return true;
      case TermKind::Comp: return a.child() == b.child();
      case TermKind::Meet:
      case TermKind::Join: return a.left() == b.left() && a.right() == b.right();
    }
    return false;
  }

 private:
  struct Node {
    TermKind kind;
    std::string name;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  Term() = default;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Term leaf(TermKind k) { return Term(std::make_shared<const Node>(Node{k, {}, {}, {}})); }
  static Term binary(TermKind k, Term a, Term b) {
    a.require();
    b.require();
    return Term(std::make_shared<const Node>(Node{k, {}, std::move(a.node_), std::move(b.node_)}));
  }
  void require() const {
    if (!node_) throw std::invalid_argument("empty term");
  }
  const Node& node() const {
    require();
    return *node_;
  }

  std::shared_ptr<const Node> node_;
};

inline Term operator*(const Term& a, const Term& b) { return Term::meet(a, b); }
inline Term operator+(const Term& a, const Term& b) { return Term::join(a, b); }
inline Term comp(const Term& t) { return Term::comp(t); }
inline Term var(std::string name) { return Term::var(std::move(name)); }

struct Identity {
  Term lhs;
  Term rhs;
  friend bool operator==(const Identity&, const Identity&) = default;
};

/// Left-nested meet / join of a nonempty list.
inline Term meet_all(const std::vector<Term>& ts) {
  if (ts.empty()) throw std::invalid_argument("meet of empty list");
  Term acc = ts.front();
  for (std::size_t i = 1; i < ts.size(); ++i) acc = acc * ts[i];
  return acc;
}

inline Term join_all(const std::vector<Term>& ts) {
  if (ts.empty()) throw std::invalid_argument("join of empty list");
  Term acc = ts.front();
  for (std::size_t i = 1; i < ts.size(); ++i) acc = acc + ts[i];
  return acc;
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence(TermKind k) {
  switch (k) {
    case TermKind::Join: return 1;
    case TermKind::Meet: return 2;
    default: return 3;
  }
}

inline void print_into(const Term& t, std::string& out) {
  auto operand = [&out](const Term& sub, int min_prec) {
    if (precedence(sub.kind()) < min_prec) {
      out += '(';
      print_into(sub, out);
      out += ')';
    } else {
      print_into(sub, out);
    }
  };
  switch (t.kind()) {
    case TermKind::Var: out += t.name(); break;
    case TermKind::Zero: out += '0'; break;
    case TermKind::One: out += '1'; break;
    case TermKind::Comp:
      operand(t.child(), 3);
      out += '\'';
      break;
    case TermKind::Meet:
      // Left association: a right operand of equal precedence needs brackets.
      operand(t.left(), 2);
      out += '*';
      operand(t.right(), 3);
      break;
    case TermKind::Join:
      operand(t.left(), 1);
      out += " + ";
      operand(t.right(), 2);
      break;
  }
}

}  // namespace detail

inline std::string print_term(const Term& t) {
  std::string out;
  detail::print_into(t, out);
  return out;
}

inline std::string print_identity(const Identity& id) {
  return print_term(id.lhs) + " = " + print_term(id.rhs);
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Term parse_join() {
    Term acc = parse_meet();
    while (accept('+')) acc = acc + parse_meet();
    return acc;
  }

  void expect_end() {
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  std::size_t position() const { return pos_; }

 private:
  Term parse_meet() {
    Term acc = parse_unary();
    while (accept('*')) acc = acc * parse_unary();
    return acc;
  }

  Term parse_unary() {
    Term t = parse_atom();
    while (accept('\'')) t = comp(t);
    return t;
  }

  Term parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '0') {
      ++pos_;
      return Term::zero();
    }
    if (c == '1') {
      ++pos_;
      return Term::one();
    }
    if (c == '(') {
      ++pos_;
      Term inner = parse_join();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      return Term::var(std::string(text_.substr(start, pos_ - start)));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Term parse_term(std::string_view text) {
  detail::Parser p(text);
  Term t = p.parse_join();
  p.expect_end();
  return t;
}

inline Identity parse_identity(std::string_view text) {
  detail::Parser p(text);
  Term lhs = p.parse_join();
  if (!p.accept('=')) p.fail("expected '='");
  Term rhs = p.parse_join();
  p.expect_end();
  return {std::move(lhs), std::move(rhs)};
}

// ---------------------------------------------------------------------------
// Structural utilities

/// Number of AST nodes counted as a tree (shared subterms count once per
/// occurrence). Saturates at UINT64_MAX.
inline std::uint64_t term_length(const Term& t) {
  std::unordered_map<const void*, std::uint64_t> memo;
  auto rec = [&memo](auto&& self, const Term& u) -> std::uint64_t {
    if (auto it = memo.find(u.id()); it != memo.end()) return it->second;
    std::uint64_t n = 1;
    auto add = [&n](std::uint64_t k) {
      n = (k > std::numeric_limits<std::uint64_t>::max() - n) ? std::numeric_limits<std::uint64_t>::max()
                                                               : n + k;
    };
    switch (u.kind()) {
      case TermKind::Comp: add(self(self, u.child())); break;
      case TermKind::Meet:
      case TermKind::Join:
        add(self(self, u.left()));
        add(self(self, u.right()));
        break;
      default: break;
    }
    memo.emplace(u.id(), n);
    return n;
  };
  return rec(rec, t);
}

/// Distinct variables in first-occurrence (left-to-right) order.
inline std::vector<std::string> vars_of(const Term& t) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::unordered_set<const void*> visited;
  auto rec = [&](auto&& self, const Term& u) -> void {
    if (!visited.insert(u.id()).second) return;
    switch (u.kind()) {
      case TermKind::Var:
        if (seen.insert(u.name()).second) out.push_back(u.name());
        break;
      case TermKind::Comp: self(self, u.child()); break;
      case TermKind::Meet:
      case TermKind::Join:
        self(self, u.left());
        self(self, u.right());
        break;
      default: break;
    }
  };
  rec(rec, t);
  return out;
}

inline std::vector<std::string> vars_of(const Identity& id) {
  std::vector<std::string> out = vars_of(id.lhs);
  std::unordered_set<std::string> seen(out.begin(), out.end());
  for (auto& v : vars_of(id.rhs)) {
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

/// Conjunction of identities as a single term T with: T = 1 under an
/// assignment in an MOL iff every identity holds there. Each identity t = s
/// contributes (t + s)' + t*s.
inline Term to_tautology(const std::vector<Identity>& ids) {
  if (ids.empty()) throw std::invalid_argument("to_tautology: empty identity list");
  std::vector<Term> parts;
  parts.reserve(ids.size());
  for (const auto& id : ids) parts.push_back(comp(id.lhs + id.rhs) + id.lhs * id.rhs);
  return meet_all(parts);
}

}  // namespace molwb
