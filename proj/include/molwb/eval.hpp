#pragma once

// Evaluation of terms in arbitrary ortholattice models.
//
// A model is anything satisfying `OrthoModel`: finite table models use
// element indices, subspace lattices use Subspace values. Terms are compiled
// to a straight-line program over hash-consed nodes, so structurally equal
// subterms (common in generated identities) are evaluated once.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "molwb/term.hpp"

namespace molwb {

template <class M>
concept OrthoModel = requires(const M& m, const typename M::element_type& a) {
  typename M::element_type;
  { m.bottom() } -> std::convertible_to<typename M::element_type>;
  { m.top() } -> std::convertible_to<typename M::element_type>;
  { m.meet(a, a) } -> std::convertible_to<typename M::element_type>;
  { m.join(a, a) } -> std::convertible_to<typename M::element_type>;
  { m.complement(a) } -> std::convertible_to<typename M::element_type>;
  { m.equal(a, a) } -> std::same_as<bool>;
};

class UnboundVariable : public std::runtime_error {
 public:
  explicit UnboundVariable(const std::string& name)
      : std::runtime_error("unbound variable '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Variable -> model element.
template <class E>
using Assignment = std::map<std::string, E>;

/// Straight-line program computing one or more terms. Slots are ordered so
/// that every instruction only reads earlier slots.
class TermProgram {
 public:
  struct Instr {
    TermKind kind;
    std::uint32_t a = 0;  // variable index for Var, operand slot otherwise
    std::uint32_t b = 0;
  };

  explicit TermProgram(const std::vector<Term>& roots, std::vector<std::string> var_order = {})
      : vars_(std::move(var_order)) {
    for (std::size_t i = 0; i < vars_.size(); ++i) var_index_.emplace(vars_[i], static_cast<std::uint32_t>(i));
    for (const auto& r : roots) roots_.push_back(compile(r));
    node_memo_.clear();
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<Instr>& instructions() const { return code_; }
  const std::vector<std::uint32_t>& roots() const { return roots_; }
  std::size_t size() const { return code_.size(); }

  /// Evaluates every slot; `values[i]` is the element for vars()[i].
  template <OrthoModel M>
  std::vector<typename M::element_type> run_all(const M& model,
                                                std::span<const typename M::element_type> values) const {
    if (values.size() != vars_.size()) throw std::invalid_argument("TermProgram: wrong number of values");
    std::vector<typename M::element_type> slots;
    slots.reserve(code_.size());
    for (const auto& in : code_) {
      switch (in.kind) {
        case TermKind::Var: slots.push_back(values[in.a]); break;
        case TermKind::Zero: slots.push_back(model.bottom()); break;
        case TermKind::One: slots.push_back(model.top()); break;
        case TermKind::Comp: slots.push_back(model.complement(slots[in.a])); break;
        case TermKind::Meet: slots.push_back(model.meet(slots[in.a], slots[in.b])); break;
        case TermKind::Join: slots.push_back(model.join(slots[in.a], slots[in.b])); break;
      }
    }
    return slots;
  }

  template <OrthoModel M>
  std::vector<typename M::element_type> run(const M& model, std::span<const typename M::element_type> values) const {
    auto slots = run_all(model, values);
    std::vector<typename M::element_type> out;
    out.reserve(roots_.size());
    for (auto r : roots_) out.push_back(slots[r]);
    return out;
  }

 private:
  std::uint32_t compile(const Term& t) {
    if (auto it = node_memo_.find(t.id()); it != node_memo_.end()) return it->second;
    Instr in{t.kind()};
    switch (t.kind()) {
      case TermKind::Var: {
        auto [it, fresh] = var_index_.emplace(t.name(), static_cast<std::uint32_t>(vars_.size()));
        if (fresh) vars_.push_back(t.name());
        in.a = it->second;
        break;
      }
      case TermKind::Comp: in.a = compile(t.child()); break;
      case TermKind::Meet:
      case TermKind::Join:
        in.a = compile(t.left());
        in.b = compile(t.right());
        break;
      default: break;
    }
    auto key = std::make_tuple(static_cast<int>(in.kind), in.a, in.b);
    std::uint32_t slot;
    if (auto it = cons_.find(key); it != cons_.end()) {
      slot = it->second;
    } else {
      slot = static_cast<std::uint32_t>(code_.size());
      code_.push_back(in);
      cons_.emplace(key, slot);
    }
    node_memo_.emplace(t.id(), slot);
    return slot;
  }

  std::vector<std::string> vars_;
  std::unordered_map<std::string, std::uint32_t> var_index_;
  std::vector<Instr> code_;
  std::vector<std::uint32_t> roots_;
  std::map<std::tuple<int, std::uint32_t, std::uint32_t>, std::uint32_t> cons_;
  std::unordered_map<const void*, std::uint32_t> node_memo_;
};

namespace detail {

template <class E>
std::vector<E> bind(const std::vector<std::string>& vars, const Assignment<E>& a) {
  std::vector<E> values;
  values.reserve(vars.size());
  for (const auto& v : vars) {
    auto it = a.find(v);
    if (it == a.end()) throw UnboundVariable(v);
    values.push_back(it->second);
  }
  return values;
}

}  // namespace detail

template <OrthoModel M>
typename M::element_type eval_term(const Term& t, const Assignment<typename M::element_type>& a, const M& model) {
  TermProgram prog({t});
  auto values = detail::bind(prog.vars(), a);
  return prog.run(model, std::span<const typename M::element_type>(values)).front();
}

/// Both sides of an identity under one assignment.
template <OrthoModel M>
std::pair<typename M::element_type, typename M::element_type> eval_identity(
    const Identity& id, const Assignment<typename M::element_type>& a, const M& model) {
  TermProgram prog({id.lhs, id.rhs});
  auto values = detail::bind(prog.vars(), a);
  auto out = prog.run(model, std::span<const typename M::element_type>(values));
  return {std::move(out[0]), std::move(out[1])};
}

}  // namespace molwb
