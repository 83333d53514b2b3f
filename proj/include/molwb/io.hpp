#pragma once

// File formats shared by the CLI and the tests.
//
// Model file:      {"elements":[...], "leq":[[0/1,...],...], "ortho":[i,...],
//                   "bottom":i, "top":j}
// Assignment file: {"v":1, "field":"Q", "d":3,
//                   "assignment":{"x":[["1","0","0"]], "y":[]}}
//                  or, for finite models,
//                  {"v":1, "model":"mo3", "assignment":{"x":"a"}}
// Identity list:   one identity per line; blank lines and '#' comments skipped.

#include <cctype>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "json.hpp"
#include "molwb/eval.hpp"
#include "molwb/field.hpp"
#include "molwb/finite_model.hpp"
#include "molwb/subspace.hpp"
#include "molwb/term.hpp"

namespace molwb {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using json = nlohmann::ordered_json;

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << text;
}

inline json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(what + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Models

inline json model_to_json(const FiniteModel& m) {
  json j;
  j["elements"] = m.elements;
  json leq = json::array();
  for (const auto& row : m.leq) {
    json r = json::array();
    for (bool b : row) r.push_back(b ? 1 : 0);
    leq.push_back(std::move(r));
  }
  j["leq"] = std::move(leq);
  j["ortho"] = m.ortho;
  j["bottom"] = m.bottom;
  j["top"] = m.top;
  return j;
}

inline FiniteModel model_from_json(const json& j) {
  FiniteModel m;
  try {
    m.elements = j.at("elements").get<std::vector<std::string>>();
    for (const auto& row : j.at("leq")) {
      std::vector<bool> r;
      for (const auto& b : row) {
        int v = b.is_boolean() ? (b.get<bool>() ? 1 : 0) : b.get<int>();
        if (v != 0 && v != 1) throw FormatError("leq entries must be 0 or 1");
        r.push_back(v == 1);
      }
      m.leq.push_back(std::move(r));
    }
    m.ortho = j.at("ortho").get<std::vector<std::size_t>>();
    m.bottom = j.at("bottom").get<std::size_t>();
    m.top = j.at("top").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model: ") + e.what());
  }
  try {
    m.check_shape();
  } catch (const ModelError& e) {
    throw FormatError(std::string("malformed model: ") + e.what());
  }
  return m;
}

/// "mo3" or "mo(3)", "boolean2", "trivial", or "<a>x<b>" for a product.
inline std::optional<Mol> catalog_by_name(const std::string& spec) {
  if (auto x = spec.find('x'); x != std::string::npos && x > 0 && x + 1 < spec.size()) {
    auto a = catalog_by_name(spec.substr(0, x));
    auto b = catalog_by_name(spec.substr(x + 1));
    if (a && b) return direct_product(*a, *b);
    return std::nullopt;
  }
  if (spec == "trivial") return Mol::from(trivial_model());
  if (auto open = spec.find('('); open != std::string::npos && spec.back() == ')') {
    return catalog_by_name(spec.substr(0, open) + spec.substr(open + 1, spec.size() - open - 2));
  }
  std::size_t digits = spec.size();
  while (digits > 0 && std::isdigit(static_cast<unsigned char>(spec[digits - 1]))) --digits;
  if (digits == 0 || digits == spec.size()) return std::nullopt;
  std::string name = spec.substr(0, digits);
  if (name != "mo" && name != "boolean") return std::nullopt;
  return catalog(name, std::stoul(spec.substr(digits)));
}

/// Catalog name or path to a model file.
inline Mol load_model(const std::string& spec, std::size_t cap = kDefaultModelCap) {
  if (auto m = catalog_by_name(spec)) return *m;
  return Mol::from(model_from_json(parse_json_text(read_text_file(spec), spec)), cap);
}

inline json report_to_json(const MolReport& r, const FiniteModel& m) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json w = json::array();
    for (auto i : c.witness) w.push_back(i < m.size() ? m.elements[i] : std::to_string(i));
    checks.push_back({{"family", c.family}, {"passed", c.passed}, {"witness", w}});
  }
  return {{"usable", r.usable()}, {"checks", checks}};
}

// ---------------------------------------------------------------------------
// Assignments

/// Field elements as they appear in assignment files: residues without the
/// " mod p" suffix (the header names the field).
template <class E>
std::string element_text(const E& e) {
  if constexpr (std::is_same_v<E, Residue>) {
    return std::to_string(e.value());
  } else {
    return e.to_string();
  }
}

template <ExactField F>
json subspace_assignment_to_json(const F& field, std::size_t d, const Assignment<Subspace<F>>& a) {
  json j;
  j["v"] = 1;
  j["field"] = field.name();
  j["d"] = d;
  json vals = json::object();
  for (const auto& [name, u] : a) {
    json rows = json::array();
    for (const auto& row : u.basis()) {
      json r = json::array();
      for (const auto& e : row) r.push_back(element_text(e));
      rows.push_back(std::move(r));
    }
    vals[name] = std::move(rows);
  }
  j["assignment"] = std::move(vals);
  return j;
}

template <ExactField F>
Assignment<Subspace<F>> subspace_assignment_from_json(const F& field, const json& j) {
  Assignment<Subspace<F>> a;
  try {
    if (j.contains("field") && j.at("field").get<std::string>() != field.name()) {
      throw FormatError("assignment is over " + j.at("field").get<std::string>() + ", expected " + field.name());
    }
    const auto d = j.at("d").get<std::size_t>();
    for (const auto& [name, rows] : j.at("assignment").items()) {
      Matrix<typename F::element_type> m;
      for (const auto& row : rows) {
        Row<typename F::element_type> r;
        for (const auto& e : row) r.push_back(field.parse(e.is_string() ? e.template get<std::string>() : e.dump()));
        m.push_back(std::move(r));
      }
      a.emplace(name, Subspace<F>::from_rows(field, d, std::move(m)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed assignment: ") + e.what());
  }
  return a;
}

inline json mol_assignment_to_json(const Mol& m, const std::string& model_name, const Assignment<std::size_t>& a) {
  json vals = json::object();
  for (const auto& [name, idx] : a) vals[name] = m.name_of(idx);
  return {{"v", 1}, {"model", model_name}, {"assignment", vals}};
}

inline Assignment<std::size_t> mol_assignment_from_json(const Mol& m, const json& j) {
  Assignment<std::size_t> a;
  try {
    for (const auto& [name, e] : j.at("assignment").items()) a.emplace(name, m.index_of(e.get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed assignment: ") + e.what());
  }
  return a;
}

// ---------------------------------------------------------------------------
// Identity lists

inline std::vector<Identity> parse_identity_list(const std::string& text) {
  std::vector<Identity> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(parse_identity(line));
    } catch (const ParseError& e) {
      throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace molwb
