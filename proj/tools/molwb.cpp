// molwb: command-line front end.
//
// Exit codes: 0 = holds / valid up to budget / nothing found,
//             1 = refuted / witness found / validation failed,
//             2 = usage or input error.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "molwb/molwb.hpp"

namespace {

using molwb::json;

struct Common {
  bool json_out = false;
  bool timing = false;
  unsigned threads = 0;
};

unsigned resolve_threads(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("MOLWB_THREADS")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError("MOLWB_THREADS", std::string("invalid value '") + env + "'");
  }
  return 1;
}

void emit(const Common& c, const json& report, const std::string& text) {
  if (c.json_out) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

template <class Fn>
auto with_field(const std::string& tag, Fn&& fn) {
  if (tag == "Q") return fn(molwb::RationalField{});
  if (tag == "Qi") return fn(molwb::GaussianField{});
  if (tag.size() > 2 && tag.rfind("GF", 0) == 0) {
    std::uint64_t p = 0;
    try {
      p = std::stoull(tag.substr(2));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--field", "bad prime field '" + tag + "'");
    }
    return fn(molwb::PrimeField(p));
  }
  throw CLI::ValidationError("--field", "expected Q, Qi or GF<p>, got '" + tag + "'");
}

template <class F>
std::string assignment_text(const molwb::Assignment<molwb::Subspace<F>>& a) {
  std::string out;
  for (const auto& [name, u] : a) out += "  " + name + " = " + u.to_string() + "\n";
  return out;
}

std::string assignment_text(const molwb::Mol& m, const molwb::Assignment<std::size_t>& a) {
  std::string out;
  for (const auto& [name, i] : a) out += "  " + name + " = " + m.name_of(i) + "\n";
  return out;
}

template <class F>
json witness_json(const F& field, const molwb::Witness<F>& w) {
  json j = molwb::subspace_assignment_to_json(field, w.d, w.assignment);
  j["trial"] = w.trial;
  if (w.lhs) j["lhs"] = w.lhs->to_string();
  if (w.rhs) j["rhs"] = w.rhs->to_string();
  return j;
}

// ---------------------------------------------------------------------------

struct ParseArgs {
  std::string text;
  bool term = false;
};

int run_parse(const ParseArgs& a, const Common& c) {
  json r{{"v", 1}, {"command", "parse"}};
  std::ostringstream out;
  if (a.term || a.text.find('=') == std::string::npos) {
    auto t = molwb::parse_term(a.text);
    r["term"] = molwb::print_term(t);
    r["vars"] = molwb::vars_of(t);
    r["length"] = molwb::term_length(t);
    out << molwb::print_term(t) << "\n";
  } else {
    auto id = molwb::parse_identity(a.text);
    r["identity"] = molwb::print_identity(id);
    r["vars"] = molwb::vars_of(id);
    r["length"] = molwb::term_length(id.lhs) + molwb::term_length(id.rhs);
    r["tautology"] = molwb::print_term(molwb::to_tautology({id})) + " = 1";
    out << molwb::print_identity(id) << "\n";
  }
  emit(c, r, out.str());
  return 0;
}

struct GenArgs {
  std::string family;
  std::vector<std::string> params;
};

std::size_t param(const GenArgs& a, std::size_t i) {
  if (i >= a.params.size()) throw CLI::ValidationError("gen", a.family + ": missing parameter " + std::to_string(i + 1));
  try {
    return std::stoul(a.params[i]);
  } catch (const std::exception&) {
    throw CLI::ValidationError("gen", "parameter '" + a.params[i] + "' is not a natural number");
  }
}

int run_gen(const GenArgs& a, const Common& c) {
  json r{{"v", 1}, {"command", "gen"}, {"family", a.family}};
  std::ostringstream out;
  auto put_identity = [&](const molwb::Identity& id) {
    r["identity"] = molwb::print_identity(id);
    out << molwb::print_identity(id) << "\n";
  };
  if (a.family == "delta-dist") {
    put_identity(molwb::delta_distributive(param(a, 0)));
  } else if (a.family == "delta-diamond") {
    put_identity(molwb::delta_diamond(param(a, 0)));
  } else if (a.family == "sigma") {
    put_identity(molwb::sigma(param(a, 0), param(a, 1)));
  } else if (a.family == "diamond") {
    auto dt = molwb::diamond_terms(param(a, 0));
    json terms = json::array();
    for (std::size_t i = 0; i < dt.terms.size(); ++i) {
      terms.push_back(molwb::print_term(dt.terms[i]));
      out << "t" << i << " = " << molwb::print_term(dt.terms[i]) << "\n";
    }
    r["terms"] = terms;
  } else if (a.family == "s") {
    auto t = molwb::s_term(param(a, 0), a.params.size() > 1 ? a.params[1] : std::string("x"));
    r["term"] = molwb::print_term(t);
    out << molwb::print_term(t) << "\n";
  } else if (a.family == "tautology") {
    if (a.params.empty()) throw CLI::ValidationError("gen", "tautology: missing identity");
    std::vector<molwb::Identity> ids;
    for (const auto& p : a.params) ids.push_back(molwb::parse_identity(p));
    put_identity(molwb::Identity{molwb::to_tautology(ids), molwb::Term::one()});
  } else {
    throw CLI::ValidationError("gen", "unknown family '" + a.family +
                                          "' (delta-dist, delta-diamond, sigma, diamond, s, tautology)");
  }
  emit(c, r, out.str());
  return 0;
}

struct CheckArgs {
  std::string identity;
  std::string model;
  std::string field;
  std::string assignment;
  std::vector<std::string> subset;
  std::uint64_t cap = molwb::kDefaultBruteForceCap;
  std::string witness_out;
};

int check_subspace_assignment(const CheckArgs& a, const Common& c, const molwb::Identity& id) {
  auto doc = molwb::parse_json_text(molwb::read_text_file(a.assignment), a.assignment);
  std::string tag = a.field.empty() ? doc.value("field", std::string("Q")) : a.field;
  return with_field(tag, [&](auto field) {
    using F = decltype(field);
    auto asg = molwb::subspace_assignment_from_json(field, doc);
    molwb::SubspaceLattice<F> lat(field, doc.at("d").get<std::size_t>());
    auto [lhs, rhs] = molwb::eval_identity(id, asg, lat);
    bool holds = lhs == rhs;
    json r{{"v", 1},           {"command", "check"},        {"identity", molwb::print_identity(id)},
           {"model", lat.name()}, {"holds", holds},         {"lhs", lhs.to_string()},
           {"rhs", rhs.to_string()}};
    std::ostringstream out;
    out << (holds ? "holds" : "fails") << " under the given assignment in " << lat.name() << "\n"
        << "  lhs = " << lhs.to_string() << "\n  rhs = " << rhs.to_string() << "\n";
    emit(c, r, out.str());
    return holds ? 0 : 1;
  });
}

int run_check(const CheckArgs& a, const Common& c) {
  auto id = molwb::parse_identity(a.identity);
  if (a.model.empty()) {
    if (a.assignment.empty()) throw CLI::ValidationError("check", "need --model or --assignment");
    return check_subspace_assignment(a, c, id);
  }
  auto m = molwb::load_model(a.model);
  json r{{"v", 1}, {"command", "check"}, {"identity", molwb::print_identity(id)}, {"model", a.model}};
  std::ostringstream out;
  if (!a.assignment.empty()) {
    auto doc = molwb::parse_json_text(molwb::read_text_file(a.assignment), a.assignment);
    auto asg = molwb::mol_assignment_from_json(m, doc);
    auto [lhs, rhs] = molwb::eval_identity(id, asg, m);
    bool holds = lhs == rhs;
    r["holds"] = holds;
    r["lhs"] = m.name_of(lhs);
    r["rhs"] = m.name_of(rhs);
    out << (holds ? "holds" : "fails") << " under the given assignment in " << a.model << "\n"
        << "  lhs = " << m.name_of(lhs) << "\n  rhs = " << m.name_of(rhs) << "\n";
    emit(c, r, out.str());
    return holds ? 0 : 1;
  }
  std::vector<std::size_t> pool;
  if (a.subset.empty()) {
    for (std::size_t i = 0; i < m.size(); ++i) pool.push_back(i);
  } else {
    for (const auto& name : a.subset) pool.push_back(m.index_of(name));
  }
  auto res = molwb::test_set_check(id, m, pool, a.cap, resolve_threads(c.threads));
  r["restricted"] = !a.subset.empty();
  r["holds"] = res.holds;
  r["assignments"] = res.assignments;
  out << (res.holds ? "holds" : "fails") << " in " << a.model << (a.subset.empty() ? "" : " (restricted)") << " ("
      << res.assignments << " assignments checked)\n";
  if (res.witness) {
    r["witness"] = molwb::mol_assignment_to_json(m, a.model, *res.witness);
    out << "witness:\n" << assignment_text(m, *res.witness);
    if (!a.witness_out.empty()) molwb::write_text_file(a.witness_out, r["witness"].dump(2) + "\n");
  }
  emit(c, r, out.str());
  return res.holds ? 0 : 1;
}

struct RefuteArgs {
  std::string identity;
  std::string field = "Q";
  std::size_t dmax = 3;
  std::optional<std::uint64_t> trials;
  std::uint64_t base = 64;
  std::uint64_t seed = 0;
  std::string witness_out;
};

int run_refute(const RefuteArgs& a, const Common& c) {
  auto id = molwb::parse_identity(a.identity);
  const unsigned threads = resolve_threads(c.threads);
  return with_field(a.field, [&](auto field) {
    using F = decltype(field);
    auto search = [&]() -> molwb::RefutationReport<F> {
      if (!a.trials) return molwb::refute_bounded(id, field, a.dmax, molwb::BoundedOptions{a.base, a.seed, threads});
      // Fixed budget per dimension.
      molwb::RefutationReport<F> rep{id, molwb::RefutationStatus::ValidUpToBudget, std::nullopt, {}, a.dmax};
      rep.stats.seed = a.seed;
      for (std::size_t d = 1; d <= a.dmax; ++d) {
        auto r = molwb::refute_random(id, field, d, molwb::RefuteOptions{*a.trials, a.seed, threads});
        rep.stats.trials += r.stats.trials;
        rep.stats.per_dimension.emplace_back(d, r.stats.trials);
        rep.stats.elapsed_ms += r.stats.elapsed_ms;
        if (r.status == molwb::RefutationStatus::Refuted) {
          rep.status = r.status;
          rep.witness = std::move(r.witness);
          break;
        }
      }
      return rep;
    };
    auto rep = search();
    const bool refuted = rep.status == molwb::RefutationStatus::Refuted;
    json per = json::array();
    for (const auto& [d, t] : rep.stats.per_dimension) per.push_back({{"d", d}, {"trials", t}});
    json r{{"v", 1},
           {"command", "refute"},
           {"identity", molwb::print_identity(id)},
           {"field", field.name()},
           {"bound", rep.bound},
           {"seed", a.seed},
           {"status", refuted ? "refuted" : "valid-up-to-budget"},
           {"trials", rep.stats.trials},
           {"per_dimension", per}};
    if (c.timing) r["elapsed_ms"] = rep.stats.elapsed_ms;
    std::ostringstream out;
    if (refuted) {
      const auto& w = *rep.witness;
      r["witness"] = witness_json(field, w);
      out << "refuted in L(" << field.name() << "^" << w.d << ") at trial " << w.trial << " (seed " << a.seed << ")\n"
          << assignment_text(w.assignment) << "  lhs = " << w.lhs->to_string() << "\n  rhs = " << w.rhs->to_string()
          << "\n";
      if (!a.witness_out.empty()) molwb::write_text_file(a.witness_out, r["witness"].dump(2) + "\n");
    } else {
      out << "valid up to budget: d = 1.." << rep.bound << ", " << rep.stats.trials << " trials (seed " << a.seed
          << ")\n";
    }
    emit(c, r, out.str());
    return refuted ? 1 : 0;
  });
}

struct SatArgs {
  std::string file;
  std::string field = "Q";
  std::size_t dcap = 3;
  std::uint64_t trials = 2000;
  std::uint64_t seed = 0;
};

int run_sat(const SatArgs& a, const Common& c) {
  auto eqs = molwb::parse_identity_list(molwb::read_text_file(a.file));
  if (eqs.empty()) throw CLI::ValidationError("sat", "no equations in '" + a.file + "'");
  return with_field(a.field, [&](auto field) {
    molwb::SatOptions opt;
    opt.dcap = a.dcap;
    opt.trials = a.trials;
    opt.seed = a.seed;
    auto rep = molwb::satisfiable_bounded(eqs, field, opt);
    json r{{"v", 1}, {"command", "sat"}, {"equations", eqs.size()}, {"seed", a.seed},
           {"status", rep.found ? "found" : "not-found-within-budget"}, {"candidates", rep.candidates}};
    std::ostringstream out;
    if (rep.found) {
      r["model"] = rep.model;
      out << "satisfiable in " << rep.model << "\n";
      if (rep.finite_assignment) {
        auto m = molwb::load_model(rep.model);
        r["witness"] = molwb::mol_assignment_to_json(m, rep.model, *rep.finite_assignment);
        out << assignment_text(m, *rep.finite_assignment);
      } else if (rep.subspace_assignment) {
        std::size_t d = rep.subspace_assignment->begin()->second.ambient_dim();
        r["witness"] = molwb::subspace_assignment_to_json(field, d, *rep.subspace_assignment);
        out << assignment_text(*rep.subspace_assignment);
      }
    } else {
      out << "not found within budget (" << rep.candidates << " candidates)\n";
    }
    emit(c, r, out.str());
    return rep.found ? 1 : 0;
  });
}

struct EncodeArgs {
  std::string identity;
  std::size_t d = 2;
  std::string format = "json";
  bool complex = false;
  std::string output;
};

int run_encode(const EncodeArgs& a, const Common&) {
  auto id = molwb::parse_identity(a.identity);
  auto sys = a.complex ? molwb::encode_complex(id, a.d) : molwb::encode(id, a.d);
  std::string text = a.format == "smt" ? molwb::emit_smt2(sys) : molwb::emit_json(sys) + "\n";
  if (a.output.empty()) {
    std::cout << text;
  } else {
    molwb::write_text_file(a.output, text);
  }
  return 0;
}

struct SolveArgs {
  std::string identity;
  std::size_t d = 2;
  molwb::SolveParams params;
  std::string start = "propagated";
  std::string witness_out;
};

int run_solve(SolveArgs a, const Common& c) {
  auto id = molwb::parse_identity(a.identity);
  a.params.threads = resolve_threads(c.threads);
  if (a.start == "uniform") {
    a.params.start = molwb::StartMode::Uniform;
  } else if (a.start != "propagated") {
    throw CLI::ValidationError("--start", "expected uniform or propagated");
  }
  auto sys = molwb::encode(id, a.d);
  auto outcome = molwb::penalty_solve(sys, a.params);
  std::optional<molwb::Assignment<molwb::Subspace<molwb::RationalField>>> witness;
  if (outcome.solved) witness = molwb::rationalize_and_verify(outcome.point, sys, id, a.params.tol);
  json r{{"v", 1},
         {"command", "solve"},
         {"identity", molwb::print_identity(id)},
         {"d", a.d},
         {"seed", a.params.seed},
         {"variables", sys.vars.size()},
         {"constraints", sys.constraints.size()},
         {"solved", outcome.solved},
         {"residual", outcome.residual},
         {"restart", outcome.restart},
         {"verified", witness.has_value()}};
  std::ostringstream out;
  out << "system: " << sys.vars.size() << " variables, " << sys.constraints.size() << " constraints\n";
  if (outcome.solved) {
    out << "residual " << outcome.residual << " at restart " << outcome.restart << "\n";
  } else {
    out << "exhausted: best residual " << outcome.residual << "\n";
  }
  if (witness) {
    r["witness"] = molwb::subspace_assignment_to_json(molwb::RationalField{}, a.d, *witness);
    out << "exact witness in L(Q^" << a.d << "):\n" << assignment_text(*witness);
    if (!a.witness_out.empty()) molwb::write_text_file(a.witness_out, r["witness"].dump(2) + "\n");
  } else if (outcome.solved) {
    out << "numeric solution did not survive exact verification\n";
  }
  emit(c, r, out.str());
  return witness ? 1 : 0;
}

struct ModelsArgs {
  std::string target;
  std::string output;
};

int run_models_validate(const ModelsArgs& a, const Common& c) {
  molwb::FiniteModel m;
  if (auto cat = molwb::catalog_by_name(a.target)) {
    m = cat->data();
  } else {
    m = molwb::model_from_json(molwb::parse_json_text(molwb::read_text_file(a.target), a.target));
  }
  auto report = molwb::validate_mol(m);
  json r{{"v", 1}, {"command", "models validate"}, {"model", a.target}, {"size", m.size()}};
  r["report"] = molwb::report_to_json(report, m);
  std::ostringstream out;
  out << a.target << ": " << m.size() << " elements\n";
  for (const auto& chk : report.checks) {
    out << "  " << (chk.passed ? "ok   " : "FAIL ") << chk.family;
    if (!chk.passed) {
      out << " (";
      for (std::size_t i = 0; i < chk.witness.size(); ++i) out << (i ? ", " : "") << m.elements[chk.witness[i]];
      out << ")";
    }
    out << "\n";
  }
  out << (report.usable() ? "modular ortholattice\n" : "not a modular ortholattice\n");
  emit(c, r, out.str());
  return report.usable() ? 0 : 1;
}

int run_models_export(const ModelsArgs& a, const Common&) {
  auto m = molwb::catalog_by_name(a.target);
  if (!m) throw CLI::ValidationError("models export", "unknown catalog model '" + a.target + "'");
  std::string text = molwb::model_to_json(m->data()).dump(2) + "\n";
  if (a.output.empty()) {
    std::cout << text;
  } else {
    molwb::write_text_file(a.output, text);
  }
  return 0;
}

int run_models_list(const Common& c) {
  json r{{"v", 1}, {"command", "models list"}};
  json list = json::array();
  std::ostringstream out;
  for (const auto& [name, m] : molwb::small_catalog(16)) {
    list.push_back({{"name", name}, {"size", m.size()}, {"height", molwb::height(m)}});
    out << name << "  size " << m.size() << "  height " << molwb::height(m) << "\n";
  }
  r["models"] = list;
  emit(c, r, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"molwb: quantum-logic identities over modular ortholattices"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_flag("--json", common.json_out, "Machine-readable report");
  app.add_flag("--timing", common.timing, "Include elapsed times in json reports");
  app.add_option("--threads", common.threads, "Worker threads (default: MOLWB_THREADS or 1)");

  ParseArgs parse_args;
  auto* parse = app.add_subcommand("parse", "Parse and pretty-print a term or identity");
  parse->add_option("text", parse_args.text)->required();
  parse->add_flag("--term", parse_args.term, "Treat input as a term");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate identity families");
  gen->add_option("family", gen_args.family, "delta-dist | delta-diamond | sigma | diamond | s | tautology")->required();
  gen->add_option("params", gen_args.params);

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "Check an identity in a finite model or under an assignment");
  check->add_option("identity", check_args.identity)->required();
  check->add_option("--model", check_args.model, "Catalog name (mo3, boolean2, mo2xboolean1) or model file");
  check->add_option("--field", check_args.field, "Field of a subspace assignment (default: from the file)");
  check->add_option("--assignment", check_args.assignment, "Assignment file");
  check->add_option("--subset", check_args.subset, "Restrict variables to these elements")->delimiter(',');
  check->add_option("--cap", check_args.cap, "Brute-force budget");
  check->add_option("--witness-out", check_args.witness_out, "Write the witness assignment here");

  RefuteArgs refute_args;
  auto* refute = app.add_subcommand("refute", "Randomized exact refutation in L(F^d), d = 1..dmax");
  refute->add_option("identity", refute_args.identity)->required();
  refute->add_option("--field", refute_args.field, "Q, Qi or GF<p>");
  refute->add_option("--dmax", refute_args.dmax, "Dimension cap")->check(CLI::PositiveNumber);
  refute->add_option("--trials", refute_args.trials, "Trials per dimension (default: base * 2^d)");
  refute->add_option("--base", refute_args.base, "Base of the escalating trial budget");
  refute->add_option("--seed", refute_args.seed);
  refute->add_option("--witness-out", refute_args.witness_out, "Write the witness assignment here");

  SatArgs sat_args;
  auto* sat = app.add_subcommand("sat", "Bounded search for a common solution of equations");
  sat->add_option("file", sat_args.file, "File with one identity per line")->required();
  sat->add_option("--field", sat_args.field);
  sat->add_option("--dcap", sat_args.dcap);
  sat->add_option("--trials", sat_args.trials);
  sat->add_option("--seed", sat_args.seed);

  EncodeArgs encode_args;
  auto* enc = app.add_subcommand("encode", "Emit the feasibility system for a refutation in L(R^d)");
  enc->add_option("identity", encode_args.identity)->required();
  enc->add_option("--d", encode_args.d)->check(CLI::PositiveNumber);
  enc->add_option("--format", encode_args.format)->check(CLI::IsMember({"json", "smt"}));
  enc->add_flag("--complex", encode_args.complex, "Search over Q(i)^d via R^2d");
  enc->add_option("-o,--output", encode_args.output);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Penalty search on the feasibility system, then exact verification");
  solve->add_option("identity", solve_args.identity)->required();
  solve->add_option("--d", solve_args.d)->check(CLI::PositiveNumber);
  solve->add_option("--tol", solve_args.params.tol);
  solve->add_option("--restarts", solve_args.params.restarts);
  solve->add_option("--iterations", solve_args.params.iterations);
  solve->add_option("--polish", solve_args.params.polish_iterations, "Levenberg-Marquardt steps per restart");
  solve->add_option("--backtrack", solve_args.params.backtrack);
  solve->add_option("--start", solve_args.start, "propagated | uniform");
  solve->add_option("--seed", solve_args.params.seed);
  solve->add_option("--witness-out", solve_args.witness_out);

  ModelsArgs models_args;
  auto* models = app.add_subcommand("models", "Finite model utilities");
  models->require_subcommand(1);
  auto* validate = models->add_subcommand("validate", "Validate the MOL axioms");
  validate->add_option("model", models_args.target)->required();
  auto* exp = models->add_subcommand("export", "Write a catalog model as JSON");
  exp->add_option("model", models_args.target)->required();
  exp->add_option("-o,--output", models_args.output);
  auto* list = models->add_subcommand("list", "List the small catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*parse) return run_parse(parse_args, common);
    if (*gen) return run_gen(gen_args, common);
    if (*check) return run_check(check_args, common);
    if (*refute) return run_refute(refute_args, common);
    if (*sat) return run_sat(sat_args, common);
    if (*enc) return run_encode(encode_args, common);
    if (*solve) return run_solve(solve_args, common);
    if (*validate) return run_models_validate(models_args, common);
    if (*exp) return run_models_export(models_args, common);
    if (*list) return run_models_list(common);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
