#pragma once

// Deciding and refuting identities.
//
//  * holds / test_set_check: exhaustive enumeration over a finite MOL.
//  * refute_random: randomized exact search in L(F^d).
//  * refute_bounded: refute_random over d = 1..D with D bounded by the
//    length of the identity (and an optional cap).
//  * satisfiable_bounded: semi-decision search for a common solution of a
//    list of equations in a nontrivial model.
//
// Searches are deterministic in their seed: trial i of a run with seed s
// draws its assignment from seed s + i, whatever the thread count.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "molwb/eval.hpp"
#include "molwb/finite_model.hpp"
#include "molwb/subspace.hpp"
#include "molwb/term.hpp"

namespace molwb {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultBruteForceCap = 200'000'000;

struct HoldsResult {
  bool holds = true;
  std::optional<Assignment<std::size_t>> witness;
  std::uint64_t assignments = 0;
};

namespace detail {

inline std::uint64_t checked_power(std::uint64_t base, std::size_t exp, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && total > cap / base) {
      throw BudgetExceeded("brute force needs more than " + std::to_string(cap) + " assignments");
    }
    total *= base;
  }
  if (total > cap) throw BudgetExceeded("brute force needs more than " + std::to_string(cap) + " assignments");
  return total;
}

/// Enumerates pool^k in lexicographic order (first variable slowest) and
/// returns the index of the first assignment where `pairs` of roots differ.
/// Work is split over values of the first variable.
inline std::optional<std::uint64_t> first_violation(const Mol& m, const TermProgram& prog,
                                                    std::span<const std::size_t> pool, bool want_equal,
                                                    unsigned threads) {
  const std::size_t k = prog.vars().size();
  const auto& code = prog.instructions();
  const auto& roots = prog.roots();
  const std::uint64_t base = pool.size();

  auto scan_block = [&](std::uint64_t first_value) -> std::optional<std::uint64_t> {
    std::vector<std::size_t> digits(k, 0);
    if (k > 0) digits[0] = first_value;
    std::vector<std::size_t> slots(code.size());
    std::uint64_t block_size = 1;
    for (std::size_t i = 1; i < k; ++i) block_size *= base;
    for (std::uint64_t n = 0; n < block_size; ++n) {
      for (std::size_t s = 0; s < code.size(); ++s) {
        const auto& in = code[s];
        switch (in.kind) {
          case TermKind::Var: slots[s] = pool[digits[in.a]]; break;
          case TermKind::Zero: slots[s] = m.bottom(); break;
          case TermKind::One: slots[s] = m.top(); break;
          case TermKind::Comp: slots[s] = m.complement(slots[in.a]); break;
          case TermKind::Meet: slots[s] = m.meet(slots[in.a], slots[in.b]); break;
          case TermKind::Join: slots[s] = m.join(slots[in.a], slots[in.b]); break;
        }
      }
      bool all_equal = true;
      for (std::size_t r = 0; r + 1 < roots.size(); r += 2) all_equal = all_equal && slots[roots[r]] == slots[roots[r + 1]];
      if (all_equal != want_equal) return first_value * block_size + n;
      for (std::size_t i = k; i-- > 1;) {
        if (++digits[i] < base) break;
        digits[i] = 0;
      }
    }
    return std::nullopt;
  };

  const std::uint64_t blocks = k == 0 ? 1 : base;
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  if (threads == 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) {
      if (auto hit = scan_block(b)) return hit;
    }
    return std::nullopt;
  }
  std::vector<std::optional<std::uint64_t>> hits(blocks);
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> best_block{blocks};
  std::vector<std::thread> pool_threads;
  for (unsigned t = 0; t < threads; ++t) {
    pool_threads.emplace_back([&] {
      for (std::uint64_t b = next++; b < blocks; b = next++) {
        if (b > best_block.load()) break;
        hits[b] = scan_block(b);
        if (hits[b]) {
          std::uint64_t cur = best_block.load();
          while (b < cur && !best_block.compare_exchange_weak(cur, b)) {
          }
        }
      }
    });
  }
  for (auto& th : pool_threads) th.join();
  for (std::uint64_t b = 0; b < blocks; ++b) {
    if (hits[b]) return hits[b];
  }
  return std::nullopt;
}

inline Assignment<std::size_t> decode_index(const TermProgram& prog, std::span<const std::size_t> pool,
                                            std::uint64_t index) {
  const std::size_t k = prog.vars().size();
  Assignment<std::size_t> a;
  for (std::size_t i = k; i-- > 0;) {
    a[prog.vars()[i]] = pool[index % pool.size()];
    index /= pool.size();
  }
  return a;
}

}  // namespace detail

/// Brute force restricted to assignments into `subset`.
inline HoldsResult test_set_check(const Identity& id, const Mol& m, const std::vector<std::size_t>& subset,
                                  std::uint64_t cap = kDefaultBruteForceCap, unsigned threads = 1) {
  for (auto s : subset) {
    if (s >= m.size()) throw ModelError("test set element out of range");
  }
  TermProgram prog({id.lhs, id.rhs});
  HoldsResult res;
  if (subset.empty()) {
    if (!prog.vars().empty()) return res;  // vacuous
  }
  res.assignments = detail::checked_power(subset.size(), prog.vars().size(), cap);
  auto hit = detail::first_violation(m, prog, subset, true, threads);
  if (hit) {
    res.holds = false;
    res.witness = detail::decode_index(prog, subset, *hit);
    res.assignments = *hit + 1;
  }
  return res;
}

/// True iff every assignment into m satisfies lhs = rhs.
inline HoldsResult holds(const Identity& id, const Mol& m, std::uint64_t cap = kDefaultBruteForceCap,
                         unsigned threads = 1) {
  std::vector<std::size_t> all(m.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return test_set_check(id, m, all, cap, threads);
}

// ---------------------------------------------------------------------------
// Randomized exact refutation

enum class RefutationStatus { ValidUpToBudget, Refuted };

template <ExactField F>
struct Witness {
  std::size_t d = 0;
  std::uint64_t trial = 0;
  Assignment<Subspace<F>> assignment;
  std::optional<Subspace<F>> lhs;
  std::optional<Subspace<F>> rhs;
};

struct SearchStats {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;  // trials up to and including the witness
  std::vector<std::pair<std::size_t, std::uint64_t>> per_dimension;  // (d, trials)
  double elapsed_ms = 0;
};

template <ExactField F>
struct RefutationReport {
  Identity identity;
  RefutationStatus status = RefutationStatus::ValidUpToBudget;
  std::optional<Witness<F>> witness;
  SearchStats stats;
  std::size_t bound = 0;  // dimension bound D (refute_bounded) or d (refute_random)
};

struct RefuteOptions {
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Dimension of a sampled variable: with probability 0.2 an atom or coatom,
/// otherwise uniform in 0..d.
inline std::size_t sample_dimension(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < 0.2) return coin(rng) < 0.5 ? std::min<std::size_t>(1, d) : (d == 0 ? 0 : d - 1);
  return std::uniform_int_distribution<std::size_t>(0, d)(rng);
}

/// The assignment used by trial `trial` of a search with `seed` in L(F^d).
template <ExactField F>
Assignment<Subspace<F>> sample_assignment(const F& field, std::size_t d, const std::vector<std::string>& vars,
                                          std::uint64_t seed, std::uint64_t trial) {
  std::mt19937_64 rng(seed + trial);
  Assignment<Subspace<F>> a;
  for (const auto& v : vars) {
    std::size_t k = sample_dimension(rng, d);
    a.emplace(v, random_subspace(field, d, k, rng()));
  }
  return a;
}

namespace detail {

template <ExactField F>
std::optional<Witness<F>> try_trial(const SubspaceLattice<F>& lat, const TermProgram& prog, std::uint64_t seed,
                                    std::uint64_t trial) {
  auto a = sample_assignment(lat.field(), lat.dim(), prog.vars(), seed, trial);
  std::vector<Subspace<F>> values;
  for (const auto& v : prog.vars()) values.push_back(a.at(v));
  auto out = prog.run(lat, std::span<const Subspace<F>>(values));
  if (out[0] == out[1]) return std::nullopt;
  Witness<F> w;
  w.d = lat.dim();
  w.trial = trial;
  w.assignment = std::move(a);
  w.lhs = std::move(out[0]);
  w.rhs = std::move(out[1]);
  return w;
}

}  // namespace detail

/// Random exact search for a falsifying assignment in L(F^d).
template <ExactField F>
RefutationReport<F> refute_random(const Identity& id, const F& field, std::size_t d, const RefuteOptions& opt = {}) {
  if (d == 0) throw std::invalid_argument("refute_random: dimension must be >= 1");
  auto start = std::chrono::steady_clock::now();
  SubspaceLattice<F> lat(field, d);  // throws if the form is not anisotropic
  TermProgram prog({id.lhs, id.rhs});
  RefutationReport<F> rep{id, RefutationStatus::ValidUpToBudget, std::nullopt, {}, d};
  rep.stats.seed = opt.seed;

  const unsigned threads = std::max(1U, opt.threads);
  std::optional<Witness<F>> found;
  if (threads == 1) {
    for (std::uint64_t t = 0; t < opt.trials && !found; ++t) found = detail::try_trial(lat, prog, opt.seed, t);
  } else {
    const std::uint64_t chunk = 16ULL * threads;
    for (std::uint64_t begin = 0; begin < opt.trials && !found; begin += chunk) {
      const std::uint64_t end = std::min(opt.trials, begin + chunk);
      std::mutex mu;
      std::vector<std::thread> pool;
      for (unsigned th = 0; th < threads; ++th) {
        pool.emplace_back([&, th] {
          for (std::uint64_t t = begin + th; t < end; t += threads) {
            auto w = detail::try_trial(lat, prog, opt.seed, t);
            if (!w) continue;
            std::lock_guard lock(mu);
            if (!found || w->trial < found->trial) found = std::move(w);
            return;
          }
        });
      }
      for (auto& p : pool) p.join();
    }
  }
  if (found) {
    rep.status = RefutationStatus::Refuted;
    rep.stats.trials = found->trial + 1;
    rep.witness = std::move(found);
  } else {
    rep.stats.trials = opt.trials;
  }
  rep.stats.per_dimension.emplace_back(d, rep.stats.trials);
  rep.stats.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

/// Re-derives and re-evaluates the assignment of (seed, d, trial).
template <ExactField F>
std::optional<Witness<F>> replay(const Identity& id, const F& field, std::size_t d, std::uint64_t seed,
                                 std::uint64_t trial) {
  SubspaceLattice<F> lat(field, d);
  TermProgram prog({id.lhs, id.rhs});
  return detail::try_trial(lat, prog, seed, trial);
}

struct BoundedOptions {
  std::uint64_t base_trials = 64;  // trials(d) = base_trials * 2^d
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Searches d = 1..D, D = min(cap, term_length(lhs) + term_length(rhs)).
template <ExactField F>
RefutationReport<F> refute_bounded(const Identity& id, const F& field, std::optional<std::size_t> cap = std::nullopt,
                                   const BoundedOptions& opt = {}) {
  auto start = std::chrono::steady_clock::now();
  std::uint64_t len = term_length(id.lhs);
  std::uint64_t rlen = term_length(id.rhs);
  len = rlen > std::numeric_limits<std::uint64_t>::max() - len ? std::numeric_limits<std::uint64_t>::max() : len + rlen;
  std::size_t bound = static_cast<std::size_t>(std::min<std::uint64_t>(len, std::numeric_limits<std::size_t>::max()));
  if (cap) bound = std::min(bound, *cap);

  RefutationReport<F> rep{id, RefutationStatus::ValidUpToBudget, std::nullopt, {}, bound};
  rep.stats.seed = opt.seed;
  for (std::size_t d = 1; d <= bound; ++d) {
    std::uint64_t trials = d >= 63 ? std::numeric_limits<std::uint64_t>::max() : opt.base_trials << d;
    if (opt.base_trials != 0 && (trials >> d) != opt.base_trials) trials = std::numeric_limits<std::uint64_t>::max();
    auto r = refute_random(id, field, d, RefuteOptions{trials, opt.seed, opt.threads});
    rep.stats.trials += r.stats.trials;
    rep.stats.per_dimension.emplace_back(d, r.stats.trials);
    if (r.status == RefutationStatus::Refuted) {
      rep.status = RefutationStatus::Refuted;
      rep.witness = std::move(r.witness);
      break;
    }
  }
  rep.stats.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// ---------------------------------------------------------------------------
// Bounded satisfiability

struct SatOptions {
  std::size_t dcap = 3;
  std::uint64_t trials = 2000;
  std::uint64_t seed = 0;
  std::uint64_t brute_force_cap = 10'000'000;
  /// Finite models tried first, in order. Empty means the default list
  /// boolean(1..3), mo(2..4).
  std::vector<std::pair<std::string, Mol>> models;
};

template <ExactField F>
struct SatReport {
  bool found = false;
  std::string model;  // catalog name or L(F^d)
  std::optional<Assignment<std::size_t>> finite_assignment;
  std::optional<Assignment<Subspace<F>>> subspace_assignment;
  std::uint64_t candidates = 0;
};

inline std::vector<std::pair<std::string, Mol>> default_sat_models() {
  std::vector<std::pair<std::string, Mol>> out;
  for (std::size_t n = 1; n <= 3; ++n) out.emplace_back("boolean(" + std::to_string(n) + ")", catalog("boolean", n));
  for (std::size_t n = 2; n <= 4; ++n) out.emplace_back("mo(" + std::to_string(n) + ")", catalog("mo", n));
  return out;
}

/// Looks for a model with 0 != 1 and an assignment satisfying every
/// equation. A negative answer only means nothing was found in budget.
template <ExactField F>
SatReport<F> satisfiable_bounded(const std::vector<Identity>& equations, const F& field, const SatOptions& opt = {}) {
  if (equations.empty()) throw std::invalid_argument("satisfiable_bounded: no equations");
  std::vector<Term> roots;
  for (const auto& e : equations) {
    roots.push_back(e.lhs);
    roots.push_back(e.rhs);
  }
  TermProgram prog(roots);
  SatReport<F> rep;

  auto models = opt.models.empty() ? default_sat_models() : opt.models;
  for (const auto& [name, m] : models) {
    if (m.bottom() == m.top()) continue;
    std::vector<std::size_t> all(m.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::uint64_t total;
    try {
      total = detail::checked_power(all.size(), prog.vars().size(), opt.brute_force_cap);
    } catch (const BudgetExceeded&) {
      continue;
    }
    auto hit = detail::first_violation(m, prog, all, false, 1);
    if (hit) {
      rep.found = true;
      rep.model = name;
      rep.finite_assignment = detail::decode_index(prog, all, *hit);
      rep.candidates += *hit + 1;
      return rep;
    }
    rep.candidates += total;
  }

  for (std::size_t d = 1; d <= opt.dcap; ++d) {
    SubspaceLattice<F> lat(field, d);
    for (std::uint64_t t = 0; t < opt.trials; ++t) {
      auto a = sample_assignment(field, d, prog.vars(), opt.seed, t);
      std::vector<Subspace<F>> values;
      for (const auto& v : prog.vars()) values.push_back(a.at(v));
      auto out = prog.run(lat, std::span<const Subspace<F>>(values));
      ++rep.candidates;
      bool ok = true;
      for (std::size_t r = 0; r + 1 < out.size() && ok; r += 2) ok = out[r] == out[r + 1];
      if (ok) {
        rep.found = true;
        rep.model = lat.name();
        rep.subspace_assignment = std::move(a);
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace molwb
