#pragma once

// CNF formulas, a small CDCL solver, DIMACS I/O, and the avoidance encoding
// that turns "some c-coloring of [1..N] avoids the pattern" into SAT.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ramsey/coloring.hpp"
#include "ramsey/error.hpp"
#include "ramsey/instances.hpp"
#include "ramsey/pattern.hpp"

namespace ramsey {

using Clause = std::vector<int>;

struct CnfFormula {
  int var_count = 0;
  std::vector<Clause> clauses;

  void add(Clause c) {
    if (c.empty()) throw InputError("empty clause in formula construction");
    for (int lit : c) {
      if (lit == 0 || std::abs(lit) > var_count) throw InputError("literal out of range");
    }
    clauses.push_back(std::move(c));
  }

  friend bool operator==(CnfFormula const&, CnfFormula const&) = default;
};

// "p cnf V C", one clause per line, each 0-terminated, trailing newline.
inline std::string export_dimacs(CnfFormula const& f) {
  std::string out = "p cnf " + std::to_string(f.var_count) + " " + std::to_string(f.clauses.size()) + "\n";
  for (auto const& c : f.clauses) {
    for (int lit : c) {
      out += std::to_string(lit);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

inline CnfFormula parse_dimacs(std::string const& text) {
  std::istringstream in(text);
  std::string line;
  CnfFormula f;
  bool have_header = false;
  std::size_t declared = 0;
  Clause cur;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c" || first[0] == 'c' || first == "%") continue;
    if (first == "p") {
      std::string fmt;
      long long v = -1, c = -1;
      if (!(ls >> fmt >> v >> c) || fmt != "cnf" || v < 0 || c < 0) throw InputError("malformed DIMACS header");
      f.var_count = static_cast<int>(v);
      declared = static_cast<std::size_t>(c);
      have_header = true;
      continue;
    }
    if (!have_header) throw InputError("DIMACS clause before header");
    std::istringstream toks(line);
    long long lit;
    while (toks >> lit) {
      if (lit == 0) {
        if (cur.empty()) throw InputError("empty clause in DIMACS input");
        f.add(std::move(cur));
        cur.clear();
      } else {
        if (std::llabs(lit) > f.var_count) throw InputError("DIMACS literal exceeds declared variable count");
        cur.push_back(static_cast<int>(lit));
      }
    }
    if (!toks.eof()) throw InputError("malformed DIMACS clause line");
  }
  if (!have_header) throw InputError("missing DIMACS header");
  if (!cur.empty()) throw InputError("unterminated DIMACS clause");
  if (f.clauses.size() != declared) throw InputError("DIMACS clause count does not match header");
  return f;
}

struct SatVerdict {
  enum class Kind { sat, unsat, unknown };
  Kind kind = Kind::unknown;
  std::vector<int> model;  // model[v-1] = +v or -v
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;

  bool value(int var) const { return model.at(static_cast<std::size_t>(var - 1)) > 0; }
};

inline char const* to_string(SatVerdict::Kind k) {
  switch (k) {
    case SatVerdict::Kind::sat: return "SAT";
    case SatVerdict::Kind::unsat: return "UNSAT";
    case SatVerdict::Kind::unknown: return "UNKNOWN";
  }
  return "?";
}

inline bool satisfies(CnfFormula const& f, std::vector<int> const& model) {
  if (model.size() != static_cast<std::size_t>(f.var_count)) return false;
  for (auto const& c : f.clauses) {
    bool sat = false;
    for (int lit : c) {
      if (model[static_cast<std::size_t>(std::abs(lit) - 1)] == lit) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

// Competition output: "s SATISFIABLE" / "s UNSATISFIABLE" plus "v" lines.
inline SatVerdict parse_solver_output(std::string const& text, int var_count) {
  std::istringstream in(text);
  std::string line;
  SatVerdict v;
  std::vector<int> lits;
  while (std::getline(in, line)) {
    if (line.rfind("s ", 0) == 0) {
      std::string status = line.substr(2);
      while (!status.empty() && std::isspace(static_cast<unsigned char>(status.back()))) status.pop_back();
      if (status == "SATISFIABLE") v.kind = SatVerdict::Kind::sat;
      else if (status == "UNSATISFIABLE") v.kind = SatVerdict::Kind::unsat;
      else v.kind = SatVerdict::Kind::unknown;
    } else if (line.rfind("v ", 0) == 0 || line == "v") {
      std::istringstream ls(line.substr(1));
      long long lit;
      while (ls >> lit) {
        if (lit != 0) lits.push_back(static_cast<int>(lit));
      }
    }
  }
  if (v.kind == SatVerdict::Kind::sat) {
    v.model.assign(static_cast<std::size_t>(var_count), 0);
    for (int lit : lits) {
      if (std::abs(lit) > var_count) throw InputError("model literal exceeds variable count");
      v.model[static_cast<std::size_t>(std::abs(lit) - 1)] = lit;
    }
    // Variables the solver left out are don't-cares; pick false.
    for (int i = 0; i < var_count; ++i) {
      if (v.model[static_cast<std::size_t>(i)] == 0) v.model[static_cast<std::size_t>(i)] = -(i + 1);
    }
  }
  return v;
}

struct SolverOptions {
  std::uint64_t conflict_budget = 0;  // 0 = unlimited
  // Deterministic mode branches on the lowest-index unassigned variable,
  // true first. A nonzero seed permutes the branching order and polarity.
  std::uint64_t branch_seed = 0;
  std::atomic<bool> const* stop = nullptr;
};

// CDCL: two watched literals per clause, first-UIP learning,
// non-chronological backjumping. No restarts or clause deletion: the
// formulas this workbench produces are small.
class Solver {
 public:
  explicit Solver(CnfFormula const& f, SolverOptions const& opts = {}) : opts_(opts), nvars_(f.var_count) {
    value_.assign(static_cast<std::size_t>(nvars_) + 1, kUndef);
    level_.assign(value_.size(), 0);
    reason_.assign(value_.size(), -1);
    seen_.assign(value_.size(), 0);
    watches_.resize(2 * value_.size());
    order_.resize(static_cast<std::size_t>(nvars_));
    for (int v = 1; v <= nvars_; ++v) order_[static_cast<std::size_t>(v - 1)] = v;
    polarity_.assign(value_.size(), 1);
    if (opts_.branch_seed != 0) {
      for (std::size_t i = order_.size(); i > 1; --i) {
        std::size_t const j = splitmix64_at(opts_.branch_seed, i) % i;
        std::swap(order_[i - 1], order_[j]);
      }
      for (int v = 1; v <= nvars_; ++v) {
        polarity_[static_cast<std::size_t>(v)] = splitmix64_at(opts_.branch_seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(v)) & 1;
      }
    }
    for (auto const& c : f.clauses) add_input_clause(c);
  }

  SatVerdict solve() {
    SatVerdict v;
    if (!ok_) {
      v.kind = SatVerdict::Kind::unsat;
      return v;
    }
    for (;;) {
      int const confl = propagate();
      if (confl >= 0) {
        ++conflicts_;
        if (decision_level() == 0) {
          v.kind = SatVerdict::Kind::unsat;
          break;
        }
        auto [learnt, back] = analyze(confl);
        backtrack(back);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          int const idx = store_clause(std::move(learnt));
          enqueue(clauses_[static_cast<std::size_t>(idx)][0], idx);
        }
        if (opts_.conflict_budget != 0 && conflicts_ >= opts_.conflict_budget) {
          v.kind = SatVerdict::Kind::unknown;
          break;
        }
        if (opts_.stop != nullptr && opts_.stop->load(std::memory_order_relaxed)) {
          v.kind = SatVerdict::Kind::unknown;
          break;
        }
      } else {
        int const next = pick_branch();
        if (next == 0) {
          v.kind = SatVerdict::Kind::sat;
          v.model.resize(static_cast<std::size_t>(nvars_));
          for (int x = 1; x <= nvars_; ++x) {
            v.model[static_cast<std::size_t>(x - 1)] = value_[static_cast<std::size_t>(x)] == kTrue ? x : -x;
          }
          break;
        }
        ++decisions_;
        trail_lim_.push_back(trail_.size());
        enqueue(next, -1);
      }
    }
    v.conflicts = conflicts_;
    v.decisions = decisions_;
    v.propagations = propagations_;
    return v;
  }

 private:
  static constexpr std::int8_t kUndef = -1;
  static constexpr std::int8_t kFalse = 0;
  static constexpr std::int8_t kTrue = 1;

  // Literal codes: 2v for +v, 2v+1 for -v.
  static std::size_t code(int lit) {
    return lit > 0 ? 2 * static_cast<std::size_t>(lit) : 2 * static_cast<std::size_t>(-lit) + 1;
  }

  std::int8_t lit_value(int lit) const {
    std::int8_t const v = value_[static_cast<std::size_t>(std::abs(lit))];
    if (v == kUndef) return kUndef;
    return (lit > 0) == (v == kTrue) ? kTrue : kFalse;
  }

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void add_input_clause(Clause c) {
    if (!ok_) return;
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        if (c[i] == -c[j]) return;  // tautology
      }
    }
    if (c.empty()) {
      ok_ = false;
      return;
    }
    if (c.size() == 1) {
      std::int8_t const lv = lit_value(c[0]);
      if (lv == kFalse) ok_ = false;
      else if (lv == kUndef) enqueue(c[0], -1);
      return;
    }
    store_clause(std::move(c));
  }

  int store_clause(Clause c) {
    int const idx = static_cast<int>(clauses_.size());
    watches_[code(c[0])].push_back(idx);
    watches_[code(c[1])].push_back(idx);
    clauses_.push_back(std::move(c));
    return idx;
  }

  void enqueue(int lit, int reason) {
    auto const v = static_cast<std::size_t>(std::abs(lit));
    value_[v] = lit > 0 ? kTrue : kFalse;
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(lit);
  }

  // Returns the index of a conflicting clause, or -1.
  int propagate() {
    while (qhead_ < trail_.size()) {
      int const false_lit = -trail_[qhead_++];
      ++propagations_;
      auto& ws = watches_[code(false_lit)];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        int const ci = ws[i++];
        auto& c = clauses_[static_cast<std::size_t>(ci)];
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        if (lit_value(c[0]) == kTrue) {
          ws[j++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (lit_value(c[k]) != kFalse) {
            std::swap(c[1], c[k]);
            watches_[code(c[1])].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = ci;
        if (lit_value(c[0]) == kFalse) {
          while (i < ws.size()) ws[j++] = ws[i++];
          ws.resize(j);
          qhead_ = trail_.size();
          return ci;
        }
        enqueue(c[0], ci);
      }
      ws.resize(j);
    }
    return -1;
  }

  std::pair<Clause, int> analyze(int confl) {
    Clause learnt{0};  // slot 0 receives the asserting literal
    int pending = 0;
    int p = 0;
    std::size_t idx = trail_.size();
    int const current = decision_level();
    for (;;) {
      auto const& c = clauses_[static_cast<std::size_t>(confl)];
      for (std::size_t k = (p == 0 ? 0 : 1); k < c.size(); ++k) {
        int const q = c[k];
        auto const v = static_cast<std::size_t>(std::abs(q));
        if (seen_[v] || level_[v] == 0) continue;
        seen_[v] = 1;
        if (level_[v] >= current) ++pending;
        else learnt.push_back(q);
      }
      do {
        p = trail_[--idx];
      } while (!seen_[static_cast<std::size_t>(std::abs(p))]);
      seen_[static_cast<std::size_t>(std::abs(p))] = 0;
      if (--pending == 0) break;
      confl = reason_[static_cast<std::size_t>(std::abs(p))];
    }
    learnt[0] = -p;
    int back = 0;
    if (learnt.size() > 1) {
      std::size_t best = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k) {
        if (level_[static_cast<std::size_t>(std::abs(learnt[k]))] > level_[static_cast<std::size_t>(std::abs(learnt[best]))]) best = k;
      }
      std::swap(learnt[1], learnt[best]);
      back = level_[static_cast<std::size_t>(std::abs(learnt[1]))];
    }
    for (std::size_t k = 1; k < learnt.size(); ++k) seen_[static_cast<std::size_t>(std::abs(learnt[k]))] = 0;
    return {std::move(learnt), back};
  }

  void backtrack(int level) {
    if (decision_level() <= level) return;
    std::size_t const keep = trail_lim_[static_cast<std::size_t>(level)];
    for (std::size_t i = trail_.size(); i-- > keep;) {
      auto const v = static_cast<std::size_t>(std::abs(trail_[i]));
      value_[v] = kUndef;
      reason_[v] = -1;
    }
    trail_.resize(keep);
    trail_lim_.resize(static_cast<std::size_t>(level));
    qhead_ = keep;
  }

  int pick_branch() const {
    for (int v : order_) {
      if (value_[static_cast<std::size_t>(v)] == kUndef) return polarity_[static_cast<std::size_t>(v)] ? v : -v;
    }
    return 0;
  }

  SolverOptions opts_;
  int nvars_;
  bool ok_ = true;
  std::vector<Clause> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<std::int8_t> value_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<std::uint8_t> seen_;
  std::vector<int> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<int> order_;
  std::vector<std::uint8_t> polarity_;
  std::uint64_t conflicts_ = 0;
  std::uint64_t decisions_ = 0;
  std::uint64_t propagations_ = 0;
};

inline SatVerdict solve(CnfFormula const& f, std::uint64_t conflict_budget = 0) {
  SolverOptions opts;
  opts.conflict_budget = conflict_budget;
  SatVerdict v = Solver(f, opts).solve();
  if (v.kind == SatVerdict::Kind::sat && !satisfies(f, v.model)) {
    throw Error("internal solver error: model does not satisfy the formula");
  }
  return v;
}

// Runs one solver per seed concurrently; the first definitive verdict wins.
// Seed 0 is the deterministic lowest-index branching.
inline SatVerdict solve_portfolio(CnfFormula const& f, std::vector<std::uint64_t> const& seeds,
                                  std::uint64_t conflict_budget = 0) {
  if (seeds.empty()) return solve(f, conflict_budget);
  std::atomic<bool> stop{false};
  std::vector<SatVerdict> results(seeds.size());
  std::vector<SolverOptions> opts(seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    opts[i].conflict_budget = conflict_budget;
    opts[i].branch_seed = seeds[i];
    opts[i].stop = &stop;
    pool.emplace_back([&, i] {
      results[i] = Solver(f, opts[i]).solve();
      if (results[i].kind != SatVerdict::Kind::unknown) stop.store(true);
    });
  }
  for (auto& t : pool) t.join();
  for (auto& r : results) {
    if (r.kind == SatVerdict::Kind::sat && !satisfies(f, r.model)) {
      throw Error("internal solver error: model does not satisfy the formula");
    }
  }
  for (auto& r : results) {
    if (r.kind != SatVerdict::Kind::unknown) return r;
  }
  return results.front();
}

// x_{n,j} <-> variable (n-1)*c + j + 1.
struct VariableMap {
  std::uint64_t side = 0;
  std::uint32_t colors = 0;

  int var(std::uint64_t n, std::uint32_t j) const { return static_cast<int>((n - 1) * colors + j + 1); }
  int var_count() const { return static_cast<int>(side * colors); }
};

struct AvoidanceEncoding {
  CnfFormula formula;
  VariableMap map;
  std::size_t value_sets = 0;  // distinct in-box instance value sets
};

// One-hot colors (at-least-one plus pairwise at-most-one per integer), then
// one clause per (instance value set, color) forbidding that set from being
// monochromatic. A singleton value set is monochromatic under every
// coloring and becomes c unit clauses, making the formula UNSAT.
inline AvoidanceEncoding encode_avoidance(PatternSchema const& schema, std::uint64_t side, std::uint32_t colors,
                                          bool symmetry_break = false,
                                          std::uint64_t budget = kDefaultInstanceBudget) {
  if (side < 1) throw InputError("N must be >= 1");
  if (colors < 1) throw InputError("need at least one color");
  if (side * colors > static_cast<std::uint64_t>(INT32_MAX)) throw InputError("encoding too large");
  AvoidanceEncoding enc;
  enc.map = VariableMap{side, colors};
  enc.formula.var_count = enc.map.var_count();
  for (std::uint64_t n = 1; n <= side; ++n) {
    Clause alo;
    for (std::uint32_t j = 0; j < colors; ++j) alo.push_back(enc.map.var(n, j));
    enc.formula.add(std::move(alo));
    for (std::uint32_t j = 0; j < colors; ++j) {
      for (std::uint32_t k = j + 1; k < colors; ++k) enc.formula.add({-enc.map.var(n, j), -enc.map.var(n, k)});
    }
  }
  auto const sets = enumerate_value_sets(schema, side, budget);
  enc.value_sets = sets.size();
  for (auto const& s : sets) {
    for (std::uint32_t j = 0; j < colors; ++j) {
      Clause c;
      c.reserve(s.size());
      for (auto v : s) c.push_back(-enc.map.var(v, j));
      enc.formula.add(std::move(c));
    }
  }
  if (symmetry_break) {
    enc.formula.add({enc.map.var(std::min(schema.min_value(), side), 0)});
  }
  return enc;
}

inline Coloring decode_coloring(SatVerdict const& v, VariableMap const& map) {
  if (v.kind != SatVerdict::Kind::sat) throw InputError("no model to decode");
  std::vector<std::uint8_t> cells(map.side, 0);
  for (std::uint64_t n = 1; n <= map.side; ++n) {
    int found = -1;
    for (std::uint32_t j = 0; j < map.colors; ++j) {
      if (v.value(map.var(n, j))) {
        if (found >= 0) throw InputError("model assigns two colors to " + std::to_string(n));
        found = static_cast<int>(j);
      }
    }
    if (found < 0) throw InputError("model assigns no color to " + std::to_string(n));
    cells[n - 1] = static_cast<std::uint8_t>(found);
  }
  return Coloring(1, map.side, map.colors, std::move(cells));
}

}  // namespace ramsey
