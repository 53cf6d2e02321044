#pragma once

// Avoidance search (a c-coloring of [1..N] with no monochromatic instance)
// and Schur-style threshold computation.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ramsey/coloring.hpp"
#include "ramsey/error.hpp"
#include "ramsey/instances.hpp"
#include "ramsey/parallel.hpp"
#include "ramsey/pattern.hpp"
#include "ramsey/sat.hpp"

namespace ramsey {

enum class Engine { backtracking, sat, exhaustive };

inline char const* to_string(Engine e) {
  switch (e) {
    case Engine::backtracking: return "backtracking";
    case Engine::sat: return "sat";
    case Engine::exhaustive: return "exhaustive";
  }
  return "?";
}

inline Engine parse_engine(std::string const& s) {
  if (s == "backtracking" || s == "bt") return Engine::backtracking;
  if (s == "sat") return Engine::sat;
  if (s == "exhaustive") return Engine::exhaustive;
  throw InputError("unknown engine '" + s + "'");
}

enum class Verdict { avoiding, unsat, unknown };

inline char const* to_string(Verdict v) {
  switch (v) {
    case Verdict::avoiding: return "avoiding";
    case Verdict::unsat: return "unsat";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

struct SearchOptions {
  Engine engine = Engine::backtracking;
  unsigned workers = 1;
  std::uint64_t node_budget = 0;  // 0 = unlimited; SAT counts conflicts
  bool symmetry_break = true;
  std::size_t split_depth = 8;
  std::uint64_t time_budget_ms = 0;  // threshold scans only; 0 = unlimited
};

struct AvoidanceResult {
  Verdict verdict = Verdict::unknown;
  std::optional<Coloring> coloring;
  std::uint64_t nodes = 0;
  double time_ms = 0;
  Engine engine = Engine::backtracking;
};

namespace detail {

// Colors 1..N in increasing order. Whenever an instance has every value but
// its largest assigned, all with color j, color j is removed from the largest
// value's domain; an empty domain backtracks.
class AvoidanceBacktracker {
 public:
  AvoidanceBacktracker(std::vector<ValueSet> const& sets, std::uint64_t side, std::uint32_t colors,
                       bool symmetry_break)
      : side_(side), colors_(colors), symmetry_break_(symmetry_break) {
    if (colors > 64) throw InputError("backtracking engine supports at most 64 colors");
    full_ = colors == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << colors) - 1);
    by_second_.resize(side + 1);
    for (auto const& s : sets) {
      if (s.size() == 1) {
        trivially_unsat_ = true;
        continue;
      }
      by_second_[s[s.size() - 2]].push_back(&s);
    }
    reset();
  }

  void reset() {
    domain_.assign(side_ + 1, full_);
    color_.assign(side_ + 1, 0);
    max_used_.assign(side_ + 1, -1);
    trail_.clear();
    nodes_ = 0;
    budget_hit_ = false;
  }

  bool trivially_unsat() const noexcept { return trivially_unsat_; }
  std::uint64_t nodes() const noexcept { return nodes_; }
  bool budget_hit() const noexcept { return budget_hit_; }
  std::vector<std::uint8_t> cells() const {
    std::vector<std::uint8_t> out(side_);
    for (std::uint64_t n = 1; n <= side_; ++n) out[n - 1] = static_cast<std::uint8_t>(color_[n]);
    return out;
  }

  // Replays a prefix (colors of 1..k). False if it violates a constraint.
  bool apply_prefix(std::vector<std::uint8_t> const& prefix) {
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      std::uint64_t const n = i + 1;
      if (!(domain_[n] >> prefix[i] & 1)) return false;
      if (!assign(n, prefix[i])) return false;
    }
    return true;
  }

  // Depth-first from integer `from` to `to`; calls on_leaf at depth `to`.
  // on_leaf returns true to stop.
  template <class Leaf>
  bool dfs(std::uint64_t n, std::uint64_t to, std::uint64_t cap, Leaf&& on_leaf) {
    if (n > to) return on_leaf();
    int const used = max_used_[n - 1];
    std::uint32_t limit = colors_;
    if (symmetry_break_) limit = std::min<std::uint32_t>(colors_, static_cast<std::uint32_t>(used + 2));
    for (std::uint32_t j = 0; j < limit; ++j) {
      if (!(domain_[n] >> j & 1)) continue;
      if (++nodes_ > cap) {
        budget_hit_ = true;
        return true;
      }
      std::size_t const mark = trail_.size();
      if (assign(n, j) && dfs(n + 1, to, cap, on_leaf)) return true;
      undo(mark);
    }
    return false;
  }

 private:
  bool assign(std::uint64_t n, std::uint32_t j) {
    color_[n] = j;
    max_used_[n] = std::max(max_used_[n - 1], static_cast<int>(j));
    for (ValueSet const* s : by_second_[n]) {
      bool mono = true;
      for (std::size_t i = 0; i + 1 < s->size() && mono; ++i) mono = color_[(*s)[i]] == j;
      if (!mono) continue;
      std::uint64_t const top = s->back();
      if (domain_[top] >> j & 1) {
        domain_[top] &= ~(std::uint64_t{1} << j);
        trail_.push_back({top, j});
        if (domain_[top] == 0) return false;
      }
    }
    return true;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      auto [v, j] = trail_.back();
      domain_[v] |= std::uint64_t{1} << j;
      trail_.pop_back();
    }
  }

  std::uint64_t side_;
  std::uint32_t colors_;
  bool symmetry_break_;
  bool trivially_unsat_ = false;
  std::uint64_t full_ = 0;
  std::vector<std::vector<ValueSet const*>> by_second_;
  std::vector<std::uint64_t> domain_;
  std::vector<std::uint32_t> color_;
  std::vector<int> max_used_;  // max_used_[n] = largest color among 1..n
  std::vector<std::pair<std::uint64_t, std::uint32_t>> trail_;
  std::uint64_t nodes_ = 0;
  bool budget_hit_ = false;
};

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

inline AvoidanceResult avoid_backtracking(PatternSchema const& schema, std::uint64_t side, std::uint32_t colors,
                                          SearchOptions const& opts) {
  AvoidanceResult r;
  r.engine = Engine::backtracking;
  auto const sets = enumerate_value_sets(schema, side);
  std::uint64_t const cap = opts.node_budget == 0 ? UINT64_MAX : opts.node_budget;

  AvoidanceBacktracker root(sets, side, colors, opts.symmetry_break);
  if (root.trivially_unsat()) {
    r.verdict = Verdict::unsat;
    return r;
  }
  // Split the tree at a fixed depth; each prefix is one lead, searched in
  // lexicographic order, so the first avoiding coloring is the least one.
  std::uint64_t const depth = std::min<std::uint64_t>(opts.split_depth, side);
  std::vector<std::vector<std::uint8_t>> prefixes;
  root.dfs(1, depth, cap, [&] {
    auto cells = root.cells();
    cells.resize(depth);
    prefixes.push_back(std::move(cells));
    return false;
  });
  if (root.budget_hit()) {
    r.verdict = Verdict::unknown;
    r.nodes = root.nodes();
    return r;
  }
  std::uint64_t const prefix_nodes = root.nodes();
  std::uint64_t const remaining = cap - prefix_nodes;

  auto res = ordered_first_hit<std::vector<std::uint8_t>>(
      prefixes.size(), opts.workers, opts.node_budget == 0 ? 0 : remaining,
      [&](std::uint64_t idx, std::uint64_t lead_cap) {
        AvoidanceBacktracker bt(sets, side, colors, opts.symmetry_break);
        LeadOutcome<std::vector<std::uint8_t>> out;
        if (!bt.apply_prefix(prefixes[idx])) return out;
        bool hit = false;
        bt.dfs(depth + 1, side, lead_cap, [&] {
          hit = true;
          return true;
        });
        out.nodes = bt.nodes();
        out.exhausted = bt.budget_hit();
        if (hit && !out.exhausted) out.hit = bt.cells();
        return out;
      });
  r.nodes = prefix_nodes + res.nodes;
  switch (res.status) {
    case SearchStatus::found:
      r.verdict = Verdict::avoiding;
      r.coloring = Coloring(1, side, colors, std::move(*res.witness));
      break;
    case SearchStatus::none: r.verdict = Verdict::unsat; break;
    case SearchStatus::budget_exhausted: r.verdict = Verdict::unknown; break;
  }
  return r;
}

inline AvoidanceResult avoid_sat(PatternSchema const& schema, std::uint64_t side, std::uint32_t colors,
                                 SearchOptions const& opts) {
  AvoidanceResult r;
  r.engine = Engine::sat;
  auto enc = encode_avoidance(schema, side, colors, opts.symmetry_break);
  SatVerdict v = solve(enc.formula, opts.node_budget);
  r.nodes = v.decisions;
  switch (v.kind) {
    case SatVerdict::Kind::sat:
      r.verdict = Verdict::avoiding;
      r.coloring = decode_coloring(v, enc.map);
      break;
    case SatVerdict::Kind::unsat: r.verdict = Verdict::unsat; break;
    case SatVerdict::Kind::unknown: r.verdict = Verdict::unknown; break;
  }
  return r;
}

// Brute force over first-use-ordered colorings; only for tiny boxes.
inline AvoidanceResult avoid_exhaustive(PatternSchema const& schema, std::uint64_t side, std::uint32_t colors,
                                        SearchOptions const& opts) {
  AvoidanceResult r;
  r.engine = Engine::exhaustive;
  ColoringEnumerator it(1, side, colors, opts.symmetry_break,
                        opts.node_budget == 0 ? (std::uint64_t{1} << 24) : opts.node_budget);
  r.verdict = Verdict::unsat;
  while (it.next()) {
    ++r.nodes;
    Coloring col = it.current();
    if (find_instance(schema, col).status == SearchStatus::none) {
      r.verdict = Verdict::avoiding;
      r.coloring = std::move(col);
      break;
    }
  }
  return r;
}

}  // namespace detail

// Backtracking returns the lexicographically least avoiding coloring; the
// SAT engine returns some avoiding coloring. Every returned coloring is
// re-checked with find_instance.
inline AvoidanceResult find_avoiding_coloring(PatternSchema const& schema, std::uint64_t side,
                                              std::uint32_t colors, SearchOptions const& opts = {}) {
  if (side < 1) throw InputError("N must be >= 1");
  if (colors < 1 || colors > kMaxColors) throw InputError("color count must be in [1..256]");
  auto const start = std::chrono::steady_clock::now();
  AvoidanceResult r;
  switch (opts.engine) {
    case Engine::backtracking: r = detail::avoid_backtracking(schema, side, colors, opts); break;
    case Engine::sat: r = detail::avoid_sat(schema, side, colors, opts); break;
    case Engine::exhaustive: r = detail::avoid_exhaustive(schema, side, colors, opts); break;
  }
  if (r.coloring && find_instance(schema, *r.coloring).status != SearchStatus::none) {
    throw Error("internal error: avoiding coloring contains a monochromatic instance");
  }
  r.time_ms = detail::elapsed_ms(start);
  return r;
}

struct ThresholdRow {
  std::uint64_t side;
  Verdict verdict;
  std::uint64_t nodes;
  double time_ms;
};

struct ThresholdResult {
  SearchStatus status = SearchStatus::none;  // found: threshold known
  std::optional<std::uint64_t> threshold;    // least N forcing every c-coloring
  std::optional<Coloring> certificate;       // avoiding coloring of [1..threshold-1] (or best found)
  std::vector<ThresholdRow> rows;            // one row per N tried
};

// Linear scan N = 1, 2, ...: the first N without an avoiding coloring is the
// threshold. Forcing is monotone in N, so no later N needs checking.
inline ThresholdResult threshold_number(PatternSchema const& schema, std::uint32_t colors, std::uint64_t max_side,
                                        SearchOptions const& opts = {}) {
  ThresholdResult out;
  auto const start = std::chrono::steady_clock::now();
  for (std::uint64_t n = 1; n <= max_side; ++n) {
    if (opts.time_budget_ms && detail::elapsed_ms(start) > static_cast<double>(opts.time_budget_ms)) {
      out.status = SearchStatus::budget_exhausted;
      return out;
    }
    AvoidanceResult r = find_avoiding_coloring(schema, n, colors, opts);
    out.rows.push_back({n, r.verdict, r.nodes, r.time_ms});
    if (r.verdict == Verdict::avoiding) {
      out.certificate = std::move(r.coloring);
      continue;
    }
    if (r.verdict == Verdict::unsat) {
      out.status = SearchStatus::found;
      out.threshold = n;
    } else {
      out.status = SearchStatus::budget_exhausted;
    }
    return out;
  }
  out.status = SearchStatus::none;  // not forced up to max_side
  return out;
}

}  // namespace ramsey
