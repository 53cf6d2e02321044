#pragma once

// Enumeration of in-box pattern instances and monochromatic instance search.
//
// An assignment is admissible when every variable lies in [min_value..N]
// (pairwise distinct if the schema asks for it) and every term value lies in
// [1..N]. Assignments are visited in lexicographic order of the schema's
// sorted variable list. Terms are monotone in every variable, which gives
// the two pruning rules used below.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ramsey/coloring.hpp"
#include "ramsey/error.hpp"
#include "ramsey/parallel.hpp"
#include "ramsey/pattern.hpp"

namespace ramsey {

using ValueSet = std::vector<std::uint64_t>;  // sorted, duplicate-free

namespace detail {

// Walks admissible assignments depth-first. `Visit(slots, values)` is called
// at every complete assignment and returns false to stop the walk.
// `Accept(term_index, value)` filters term values as soon as the term is
// fully determined; returning false prunes that branch.
class AssignmentWalker {
 public:
  AssignmentWalker(PatternSchema const& schema, std::uint64_t side)
      : schema_(schema), side_(side), nvars_(schema.variables().size()) {
    auto const& terms = schema.terms();
    by_level_.resize(nvars_ + 1);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      std::set<std::string> vars;
      collect_variables(terms[t], vars);
      std::size_t level = 0;  // 0 = constant term, otherwise 1 + last variable index
      for (auto const& v : vars) {
        auto it = std::find(schema.variables().begin(), schema.variables().end(), v);
        level = std::max<std::size_t>(level, static_cast<std::size_t>(it - schema.variables().begin()) + 1);
      }
      by_level_[level].push_back(t);
    }
    slots_.assign(nvars_, schema.min_value());
    values_.assign(terms.size(), 0);
  }

  std::size_t variable_count() const noexcept { return nvars_; }

  // The term whose value is determined first in walk order.
  std::size_t reference_term() const {
    for (auto const& level : by_level_) {
      if (!level.empty()) return level.front();
    }
    return 0;
  }
  std::uint64_t nodes() const noexcept { return nodes_; }
  std::vector<std::uint64_t> const& slots() const noexcept { return slots_; }
  std::vector<std::uint64_t> const& values() const noexcept { return values_; }
  bool budget_hit() const noexcept { return budget_hit_; }

  // Restricts variable 0 to a single value (used to split work by lead).
  void fix_first(std::uint64_t v) { first_fixed_ = v; }
  void set_budget(std::uint64_t cap) { cap_ = cap; }

  template <class Accept, class Visit>
  bool walk(Accept&& accept, Visit&& visit) {
    for (auto t : by_level_[0]) {
      values_[t] = schema_.compiled()[t].eval(slots_.data());
      if (values_[t] < 1 || values_[t] > side_ || !accept(t, values_[t])) return true;
    }
    if (nvars_ == 0) return visit(slots_, values_);
    return rec(0, accept, visit);
  }

 private:
  // Lower bound of a later term: unassigned variables at min_value.
  bool later_terms_fit(std::size_t level) {
    for (std::size_t l = level + 2; l <= nvars_; ++l) {
      for (auto t : by_level_[l]) {
        if (schema_.compiled()[t].eval(slots_.data()) > side_) return false;
      }
    }
    return true;
  }

  bool used_before(std::size_t level, std::uint64_t v) const {
    for (std::size_t i = 0; i < level; ++i) {
      if (slots_[i] == v) return true;
    }
    return false;
  }

  template <class Accept, class Visit>
  bool rec(std::size_t level, Accept& accept, Visit& visit) {
    std::uint64_t lo = schema_.min_value();
    std::uint64_t hi = side_;
    if (level == 0 && first_fixed_) lo = hi = *first_fixed_;
    for (std::uint64_t v = lo; v <= hi; ++v) {
      if (schema_.distinct_vars() && used_before(level, v)) continue;
      if (++nodes_ > cap_) {
        budget_hit_ = true;
        return false;
      }
      slots_[level] = v;
      for (std::size_t i = level + 1; i < nvars_; ++i) slots_[i] = schema_.min_value();
      bool overflow = false;  // some term now exceeds the box: so will every larger v
      bool rejected = false;
      for (auto t : by_level_[level + 1]) {
        values_[t] = schema_.compiled()[t].eval(slots_.data());
        if (values_[t] > side_) {
          overflow = true;
          break;
        }
        if (!accept(t, values_[t])) {
          rejected = true;
          break;
        }
      }
      if (overflow || !later_terms_fit(level)) break;
      if (rejected) continue;
      if (level + 1 == nvars_) {
        if (!visit(slots_, values_)) return false;
      } else if (!rec(level + 1, accept, visit)) {
        return false;
      }
    }
    slots_[level] = schema_.min_value();
    return true;
  }

  PatternSchema const& schema_;
  std::uint64_t side_;
  std::size_t nvars_;
  std::vector<std::vector<std::size_t>> by_level_;
  std::vector<std::uint64_t> slots_;
  std::vector<std::uint64_t> values_;
  std::optional<std::uint64_t> first_fixed_;
  std::uint64_t nodes_ = 0;
  std::uint64_t cap_ = UINT64_MAX;
  bool budget_hit_ = false;
};

inline ValueSet to_value_set(std::vector<std::uint64_t> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

}  // namespace detail

inline constexpr std::uint64_t kDefaultInstanceBudget = 50'000'000;

// Every distinct value set realized by an in-box assignment, sorted
// lexicographically.
inline std::vector<ValueSet> enumerate_value_sets(PatternSchema const& schema, std::uint64_t side,
                                                  std::uint64_t budget = kDefaultInstanceBudget) {
  detail::AssignmentWalker walker(schema, side);
  walker.set_budget(budget);
  std::set<ValueSet> sets;
  walker.walk([](std::size_t, std::uint64_t) { return true; },
              [&](auto const&, auto const& values) {
                sets.insert(detail::to_value_set(values));
                return true;
              });
  if (walker.budget_hit()) throw BudgetError("instance enumeration exceeded its budget");
  return {sets.begin(), sets.end()};
}

struct Instance {
  std::vector<std::uint64_t> values;  // aligned with schema.variables()
  std::uint32_t color = 0;
  ValueSet value_set;

  Assignment assignment(PatternSchema const& schema) const {
    Assignment a;
    for (std::size_t i = 0; i < values.size(); ++i) a[schema.variables()[i]] = values[i];
    return a;
  }
  friend bool operator==(Instance const&, Instance const&) = default;
};

struct InstanceResult {
  SearchStatus status = SearchStatus::none;
  std::optional<Instance> instance;
  std::uint64_t nodes = 0;
};

// Lexicographically least monochromatic in-box instance. Work is split over
// the values of the first variable; the answer is independent of `workers`.
inline InstanceResult find_instance(PatternSchema const& schema, Coloring const& col, unsigned workers = 1,
                                    std::uint64_t budget = 0) {
  if (col.dim() != 1) throw InputError("instance search needs a 1-dimensional coloring");
  std::uint64_t const side = col.side();

  auto search_one = [&](std::optional<std::uint64_t> first, std::uint64_t cap) {
    detail::AssignmentWalker walker(schema, side);
    if (first) walker.fix_first(*first);
    walker.set_budget(cap);
    // The first term determined in walk order fixes the common color; every
    // later term is checked against it as soon as it is determined.
    std::size_t const ref = walker.reference_term();
    std::uint32_t common = 0;
    LeadOutcome<Instance> out;
    walker.walk(
        [&](std::size_t t, std::uint64_t v) {
          std::uint32_t const c = col.at(v);
          if (t == ref) {
            common = c;
            return true;
          }
          return c == common;
        },
        [&](auto const& slots, auto const& values) {
          out.hit = Instance{slots, common, detail::to_value_set(values)};
          return false;
        });
    out.nodes = walker.nodes();
    out.exhausted = walker.budget_hit();
    return out;
  };

  if (schema.variables().empty() || schema.min_value() > side) {
    auto out = schema.variables().empty() ? search_one(std::nullopt, budget == 0 ? UINT64_MAX : budget)
                                          : LeadOutcome<Instance>{};
    InstanceResult r;
    r.nodes = out.nodes;
    r.status = out.exhausted ? SearchStatus::budget_exhausted : (out.hit ? SearchStatus::found : SearchStatus::none);
    r.instance = std::move(out.hit);
    return r;
  }

  std::uint64_t const lo = schema.min_value();
  auto res = ordered_first_hit<Instance>(side - lo + 1, workers, budget, [&](std::uint64_t idx, std::uint64_t cap) {
    return search_one(lo + idx, cap);
  });
  return InstanceResult{res.status, std::move(res.witness), res.nodes};
}

// All monochromatic in-box instances in lexicographic order, up to `limit`.
inline std::vector<Instance> find_all_instances(PatternSchema const& schema, Coloring const& col,
                                                std::size_t limit = 1000) {
  if (col.dim() != 1) throw InputError("instance search needs a 1-dimensional coloring");
  detail::AssignmentWalker walker(schema, col.side());
  std::size_t const ref = walker.reference_term();
  std::uint32_t common = 0;
  std::vector<Instance> found;
  walker.walk(
      [&](std::size_t t, std::uint64_t v) {
        std::uint32_t const c = col.at(v);
        if (t == ref) {
          common = c;
          return true;
        }
        return c == common;
      },
      [&](auto const& slots, auto const& values) {
        found.push_back(Instance{slots, common, detail::to_value_set(values)});
        return found.size() < limit;
      });
  return found;
}

}  // namespace ramsey
