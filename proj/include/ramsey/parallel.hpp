#pragma once

// Deterministic parallel search over an ordered list of subproblems ("leads").
//
// Each lead is searched independently up to its own first hit. The answer is
// the hit of the smallest lead, and the node count is the sum over leads up
// to and including that one, so results do not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace ramsey {

enum class SearchStatus { found, none, budget_exhausted };

inline char const* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::found: return "found";
    case SearchStatus::none: return "none";
    case SearchStatus::budget_exhausted: return "budget_exhausted";
  }
  return "?";
}

template <class W>
struct LeadOutcome {
  std::optional<W> hit;
  std::uint64_t nodes = 0;
  bool exhausted = false;  // the lead hit its node cap before finishing
};

template <class W>
struct OrderedResult {
  SearchStatus status = SearchStatus::none;
  std::optional<W> witness;
  std::uint64_t nodes = 0;
  std::uint64_t lead = 0;  // index of the winning lead when found
};

inline unsigned clamp_workers(unsigned workers) { return std::max(1u, std::min(workers, 256u)); }

// fn(lead_index, node_cap) -> LeadOutcome<W>. `budget` bounds the total node
// count accumulated in lead order; 0 means unlimited.
template <class W, class Fn>
OrderedResult<W> ordered_first_hit(std::uint64_t lead_count, unsigned workers, std::uint64_t budget, Fn&& fn) {
  std::uint64_t const cap = budget == 0 ? std::numeric_limits<std::uint64_t>::max() : budget;
  unsigned const n = clamp_workers(workers);
  if (n == 1) {
    OrderedResult<W> result;
    for (std::uint64_t i = 0; i < lead_count; ++i) {
      LeadOutcome<W> out = fn(i, cap);
      result.nodes += out.nodes;
      if (result.nodes > cap || out.exhausted) {
        result.status = SearchStatus::budget_exhausted;
        return result;
      }
      if (out.hit) {
        result.status = SearchStatus::found;
        result.witness = std::move(out.hit);
        result.lead = i;
        return result;
      }
    }
    result.status = SearchStatus::none;
    return result;
  }

  std::vector<std::optional<LeadOutcome<W>>> outcomes(lead_count);
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> stop_at{std::numeric_limits<std::uint64_t>::max()};
  std::atomic<std::uint64_t> total{0};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&] {
    try {
      for (;;) {
        if (total.load() > cap) return;
        std::uint64_t const idx = next.fetch_add(1);
        if (idx >= lead_count || idx > stop_at.load()) return;
        LeadOutcome<W> out = fn(idx, cap);
        bool const terminal = out.hit.has_value() || out.exhausted;
        total.fetch_add(out.nodes);
        outcomes[idx] = std::move(out);
        if (terminal) {
          std::uint64_t cur = stop_at.load();
          while (idx < cur && !stop_at.compare_exchange_weak(cur, idx)) {
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
      stop_at.store(0);
    }
  };

  {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  OrderedResult<W> result;
  for (std::uint64_t i = 0; i < lead_count; ++i) {
    auto& out = outcomes[i];
    if (!out) {
      // Only reachable once the cumulative budget was already exceeded.
      result.status = SearchStatus::budget_exhausted;
      return result;
    }
    result.nodes += out->nodes;
    if (result.nodes > cap || out->exhausted) {
      result.status = SearchStatus::budget_exhausted;
      return result;
    }
    if (out->hit) {
      result.status = SearchStatus::found;
      result.witness = std::move(out->hit);
      result.lead = i;
      return result;
    }
  }
  result.status = SearchStatus::none;
  return result;
}

}  // namespace ramsey
