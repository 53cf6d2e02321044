#pragma once

// Finite sums / finite products of generator families, and detectors for
// k-AP, k-GP, k-FS and k-FP inside a finite set of positive integers.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "ramsey/error.hpp"

namespace ramsey {

using IntSet = std::set<std::uint64_t>;

enum class FsOp { additive, multiplicative };

struct FSFamily {
  std::vector<std::uint64_t> generators;
  FsOp op = FsOp::additive;

  void validate() const {
    if (generators.empty()) throw InputError("FS family needs at least one generator");
    std::uint64_t const floor = op == FsOp::multiplicative ? 2 : 1;
    for (auto g : generators) {
      if (g < floor) {
        throw InputError(op == FsOp::multiplicative ? "multiplicative generators must be >= 2"
                                                    : "generators must be >= 1");
      }
    }
  }
};

inline constexpr std::size_t kMaxFsGenerators = 30;

// All s_alpha over nonempty alpha, as a sorted set.
inline IntSet fs_set(FSFamily const& fam) {
  fam.validate();
  if (fam.generators.size() > kMaxFsGenerators) throw BudgetError("FS family limited to 30 generators");
  std::vector<std::uint64_t> acc;
  for (auto g : fam.generators) {
    std::vector<std::uint64_t> next = acc;
    next.push_back(g);
    for (auto s : acc) {
      next.push_back(fam.op == FsOp::additive ? detail::checked_add(s, g) : detail::checked_mul(s, g));
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    acc = std::move(next);
  }
  return IntSet(acc.begin(), acc.end());
}

inline IntSet fs_set(std::vector<std::uint64_t> const& generators, FsOp op = FsOp::additive) {
  return fs_set(FSFamily{generators, op});
}

// Progression witness: {start, start*step...} or {start, start+step, ...}.
struct Progression {
  std::uint64_t start;
  std::uint64_t step;
  friend bool operator==(Progression const&, Progression const&) = default;
};

// Least (a, d) in lexicographic order with {a, a+d, ..., a+(k-1)d} in A, d >= 1.
inline std::optional<Progression> contains_kAP(IntSet const& A, std::size_t k) {
  if (k == 0) throw InputError("k must be >= 1");
  if (A.empty()) return std::nullopt;
  if (k == 1) return Progression{*A.begin(), 1};
  std::uint64_t const top = *A.rbegin();
  for (auto a : A) {
    for (std::uint64_t d = 1; a + (k - 1) * d <= top; ++d) {
      bool ok = true;
      for (std::size_t i = 1; i < k && ok; ++i) ok = A.count(a + i * d) != 0;
      if (ok) return Progression{a, d};
    }
  }
  return std::nullopt;
}

// Least (a, r) with {a, ar, ..., a r^(k-1)} in A and ratio r >= 2.
inline std::optional<Progression> contains_kGP(IntSet const& A, std::size_t k) {
  if (k == 0) throw InputError("k must be >= 1");
  if (A.empty()) return std::nullopt;
  if (k == 1) return Progression{*A.begin(), 2};
  std::uint64_t const top = *A.rbegin();
  for (auto a : A) {
    for (std::uint64_t r = 2; detail::sat_mul(a, r) <= top; ++r) {
      bool ok = true;
      std::uint64_t v = a;
      for (std::size_t i = 1; i < k && ok; ++i) {
        v = detail::sat_mul(v, r);
        ok = v <= top && A.count(v) != 0;
      }
      if (ok) return Progression{a, r};
    }
  }
  return std::nullopt;
}

inline constexpr std::uint64_t kDefaultStructureBudget = 50'000'000;

namespace detail {

// DFS over strictly increasing generator tuples drawn from A, in lexicographic
// order, extending the running FS/FP set incrementally.
class FsSearch {
 public:
  FsSearch(IntSet const& A, std::size_t k, FsOp op, std::uint64_t budget)
      : A_(A), k_(k), op_(op), budget_(budget), pool_(A.begin(), A.end()) {}

  std::optional<std::vector<std::uint64_t>> run() {
    std::vector<std::uint64_t> sums;
    if (dfs(0, sums)) return chosen_;
    return std::nullopt;
  }

 private:
  bool dfs(std::size_t from, std::vector<std::uint64_t> const& sums) {
    if (chosen_.size() == k_) return true;
    for (std::size_t i = from; i < pool_.size(); ++i) {
      if (++nodes_ > budget_) throw BudgetError("FS/FP containment search exceeded its node budget");
      std::uint64_t const g = pool_[i];
      if (op_ == FsOp::multiplicative && g < 2) continue;
      std::vector<std::uint64_t> next = sums;
      next.push_back(g);
      bool ok = true;
      for (auto s : sums) {
        std::uint64_t const v = op_ == FsOp::additive ? sat_add(s, g) : sat_mul(s, g);
        if (A_.count(v) == 0) {
          ok = false;
          break;
        }
        next.push_back(v);
      }
      if (!ok) continue;
      chosen_.push_back(g);
      if (dfs(i + 1, next)) return true;
      chosen_.pop_back();
    }
    return false;
  }

  IntSet const& A_;
  std::size_t k_;
  FsOp op_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::vector<std::uint64_t> pool_;
  std::vector<std::uint64_t> chosen_;
};

}  // namespace detail

// Lexicographically least a_1 < ... < a_k with FS(a_1..a_k) in A. For k = 1
// any element is a witness.
inline std::optional<std::vector<std::uint64_t>> contains_kFS(IntSet const& A, std::size_t k,
                                                              std::uint64_t budget = kDefaultStructureBudget) {
  if (k == 0) throw InputError("k must be >= 1");
  return detail::FsSearch(A, k, FsOp::additive, budget).run();
}

// Multiplicative twin; generators >= 2 except in the k = 1 degenerate case,
// where a single element of A is its own finite product.
inline std::optional<std::vector<std::uint64_t>> contains_kFP(IntSet const& A, std::size_t k,
                                                              std::uint64_t budget = kDefaultStructureBudget) {
  if (k == 0) throw InputError("k must be >= 1");
  if (k == 1) {
    if (A.empty()) return std::nullopt;
    return std::vector<std::uint64_t>{*A.begin()};
  }
  return detail::FsSearch(A, k, FsOp::multiplicative, budget).run();
}

struct StructureReport {
  std::optional<Progression> ap;
  std::optional<Progression> gp;
  std::optional<std::vector<std::uint64_t>> fs;
  std::optional<std::vector<std::uint64_t>> fp;

  bool all() const { return ap && gp && fs && fp; }
};

inline StructureReport structure_report(IntSet const& A, std::size_t k,
                                        std::uint64_t budget = kDefaultStructureBudget) {
  return StructureReport{contains_kAP(A, k), contains_kGP(A, k), contains_kFS(A, k, budget),
                         contains_kFP(A, k, budget)};
}

}  // namespace ramsey
