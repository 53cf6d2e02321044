#pragma once

// Idempotents, left ideals and central sets of a finite semigroup given by
// its Cayley table. Elements are 0..n-1 and the operation is written
// additively: table(i, j) = i + j.
//
// On a finite S every ultrafilter is principal, so the ultrafilter notions
// collapse onto elements: the ultrafilter at e is idempotent iff e + e = e,
// and a subset A is central iff it contains a minimal idempotent.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ramsey/error.hpp"

namespace ramsey {

using Element = std::uint32_t;
using ElementSet = std::vector<Element>;  // sorted, duplicate-free

struct Triple3 {
  Element i, j, k;
  friend bool operator==(Triple3 const&, Triple3 const&) = default;
};

class NonAssociativeError : public InputError {
 public:
  explicit NonAssociativeError(Triple3 t)
      : InputError("not associative: (" + std::to_string(t.i) + "+" + std::to_string(t.j) + ")+" +
                   std::to_string(t.k) + " != " + std::to_string(t.i) + "+(" + std::to_string(t.j) + "+" +
                   std::to_string(t.k) + ")"),
        triple_(t) {}

  Triple3 triple() const noexcept { return triple_; }

 private:
  Triple3 triple_;
};

class CayleyTable {
 public:
  // Row-major n*n entries; throws NonAssociativeError with the first
  // violating triple in lexicographic order.
  CayleyTable(std::size_t n, std::vector<Element> table) : n_(n), table_(std::move(table)) {
    if (n_ == 0) throw InputError("semigroup order must be >= 1");
    if (table_.size() != n_ * n_) throw InputError("table must have n*n entries");
    for (auto v : table_) {
      if (v >= n_) throw InputError("table entry out of range");
    }
    if (auto t = first_nonassociative()) throw NonAssociativeError(*t);
  }

  std::size_t order() const noexcept { return n_; }
  Element op(Element i, Element j) const noexcept { return table_[i * n_ + j]; }
  std::vector<Element> const& entries() const noexcept { return table_; }

  // Lexicographically least (i, j, k) with (i+j)+k != i+(j+k), if any.
  static std::optional<Triple3> first_nonassociative(std::size_t n, std::vector<Element> const& t) {
    for (Element i = 0; i < n; ++i) {
      for (Element j = 0; j < n; ++j) {
        Element const ij = t[i * n + j];
        for (Element k = 0; k < n; ++k) {
          if (t[ij * n + k] != t[i * n + t[j * n + k]]) return Triple3{i, j, k};
        }
      }
    }
    return std::nullopt;
  }

 private:
  std::optional<Triple3> first_nonassociative() const { return first_nonassociative(n_, table_); }

  std::size_t n_;
  std::vector<Element> table_;
};

// "n" followed by n rows of n entries.
inline CayleyTable load_table(std::string const& text) {
  std::istringstream in(text);
  long long n = 0;
  if (!(in >> n) || n <= 0 || n > 4096) throw InputError("malformed table header");
  std::vector<Element> entries;
  long long v;
  while (in >> v) {
    if (v < 0 || v >= n) throw InputError("table entry " + std::to_string(v) + " out of range");
    entries.push_back(static_cast<Element>(v));
  }
  if (!in.eof()) throw InputError("malformed table entry");
  if (entries.size() != static_cast<std::size_t>(n * n)) {
    throw InputError("expected " + std::to_string(n * n) + " entries, got " + std::to_string(entries.size()));
  }
  return CayleyTable(static_cast<std::size_t>(n), std::move(entries));
}

inline ElementSet idempotents(CayleyTable const& t) {
  ElementSet out;
  for (Element e = 0; e < t.order(); ++e) {
    if (t.op(e, e) == e) out.push_back(e);
  }
  return out;
}

// S + L is contained in L.
inline bool is_left_ideal(CayleyTable const& t, ElementSet const& L) {
  if (L.empty()) return false;
  std::vector<char> in(t.order(), 0);
  for (auto x : L) in[x] = 1;
  for (Element s = 0; s < t.order(); ++s) {
    for (auto x : L) {
      if (!in[t.op(s, x)]) return false;
    }
  }
  return true;
}

// The principal left ideal {x} u (S + x).
inline ElementSet principal_left_ideal(CayleyTable const& t, Element x) {
  std::vector<char> in(t.order(), 0);
  in[x] = 1;
  for (Element s = 0; s < t.order(); ++s) in[t.op(s, x)] = 1;
  ElementSet out;
  for (Element e = 0; e < t.order(); ++e) {
    if (in[e]) out.push_back(e);
  }
  return out;
}

// Every left ideal contains a principal one, so the minimal left ideals are
// the inclusion-minimal principal left ideals. Sorted by least element.
inline std::vector<ElementSet> minimal_left_ideals(CayleyTable const& t) {
  std::vector<ElementSet> principal;
  for (Element x = 0; x < t.order(); ++x) principal.push_back(principal_left_ideal(t, x));
  std::sort(principal.begin(), principal.end());
  principal.erase(std::unique(principal.begin(), principal.end()), principal.end());
  std::vector<ElementSet> out;
  for (auto const& L : principal) {
    bool minimal = true;
    for (auto const& J : principal) {
      if (J.size() < L.size() && std::includes(L.begin(), L.end(), J.begin(), J.end())) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(L);
  }
  return out;
}

// e1 <=_L e2 iff e1 = e1 + e2.
inline bool leq_L(CayleyTable const& t, Element e1, Element e2) { return t.op(e1, e2) == e1; }

inline std::vector<std::pair<Element, Element>> leq_L_relation(CayleyTable const& t) {
  std::vector<std::pair<Element, Element>> out;
  auto const idem = idempotents(t);
  for (auto a : idem) {
    for (auto b : idem) {
      if (leq_L(t, a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

// <=_L is only a preorder, so "minimal" means: every idempotent f with
// f <=_L e also satisfies e <=_L f.
inline ElementSet minimal_idempotents(CayleyTable const& t) {
  auto const idem = idempotents(t);
  ElementSet out;
  for (auto e : idem) {
    bool minimal = true;
    for (auto f : idem) {
      if (leq_L(t, f, e) && !leq_L(t, e, f)) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(e);
  }
  return out;
}

inline bool is_central(CayleyTable const& t, ElementSet const& subset) {
  for (auto x : subset) {
    if (x >= t.order()) throw InputError("subset element out of range");
  }
  auto const minimal = minimal_idempotents(t);
  return std::any_of(subset.begin(), subset.end(),
                     [&](Element x) { return std::binary_search(minimal.begin(), minimal.end(), x); });
}

// A - s = {t : s + t in A}.
inline ElementSet translate_set(CayleyTable const& t, ElementSet const& A, Element s) {
  std::vector<char> in(t.order(), 0);
  for (auto a : A) in.at(a) = 1;
  ElementSet out;
  for (Element x = 0; x < t.order(); ++x) {
    if (in[t.op(s, x)]) out.push_back(x);
  }
  return out;
}

struct AlgebraReport {
  ElementSet idempotents;
  std::vector<ElementSet> minimal_left_ideals;
  ElementSet minimal_idempotents;
  std::vector<std::pair<Element, Element>> leq_L;
};

inline AlgebraReport analyze(CayleyTable const& t) {
  return AlgebraReport{idempotents(t), minimal_left_ideals(t), minimal_idempotents(t), leq_L_relation(t)};
}

}  // namespace ramsey
