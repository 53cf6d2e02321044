#pragma once

// Finite witnesses for multi-dimensional finite-sum statements.
//
//  * FS witnesses: a sequence whose finite sums are monochromatic.
//  * Grid witnesses: a sequence a_0..a_{L-1} such that for every cut tuple
//    0 <= m_0 < m_1 < ... < m_d <= L, every point (x_1..x_d) with x_i in
//    FS(a_{m_{i-1}} .. a_{m_i - 1}) gets one common color.
//  * Composed witnesses: the same, with the point replaced by the
//    left-nested composition (((x_1 o x_2) o x_3) ... ) o x_d.
//  * Bundles: lambda A u lambda B u lambda(A+B) u AB (multiplicative bundle)
//    and (lambda+A) u (lambda+B) u (lambda+AB) u (A+B) (additive bundle),
//    plus their three-variable corollary patterns.
//
// Infinite central sets are replaced by finite sets B; only
// monochromaticity and the structures inside A are checked.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ramsey/coloring.hpp"
#include "ramsey/error.hpp"
#include "ramsey/instances.hpp"
#include "ramsey/parallel.hpp"
#include "ramsey/pattern.hpp"
#include "ramsey/structures.hpp"

namespace ramsey {

inline constexpr std::uint64_t kDefaultFinderBudget = 200'000'000;

struct MonoCheck {
  bool monochromatic = false;
  std::optional<std::uint32_t> color;  // set when monochromatic
  std::uint64_t points = 0;            // points (or values) examined
};

template <class W>
struct FinderResult {
  SearchStatus status = SearchStatus::none;
  std::optional<W> witness;
  std::uint32_t color = 0;
  std::uint64_t nodes = 0;
};

namespace detail {

// Running color agreement; the first observed color becomes the common one.
struct ColorAgreement {
  std::optional<std::uint32_t> color;
  bool ok = true;
  std::uint64_t points = 0;

  void see(std::uint32_t c) {
    ++points;
    if (!color) color = c;
    else if (*color != c) ok = false;
  }

  MonoCheck result() const { return MonoCheck{ok && color.has_value(), ok ? color : std::nullopt, points}; }
};

template <class Col>
void require_in_box(Col const& col, std::uint64_t v) {
  if (v < 1 || v > col.side()) {
    throw OutOfBoxError("value " + std::to_string(v) + " outside [1.." + std::to_string(col.side()) + "]");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// FS witnesses

inline MonoCheck check_fs_witness(Coloring const& col, std::vector<std::uint64_t> const& gens, std::size_t m0,
                                  std::size_t m1) {
  if (col.dim() != 1) throw InputError("FS witness needs a 1-dimensional coloring");
  if (!(m0 < m1 && m1 <= gens.size())) throw InputError("window must satisfy m0 < m1 <= len");
  std::vector<std::uint64_t> window(gens.begin() + static_cast<std::ptrdiff_t>(m0),
                                    gens.begin() + static_cast<std::ptrdiff_t>(m1));
  detail::ColorAgreement agree;
  for (auto v : fs_set(window)) {
    detail::require_in_box(col, v);
    agree.see(col.at(v));
  }
  return agree.result();
}

inline MonoCheck check_fs_witness(Coloring const& col, std::vector<std::uint64_t> const& gens) {
  return check_fs_witness(col, gens, 0, gens.size());
}

// Lexicographically least a_0 <= a_1 <= ... <= a_{k-1} whose finite sums are
// in the box and monochromatic. Repeated generators are allowed: FS(a, a) is
// {a, 2a}.
//
// The finders are templated on the coloring so that tests can substitute a
// view that records which cells were read.
template <class Col = Coloring>
FinderResult<std::vector<std::uint64_t>> find_fs_witness(Col const& col, std::size_t k,
                                                                unsigned workers = 1,
                                                                std::uint64_t budget = kDefaultFinderBudget) {
  if (col.dim() != 1) throw InputError("FS witness needs a 1-dimensional coloring");
  if (k == 0) throw InputError("k must be >= 1");
  std::uint64_t const side = col.side();

  struct Walk {
    Walk(Col const& c, std::size_t kk, std::uint64_t budget_cap) : col(c), k(kk), cap(budget_cap) {}

    Col const& col;
    std::size_t k;
    std::uint64_t cap;
    std::uint64_t nodes = 0;
    bool exhausted = false;
    std::vector<std::uint64_t> chosen;
    std::vector<std::uint64_t> sums;  // FS of `chosen`; each level appends g and (old sums + g)
    std::uint64_t total = 0;          // sum of `chosen`
    std::uint32_t color = 0;

    bool dfs() {
      if (chosen.size() == k) return true;
      std::uint64_t const side = col.side();
      std::size_t const have = sums.size();
      for (std::uint64_t g = chosen.back(); g <= side; ++g) {
        if (++nodes > cap) {
          exhausted = true;
          return false;
        }
        // The full sum of the chosen generators is the largest old sum;
        // once it overflows, so does every larger g.
        if (total + g > side) break;
        sums.resize(have);
        sums.push_back(g);
        bool mismatch = col.at(g) != color;
        for (std::size_t i = 0; i < have && !mismatch; ++i) {
          std::uint64_t const v = sums[i] + g;
          mismatch = col.at(v) != color;
          sums.push_back(v);
        }
        if (mismatch) continue;
        chosen.push_back(g);
        total += g;
        if (dfs()) return true;
        total -= g;
        chosen.pop_back();
        if (exhausted) return false;
      }
      sums.resize(have);
      return false;
    }
  };

  auto res = ordered_first_hit<std::vector<std::uint64_t>>(
      side, workers, budget, [&](std::uint64_t idx, std::uint64_t cap) {
        Walk w(col, k, cap);
        std::uint64_t const a0 = idx + 1;
        LeadOutcome<std::vector<std::uint64_t>> out;
        w.nodes = 1;
        w.chosen.reserve(k);
        w.chosen.push_back(a0);
        w.sums.reserve(std::size_t{1} << std::min<std::size_t>(k, 20));
        w.sums.push_back(a0);
        w.total = a0;
        w.color = col.at(a0);
        if (w.dfs()) out.hit = w.chosen;
        out.nodes = w.nodes;
        out.exhausted = w.exhausted;
        return out;
      });
  FinderResult<std::vector<std::uint64_t>> r{res.status, std::move(res.witness), 0, res.nodes};
  if (r.witness) r.color = col.at(r.witness->front());
  return r;
}

// ---------------------------------------------------------------------------
// Grid witnesses

struct CutGrid {
  std::vector<std::uint64_t> sequence;
  std::vector<std::size_t> cuts;  // m_0 < m_1 < ... < m_d <= sequence.size()

  std::size_t dim() const { return cuts.empty() ? 0 : cuts.size() - 1; }

  void validate() const {
    if (cuts.size() < 2) throw InputError("cut tuple needs at least m_0 and m_1");
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      if (cuts[i - 1] >= cuts[i]) throw InputError("cuts must be strictly increasing");
    }
    if (cuts.back() > sequence.size()) throw InputError("last cut exceeds the sequence length");
    for (auto a : sequence) {
      if (a == 0) throw InputError("sequence entries must be positive");
    }
  }

  // FS of block i (1-based): a_{m_{i-1}} .. a_{m_i - 1}.
  IntSet block(std::size_t i) const {
    std::vector<std::uint64_t> gens(sequence.begin() + static_cast<std::ptrdiff_t>(cuts[i - 1]),
                                    sequence.begin() + static_cast<std::ptrdiff_t>(cuts[i]));
    return fs_set(gens);
  }
};

namespace detail {

// Calls fn(point) for every point of the product of `blocks`.
template <class Fn>
void for_each_product(std::vector<std::vector<std::uint64_t>> const& blocks, Fn&& fn) {
  std::vector<std::uint64_t> point(blocks.size());
  std::vector<std::size_t> idx(blocks.size(), 0);
  for (auto const& b : blocks) {
    if (b.empty()) return;
  }
  for (;;) {
    for (std::size_t i = 0; i < blocks.size(); ++i) point[i] = blocks[i][idx[i]];
    if (!fn(point)) return;
    std::size_t i = blocks.size();
    while (i > 0) {
      --i;
      if (++idx[i] < blocks[i].size()) break;
      idx[i] = 0;
      if (i == 0) return;
    }
    if (blocks.empty()) return;
  }
}

// Calls fn(cuts) for each m_0 < ... < m_{d-1} < last, with cuts[d] = last.
template <class Fn>
void for_each_cut_ending_at(std::size_t d, std::size_t last, Fn&& fn) {
  if (last < d) return;
  std::vector<std::size_t> cuts(d + 1);
  cuts[d] = last;
  // choose d strictly increasing values from [0, last)
  std::vector<std::size_t> c(d);
  for (std::size_t i = 0; i < d; ++i) c[i] = i;
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) cuts[i] = c[i];
    if (!fn(cuts)) return;
    std::size_t i = d;
    while (i > 0 && c[i - 1] == last - d + (i - 1)) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t j = i; j < d; ++j) c[j] = c[j - 1] + 1;
  }
}

}  // namespace detail

inline MonoCheck check_grid_witness(Coloring const& col, CutGrid const& grid) {
  grid.validate();
  if (grid.dim() != static_cast<std::size_t>(col.dim())) throw InputError("grid dimension does not match coloring");
  std::vector<std::vector<std::uint64_t>> blocks;
  for (std::size_t i = 1; i <= grid.dim(); ++i) {
    IntSet b = grid.block(i);
    for (auto v : b) detail::require_in_box(col, v);
    blocks.emplace_back(b.begin(), b.end());
  }
  detail::ColorAgreement agree;
  detail::for_each_product(blocks, [&](std::vector<std::uint64_t> const& p) {
    agree.see(col.color_of(p));
    return true;
  });
  return agree.result();
}

// All cut tuples of the sequence at once: one common color across every
// tuple realizable with m_d <= len.
template <class Col = Coloring>
MonoCheck check_grid_sequence(Col const& col, std::vector<std::uint64_t> const& seq) {
  std::size_t const d = static_cast<std::size_t>(col.dim());
  detail::ColorAgreement agree;
  for (std::size_t last = d; last <= seq.size(); ++last) {
    detail::for_each_cut_ending_at(d, last, [&](std::vector<std::size_t> const& cuts) {
      CutGrid g{seq, cuts};
      std::vector<std::vector<std::uint64_t>> blocks;
      for (std::size_t i = 1; i <= d; ++i) {
        IntSet b = g.block(i);
        for (auto v : b) detail::require_in_box(col, v);
        blocks.emplace_back(b.begin(), b.end());
      }
      detail::for_each_product(blocks, [&](std::vector<std::uint64_t> const& p) {
        agree.see(col.color_of(p));
        return true;
      });
      return true;
    });
  }
  return agree.result();
}

// Lexicographically least a_0..a_{L-1} in [1..N] such that every cut tuple
// is in the box and all of them share one color. Existence at a fixed N is
// not guaranteed.
inline constexpr std::size_t kMaxGridLength = 20;

template <class Col = Coloring>
FinderResult<std::vector<std::uint64_t>> find_grid_witness(Col const& col, std::size_t length,
                                                           unsigned workers = 1,
                                                           std::uint64_t budget = kDefaultFinderBudget) {
  std::size_t const d = static_cast<std::size_t>(col.dim());
  if (length < d) throw InputError("sequence length must be at least the dimension");
  if (length > kMaxGridLength) throw InputError("sequence length above " + std::to_string(kMaxGridLength));
  std::uint64_t const side = col.side();

  // Window [i, j) holds the sorted FS of a_i..a_{j-1}: at most 2^(j-i) - 1
  // values, stored in one flat buffer.
  struct Walk {
    Walk(Col const& c, std::size_t dd, std::size_t len, std::uint64_t budget_cap)
        : col(c), d(dd), length(len), cap(budget_cap), win_off((len + 1) * (len + 1)),
          win_len((len + 1) * (len + 1), 0), fresh_off(len + 1), fresh_len(len + 1, 0), blocks(dd), point(dd),
          idx(dd), cut(dd) {
      std::size_t size = 0;
      for (std::size_t i = 0; i <= len; ++i) {
        for (std::size_t j = i + 1; j <= len; ++j) {
          win_off[i * (len + 1) + j] = size;
          size += (std::size_t{1} << (j - i)) - 1;
        }
      }
      win.resize(size);
      size = 0;
      for (std::size_t i = 0; i < len; ++i) {
        fresh_off[i] = size;
        size += std::size_t{1} << (len - 1 - i);
      }
      fresh.resize(size);
      seq.reserve(len);
    }

    struct Block {
      std::uint64_t const* data;
      std::size_t size;
    };

    Col const& col;
    std::size_t d;
    std::size_t length;
    std::uint64_t cap;
    std::uint64_t nodes = 0;
    bool exhausted = false;
    std::vector<std::uint64_t> seq;
    std::optional<std::uint32_t> common;
    std::vector<std::uint64_t> win;
    std::vector<std::size_t> win_off, win_len;
    std::vector<std::uint64_t> fresh;  // fresh[i]: sums of [i, t) that use a_{t-1}
    std::vector<std::size_t> fresh_off, fresh_len;
    std::vector<Block> blocks;
    std::vector<std::uint64_t> point;
    std::vector<std::size_t> idx;
    std::vector<std::size_t> cut;

    std::size_t slot(std::size_t i, std::size_t j) const { return i * (length + 1) + j; }
    Block window(std::size_t i, std::size_t j) const { return {win.data() + win_off[slot(i, j)], win_len[slot(i, j)]}; }

    // False if a sum leaves the box. Window [i, t) can be a block only when
    // i >= d - 1 - (length - t); the widest such window has the largest sum.
    bool extend_fresh() {
      std::size_t const t = seq.size();
      std::uint64_t const a = seq.back();
      std::size_t const tail = length - t;
      std::size_t const lo = d - 1 > tail ? d - 1 - tail : 0;
      std::uint64_t widest = 0;
      for (std::size_t i = lo; i < t; ++i) widest += seq[i];
      if (widest > col.side()) return false;
      for (std::size_t i = 0; i < t; ++i) {
        std::uint64_t* f = fresh.data() + fresh_off[i];
        std::size_t n = 0;
        f[n++] = a;
        if (i + 1 < t) {
          Block const prev = window(i, t - 1);
          for (std::size_t k = 0; k < prev.size; ++k) f[n++] = prev.data[k] + a;
        }
        fresh_len[i] = n;
      }
      return true;
    }

    // Records the full windows ending at t once a_{t-1} is accepted.
    void commit_windows() {
      std::size_t const t = seq.size();
      for (std::size_t i = 0; i < t; ++i) {
        std::uint64_t* w = win.data() + win_off[slot(i, t)];
        std::uint64_t const* f = fresh.data() + fresh_off[i];
        std::size_t n;
        if (i + 1 == t) {
          w[0] = f[0];
          n = 1;
        } else {
          Block const prev = window(i, t - 1);
          n = static_cast<std::size_t>(std::merge(prev.data, prev.data + prev.size, f, f + fresh_len[i], w) - w);
          n = static_cast<std::size_t>(std::unique(w, w + n) - w);
        }
        win_len[slot(i, t)] = n;
      }
    }

    bool see(std::uint32_t c) {
      if (!common) common = c;
      return *common == c;
    }

    // Every point of the product of the current blocks.
    bool check_product() {
      for (std::size_t i = 0; i < d; ++i) idx[i] = 0;
      for (;;) {
        for (std::size_t i = 0; i < d; ++i) point[i] = blocks[i].data[idx[i]];
        if (!see(col.color_of(point))) return false;
        std::size_t i = d;
        while (i > 0) {
          --i;
          if (++idx[i] < blocks[i].size) break;
          idx[i] = 0;
          if (i == 0) return true;
        }
      }
    }

    // Checks every cut tuple with m_d = t against the common color. Points
    // whose last coordinate avoids a_{t-1} were checked one level up (same
    // cuts with m_d = t - 1), so the last block is restricted to fresh sums.
    bool check_new_cuts() {
      std::size_t const t = seq.size();
      if (t < d) return true;
      for (std::size_t i = 0; i < d; ++i) cut[i] = i;
      for (;;) {
        for (std::size_t i = 0; i + 1 < d; ++i) blocks[i] = window(cut[i], cut[i + 1]);
        blocks[d - 1] = Block{fresh.data() + fresh_off[cut[d - 1]], fresh_len[cut[d - 1]]};
        if (!check_product()) return false;
        std::size_t i = d;
        while (i > 0 && cut[i - 1] == t - d + (i - 1)) --i;
        if (i == 0) return true;
        ++cut[i - 1];
        for (std::size_t j = i; j < d; ++j) cut[j] = cut[j - 1] + 1;
      }
    }

    // Each level restores the common color it saw on entry when backtracking.
    bool rec() {
      if (seq.size() == length) return true;
      std::uint64_t const side = col.side();
      for (std::uint64_t a = 1; a <= side; ++a) {
        if (++nodes > cap) {
          exhausted = true;
          return false;
        }
        auto const saved = common;
        seq.push_back(a);
        bool const fits = extend_fresh();
        bool const ok = fits && check_new_cuts();
        if (ok) {
          commit_windows();
          if (rec()) return true;
        }
        seq.pop_back();
        common = saved;
        if (exhausted || !fits) break;
      }
      return false;
    }
  };

  // Walks keep their buffers between leads; one per running worker.
  std::mutex pool_mu;
  std::vector<std::unique_ptr<Walk>> pool;
  auto run_lead = [&](std::uint64_t lead, std::uint64_t cap) {
    std::unique_ptr<Walk> walk;
    {
      std::lock_guard<std::mutex> lock(pool_mu);
      if (pool.empty()) {
        walk = std::make_unique<Walk>(col, d, length, cap);
      } else {
        walk = std::move(pool.back());
        pool.pop_back();
      }
    }
    Walk& w = *walk;
    w.cap = cap;
    w.nodes = 1;
    w.exhausted = false;
    w.common.reset();
    w.seq.assign(1, lead + 1);
    LeadOutcome<std::vector<std::uint64_t>> out;
    if (w.extend_fresh() && w.check_new_cuts()) {
      w.commit_windows();
      if (w.rec()) out.hit = w.seq;
    }
    out.nodes = w.nodes;
    out.exhausted = w.exhausted;
    std::lock_guard<std::mutex> lock(pool_mu);
    pool.push_back(std::move(walk));
    return out;
  };

  auto res = ordered_first_hit<std::vector<std::uint64_t>>(side, workers, budget, run_lead);
  FinderResult<std::vector<std::uint64_t>> r{res.status, std::move(res.witness), 0, res.nodes};
  // Cuts (0, 1, ..., d) pick the point (a_0, ..., a_{d-1}), one of the grid points.
  if (r.witness) {
    std::vector<std::uint64_t> p(r.witness->begin(), r.witness->begin() + static_cast<std::ptrdiff_t>(d));
    r.color = col.color_of(p);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Composed witnesses

// A binary operation on [1..N]: an explicit table or a builtin. Builtins are
// exact; a result above N escapes the box.
class OpTable {
 public:
  enum class Kind { table, multiplication, addition, constant };

  static OpTable multiplication(std::uint64_t side) { return OpTable(Kind::multiplication, side); }
  static OpTable addition(std::uint64_t side) { return OpTable(Kind::addition, side); }
  static OpTable constant(std::uint64_t side, std::uint64_t value) {
    OpTable t(Kind::constant, side);
    if (value < 1 || value > side) throw InputError("constant operation value outside [1..N]");
    t.constant_ = value;
    return t;
  }
  static OpTable table(std::uint64_t side, std::vector<std::uint64_t> values) {
    if (values.size() != side * side) throw InputError("operation table must have N*N entries");
    for (auto v : values) {
      if (v < 1 || v > side) throw InputError("operation table value outside [1..N]");
    }
    OpTable t(Kind::table, side);
    t.values_ = std::move(values);
    return t;
  }

  // "N" then N lines of N values in [1..N].
  static OpTable parse(std::string const& text) {
    std::istringstream in(text);
    std::uint64_t n = 0;
    if (!(in >> n) || n == 0) throw InputError("malformed operation table header");
    std::vector<std::uint64_t> vals;
    std::uint64_t v;
    while (in >> v) vals.push_back(v);
    if (!in.eof()) throw InputError("malformed operation table entry");
    return table(n, std::move(vals));
  }

  Kind kind() const noexcept { return kind_; }
  std::uint64_t side() const noexcept { return side_; }
  std::vector<std::uint64_t> const& values() const noexcept { return values_; }
  std::uint64_t constant_value() const noexcept { return constant_; }

  std::string name() const {
    switch (kind_) {
      case Kind::table: return "table";
      case Kind::multiplication: return "mul";
      case Kind::addition: return "add";
      case Kind::constant: return "const";
    }
    return "?";
  }

  // x o y, or nullopt if it leaves [1..N].
  std::optional<std::uint64_t> apply(std::uint64_t x, std::uint64_t y) const {
    switch (kind_) {
      case Kind::multiplication: {
        std::uint64_t const r = detail::sat_mul(x, y);
        return r <= side_ ? std::optional(r) : std::nullopt;
      }
      case Kind::addition: {
        std::uint64_t const r = detail::sat_add(x, y);
        return r <= side_ ? std::optional(r) : std::nullopt;
      }
      case Kind::constant: return constant_;
      case Kind::table:
        if (x < 1 || x > side_ || y < 1 || y > side_) return std::nullopt;
        return values_[(x - 1) * side_ + (y - 1)];
    }
    return std::nullopt;
  }

 private:
  OpTable(Kind k, std::uint64_t side) : kind_(k), side_(side) {}

  Kind kind_;
  std::uint64_t side_;
  std::uint64_t constant_ = 0;
  std::vector<std::uint64_t> values_;
};

namespace detail {

inline std::uint64_t compose_left(OpTable const& op, std::vector<std::uint64_t> const& xs) {
  std::uint64_t acc = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) {
    auto r = op.apply(acc, xs[i]);
    if (!r) throw OutOfBoxError("composition leaves the box");
    acc = *r;
  }
  return acc;
}

inline void see_compositions(Coloring const& col, OpTable const& op, CutGrid const& g, ColorAgreement& agree) {
  std::vector<std::vector<std::uint64_t>> blocks;
  for (std::size_t i = 1; i <= g.dim(); ++i) {
    IntSet b = g.block(i);
    blocks.emplace_back(b.begin(), b.end());
  }
  for_each_product(blocks, [&](std::vector<std::uint64_t> const& xs) {
    std::uint64_t const v = compose_left(op, xs);
    require_in_box(col, v);
    agree.see(col.at(v));
    return true;
  });
}

}  // namespace detail

// All left-nested compositions over block choices share one color. A
// composition leaving the box raises OutOfBoxError instead of returning false.
inline MonoCheck check_composed_witness(Coloring const& col, OpTable const& op, CutGrid const& grid) {
  if (col.dim() != 1) throw InputError("composed witness needs a 1-dimensional coloring");
  grid.validate();
  detail::ColorAgreement agree;
  detail::see_compositions(col, op, grid, agree);
  return agree.result();
}

// Colors per depth d = 1..max_depth, each taken over every cut tuple of the
// sequence. Colors of different depths need not agree.
inline std::vector<MonoCheck> check_composed_sequence(Coloring const& col, OpTable const& op,
                                                      std::vector<std::uint64_t> const& seq, std::size_t max_depth) {
  if (col.dim() != 1) throw InputError("composed witness needs a 1-dimensional coloring");
  std::vector<MonoCheck> out;
  for (std::size_t d = 1; d <= max_depth; ++d) {
    detail::ColorAgreement agree;
    for (std::size_t last = d; last <= seq.size(); ++last) {
      detail::for_each_cut_ending_at(d, last, [&](std::vector<std::size_t> const& cuts) {
        detail::see_compositions(col, op, CutGrid{seq, cuts}, agree);
        return true;
      });
    }
    out.push_back(agree.result());
  }
  return out;
}

// Data-dependent depth: for every m_0 >= 1, every d in FS(a_0..a_{m_0-1})
// and every m_0 < m_1 < ... < m_d <= len, the composition over blocks
// [m_{i-1}, m_i) is examined; all must share one color. Check mode only.
inline MonoCheck check_composed_dependent(Coloring const& col, OpTable const& op,
                                          std::vector<std::uint64_t> const& seq) {
  if (col.dim() != 1) throw InputError("composed witness needs a 1-dimensional coloring");
  detail::ColorAgreement agree;
  std::size_t const len = seq.size();
  for (std::size_t m0 = 1; m0 < len; ++m0) {
    IntSet depths = fs_set(std::vector<std::uint64_t>(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(m0)));
    for (auto depth : depths) {
      if (depth > len - m0) break;
      std::size_t const d = static_cast<std::size_t>(depth);
      // choose m_1 < ... < m_d in (m0, len]
      std::vector<std::size_t> inner(d);
      for (std::size_t i = 0; i < d; ++i) inner[i] = m0 + 1 + i;
      for (;;) {
        std::vector<std::size_t> cuts{m0};
        cuts.insert(cuts.end(), inner.begin(), inner.end());
        detail::see_compositions(col, op, CutGrid{seq, cuts}, agree);
        std::size_t i = d;
        while (i > 0 && inner[i - 1] == len - d + i) --i;
        if (i == 0) break;
        ++inner[i - 1];
        for (std::size_t j = i; j < d; ++j) inner[j] = inner[j - 1] + 1;
      }
    }
  }
  return agree.result();
}

// ---------------------------------------------------------------------------
// Bundles

struct Bundle {
  std::uint64_t lambda = 1;
  std::vector<std::uint64_t> A;  // sorted, distinct
  std::vector<std::uint64_t> B;  // sorted, distinct
  std::size_t k = 1;
  friend bool operator==(Bundle const&, Bundle const&) = default;
};

// lambda A u lambda B u lambda(A+B) u AB
inline IntSet bundle14_values(Bundle const& w) {
  IntSet out;
  for (auto a : w.A) out.insert(detail::checked_mul(w.lambda, a));
  for (auto b : w.B) out.insert(detail::checked_mul(w.lambda, b));
  for (auto a : w.A) {
    for (auto b : w.B) {
      out.insert(detail::checked_mul(w.lambda, detail::checked_add(a, b)));
      out.insert(detail::checked_mul(a, b));
    }
  }
  return out;
}

// (lambda+A) u (lambda+B) u (lambda+AB) u (A+B)
inline IntSet bundle15_values(Bundle const& w) {
  IntSet out;
  for (auto a : w.A) out.insert(detail::checked_add(w.lambda, a));
  for (auto b : w.B) out.insert(detail::checked_add(w.lambda, b));
  for (auto a : w.A) {
    for (auto b : w.B) {
      out.insert(detail::checked_add(w.lambda, detail::checked_mul(a, b)));
      out.insert(detail::checked_add(a, b));
    }
  }
  return out;
}

struct BundleCheck {
  bool valid = false;
  std::optional<std::uint32_t> color;
  StructureReport structures;
  std::string reason;  // empty when valid
};

namespace detail {

inline BundleCheck check_bundle(Coloring const& col, Bundle const& w, bool additive_bundle) {
  BundleCheck r;
  if (col.dim() != 1) throw InputError("bundle witness needs a 1-dimensional coloring");
  if (w.lambda < 1 || w.A.empty() || w.B.empty()) {
    r.reason = "lambda must be >= 1 and A, B nonempty";
    return r;
  }
  IntSet const A(w.A.begin(), w.A.end());
  r.structures.ap = contains_kAP(A, w.k);
  r.structures.fs = contains_kFS(A, w.k);
  if (additive_bundle) {
    r.structures.gp = contains_kGP(A, w.k);
    r.structures.fp = contains_kFP(A, w.k);
  }
  bool const structures_ok = r.structures.ap && r.structures.fs &&
                             (!additive_bundle || (r.structures.gp && r.structures.fp));
  if (!structures_ok) {
    r.reason = "A lacks a required structure";
    return r;
  }
  IntSet const values = additive_bundle ? bundle15_values(w) : bundle14_values(w);
  ColorAgreement agree;
  for (auto v : values) {
    if (!col.in_box(v)) {
      r.reason = "value " + std::to_string(v) + " outside the box";
      return r;
    }
    agree.see(col.at(v));
  }
  if (!agree.ok) {
    r.reason = "bundle is not monochromatic";
    return r;
  }
  r.valid = true;
  r.color = agree.color;
  return r;
}

// Searches bundles in (lambda, A, B) order. A runs over strictly increasing
// tuples in lexicographic order (a tuple precedes its extensions). For a
// fixed (lambda, A) the least valid B is a singleton: validity is inherited
// by nonempty subsets of B, and {min B} precedes B.
class BundleSearch {
 public:
  BundleSearch(Coloring const& col, std::size_t k, std::size_t max_a, bool additive, std::uint64_t cap)
      : col_(col), k_(k), max_a_(max_a), additive_(additive), cap_(cap) {}

  std::optional<Bundle> run(std::uint64_t lambda) {
    lambda_ = lambda;
    chosen_.clear();
    common_.reset();
    if (dfs()) return found_;
    return std::nullopt;
  }

  std::uint64_t nodes() const noexcept { return nodes_; }
  bool exhausted() const noexcept { return exhausted_; }

 private:
  // The part of the bundle contributed by a alone.
  std::optional<std::uint64_t> solo(std::uint64_t a) const {
    std::uint64_t const v = additive_ ? detail::sat_add(lambda_, a) : detail::sat_mul(lambda_, a);
    return v <= col_.side() ? std::optional(v) : std::nullopt;
  }

  bool dfs() {
    std::uint64_t const start = chosen_.empty() ? 1 : chosen_.back() + 1;
    for (std::uint64_t a = start;; ++a) {
      auto v = solo(a);
      if (!v) break;
      if (++nodes_ > cap_) {
        exhausted_ = true;
        return false;
      }
      std::uint32_t const c = col_.at(*v);
      if (common_ && *common_ != c) continue;
      auto const saved = common_;
      common_ = c;
      chosen_.push_back(a);
      if (has_structures() && try_b()) return true;
      if (exhausted_) return false;
      if (chosen_.size() < max_a_ && dfs()) return true;
      if (exhausted_) return false;
      chosen_.pop_back();
      common_ = saved;
    }
    return false;
  }

  bool has_structures() const {
    IntSet const A(chosen_.begin(), chosen_.end());
    if (!contains_kAP(A, k_)) return false;
    if (additive_ && !contains_kGP(A, k_)) return false;
    if (!contains_kFS(A, k_)) return false;
    if (additive_ && !contains_kFP(A, k_)) return false;
    return true;
  }

  bool try_b() {
    std::uint64_t const side = col_.side();
    std::uint32_t const c = *common_;
    for (std::uint64_t b = 1; b <= side; ++b) {
      if (++nodes_ > cap_) {
        exhausted_ = true;
        return false;
      }
      auto vb = solo(b);
      if (!vb) break;
      if (col_.at(*vb) != c) continue;
      bool ok = true;
      for (auto a : chosen_) {
        std::uint64_t const mixed =
            additive_ ? detail::sat_add(lambda_, detail::sat_mul(a, b)) : detail::sat_mul(lambda_, detail::sat_add(a, b));
        std::uint64_t const cross = additive_ ? detail::sat_add(a, b) : detail::sat_mul(a, b);
        if (mixed > side || cross > side || col_.at(mixed) != c || col_.at(cross) != c) {
          ok = false;
          break;
        }
      }
      if (ok) {
        found_ = Bundle{lambda_, chosen_, {b}, k_};
        return true;
      }
    }
    return false;
  }

  Coloring const& col_;
  std::size_t k_;
  std::size_t max_a_;
  bool additive_;
  std::uint64_t cap_;
  std::uint64_t lambda_ = 1;
  std::vector<std::uint64_t> chosen_;
  std::optional<std::uint32_t> common_;
  std::optional<Bundle> found_;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

inline FinderResult<Bundle> find_bundle(Coloring const& col, std::size_t k, std::size_t max_a, bool additive,
                                        unsigned workers, std::uint64_t budget) {
  if (col.dim() != 1) throw InputError("bundle search needs a 1-dimensional coloring");
  if (k == 0 || k > 3) throw InputError("bundle search supports 1 <= k <= 3");
  if (max_a == 0) throw InputError("|A| cap must be positive");
  auto res = ordered_first_hit<Bundle>(col.side(), workers, budget, [&](std::uint64_t idx, std::uint64_t cap) {
    BundleSearch s(col, k, max_a, additive, cap);
    LeadOutcome<Bundle> out;
    out.hit = s.run(idx + 1);
    out.nodes = s.nodes();
    out.exhausted = s.exhausted();
    if (out.exhausted) out.hit.reset();
    return out;
  });
  FinderResult<Bundle> r{res.status, std::move(res.witness), 0, res.nodes};
  if (r.witness) r.color = *check_bundle(col, *r.witness, additive).color;
  return r;
}

}  // namespace detail

inline constexpr std::size_t kDefaultBundleCap = 8;

inline BundleCheck check_bundle14(Coloring const& col, Bundle const& w) { return detail::check_bundle(col, w, false); }
inline BundleCheck check_bundle15(Coloring const& col, Bundle const& w) { return detail::check_bundle(col, w, true); }

// Least (lambda, A, B) with lambda A u lambda B u lambda(A+B) u AB
// monochromatic and A containing k-AP and k-FS.
inline FinderResult<Bundle> find_bundle14(Coloring const& col, std::size_t k, std::size_t max_a = kDefaultBundleCap,
                                          unsigned workers = 1, std::uint64_t budget = kDefaultFinderBudget) {
  return detail::find_bundle(col, k, max_a, false, workers, budget);
}

// Least (lambda, A, B) with (lambda+A) u (lambda+B) u (lambda+AB) u (A+B)
// monochromatic and A containing k-AP, k-GP, k-FS and k-FP.
inline FinderResult<Bundle> find_bundle15(Coloring const& col, std::size_t k, std::size_t max_a = kDefaultBundleCap,
                                          unsigned workers = 1, std::uint64_t budget = kDefaultFinderBudget) {
  return detail::find_bundle(col, k, max_a, true, workers, budget);
}

// ---------------------------------------------------------------------------
// Corollary patterns: {ax, ay, xy, a(x+y)} and {u+b, v+b, uv+b, u+v}

struct Triple {
  std::uint64_t lead;  // a, or b
  std::uint64_t x;     // x, or u
  std::uint64_t y;     // y, or v
  friend bool operator==(Triple const&, Triple const&) = default;
};

inline std::vector<std::uint64_t> corollary14_values(Triple const& t) {
  return {t.lead * t.x, t.lead * t.y, t.x * t.y, t.lead * (t.x + t.y)};
}

inline std::vector<std::uint64_t> corollary15_values(Triple const& t) {
  return {t.x + t.lead, t.y + t.lead, t.x * t.y + t.lead, t.x + t.y};
}

namespace detail {

inline MonoCheck check_values(Coloring const& col, std::vector<std::uint64_t> const& values) {
  ColorAgreement agree;
  for (auto v : values) {
    if (!col.in_box(v)) return MonoCheck{};
    agree.see(col.at(v));
  }
  return agree.result();
}

inline FinderResult<Triple> find_corollary(Coloring const& col, char const* pattern, unsigned workers,
                                           std::uint64_t budget) {
  PatternSchema const schema = parse_pattern(pattern);
  auto res = find_instance(schema, col, workers, budget);
  FinderResult<Triple> r{res.status, std::nullopt, 0, res.nodes};
  if (res.instance) {
    auto const& v = res.instance->values;
    r.witness = Triple{v[0], v[1], v[2]};
    r.color = res.instance->color;
  }
  return r;
}

}  // namespace detail

inline MonoCheck check_corollary14(Coloring const& col, Triple const& t) {
  if (t.lead == 0 || t.x == 0 || t.y == 0) return MonoCheck{};
  return detail::check_values(col, corollary14_values(t));
}

inline MonoCheck check_corollary15(Coloring const& col, Triple const& t) {
  if (t.lead == 0 || t.x == 0 || t.y == 0) return MonoCheck{};
  return detail::check_values(col, corollary15_values(t));
}

// Least (a, x, y) with {ax, ay, xy, a(x+y)} monochromatic in the box.
inline FinderResult<Triple> find_corollary14(Coloring const& col, unsigned workers = 1, std::uint64_t budget = 0) {
  return detail::find_corollary(col, "{a*x, a*y, x*y, a*(x+y)}", workers, budget);
}

// Least (b, u, v) with {u+b, v+b, uv+b, u+v} monochromatic in the box.
inline FinderResult<Triple> find_corollary15(Coloring const& col, unsigned workers = 1, std::uint64_t budget = 0) {
  return detail::find_corollary(col, "{u+b, v+b, u*v+b, u+v}", workers, budget);
}

}  // namespace ramsey
