#pragma once

// Finite colorings of integer boxes [1..N]^d.
//
// Cells are stored row-major with axis 1 slowest: the point (x_1,...,x_d)
// lives at sum_i (x_i - 1) * N^(d-i). Boxes larger than the cell budget are
// only available through a named generator, evaluated lazily.

#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ramsey/error.hpp"

namespace ramsey {

inline constexpr std::uint64_t kDefaultCellBudget = std::uint64_t{1} << 26;
inline constexpr std::uint32_t kMaxColors = 256;

// splitmix64 ("splitmix64-v1"): output i of the stream seeded with `seed` is
// mix(seed + (i + 1) * 0x9E3779B97F4A7C15). Random access by index is what
// makes lazily evaluated random colorings reproducible.
inline std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64_mix(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

struct Generator {
  enum class Kind { constant, parity, mod, blocks, random };

  Kind kind = Kind::constant;
  std::uint64_t param = 0;            // constant color, modulus, or seed
  std::vector<std::uint64_t> widths;  // blocks only

  static Generator constant(std::uint64_t k) { return {Kind::constant, k, {}}; }
  static Generator parity() { return {Kind::parity, 2, {}}; }
  static Generator mod(std::uint64_t m) { return {Kind::mod, m, {}}; }
  static Generator blocks(std::vector<std::uint64_t> w) { return {Kind::blocks, 0, std::move(w)}; }
  static Generator random(std::uint64_t seed) { return {Kind::random, seed, {}}; }

  static std::string kind_name(Kind k) {
    switch (k) {
      case Kind::constant: return "constant";
      case Kind::parity: return "parity";
      case Kind::mod: return "mod";
      case Kind::blocks: return "blocks";
      case Kind::random: return "random";
    }
    return "?";
  }

  static Kind parse_kind(std::string const& name) {
    for (auto k : {Kind::constant, Kind::parity, Kind::mod, Kind::blocks, Kind::random}) {
      if (kind_name(k) == name) return k;
    }
    throw InputError("unknown generator '" + name + "'");
  }

  void validate(std::uint32_t colors) const {
    switch (kind) {
      case Kind::constant:
        if (param >= colors) throw InputError("constant color out of range");
        break;
      case Kind::parity:
        if (colors < 2) throw InputError("parity coloring needs at least 2 colors");
        break;
      case Kind::mod:
        if (param == 0 || param > colors) throw InputError("mod m coloring needs 1 <= m <= colors");
        break;
      case Kind::blocks:
        if (widths.empty()) throw InputError("blocks coloring needs at least one width");
        for (auto w : widths) {
          if (w == 0) throw InputError("block widths must be positive");
        }
        break;
      case Kind::random:
        break;
    }
  }

  // `coord_sum` is x_1+...+x_d, `linear` the row-major cell index.
  std::uint32_t color(std::uint64_t coord_sum, std::uint64_t linear, std::uint32_t colors) const {
    switch (kind) {
      case Kind::constant: return static_cast<std::uint32_t>(param);
      case Kind::parity: return static_cast<std::uint32_t>(coord_sum % 2);
      case Kind::mod: return static_cast<std::uint32_t>(coord_sum % param);
      case Kind::blocks: {
        // Widths repeat cyclically until the box is covered; block b gets color b mod c.
        std::uint64_t period = 0;
        for (auto w : widths) period += w;
        std::uint64_t const rounds = linear / period;
        std::uint64_t rem = linear % period;
        std::uint64_t b = rounds * widths.size();
        for (auto w : widths) {
          if (rem < w) break;
          rem -= w;
          ++b;
        }
        return static_cast<std::uint32_t>(b % colors);
      }
      case Kind::random: return static_cast<std::uint32_t>(splitmix64_at(param, linear) % colors);
    }
    return 0;
  }
};

class Coloring {
 public:
  // Explicit coloring from cells.
  Coloring(int dim, std::uint64_t side, std::uint32_t colors, std::vector<std::uint8_t> cells)
      : dim_(dim), side_(side), colors_(colors), cells_(std::move(cells)) {
    check_shape();
    if (cells_.size() != cell_count()) throw InputError("cell count does not match N^d");
    for (auto v : cells_) {
      if (v >= colors_) throw InputError("cell color out of range");
    }
  }

  // Generator-backed coloring; materialized when within `cell_budget`.
  Coloring(int dim, std::uint64_t side, std::uint32_t colors, Generator gen,
           std::uint64_t cell_budget = kDefaultCellBudget)
      : dim_(dim), side_(side), colors_(colors), gen_(std::move(gen)) {
    check_shape();
    gen_->validate(colors_);
    if (cell_count() <= cell_budget) {
      cells_.resize(cell_count());
      std::vector<std::uint64_t> point(static_cast<std::size_t>(dim_), 1);
      std::uint64_t sum = static_cast<std::uint64_t>(dim_);
      for (std::uint64_t i = 0; i < cells_.size(); ++i) {
        cells_[i] = static_cast<std::uint8_t>(gen_->color(sum, i, colors_));
        // odometer increment, last axis fastest
        for (int a = dim_ - 1; a >= 0; --a) {
          if (point[a] < side_) {
            ++point[a];
            ++sum;
            break;
          }
          sum -= point[a] - 1;
          point[a] = 1;
        }
      }
    }
  }

  int dim() const noexcept { return dim_; }
  std::uint64_t side() const noexcept { return side_; }
  std::uint32_t colors() const noexcept { return colors_; }
  bool materialized() const noexcept { return !cells_.empty(); }
  std::optional<Generator> const& generator() const noexcept { return gen_; }
  std::vector<std::uint8_t> const& cells() const noexcept { return cells_; }

  std::uint64_t cell_count() const noexcept {
    std::uint64_t n = 1;
    for (int i = 0; i < dim_; ++i) n = detail::sat_mul(n, side_);
    return n;
  }

  bool in_box(std::uint64_t v) const noexcept { return v >= 1 && v <= side_; }

  // Color of integer n in a 1-dimensional coloring; n must be in [1..N].
  std::uint32_t at(std::uint64_t n) const {
    if (materialized()) return cells_[n - 1];
    return gen_->color(n, n - 1, colors_);
  }

  std::uint32_t color_of(std::span<std::uint64_t const> point) const {
    if (point.size() != static_cast<std::size_t>(dim_)) throw InputError("point has wrong dimension");
    std::uint64_t linear = 0;
    std::uint64_t sum = 0;
    for (auto x : point) {
      if (!in_box(x)) throw OutOfBoxError("point coordinate " + std::to_string(x) + " outside [1.." + std::to_string(side_) + "]");
      linear = linear * side_ + (x - 1);
      sum += x;
    }
    if (materialized()) return cells_[linear];
    return gen_->color(sum, linear, colors_);
  }

  std::uint32_t color_of(std::uint64_t n) const {
    std::uint64_t p[1] = {n};
    return color_of(std::span<std::uint64_t const>(p, 1));
  }

  // Text form: "d N c" then N^d cells, single spaces, trailing newline.
  std::string to_text() const {
    if (!materialized()) throw InputError("lazy coloring cannot be written cell by cell");
    std::string out = std::to_string(dim_) + " " + std::to_string(side_) + " " + std::to_string(colors_) + "\n";
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (i != 0) out += ' ';
      out += std::to_string(cells_[i]);
    }
    out += '\n';
    return out;
  }

  friend bool operator==(Coloring const& a, Coloring const& b) {
    return a.dim_ == b.dim_ && a.side_ == b.side_ && a.colors_ == b.colors_ && a.cells_ == b.cells_;
  }

 private:
  void check_shape() const {
    if (dim_ < 1) throw InputError("dimension must be >= 1");
    if (side_ < 1) throw InputError("side N must be >= 1");
    if (colors_ < 1 || colors_ > kMaxColors) throw InputError("color count must be in [1..256]");
  }

  int dim_;
  std::uint64_t side_;
  std::uint32_t colors_;
  std::vector<std::uint8_t> cells_;
  std::optional<Generator> gen_;
};

// Header "d N c" (or "N c" for a 1-dimensional coloring) followed by the cells.
inline Coloring parse_coloring(std::string const& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw InputError("empty coloring file");
  std::istringstream hs(header);
  std::vector<std::uint64_t> head;
  std::string tok;
  while (hs >> tok) {
    try {
      std::size_t used = 0;
      head.push_back(std::stoull(tok, &used));
      if (used != tok.size()) throw InputError("bad header token");
    } catch (std::logic_error const&) {
      throw InputError("malformed coloring header '" + header + "'");
    }
  }
  if (head.size() == 2) head.insert(head.begin(), 1);
  if (head.size() != 3) throw InputError("coloring header must be 'd N c'");
  if (head[0] < 1 || head[0] > 64) throw InputError("coloring dimension out of range");
  int const dim = static_cast<int>(head[0]);
  std::uint64_t count = 1;
  for (int i = 0; i < dim; ++i) count = detail::sat_mul(count, head[1]);
  if (count > kDefaultCellBudget) throw InputError("coloring file exceeds the cell budget");
  if (head[2] < 1 || head[2] > kMaxColors) throw InputError("color count must be in [1..256]");
  std::vector<std::uint8_t> cells;
  cells.reserve(count);
  while (in >> tok) {
    std::uint64_t v = 0;
    try {
      std::size_t used = 0;
      v = std::stoull(tok, &used);
      if (used != tok.size()) throw InputError("bad cell");
    } catch (std::logic_error const&) {
      throw InputError("malformed cell '" + tok + "'");
    }
    if (v >= head[2]) throw InputError("cell color " + tok + " out of range");
    if (cells.size() == count) throw InputError("too many cells");
    cells.push_back(static_cast<std::uint8_t>(v));
  }
  if (cells.size() != count) {
    throw InputError("expected " + std::to_string(count) + " cells, got " + std::to_string(cells.size()));
  }
  return Coloring(dim, head[1], static_cast<std::uint32_t>(head[2]), std::move(cells));
}

inline std::string read_text_file(std::string const& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_text_file(std::string const& path, std::string const& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
}

struct ColoringSpec {
  std::optional<std::string> file;
  Generator generator;
  int dim = 1;
  std::uint64_t side = 1;
  std::uint32_t colors = 2;
};

inline Coloring load(ColoringSpec const& spec) {
  if (spec.file) return parse_coloring(read_text_file(*spec.file));
  return Coloring(spec.dim, spec.side, spec.colors, spec.generator);
}

// Streams every coloring of [1..N]^d in lexicographic cell order. With
// symmetry breaking only first-use-ordered colorings are produced (cell 0 is
// color 0, every later cell uses at most one color beyond those seen), which
// is exactly one representative per color-permutation orbit.
class ColoringEnumerator {
 public:
  ColoringEnumerator(int dim, std::uint64_t side, std::uint32_t colors, bool symmetry_break,
                     std::uint64_t budget = std::uint64_t{1} << 24)
      : dim_(dim), side_(side), colors_(colors), symmetry_break_(symmetry_break) {
    if (dim < 1 || side < 1 || colors < 1 || colors > kMaxColors) throw InputError("bad enumeration shape");
    std::uint64_t cells = 1;
    for (int i = 0; i < dim; ++i) cells = detail::sat_mul(cells, side);
    std::uint64_t total = 1;
    for (std::uint64_t i = 0; i < cells && total <= budget; ++i) total = detail::sat_mul(total, colors);
    if (total > budget) throw BudgetError("enumeration of colorings exceeds budget");
    cells_.assign(cells, 0);
    prefix_max_.assign(cells, 0);
  }

  // Advances to the next coloring; false once exhausted.
  bool next() {
    if (!started_) {
      started_ = true;
      return true;
    }
    for (std::size_t i = cells_.size(); i-- > 0;) {
      std::uint32_t const limit = symmetry_break_ ? std::min(colors_, (i == 0 ? 0u : prefix_max_[i - 1] + 1u) + 1u) : colors_;
      if (cells_[i] + 1u < limit) {
        ++cells_[i];
        prefix_max_[i] = std::max<std::uint32_t>(i == 0 ? 0 : prefix_max_[i - 1], cells_[i]);
        for (std::size_t j = i + 1; j < cells_.size(); ++j) {
          cells_[j] = 0;
          prefix_max_[j] = prefix_max_[j - 1];
        }
        return true;
      }
    }
    return false;
  }

  Coloring current() const { return Coloring(dim_, side_, colors_, cells_); }
  std::vector<std::uint8_t> const& cells() const noexcept { return cells_; }

 private:
  int dim_;
  std::uint64_t side_;
  std::uint32_t colors_;
  bool symmetry_break_;
  bool started_ = false;
  std::vector<std::uint8_t> cells_;
  std::vector<std::uint32_t> prefix_max_;
};

}  // namespace ramsey
