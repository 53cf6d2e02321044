#pragma once

// Acceptance criteria 1-9. Each criterion returns a pass flag and a short
// detail line; run_criteria prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "commands.hpp"
#include "ramsey/ramsey.hpp"

#ifndef RAMSEY_GOLDEN_DIR
#define RAMSEY_GOLDEN_DIR "tests/golden"
#endif

namespace ramsey::acceptance {

using cli::Json;

struct Outcome {
  Outcome() = default;
  Outcome(int i, std::string n, bool p = false, std::string d = {}, double s = 0)
      : id(i), name(std::move(n)), pass(p), detail(std::move(d)), seconds(s) {}

  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

inline Json run_json(cli::RunConfig const& c, int* code = nullptr) {
  auto r = cli::run(c);
  if (code) *code = r.exit_code;
  return Json::parse(r.report);
}

inline cli::RunConfig threshold_config(std::string const& engine, std::uint32_t colors) {
  cli::RunConfig c;
  c.subcommand = "threshold";
  c.pattern = "{x,y,x+y}";
  c.colors = colors;
  c.max_n = 20;
  c.engine = engine;
  c.deterministic = true;
  return c;
}

// Threshold report must name N* and carry a certificate at N*-1 that the
// test re-validates with a brute-force scan.
inline bool schur_certificate_ok(Json const& r, std::uint64_t expect, std::uint32_t colors, std::string& why) {
  if (r.value("verdict", "") != "found") {
    why = "verdict " + r.value("verdict", std::string("?"));
    return false;
  }
  if (r["witness"]["threshold"] != expect) {
    why = "threshold " + r["witness"]["threshold"].dump();
    return false;
  }
  auto const& cert = r["witness"]["certificate"];
  auto const cells = cert["cells"].get<std::vector<int>>();
  if (cert["n"] != expect - 1 || cells.size() != expect - 1) {
    why = "certificate size";
    return false;
  }
  for (int v : cells) {
    if (v < 0 || static_cast<std::uint32_t>(v) >= colors) {
      why = "certificate color range";
      return false;
    }
  }
  auto const n = static_cast<std::uint64_t>(cells.size());
  for (std::uint64_t x = 1; x <= n; ++x) {
    for (std::uint64_t y = 1; x + y <= n; ++y) {
      if (cells[x - 1] == cells[y - 1] && cells[x - 1] == cells[x + y - 1]) {
        why = "certificate has a monochromatic triple";
        return false;
      }
    }
  }
  return cert["validated"] == true;
}

inline Outcome criterion1() {
  Outcome o{1, "Schur threshold c=2 is 5 on all engines"};
  auto const t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string why;
  for (std::string engine : {"exhaustive", "sat", "backtracking"}) {
    auto const r = run_json(threshold_config(engine, 2));
    if (!schur_certificate_ok(r, 5, 2, why)) {
      ok = false;
      o.detail = engine + ": " + why;
      break;
    }
  }
  o.seconds = seconds_since(t0);
  if (ok && o.seconds >= 1.0) {
    ok = false;
    o.detail = "too slow";
  }
  o.pass = ok;
  if (ok) o.detail = "N*=5, certificate at N=4 valid, engines agree";
  return o;
}

inline Outcome criterion2() {
  Outcome o{2, "Schur threshold c=3 is 14 on backtracking and SAT"};
  auto const t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string why;
  for (std::string engine : {"backtracking", "sat"}) {
    auto const r = run_json(threshold_config(engine, 3));
    if (!schur_certificate_ok(r, 14, 3, why)) {
      ok = false;
      o.detail = engine + ": " + why;
      break;
    }
  }
  o.seconds = seconds_since(t0);
  if (ok && o.seconds >= 60.0) {
    ok = false;
    o.detail = "too slow";
  }
  o.pass = ok;
  if (ok) o.detail = "N*=14, certificate at N=13 valid, engines agree";
  return o;
}

inline Outcome criterion3(std::size_t seeds = 10'000) {
  Outcome o{3, "{x,y,xy,x+y} on random 2-colorings of [1..252] and [2..990]"};
  auto const t0 = std::chrono::steady_clock::now();
  auto const p1 = parse_pattern("{x, y, x*y, x+y}", false, 1);
  auto const p2 = parse_pattern("{x, y, x*y, x+y}", false, 2);
  std::size_t fails = 0;
  for (std::size_t i = 0; i < seeds; ++i) {
    Coloring const a(1, 252, 2, Generator::random(splitmix64_at(1, i)));
    Coloring const b(1, 990, 2, Generator::random(splitmix64_at(2, i)));
    for (auto const& [schema, col] : {std::pair{&p1, &a}, std::pair{&p2, &b}}) {
      auto const r = find_instance(*schema, *col);
      bool valid = r.status == SearchStatus::found;
      if (valid) {
        for (auto v : instantiate(*schema, r.instance->assignment(*schema))) {
          valid = valid && v >= schema->min_value() && col->in_box(v) && col->at(v) == r.instance->color;
        }
      }
      if (!valid) ++fails;
    }
  }
  o.seconds = seconds_since(t0);
  o.pass = fails == 0 && o.seconds < 300.0;
  o.detail = std::to_string(2 * seeds - fails) + "/" + std::to_string(2 * seeds) + " colorings contain a validated instance";
  return o;
}

// Independent oracle: evaluates terms through the AST interpreter over
// every assignment in [min..N] and every 2-coloring.
inline bool oracle_avoidable(PatternSchema const& schema, std::uint64_t n) {
  auto const& vars = schema.variables();
  std::vector<std::set<std::uint64_t>> sets;
  std::vector<std::uint64_t> vals(vars.size(), schema.min_value());
  if (schema.min_value() <= n) {
    for (;;) {
      Assignment asg;
      for (std::size_t i = 0; i < vars.size(); ++i) asg[vars[i]] = vals[i];
      std::set<std::uint64_t> s;
      bool in = true;
      for (auto const& t : schema.terms()) {
        std::uint64_t const v = eval_term(t, asg);
        if (v < 1 || v > n) in = false;
        s.insert(v);
      }
      if (in) sets.push_back(s);
      std::size_t i = vars.size();
      while (i > 0 && vals[i - 1] == n) vals[--i] = schema.min_value();
      if (i == 0) break;
      ++vals[i - 1];
    }
  }
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    bool avoids = true;
    for (auto const& s : sets) {
      std::uint64_t const c = (mask >> (*s.begin() - 1)) & 1;
      bool mono = true;
      for (auto v : s) mono = mono && ((mask >> (v - 1)) & 1) == c;
      if (mono) {
        avoids = false;
        break;
      }
    }
    if (avoids) return true;
  }
  return false;
}

inline Outcome criterion4() {
  Outcome o{4, "SAT, backtracking and exhaustive engines agree, N <= 12"};
  auto const t0 = std::chrono::steady_clock::now();
  std::vector<PatternSchema> const fixtures{
      parse_pattern("{x, y, x+y}"),
      parse_pattern("{x, y, x*y, x+y}", false, 2),
      parse_pattern("{x, x*y, x+y}"),
      parse_pattern("{x, y, x*y, x+2*y}"),
  };
  std::size_t cases = 0, disagreements = 0;
  for (auto const& schema : fixtures) {
    for (std::uint64_t n = 1; n <= 12; ++n) {
      bool const oracle = oracle_avoidable(schema, n);
      for (auto engine : {Engine::sat, Engine::backtracking, Engine::exhaustive}) {
        SearchOptions opts;
        opts.engine = engine;
        auto const r = find_avoiding_coloring(schema, n, 2, opts);
        bool const avoid = r.verdict == Verdict::avoiding;
        if (r.verdict == Verdict::unknown || avoid != oracle) ++disagreements;
        ++cases;
      }
    }
  }
  o.seconds = seconds_since(t0);
  o.pass = disagreements == 0;
  o.detail = std::to_string(cases) + " engine runs, " + std::to_string(disagreements) + " disagreements with the oracle";
  return o;
}

// A coloring view that records the largest integer any search reads.
class ReadTracker {
 public:
  explicit ReadTracker(Coloring const& col) : col_(col) {}
  int dim() const noexcept { return col_.dim(); }
  std::uint64_t side() const noexcept { return col_.side(); }
  std::uint32_t colors() const noexcept { return col_.colors(); }
  bool in_box(std::uint64_t v) const noexcept { return col_.in_box(v); }
  std::uint32_t at(std::uint64_t n) const {
    horizon_ = std::max(horizon_, n);
    return col_.at(n);
  }
  std::uint32_t color_of(std::span<std::uint64_t const> p) const {
    for (auto x : p) horizon_ = std::max(horizon_, x);
    return col_.color_of(p);
  }
  std::uint64_t horizon() const noexcept { return horizon_; }

 private:
  Coloring const& col_;
  mutable std::uint64_t horizon_ = 0;
};

// Compares verdicts and witnesses of both finders on every 2-coloring of
// [1..side] for k = 1..max_k.
// Both searches are deterministic and only see the cells they read, so a
// run whose reads stay inside [1..R] stands for every coloring that agrees
// on [1..R]; the enumeration then skips to the next prefix of length R.
struct AgreementSweep {
  std::uint64_t representatives = 0;
  std::uint64_t covered = 0;  // colorings accounted for
  std::uint64_t disagreements = 0;
};

inline void sweep_one_k(std::uint64_t side, std::size_t k, AgreementSweep& s) {
  std::vector<std::uint8_t> cells(side, 0);
  for (;;) {
    Coloring const col(1, side, 2, cells);
    ReadTracker tracker(col);
    auto const fs = find_fs_witness(tracker, k);
    auto const grid = find_grid_witness(tracker, k);
    if (fs.status != grid.status || fs.witness != grid.witness) ++s.disagreements;
    std::uint64_t const r = std::max<std::uint64_t>(tracker.horizon(), 1);
    ++s.representatives;
    s.covered += std::uint64_t{1} << (side - r);
    std::size_t i = r;
    while (i > 0 && cells[i - 1] == 1) cells[--i] = 0;
    if (i == 0) break;
    cells[i - 1] = 1;
    std::fill(cells.begin() + static_cast<std::ptrdiff_t>(i), cells.end(), 0);
  }
}

// One sweep per k; `covered` must reach 2^side for each of them.
inline std::vector<AgreementSweep> grid_fs_agreement(std::uint64_t side, std::size_t max_k) {
  std::vector<AgreementSweep> out(max_k);
  for (std::size_t k = 1; k <= max_k; ++k) sweep_one_k(side, k, out[k - 1]);
  return out;
}

inline Outcome criterion5(std::uint64_t sweep_side = 30) {
  Outcome o{5, "finite Hindman reduction"};
  auto const t0 = std::chrono::steady_clock::now();
  std::size_t found = 0;
  ColoringEnumerator it(1, 5, 2, false);
  while (it.next()) {
    auto const col = it.current();
    auto const r = find_fs_witness(col, 2);
    if (r.status == SearchStatus::found && check_fs_witness(col, *r.witness).monochromatic) ++found;
  }
  Coloring const schur_avoiding(1, 4, 2, std::vector<std::uint8_t>{0, 1, 1, 0});
  bool const fails_on_avoiding = find_fs_witness(schur_avoiding, 2).status == SearchStatus::none;
  auto const sweeps = grid_fs_agreement(sweep_side, 3);
  bool covered_all = true;
  std::uint64_t runs = 0, disagreements = 0;
  for (auto const& s : sweeps) {
    covered_all = covered_all && s.covered == (std::uint64_t{1} << sweep_side);
    runs += s.representatives;
    disagreements += s.disagreements;
  }
  o.seconds = seconds_since(t0);
  o.pass = found == 32 && fails_on_avoiding && disagreements == 0 && covered_all;
  o.detail = std::to_string(found) + "/32 colorings of [1..5] found; avoiding coloring of [1..4] " +
             (fails_on_avoiding ? "rejected" : "ACCEPTED") + "; all 2^" + std::to_string(sweep_side) +
             " colorings " + (covered_all ? "covered" : "NOT covered") + " for k=1..3 by " + std::to_string(runs) +
             " runs, " + std::to_string(disagreements) + " disagreements";
  return o;
}

inline bool direct_mono(Coloring const& col, std::vector<std::uint64_t> const& vals) {
  for (auto v : vals) {
    if (v < 1 || v > col.side() || col.at(v) != col.at(vals.front())) return false;
  }
  return true;
}

inline Outcome criterion6(std::size_t colorings = 1000, std::size_t planted = 100) {
  Outcome o{6, "corollary modes validate; planted instances recovered"};
  auto const t0 = std::chrono::steady_clock::now();
  std::size_t witnesses = 0, invalid = 0;
  for (std::size_t i = 0; i < colorings; ++i) {
    Coloring const col(1, 500, 2, Generator::random(splitmix64_at(6, i)));
    auto const a = find_corollary14(col);
    if (a.witness) {
      ++witnesses;
      auto const t = *a.witness;
      bool const ok = check_corollary14(col, t).monochromatic &&
                      direct_mono(col, {t.lead * t.x, t.lead * t.y, t.x * t.y, t.lead * (t.x + t.y)});
      if (!ok) ++invalid;
    }
    auto const b = find_corollary15(col);
    if (b.witness) {
      ++witnesses;
      auto const t = *b.witness;
      bool const ok = check_corollary15(col, t).monochromatic &&
                      direct_mono(col, {t.x + t.lead, t.y + t.lead, t.x * t.y + t.lead, t.x + t.y});
      if (!ok) ++invalid;
    }
  }

  // Plant a monochromatic instance with random parameters; the finder must
  // return a valid witness no larger (lexicographically) than the plant.
  std::size_t recovered = 0;
  for (std::size_t i = 0; i < planted; ++i) {
    bool const additive = i % 2 == 1;
    std::uint64_t const r = splitmix64_at(7, i);
    Coloring base(1, 500, 2, Generator::random(splitmix64_at(8, i)));
    std::vector<std::uint8_t> cells = base.cells();
    Triple plant{};
    std::vector<std::uint64_t> vals;
    if (additive) {
      plant = Triple{1 + r % 100, 1 + (r >> 8) % 20, 1 + (r >> 16) % 20};
      vals = {plant.x + plant.lead, plant.y + plant.lead, plant.x * plant.y + plant.lead, plant.x + plant.y};
    } else {
      plant = Triple{1 + r % 12, 1 + (r >> 8) % 12, 1 + (r >> 16) % 12};
      vals = {plant.lead * plant.x, plant.lead * plant.y, plant.x * plant.y, plant.lead * (plant.x + plant.y)};
    }
    std::uint8_t const color = static_cast<std::uint8_t>((r >> 32) & 1);
    for (auto v : vals) cells[v - 1] = color;
    Coloring const col(1, 500, 2, cells);
    auto const res = additive ? find_corollary15(col) : find_corollary14(col);
    if (!res.witness) continue;
    auto const t = *res.witness;
    bool const valid = additive ? check_corollary15(col, t).monochromatic : check_corollary14(col, t).monochromatic;
    auto key = [](Triple const& x) { return std::tuple(x.lead, x.x, x.y); };
    if (valid && key(t) <= key(plant)) ++recovered;
  }
  o.seconds = seconds_since(t0);
  o.pass = invalid == 0 && recovered == planted;
  o.detail = std::to_string(witnesses) + " witnesses, " + std::to_string(invalid) + " invalid; " +
             std::to_string(recovered) + "/" + std::to_string(planted) + " planted recovered";
  return o;
}

inline Outcome criterion7() {
  Outcome o{7, "order-3 semigroup sweep"};
  auto const t0 = std::chrono::steady_clock::now();
  std::size_t assoc = 0, bad = 0;
  std::vector<Element> t(9);
  for (std::uint32_t code = 0; code < 19683; ++code) {
    std::uint32_t c = code;
    for (auto& e : t) {
      e = c % 3;
      c /= 3;
    }
    if (CayleyTable::first_nonassociative(3, t)) continue;
    ++assoc;
    CayleyTable const table(3, t);
    auto const idem = idempotents(table);
    bool ok = !idem.empty() && !minimal_idempotents(table).empty();
    for (auto const& L : minimal_left_ideals(table)) {
      ok = ok && std::any_of(L.begin(), L.end(), [&](Element x) { return table.op(x, x) == x; });
    }
    if (!ok) ++bad;
  }
  o.seconds = seconds_since(t0);
  // 113 associative operations on a labeled 3-element set.
  o.pass = assoc == 113 && bad == 0 && o.seconds < 10.0;
  o.detail = std::to_string(assoc) + " associative tables, " + std::to_string(bad) + " violations";
  return o;
}

inline std::filesystem::path scratch_dir() {
  auto p = std::filesystem::temp_directory_path() /
           ("ramsey_acceptance_" + std::to_string(splitmix64_at(
                                       static_cast<std::uint64_t>(
                                           std::chrono::steady_clock::now().time_since_epoch().count()),
                                       0)));
  std::filesystem::create_directories(p);
  return p;
}

// Finder configurations shared by the format and determinism criteria.
inline std::vector<cli::RunConfig> finder_configs(std::filesystem::path const& dir) {
  std::vector<cli::RunConfig> out;
  auto base = [&](std::string const& sub, std::uint64_t n, std::uint64_t seed) {
    cli::RunConfig c;
    c.subcommand = sub;
    c.generator = "random";
    c.seed = seed;
    c.n = n;
    c.colors = 2;
    c.deterministic = true;
    c.witness_out = (dir / (sub + "_" + std::to_string(out.size()) + ".json")).string();
    return c;
  };
  {
    auto c = base("find", 300, 11);
    c.pattern = "{x, y, x*y, x+y}";
    out.push_back(c);
  }
  {
    auto c = base("fs-witness", 200, 12);
    c.k = 3;
    out.push_back(c);
  }
  {
    auto c = base("grid-witness", 40, 13);
    c.dim = 2;
    c.length = 3;
    out.push_back(c);
  }
  {
    auto c = base("composed-witness", 200, 14);
    c.generator = "constant";
    c.gen_param = 1;
    c.op = "mul";
    c.sequence = {2, 3, 5};
    c.depth = 2;
    out.push_back(c);
  }
  {
    auto c = base("bundle14", 400, 15);
    c.k = 2;
    out.push_back(c);
  }
  {
    auto c = base("bundle15", 400, 16);
    c.k = 2;
    out.push_back(c);
  }
  {
    auto c = base("bundle14", 500, 17);
    c.corollary = true;
    out.push_back(c);
  }
  {
    auto c = base("bundle15", 500, 18);
    c.corollary = true;
    out.push_back(c);
  }
  return out;
}

inline Outcome criterion8() {
  Outcome o{8, "format stability"};
  auto const t0 = std::chrono::steady_clock::now();
  std::vector<std::string> problems;

  std::string const golden = read_text_file(std::string(RAMSEY_GOLDEN_DIR) + "/schur_n4_c2.cnf");
  std::string const dimacs = export_dimacs(encode_avoidance(parse_pattern("{x,y,x+y}"), 4, 2).formula);
  if (dimacs != golden) problems.push_back("DIMACS differs from golden");
  if (export_dimacs(parse_dimacs(golden)) != golden) problems.push_back("DIMACS re-export differs");

  std::vector<Coloring> colorings{
      Coloring(1, 37, 3, Generator::random(5)),
      Coloring(2, 9, 2, Generator::parity()),
      Coloring(3, 4, 4, Generator::random(6)),
      Coloring(1, 20, 3, Generator::blocks({1, 2, 3})),
  };
  auto const dir = scratch_dir();
  for (std::size_t i = 0; i < colorings.size(); ++i) {
    auto const path = (dir / ("coloring_" + std::to_string(i) + ".txt")).string();
    write_text_file(path, colorings[i].to_text());
    Coloring const back = parse_coloring(read_text_file(path));
    if (!(back == colorings[i]) || back.to_text() != colorings[i].to_text()) {
      problems.push_back("coloring " + std::to_string(i) + " does not round-trip");
    }
  }

  std::size_t witnesses = 0;
  for (auto const& c : finder_configs(dir)) {
    auto const r = cli::run(c);
    if (r.exit_code != 0) {
      problems.push_back(c.subcommand + " exited " + std::to_string(r.exit_code));
      continue;
    }
    std::string const text = read_text_file(*c.witness_out);
    Json const w = Json::parse(text);
    if (w.dump(2) + "\n" != text) problems.push_back(c.subcommand + " witness does not round-trip");
    cli::RunConfig v;
    v.subcommand = "verify";
    v.input = *c.witness_out;
    v.deterministic = true;
    auto const vr = Json::parse(cli::run(v).report);
    if (vr.value("verdict", "") != "valid" || w.value("validated", false) != true) {
      problems.push_back(c.subcommand + " witness not accepted by verify");
    }
    ++witnesses;
  }
  std::filesystem::remove_all(dir);
  o.seconds = seconds_since(t0);
  o.pass = problems.empty();
  o.detail = problems.empty() ? "golden DIMACS identical; " + std::to_string(colorings.size()) + " colorings and " +
                                    std::to_string(witnesses) + " witness files round-trip"
                              : problems.front();
  return o;
}

inline Outcome criterion9() {
  Outcome o{9, "byte-identical reports for 1, 4 and 8 workers"};
  auto const t0 = std::chrono::steady_clock::now();
  auto const dir = scratch_dir();
  auto configs = finder_configs(dir);
  for (std::uint32_t colors : {2u, 3u}) {
    for (std::string engine : {"backtracking", "sat"}) {
      auto c = threshold_config(engine, colors);
      c.csv = (dir / ("sweep_" + engine + std::to_string(colors) + ".csv")).string();
      configs.push_back(c);
    }
  }
  std::size_t compared = 0;
  std::vector<std::string> problems;
  for (auto c : configs) {
    std::vector<std::string> reports, files;
    for (unsigned w : {1u, 4u, 8u}) {
      c.workers = w;
      auto const r = cli::run(c);
      reports.push_back(r.report);
      std::string side;
      if (c.witness_out) side += read_text_file(*c.witness_out);
      if (c.csv) side += read_text_file(*c.csv);
      files.push_back(side);
    }
    if (reports[0] != reports[1] || reports[0] != reports[2] || files[0] != files[1] || files[0] != files[2]) {
      problems.push_back(c.subcommand + " output depends on worker count");
    }
    ++compared;
  }
  std::filesystem::remove_all(dir);
  o.seconds = seconds_since(t0);
  o.pass = problems.empty();
  o.detail = problems.empty() ? std::to_string(compared) + " commands byte-identical across worker counts"
                              : problems.front();
  return o;
}

}  // namespace detail

inline std::vector<std::function<Outcome()>> all_criteria() {
  return {detail::criterion1, detail::criterion2, [] { return detail::criterion3(); }, detail::criterion4,
          [] { return detail::criterion5(); }, [] { return detail::criterion6(); }, detail::criterion7,
          detail::criterion8, detail::criterion9};
}

inline std::string format_line(Outcome const& o) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2f", o.seconds);
  return std::string(o.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(o.id) + ": " + o.name + " | " +
         o.detail + " (" + secs + " s)";
}

// Runs the selected criteria (all when `ids` is empty), printing one line
// per criterion as it finishes.
inline std::vector<Outcome> run_criteria(std::vector<int> const& ids, std::ostream& lines) {
  auto const all = all_criteria();
  std::vector<Outcome> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    int const id = static_cast<int>(i + 1);
    if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
    Outcome o;
    try {
      o = all[i]();
    } catch (std::exception const& e) {
      o = Outcome{id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what(), 0};
    }
    lines << format_line(o) << std::endl;
    out.push_back(o);
  }
  return out;
}

}  // namespace ramsey::acceptance
