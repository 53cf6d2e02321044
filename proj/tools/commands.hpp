#pragma once

// Subcommand implementations shared by the command-line tool and the
// acceptance runner. Every command returns its JSON report as text; side
// files (witnesses, CSV, DIMACS) are written as requested by the config.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "ramsey/ramsey.hpp"

namespace ramsey::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitAnswered = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitBudget = 2;

struct RunConfig {
  std::string subcommand;

  std::string pattern;
  bool distinct = false;
  std::uint64_t min_value = 1;

  std::optional<std::string> coloring_file;
  std::string generator = "random";
  std::optional<std::uint64_t> gen_param;
  std::vector<std::uint64_t> widths;
  int dim = 1;
  std::uint64_t n = 0;
  std::uint32_t colors = 2;

  std::string engine = "backtracking";
  std::uint64_t node_budget = 0;  // 0 = command default
  std::uint64_t time_ms = 0;      // 0 = unlimited
  std::uint64_t seed = 0;
  std::optional<std::string> out;
  bool deterministic = false;
  unsigned workers = 1;

  std::string input;  // positional file for solve / verify
  std::optional<std::string> model;
  std::optional<std::string> witness_out;
  std::optional<std::string> coloring_out;
  std::optional<std::string> csv;
  std::optional<std::string> table;
  std::optional<std::vector<std::uint32_t>> subset;
  std::uint64_t max_n = 64;
  bool symmetry_break = false;
  bool all = false;
  std::size_t limit = 1000;
  std::size_t k = 2;
  std::size_t length = 2;
  std::size_t max_a = kDefaultBundleCap;
  bool corollary = false;
  std::string op = "mul";
  std::vector<std::uint64_t> sequence;
  std::vector<std::size_t> cuts;
  std::size_t depth = 0;
  bool dependent = false;
  bool competition = false;
  std::vector<int> criteria;
};

struct RunResult {
  int exit_code = kExitAnswered;
  std::string report;  // what goes to stdout
};

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

namespace detail {

inline std::string dump(Json const& j) { return j.dump(2) + "\n"; }

inline Json error_json(std::string const& type, std::string const& message) {
  Json e;
  e["schema_version"] = kSchemaVersion;
  e["error"] = {{"type", type}, {"message", message}};
  return e;
}

inline int exit_for(SearchStatus s) { return s == SearchStatus::budget_exhausted ? kExitBudget : kExitAnswered; }

class Clock {
 public:
  explicit Clock(bool deterministic) : deterministic_(deterministic), start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    if (deterministic_) return 0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }
  double row(double t) const { return deterministic_ ? 0 : t; }

 private:
  bool deterministic_;
  std::chrono::steady_clock::time_point start_;
};

inline Json stats(std::uint64_t nodes, double ms, std::string const& engine) {
  return Json{{"nodes", nodes}, {"time_ms", ms}, {"engine", engine}};
}

inline Json report(std::string const& command, Json query, std::string const& verdict, Json witness, Json st) {
  Json r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = command;
  r["query"] = std::move(query);
  r["verdict"] = verdict;
  r["witness"] = std::move(witness);
  r["stats"] = std::move(st);
  return r;
}

inline std::uint64_t finder_budget(RunConfig const& c) { return c.node_budget ? c.node_budget : kDefaultFinderBudget; }

inline PatternSchema schema_of(RunConfig const& c) {
  if (c.pattern.empty()) throw InputError("--pattern is required");
  return parse_pattern(c.pattern, c.distinct, c.min_value);
}

inline Json pattern_json(PatternSchema const& s) {
  return Json{{"pattern", s.to_string()}, {"distinct", s.distinct_vars()}, {"min_value", s.min_value()}};
}

// Coloring specs travel inside reports and witness files as "coloring_ref".
inline ColoringSpec coloring_spec(RunConfig const& c) {
  ColoringSpec spec;
  if (c.coloring_file) {
    spec.file = c.coloring_file;
    return spec;
  }
  if (c.n == 0) throw InputError("a coloring needs --coloring FILE or --n with a generator");
  spec.dim = c.dim;
  spec.side = c.n;
  spec.colors = c.colors;
  auto const kind = Generator::parse_kind(c.generator);
  switch (kind) {
    case Generator::Kind::constant: spec.generator = Generator::constant(c.gen_param.value_or(0)); break;
    case Generator::Kind::parity: spec.generator = Generator::parity(); break;
    case Generator::Kind::mod: spec.generator = Generator::mod(c.gen_param.value_or(c.colors)); break;
    case Generator::Kind::blocks: spec.generator = Generator::blocks(c.widths); break;
    case Generator::Kind::random: spec.generator = Generator::random(c.gen_param.value_or(c.seed)); break;
  }
  return spec;
}

inline Json coloring_ref(ColoringSpec const& spec) {
  if (spec.file) return Json{{"file", *spec.file}};
  Json j;
  j["generator"] = Generator::kind_name(spec.generator.kind);
  j["param"] = spec.generator.param;
  if (spec.generator.kind == Generator::Kind::blocks) j["widths"] = spec.generator.widths;
  j["dim"] = spec.dim;
  j["n"] = spec.side;
  j["colors"] = spec.colors;
  return j;
}

inline ColoringSpec spec_from_ref(Json const& j) {
  ColoringSpec spec;
  if (j.contains("file")) {
    spec.file = j.at("file").get<std::string>();
    return spec;
  }
  spec.generator.kind = Generator::parse_kind(j.at("generator").get<std::string>());
  spec.generator.param = j.at("param").get<std::uint64_t>();
  if (j.contains("widths")) spec.generator.widths = j.at("widths").get<std::vector<std::uint64_t>>();
  spec.dim = j.at("dim").get<int>();
  spec.side = j.at("n").get<std::uint64_t>();
  spec.colors = j.at("colors").get<std::uint32_t>();
  return spec;
}

inline Json cells_json(Coloring const& col) {
  Json cells = Json::array();
  for (auto c : col.cells()) cells.push_back(static_cast<int>(c));
  return cells;
}

// Color classes of a materialized 1-dimensional coloring.
inline Json classes_json(Coloring const& col) {
  std::vector<std::vector<std::uint64_t>> classes(col.colors());
  for (std::uint64_t n = 1; n <= col.side(); ++n) classes[col.at(n)].push_back(n);
  return Json(classes);
}

inline Json witness_file(std::string const& kind, Json data, Json ref, bool validated) {
  Json w;
  w["schema_version"] = kSchemaVersion;
  w["kind"] = kind;
  w["data"] = std::move(data);
  w["coloring_ref"] = std::move(ref);
  w["validated"] = validated;
  return w;
}

inline void maybe_write_witness(RunConfig const& c, Json const& w) {
  if (c.witness_out) write_text_file(*c.witness_out, dump(w));
}

inline Json instance_json(PatternSchema const& schema, Instance const& inst) {
  Json asg = Json::object();
  for (std::size_t i = 0; i < inst.values.size(); ++i) asg[schema.variables()[i]] = inst.values[i];
  return Json{{"assignment", asg}, {"values", inst.value_set}, {"color", inst.color}};
}

inline OpTable op_of(std::string const& spec, std::uint64_t side) {
  if (spec == "mul") return OpTable::multiplication(side);
  if (spec == "add") return OpTable::addition(side);
  if (spec.rfind("const:", 0) == 0) return OpTable::constant(side, std::stoull(spec.substr(6)));
  if (spec.rfind("table:", 0) == 0) {
    OpTable t = OpTable::parse(read_text_file(spec.substr(6)));
    if (t.side() != side) throw InputError("operation table side does not match the coloring");
    return t;
  }
  throw InputError("unknown operation '" + spec + "' (mul, add, const:V, table:FILE)");
}

inline Json bundle_json(Bundle const& b, bool additive) {
  IntSet const vals = additive ? bundle15_values(b) : bundle14_values(b);
  return Json{{"lambda", b.lambda}, {"A", b.A}, {"B", b.B}, {"k", b.k}, {"values", vals}};
}

inline Json triple_json(Triple const& t, bool additive) {
  if (additive) {
    return Json{{"b", t.lead}, {"u", t.x}, {"v", t.y}, {"values", corollary15_values(t)}};
  }
  return Json{{"a", t.lead}, {"x", t.x}, {"y", t.y}, {"values", corollary14_values(t)}};
}

// ---------------------------------------------------------------------------

inline RunResult cmd_find(RunConfig const& c) {
  Clock clock(c.deterministic);
  auto const schema = schema_of(c);
  auto const spec = coloring_spec(c);
  Coloring const col = load(spec);
  Json query = pattern_json(schema);
  query["coloring_ref"] = coloring_ref(spec);

  if (c.all) {
    auto const found = find_all_instances(schema, col, c.limit);
    Json list = Json::array();
    for (auto const& inst : found) list.push_back(instance_json(schema, inst));
    query["limit"] = c.limit;
    Json witness{{"instances", list}, {"truncated", found.size() >= c.limit}};
    return {kExitAnswered, dump(report("find", query, found.empty() ? "none" : "found", witness,
                                       stats(0, clock.ms(), "enumeration")))};
  }

  auto const res = find_instance(schema, col, c.workers, c.node_budget);
  Json witness = nullptr;
  if (res.instance) {
    witness = instance_json(schema, *res.instance);
    Json data = pattern_json(schema);
    data["assignment"] = witness["assignment"];
    auto const vals = instantiate(schema, res.instance->assignment(schema));
    bool ok = true;
    for (auto v : vals) ok = ok && col.in_box(v) && col.at(v) == res.instance->color;
    maybe_write_witness(c, witness_file("instance", data, coloring_ref(spec), ok));
  }
  return {exit_for(res.status),
          dump(report("find", query, to_string(res.status), witness, stats(res.nodes, clock.ms(), "instance_search")))};
}

inline SearchOptions search_options(RunConfig const& c) {
  SearchOptions o;
  o.engine = parse_engine(c.engine);
  o.workers = c.workers;
  o.node_budget = c.node_budget;
  o.time_budget_ms = c.time_ms;
  return o;
}

inline RunResult cmd_avoid(RunConfig const& c) {
  Clock clock(c.deterministic);
  auto const schema = schema_of(c);
  if (c.n == 0) throw InputError("--n is required");
  auto const opts = search_options(c);
  auto const r = find_avoiding_coloring(schema, c.n, c.colors, opts);
  Json query = pattern_json(schema);
  query["n"] = c.n;
  query["colors"] = c.colors;
  Json witness = nullptr;
  if (r.coloring) {
    witness = Json{{"cells", cells_json(*r.coloring)}, {"classes", classes_json(*r.coloring)}};
    if (c.coloring_out) write_text_file(*c.coloring_out, r.coloring->to_text());
  }
  int const code = r.verdict == Verdict::unknown ? kExitBudget : kExitAnswered;
  return {code, dump(report("avoid", query, to_string(r.verdict), witness, stats(r.nodes, clock.ms(), c.engine)))};
}

inline RunResult cmd_threshold(RunConfig const& c) {
  Clock clock(c.deterministic);
  auto const schema = schema_of(c);
  auto const opts = search_options(c);
  auto const t = threshold_number(schema, c.colors, c.max_n, opts);
  Json query = pattern_json(schema);
  query["colors"] = c.colors;
  query["max_n"] = c.max_n;

  std::uint64_t nodes = 0;
  Json sweep = Json::array();
  std::string csv = "N,verdict,nodes,time_ms\n";
  for (auto const& row : t.rows) {
    nodes += row.nodes;
    double const ms = clock.row(row.time_ms);
    sweep.push_back(Json{{"n", row.side}, {"verdict", to_string(row.verdict)}, {"nodes", row.nodes}, {"time_ms", ms}});
    csv += std::to_string(row.side) + "," + to_string(row.verdict) + "," + std::to_string(row.nodes) + "," +
           (c.deterministic ? std::string("0") : std::to_string(static_cast<std::uint64_t>(row.time_ms))) + "\n";
  }
  if (c.csv) write_text_file(*c.csv, csv);

  Json witness = Json::object();
  witness["threshold"] = t.threshold ? Json(*t.threshold) : Json(nullptr);
  if (t.certificate) {
    bool const valid = find_instance(schema, *t.certificate).status == SearchStatus::none;
    witness["certificate"] =
        Json{{"n", t.certificate->side()}, {"cells", cells_json(*t.certificate)}, {"validated", valid}};
    if (c.coloring_out) write_text_file(*c.coloring_out, t.certificate->to_text());
  } else {
    witness["certificate"] = nullptr;
  }
  Json r = report("threshold", query, to_string(t.status), witness, stats(nodes, clock.ms(), c.engine));
  r["sweep"] = sweep;
  return {exit_for(t.status), dump(r)};
}

inline RunResult cmd_encode(RunConfig const& c) {
  auto const schema = schema_of(c);
  if (c.n == 0) throw InputError("--n is required");
  auto const enc = encode_avoidance(schema, c.n, c.colors, c.symmetry_break,
                                    c.node_budget ? c.node_budget : kDefaultInstanceBudget);
  std::string const text = export_dimacs(enc.formula);
  if (!c.out) return {kExitAnswered, text};
  write_text_file(*c.out, text);
  Json query = pattern_json(schema);
  query["n"] = c.n;
  query["colors"] = c.colors;
  query["symmetry_break"] = c.symmetry_break;
  Json witness{{"file", *c.out},
               {"variables", enc.formula.var_count},
               {"clauses", enc.formula.clauses.size()},
               {"value_sets", enc.value_sets}};
  Json r = report("encode", query, "encoded", witness, stats(0, 0, "encoder"));
  return {kExitAnswered, dump(r)};
}

// A formula in the one-hot layout of encode_avoidance: clause 0 is
// (1 v ... v c). Returns c when every integer's at-least-one clause sits
// where the layout puts it.
inline std::optional<std::uint32_t> one_hot_colors(CnfFormula const& f) {
  if (f.clauses.empty() || f.var_count <= 0) return std::nullopt;
  auto const& first = f.clauses.front();
  std::uint32_t const c = static_cast<std::uint32_t>(first.size());
  if (c == 0 || f.var_count % static_cast<int>(c) != 0) return std::nullopt;
  std::size_t const per = 1 + static_cast<std::size_t>(c) * (c - 1) / 2;
  std::uint64_t const side = static_cast<std::uint64_t>(f.var_count) / c;
  if (f.clauses.size() < side * per) return std::nullopt;
  for (std::uint64_t n = 0; n < side; ++n) {
    auto const& alo = f.clauses[n * per];
    if (alo.size() != c) return std::nullopt;
    for (std::uint32_t j = 0; j < c; ++j) {
      if (alo[j] != static_cast<int>(n * c + j + 1)) return std::nullopt;
    }
  }
  return c;
}

inline std::string competition_output(SatVerdict const& v) {
  std::string out = std::string("s ") +
                    (v.kind == SatVerdict::Kind::sat     ? "SATISFIABLE"
                     : v.kind == SatVerdict::Kind::unsat ? "UNSATISFIABLE"
                                                         : "UNKNOWN") +
                    "\n";
  if (v.kind == SatVerdict::Kind::sat) {
    out += "v";
    for (int lit : v.model) out += " " + std::to_string(lit);
    out += " 0\n";
  }
  return out;
}

inline RunResult cmd_solve(RunConfig const& c) {
  Clock clock(c.deterministic);
  if (c.input.empty()) throw InputError("solve needs a DIMACS file");
  CnfFormula const f = parse_dimacs(read_text_file(c.input));
  SatVerdict v;
  std::string engine = "cdcl";
  if (c.model) {
    engine = "external";
    v = parse_solver_output(read_text_file(*c.model), f.var_count);
    if (v.kind == SatVerdict::Kind::sat && !satisfies(f, v.model)) {
      throw InputError("external model does not satisfy the formula");
    }
  } else {
    v = solve(f, c.node_budget);
  }
  if (c.competition) return {v.kind == SatVerdict::Kind::unknown ? kExitBudget : kExitAnswered, competition_output(v)};

  Json query{{"file", c.input}, {"variables", f.var_count}, {"clauses", f.clauses.size()}};
  Json witness = nullptr;
  if (v.kind == SatVerdict::Kind::sat) {
    witness = Json::object();
    witness["model"] = v.model;
    if (auto colors = one_hot_colors(f)) {
      Coloring const col =
          decode_coloring(v, VariableMap{static_cast<std::uint64_t>(f.var_count) / *colors, *colors});
      Json dec{{"n", col.side()}, {"colors", col.colors()}, {"cells", cells_json(col)}, {"classes", classes_json(col)}};
      if (!c.pattern.empty()) {
        dec["avoids_pattern"] = find_instance(schema_of(c), col).status == SearchStatus::none;
      }
      witness["coloring"] = dec;
      if (c.coloring_out) write_text_file(*c.coloring_out, col.to_text());
    }
  }
  Json st = stats(v.decisions, clock.ms(), engine);
  st["conflicts"] = v.conflicts;
  int const code = v.kind == SatVerdict::Kind::unknown ? kExitBudget : kExitAnswered;
  return {code, dump(report("solve", query, to_string(v.kind), witness, st))};
}

inline RunResult cmd_fs_witness(RunConfig const& c) {
  Clock clock(c.deterministic);
  auto const spec = coloring_spec(c);
  Coloring const col = load(spec);
  auto const res = find_fs_witness(col, c.k, c.workers, finder_budget(c));
  Json query{{"k", c.k}, {"coloring_ref", coloring_ref(spec)}};
  Json witness = nullptr;
  if (res.witness) {
    witness = Json{{"generators", *res.witness}, {"color", res.color}, {"fs", fs_set(*res.witness)}};
    bool const ok = check_fs_witness(col, *res.witness).monochromatic;
    maybe_write_witness(c, witness_file("fs", Json{{"generators", *res.witness}}, coloring_ref(spec), ok));
  }
  return {exit_for(res.status),
          dump(report("fs-witness", query, to_string(res.status), witness, stats(res.nodes, clock.ms(), "fs_search")))};
}

inline RunResult cmd_grid_witness(RunConfig const& c) {
  Clock clock(c.deterministic);
  auto const spec = coloring_spec(c);
  Coloring const col = load(spec);
  auto const res = find_grid_witness(col, c.length, c.workers, finder_budget(c));
  Json query{{"length", c.length}, {"dim", col.dim()}, {"coloring_ref", coloring_ref(spec)}};
  Json witness = nullptr;
  if (res.witness) {
    witness = Json{{"sequence", *res.witness}, {"dim", col.dim()}, {"color", res.color}};
    bool const ok = check_grid_sequence(col, *res.witness).monochromatic;
    maybe_write_witness(c, witness_file("grid", Json{{"sequence", *res.witness}}, coloring_ref(spec), ok));
  }
  return {exit_for(res.status), dump(report("grid-witness", query, to_string(res.status), witness,
                                            stats(res.nodes, clock.ms(), "grid_search")))};
}

// Composed data: {"op", "sequence"} plus exactly one of "cuts", "depth",
// "dependent".
inline MonoCheck check_composed_data(Coloring const& col, Json const& data, Json& detail_out) {
  OpTable const op = op_of(data.at("op").get<std::string>(), col.side());
  auto const seq = data.at("sequence").get<std::vector<std::uint64_t>>();
  if (data.contains("cuts")) {
    return check_composed_witness(col, op, CutGrid{seq, data.at("cuts").get<std::vector<std::size_t>>()});
  }
  if (data.value("dependent", false)) return check_composed_dependent(col, op, seq);
  std::size_t const depth = data.at("depth").get<std::size_t>();
  if (depth == 0) throw InputError("depth must be >= 1");
  auto const per = check_composed_sequence(col, op, seq, depth);
  MonoCheck all{true, std::nullopt, 0};
  Json colors = Json::array();
  for (auto const& m : per) {
    all.monochromatic = all.monochromatic && m.monochromatic;
    all.points += m.points;
    colors.push_back(m.color ? Json(*m.color) : Json(nullptr));
  }
  detail_out["per_depth_color"] = colors;
  return all;
}

inline RunResult cmd_composed_witness(RunConfig const& c) {
  Clock clock(c.deterministic);
  auto const spec = coloring_spec(c);
  Coloring const col = load(spec);
  if (c.sequence.empty()) throw InputError("--sequence is required");
  Json data{{"op", c.op}, {"sequence", c.sequence}};
  if (!c.cuts.empty()) data["cuts"] = c.cuts;
  else if (c.dependent) data["dependent"] = true;
  else data["depth"] = c.depth ? c.depth : 1;
  Json extra = Json::object();
  MonoCheck const m = check_composed_data(col, data, extra);
  Json query = data;
  query["coloring_ref"] = coloring_ref(spec);
  Json witness{{"color", m.color ? Json(*m.color) : Json(nullptr)}, {"points", m.points}};
  for (auto& [key, val] : extra.items()) witness[key] = val;
  maybe_write_witness(c, witness_file("composed", data, coloring_ref(spec), m.monochromatic));
  return {kExitAnswered, dump(report("composed-witness", query, m.monochromatic ? "monochromatic" : "not_monochromatic",
                                     witness, stats(m.points, clock.ms(), "composed_check")))};
}

inline RunResult cmd_bundle(RunConfig const& c, bool additive) {
  Clock clock(c.deterministic);
  std::string const name = additive ? "bundle15" : "bundle14";
  auto const spec = coloring_spec(c);
  Coloring const col = load(spec);
  Json query{{"coloring_ref", coloring_ref(spec)}};
  if (c.corollary) {
    query["mode"] = "corollary";
    auto const res = additive ? find_corollary15(col, c.workers, c.node_budget)
                              : find_corollary14(col, c.workers, c.node_budget);
    Json witness = nullptr;
    if (res.witness) {
      witness = triple_json(*res.witness, additive);
      witness["color"] = res.color;
      bool const ok = (additive ? check_corollary15(col, *res.witness) : check_corollary14(col, *res.witness)).monochromatic;
      Json data = triple_json(*res.witness, additive);
      data.erase("values");
      data["mode"] = "corollary";
      maybe_write_witness(c, witness_file(name, data, coloring_ref(spec), ok));
    }
    return {exit_for(res.status), dump(report(name, query, to_string(res.status), witness,
                                              stats(res.nodes, clock.ms(), "corollary_search")))};
  }
  query["k"] = c.k;
  query["max_a"] = c.max_a;
  auto const res = additive ? find_bundle15(col, c.k, c.max_a, c.workers, finder_budget(c))
                            : find_bundle14(col, c.k, c.max_a, c.workers, finder_budget(c));
  Json witness = nullptr;
  if (res.witness) {
    witness = bundle_json(*res.witness, additive);
    witness["color"] = res.color;
    bool const ok = (additive ? check_bundle15(col, *res.witness) : check_bundle14(col, *res.witness)).valid;
    Json data = bundle_json(*res.witness, additive);
    data.erase("values");
    maybe_write_witness(c, witness_file(name, data, coloring_ref(spec), ok));
  }
  return {exit_for(res.status),
          dump(report(name, query, to_string(res.status), witness, stats(res.nodes, clock.ms(), "bundle_search")))};
}

// Re-validates a witness file against its coloring. Returns (valid, detail).
inline std::pair<bool, Json> verify_witness(Json const& w) {
  if (w.value("schema_version", 0) != kSchemaVersion) throw InputError("unsupported witness schema_version");
  std::string const kind = w.at("kind").get<std::string>();
  Json const& data = w.at("data");
  Coloring const col = load(spec_from_ref(w.at("coloring_ref")));
  Json info = Json::object();
  auto mono = [&](MonoCheck const& m) {
    info["color"] = m.color ? Json(*m.color) : Json(nullptr);
    return m.monochromatic;
  };
  if (kind == "instance") {
    auto const schema = parse_pattern(data.at("pattern").get<std::string>(), data.at("distinct").get<bool>(),
                                      data.at("min_value").get<std::uint64_t>());
    Assignment asg;
    for (auto& [name, val] : data.at("assignment").items()) asg[name] = val.get<std::uint64_t>();
    schema.check_assignment(asg);
    ramsey::detail::ColorAgreement agree;
    for (auto v : instantiate(schema, asg)) {
      if (!col.in_box(v)) return {false, Json{{"reason", "value outside the box"}}};
      agree.see(col.at(v));
    }
    return {mono(agree.result()), info};
  }
  if (kind == "fs") return {mono(check_fs_witness(col, data.at("generators").get<std::vector<std::uint64_t>>())), info};
  if (kind == "grid") {
    auto const seq = data.at("sequence").get<std::vector<std::uint64_t>>();
    if (data.contains("cuts")) {
      return {mono(check_grid_witness(col, CutGrid{seq, data.at("cuts").get<std::vector<std::size_t>>()})), info};
    }
    return {mono(check_grid_sequence(col, seq)), info};
  }
  if (kind == "composed") {
    Json extra = Json::object();
    bool const ok = mono(check_composed_data(col, data, extra));
    for (auto& [key, val] : extra.items()) info[key] = val;
    return {ok, info};
  }
  if (kind == "bundle14" || kind == "bundle15") {
    bool const additive = kind == "bundle15";
    if (data.value("mode", "") == "corollary") {
      Triple const t = additive ? Triple{data.at("b").get<std::uint64_t>(), data.at("u").get<std::uint64_t>(),
                                         data.at("v").get<std::uint64_t>()}
                                : Triple{data.at("a").get<std::uint64_t>(), data.at("x").get<std::uint64_t>(),
                                         data.at("y").get<std::uint64_t>()};
      return {mono(additive ? check_corollary15(col, t) : check_corollary14(col, t)), info};
    }
    Bundle b;
    b.lambda = data.at("lambda").get<std::uint64_t>();
    b.A = data.at("A").get<std::vector<std::uint64_t>>();
    b.B = data.at("B").get<std::vector<std::uint64_t>>();
    b.k = data.at("k").get<std::size_t>();
    auto const chk = additive ? check_bundle15(col, b) : check_bundle14(col, b);
    info["color"] = chk.color ? Json(*chk.color) : Json(nullptr);
    if (!chk.valid) info["reason"] = chk.reason;
    return {chk.valid, info};
  }
  throw InputError("unknown witness kind '" + kind + "'");
}

inline RunResult cmd_verify(RunConfig const& c) {
  Clock clock(c.deterministic);
  if (c.input.empty()) throw InputError("verify needs a witness file");
  Json w;
  try {
    w = Json::parse(read_text_file(c.input));
  } catch (Json::parse_error const& e) {
    throw InputError(std::string("witness file is not JSON: ") + e.what());
  }
  auto const [valid, info] = verify_witness(w);
  Json query{{"file", c.input}, {"kind", w.at("kind")}, {"claimed_valid", w.value("validated", false)}};
  Json witness = w.at("data");
  witness["check"] = info;
  return {kExitAnswered, dump(report("verify", query, valid ? "valid" : "invalid", witness,
                                     stats(0, clock.ms(), "checker")))};
}

inline RunResult cmd_semigroup(RunConfig const& c) {
  Clock clock(c.deterministic);
  std::string const path = c.table ? *c.table : c.input;
  if (path.empty()) throw InputError("--table is required");
  CayleyTable const t = load_table(read_text_file(path));
  AlgebraReport const a = analyze(t);
  Json leq = Json::array();
  for (auto const& [x, y] : a.leq_L) leq.push_back(Json::array({x, y}));
  Json witness{{"order", t.order()},
               {"idempotents", a.idempotents},
               {"minimal_left_ideals", a.minimal_left_ideals},
               {"minimal_idempotents", a.minimal_idempotents},
               {"leq_L", leq}};
  Json query{{"table", path}};
  if (c.subset) {
    ElementSet s(c.subset->begin(), c.subset->end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    query["subset"] = s;
    witness["central"] = is_central(t, s);
  }
  return {kExitAnswered, dump(report("semigroup", query, "analyzed", witness, stats(0, clock.ms(), "algebra")))};
}

}  // namespace detail

// Runs one subcommand. Library errors become JSON error objects; the
// `suite` subcommand is dispatched by the caller.
inline RunResult run(RunConfig const& c) {
  try {
    auto const& s = c.subcommand;
    if (s == "find") return detail::cmd_find(c);
    if (s == "avoid") return detail::cmd_avoid(c);
    if (s == "threshold") return detail::cmd_threshold(c);
    if (s == "encode") return detail::cmd_encode(c);
    if (s == "solve") return detail::cmd_solve(c);
    if (s == "fs-witness") return detail::cmd_fs_witness(c);
    if (s == "grid-witness") return detail::cmd_grid_witness(c);
    if (s == "composed-witness") return detail::cmd_composed_witness(c);
    if (s == "bundle14") return detail::cmd_bundle(c, false);
    if (s == "bundle15") return detail::cmd_bundle(c, true);
    if (s == "verify") return detail::cmd_verify(c);
    if (s == "semigroup") return detail::cmd_semigroup(c);
    throw InputError("unknown subcommand '" + s + "'");
  } catch (ParseError const& e) {
    Json j = detail::error_json("parse_error", e.what());
    j["error"]["offset"] = e.offset();
    return {kExitInputError, detail::dump(j)};
  } catch (NonAssociativeError const& e) {
    Json j = detail::error_json("not_associative", e.what());
    j["error"]["triple"] = {e.triple().i, e.triple().j, e.triple().k};
    return {kExitInputError, detail::dump(j)};
  } catch (BudgetError const& e) {
    return {kExitBudget, detail::dump(detail::error_json("budget_exhausted", e.what()))};
  } catch (OutOfBoxError const& e) {
    return {kExitInputError, detail::dump(detail::error_json("out_of_box", e.what()))};
  } catch (OverflowError const& e) {
    return {kExitInputError, detail::dump(detail::error_json("overflow", e.what()))};
  } catch (InputError const& e) {
    return {kExitInputError, detail::dump(detail::error_json("input_error", e.what()))};
  } catch (Json::exception const& e) {
    return {kExitInputError, detail::dump(detail::error_json("input_error", e.what()))};
  } catch (std::invalid_argument const& e) {
    return {kExitInputError, detail::dump(detail::error_json("input_error", e.what()))};
  } catch (std::out_of_range const& e) {
    return {kExitInputError, detail::dump(detail::error_json("input_error", e.what()))};
  } catch (Error const& e) {
    return {kExitInputError, detail::dump(detail::error_json("error", e.what()))};
  }
}

}  // namespace ramsey::cli
