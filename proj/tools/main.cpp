#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "criteria.hpp"

namespace {

using ramsey::cli::RunConfig;

void add_pattern(CLI::App* app, RunConfig& c, bool required = true) {
  auto* o = app->add_option("--pattern", c.pattern, "pattern, e.g. \"{x, y, x+y}\"");
  if (required) o->required();
  app->add_flag("--distinct", c.distinct, "variables must take pairwise distinct values");
  app->add_option("--min", c.min_value, "least value a variable may take")->check(CLI::PositiveNumber);
}

void add_coloring(CLI::App* app, RunConfig& c) {
  app->add_option("--coloring", c.coloring_file, "coloring file");
  app->add_option("--generator", c.generator, "constant, parity, mod, blocks or random");
  app->add_option("--param", c.gen_param, "generator parameter (constant color, modulus, random seed)");
  app->add_option("--widths", c.widths, "block widths for the blocks generator")->delimiter(',');
  app->add_option("--dim", c.dim, "box dimension")->check(CLI::PositiveNumber);
  app->add_option("--n", c.n, "box side N")->check(CLI::PositiveNumber);
  app->add_option("--colors", c.colors, "number of colors")->check(CLI::Range(1u, ramsey::kMaxColors));
}

void add_search(CLI::App* app, RunConfig& c) {
  app->add_option("--engine", c.engine, "backtracking, sat or exhaustive");
  app->add_option("--colors", c.colors, "number of colors")->check(CLI::Range(1u, ramsey::kMaxColors));
}

void add_witness_out(CLI::App* app, RunConfig& c) {
  app->add_option("--witness-out", c.witness_out, "write a witness file");
}

void print(std::string const& text, RunConfig const& c, bool to_file) {
  if (to_file && c.out) {
    ramsey::write_text_file(*c.out, text);
  } else {
    std::cout << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition-regularity workbench"};
  app.require_subcommand(1);
  RunConfig c;
  c.workers = ramsey::cli::default_workers();

  app.add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1u, 256u));
  app.add_flag("--deterministic", c.deterministic, "zero all timings for byte-stable output");
  app.add_option("--seed", c.seed, "seed for random colorings (default 0)");
  app.add_option("--nodes", c.node_budget, "node budget (conflicts for SAT)")->check(CLI::PositiveNumber);
  app.add_option("--time-ms", c.time_ms, "time budget for threshold scans")->check(CLI::PositiveNumber);
  app.add_option("--out", c.out, "report path (DIMACS path for encode)");
  app.fallthrough();

  auto* find = app.add_subcommand("find", "least monochromatic pattern instance");
  add_pattern(find, c);
  add_coloring(find, c);
  add_witness_out(find, c);
  find->add_flag("--all", c.all, "list all instances in lexicographic order");
  find->add_option("--limit", c.limit, "cap for --all")->check(CLI::PositiveNumber);

  auto* avoid = app.add_subcommand("avoid", "find a coloring of [1..N] avoiding the pattern");
  add_pattern(avoid, c);
  add_search(avoid, c);
  avoid->add_option("--n", c.n, "box side N")->required()->check(CLI::PositiveNumber);
  avoid->add_option("--coloring-out", c.coloring_out, "write the avoiding coloring");

  auto* threshold = app.add_subcommand("threshold", "least N forcing the pattern");
  add_pattern(threshold, c);
  add_search(threshold, c);
  threshold->add_option("--max-n", c.max_n, "largest N to try")->check(CLI::PositiveNumber);
  threshold->add_option("--csv", c.csv, "write the sweep as CSV");
  threshold->add_option("--coloring-out", c.coloring_out, "write the certificate coloring");

  auto* encode = app.add_subcommand("encode", "DIMACS CNF for pattern avoidance");
  add_pattern(encode, c);
  encode->add_option("--n", c.n, "box side N")->required()->check(CLI::PositiveNumber);
  encode->add_option("--colors", c.colors, "number of colors")->check(CLI::Range(1u, ramsey::kMaxColors));
  encode->add_flag("--symmetry-break", c.symmetry_break, "fix the least value to color 0");

  auto* solve = app.add_subcommand("solve", "solve a DIMACS file");
  solve->add_option("file", c.input, "DIMACS file")->required();
  solve->add_option("--model", c.model, "read an external solver's output instead of solving");
  solve->add_option("--pattern", c.pattern, "re-check the decoded coloring against a pattern");
  solve->add_option("--coloring-out", c.coloring_out, "write the decoded coloring");
  solve->add_flag("--competition", c.competition, "print s/v lines instead of JSON");

  auto* fs = app.add_subcommand("fs-witness", "least monochromatic FS set on k generators");
  add_coloring(fs, c);
  add_witness_out(fs, c);
  fs->add_option("--k", c.k, "number of generators")->check(CLI::PositiveNumber);

  auto* grid = app.add_subcommand("grid-witness", "least sequence whose cut grids share a color");
  add_coloring(grid, c);
  add_witness_out(grid, c);
  grid->add_option("--length", c.length, "sequence length")->check(CLI::PositiveNumber);

  auto* composed = app.add_subcommand("composed-witness", "check composed-product witnesses");
  add_coloring(composed, c);
  add_witness_out(composed, c);
  composed->add_option("--op", c.op, "mul, add, const:V or table:FILE");
  composed->add_option("--sequence", c.sequence, "a_0,a_1,...")->delimiter(',')->required();
  composed->add_option("--cuts", c.cuts, "m_0,...,m_d for a single grid")->delimiter(',');
  composed->add_option("--depth", c.depth, "check every cut tuple up to this depth")->check(CLI::PositiveNumber);
  composed->add_flag("--dependent", c.dependent, "depth drawn from FS of the leading block");

  for (auto const* name : {"bundle14", "bundle15"}) {
    auto* b = app.add_subcommand(name, std::string(name) == "bundle14" ? "multiplicative bundle search"
                                                                        : "additive bundle search");
    add_coloring(b, c);
    add_witness_out(b, c);
    b->add_option("--k", c.k, "structure length (1..3)")->check(CLI::Range(1, 3));
    b->add_option("--max-a", c.max_a, "cap on |A|")->check(CLI::PositiveNumber);
    b->add_flag("--corollary", c.corollary, "search the four-element corollary pattern");
  }

  auto* verify = app.add_subcommand("verify", "re-validate a witness file");
  verify->add_option("file", c.input, "witness file")->required();

  auto* semigroup = app.add_subcommand("semigroup", "analyze a finite semigroup");
  semigroup->add_option("--table", c.table, "Cayley table file")->required();
  semigroup->add_option("--subset", c.subset, "test centrality of a subset")->delimiter(',');

  auto* suite = app.add_subcommand("suite", "run the acceptance criteria");
  suite->add_option("--criteria", c.criteria, "criterion ids (default: all)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    ramsey::cli::Json err;
    err["schema_version"] = ramsey::cli::kSchemaVersion;
    err["error"] = {{"type", "usage"}, {"message", e.what()}};
    std::cout << err.dump(2) << "\n";
    return ramsey::cli::kExitInputError;
  }

  if (char const* env = std::getenv("RAMSEY_WORKERS")) {
    try {
      int const w = std::stoi(env);
      if (w < 1) throw std::invalid_argument("non-positive");
      c.workers = static_cast<unsigned>(w);
    } catch (std::exception const&) {
      std::cout << ramsey::cli::detail::dump(
          ramsey::cli::detail::error_json("usage", "RAMSEY_WORKERS must be a positive integer"));
      return ramsey::cli::kExitInputError;
    }
  }

  c.subcommand = app.get_subcommands().front()->get_name();

  if (c.subcommand == "suite") {
    auto const outcomes = ramsey::acceptance::run_criteria(c.criteria, std::cerr);
    ramsey::cli::Json rows = ramsey::cli::Json::array();
    bool all = true;
    for (auto const& o : outcomes) {
      all = all && o.pass;
      rows.push_back({{"id", o.id}, {"name", o.name}, {"pass", o.pass}, {"detail", o.detail},
                      {"seconds", c.deterministic ? 0.0 : o.seconds}});
    }
    ramsey::cli::Json r;
    r["schema_version"] = ramsey::cli::kSchemaVersion;
    r["command"] = "suite";
    r["verdict"] = all ? "pass" : "fail";
    r["criteria"] = rows;
    print(r.dump(2) + "\n", c, true);
    return all ? 0 : 1;
  }

  auto const result = ramsey::cli::run(c);
  print(result.report, c, c.subcommand != "encode");
  return result.exit_code;
}
