#include <gtest/gtest.h>

#include <random>

#include "ramsey/sat.hpp"
#include "ramsey/search.hpp"

using namespace ramsey;

namespace {

bool brute_sat(CnfFormula const& f) {
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << f.var_count); ++m) {
    std::vector<int> model;
    for (int v = 1; v <= f.var_count; ++v) model.push_back(m >> (v - 1) & 1 ? v : -v);
    if (satisfies(f, model)) return true;
  }
  return false;
}

CnfFormula random_3cnf(std::mt19937_64& rng, int vars, int clauses) {
  CnfFormula f;
  f.var_count = vars;
  for (int i = 0; i < clauses; ++i) {
    Clause c;
    for (int j = 0; j < 3; ++j) {
      int const v = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(vars));
      c.push_back(rng() % 2 ? v : -v);
    }
    f.add(c);
  }
  return f;
}

}  // namespace

TEST(Sat, ExportExamples) {
  CnfFormula f;
  f.var_count = 2;
  f.add({1, -2});
  EXPECT_EQ(export_dimacs(f), "p cnf 2 1\n1 -2 0\n");
  CnfFormula empty;
  empty.var_count = 3;
  EXPECT_EQ(export_dimacs(empty), "p cnf 3 0\n");
}

TEST(Sat, ConstructionRejectsBadClauses) {
  CnfFormula f;
  f.var_count = 2;
  EXPECT_THROW(f.add({}), InputError);
  EXPECT_THROW(f.add({3}), InputError);
  EXPECT_THROW(f.add({0}), InputError);
}

TEST(Sat, ParseDimacs) {
  auto const f = parse_dimacs("c comment\np cnf 3 2\n1 -3 0\n2\n3 0\n");
  EXPECT_EQ(f.var_count, 3);
  EXPECT_EQ(f.clauses, (std::vector<Clause>{{1, -3}, {2, 3}}));
  EXPECT_EQ(parse_dimacs(export_dimacs(f)), f);
  EXPECT_THROW(parse_dimacs("1 2 0\n"), InputError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 3 0\n"), InputError);
  EXPECT_THROW(parse_dimacs("p cnf 2 2\n1 0\n"), InputError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2\n"), InputError);
  EXPECT_THROW(parse_dimacs("p dnf 2 1\n1 0\n"), InputError);
}

TEST(Sat, Contradiction) {
  CnfFormula f;
  f.var_count = 1;
  f.add({1});
  f.add({-1});
  EXPECT_EQ(solve(f).kind, SatVerdict::Kind::unsat);
}

TEST(Sat, NoClausesIsSat) {
  CnfFormula f;
  f.var_count = 4;
  auto v = solve(f);
  ASSERT_EQ(v.kind, SatVerdict::Kind::sat);
  EXPECT_EQ(v.model.size(), 4u);
}

TEST(Sat, DeterministicBranchingPrefersTrue) {
  CnfFormula f;
  f.var_count = 3;
  f.add({1, 2, 3});
  auto v = solve(f);
  ASSERT_EQ(v.kind, SatVerdict::Kind::sat);
  EXPECT_EQ(v.model, (std::vector<int>{1, 2, 3}));
}

TEST(Sat, RandomFormulasMatchBruteForce) {
  std::mt19937_64 rng(11);
  int sat = 0, unsat = 0;
  for (int t = 0; t < 600; ++t) {
    int const vars = 3 + static_cast<int>(rng() % 10);
    auto const f = random_3cnf(rng, vars, static_cast<int>(vars * (3 + rng() % 3)));
    bool const expected = brute_sat(f);
    auto const v = solve(f);
    ASSERT_NE(v.kind, SatVerdict::Kind::unknown);
    EXPECT_EQ(v.kind == SatVerdict::Kind::sat, expected);
    if (v.kind == SatVerdict::Kind::sat) { EXPECT_TRUE(satisfies(f, v.model)); }
    (expected ? sat : unsat)++;
    auto const p = solve_portfolio(f, {0, 1, 2, 3});
    EXPECT_EQ(p.kind == SatVerdict::Kind::sat, expected);
  }
  EXPECT_GT(sat, 50);
  EXPECT_GT(unsat, 50);
}

TEST(Sat, SeededBranchingIsSound) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    auto const f = random_3cnf(rng, 10, 42);
    bool const expected = brute_sat(f);
    SolverOptions o;
    o.branch_seed = 1 + rng() % 1000;
    auto const v = Solver(f, o).solve();
    EXPECT_EQ(v.kind == SatVerdict::Kind::sat, expected);
    if (v.kind == SatVerdict::Kind::sat) { EXPECT_TRUE(satisfies(f, v.model)); }
  }
}

TEST(Sat, PigeonholeIsUnsat) {
  // 6 pigeons, 5 holes: p_{i,h} = i*5 + h + 1.
  CnfFormula f;
  f.var_count = 30;
  for (int i = 0; i < 6; ++i) {
    Clause c;
    for (int h = 0; h < 5; ++h) c.push_back(i * 5 + h + 1);
    f.add(c);
  }
  for (int h = 0; h < 5; ++h) {
    for (int i = 0; i < 6; ++i) {
      for (int j = i + 1; j < 6; ++j) f.add({-(i * 5 + h + 1), -(j * 5 + h + 1)});
    }
  }
  auto const v = solve(f);
  EXPECT_EQ(v.kind, SatVerdict::Kind::unsat);
  EXPECT_GT(v.conflicts, 0u);
  EXPECT_EQ(solve(f, 3).kind, SatVerdict::Kind::unknown);
}

TEST(Sat, SchurFiveEncoding) {
  auto const enc = encode_avoidance(parse_pattern("{x,y,x+y}"), 5, 2);
  EXPECT_EQ(enc.formula.var_count, 10);
  EXPECT_EQ(enc.value_sets, 6u);
  // 5 at-least-one, 5 at-most-one, 6 value sets x 2 colors.
  EXPECT_EQ(enc.formula.clauses.size(), 22u);
  EXPECT_EQ(solve(enc.formula).kind, SatVerdict::Kind::unsat);
}

TEST(Sat, VariableMap) {
  VariableMap const m{5, 3};
  EXPECT_EQ(m.var(1, 0), 1);
  EXPECT_EQ(m.var(2, 1), 5);
  EXPECT_EQ(m.var(5, 2), 15);
  EXPECT_EQ(m.var_count(), 15);
}

TEST(Sat, SideOneHasNoAvoidanceClauses) {
  auto const enc = encode_avoidance(parse_pattern("{x, x+y}"), 1, 3);
  EXPECT_EQ(enc.formula.var_count, 3);
  EXPECT_EQ(enc.value_sets, 0u);
  EXPECT_EQ(enc.formula.clauses.size(), 4u);
}

TEST(Sat, SingletonValueSetForcesUnsat) {
  auto const enc = encode_avoidance(parse_pattern("{x, 1*x}"), 3, 2);
  EXPECT_EQ(solve(enc.formula).kind, SatVerdict::Kind::unsat);
}

TEST(Sat, SchurFourDecodes) {
  auto const s = parse_pattern("{x,y,x+y}");
  auto const enc = encode_avoidance(s, 4, 2);
  auto const v = solve(enc.formula);
  ASSERT_EQ(v.kind, SatVerdict::Kind::sat);
  auto const col = decode_coloring(v, enc.map);
  auto const& c = col.cells();
  EXPECT_EQ(c[0], c[3]);
  EXPECT_EQ(c[1], c[2]);
  EXPECT_NE(c[0], c[1]);
  EXPECT_EQ(find_instance(s, col).status, SearchStatus::none);
}

TEST(Sat, GoldenSchurFourTwo) {
  auto const enc = encode_avoidance(parse_pattern("{x,y,x+y}"), 4, 2);
  EXPECT_EQ(export_dimacs(enc.formula), read_text_file(std::string(RAMSEY_GOLDEN_DIR) + "/schur_n4_c2.cnf"));
}

TEST(Sat, EncodingIsPureFunctionOfCanonicalForm) {
  auto const a = encode_avoidance(parse_pattern("{x,y,x+y}"), 9, 3);
  auto const b = encode_avoidance(parse_pattern("{y+x, y, x}"), 9, 3);
  EXPECT_EQ(a.formula, b.formula);
}

TEST(Sat, SymmetryBreakPreservesVerdict) {
  for (std::uint64_t n = 1; n <= 14; ++n) {
    auto const s = parse_pattern("{x,y,x+y}");
    auto const plain = solve(encode_avoidance(s, n, 3).formula).kind;
    auto const brk = solve(encode_avoidance(s, n, 3, true).formula).kind;
    EXPECT_EQ(plain, brk) << n;
  }
}

TEST(Sat, CompetitionOutput) {
  auto const v = parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 4);
  ASSERT_EQ(v.kind, SatVerdict::Kind::sat);
  EXPECT_EQ(v.model, (std::vector<int>{1, -2, 3, -4}));
  EXPECT_EQ(parse_solver_output("s UNSATISFIABLE\n", 4).kind, SatVerdict::Kind::unsat);
  EXPECT_EQ(parse_solver_output("s UNKNOWN\n", 4).kind, SatVerdict::Kind::unknown);
  EXPECT_THROW(parse_solver_output("s SATISFIABLE\nv 9 0\n", 4), InputError);
}

TEST(Sat, DecodeRejectsBadModels) {
  VariableMap const m{2, 2};
  SatVerdict v;
  v.kind = SatVerdict::Kind::sat;
  v.model = {1, 2, -3, 4};
  EXPECT_THROW(decode_coloring(v, m), InputError);
  v.model = {-1, -2, -3, 4};
  EXPECT_THROW(decode_coloring(v, m), InputError);
  v.kind = SatVerdict::Kind::unsat;
  EXPECT_THROW(decode_coloring(v, m), InputError);
}
