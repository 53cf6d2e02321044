#include <gtest/gtest.h>

#include <random>

#include "ramsey/search.hpp"

using namespace ramsey;

namespace {

// Every in-box assignment of the schema, evaluated through the interpreter.
template <class Fn>
void for_each_assignment(PatternSchema const& s, std::uint64_t side, Fn&& fn) {
  auto const& vars = s.variables();
  std::vector<std::uint64_t> vals(vars.size(), s.min_value());
  if (s.min_value() > side) return;
  for (;;) {
    Assignment asg;
    std::set<std::uint64_t> seen;
    bool distinct = true;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      asg[vars[i]] = vals[i];
      distinct = seen.insert(vals[i]).second && distinct;
    }
    if (!s.distinct_vars() || distinct) {
      std::set<std::uint64_t> values;
      bool in_box = true;
      for (auto const& t : s.terms()) {
        std::uint64_t const v = eval_term(t, asg);
        in_box = in_box && v <= side;
        values.insert(v);
      }
      if (in_box && !fn(vals, values)) return;
    }
    std::size_t i = vals.size();
    while (i > 0 && vals[i - 1] == side) vals[--i] = s.min_value();
    if (i == 0) return;
    ++vals[i - 1];
  }
}

std::optional<std::vector<std::uint64_t>> oracle_instance(PatternSchema const& s, Coloring const& col) {
  std::optional<std::vector<std::uint64_t>> hit;
  for_each_assignment(s, col.side(), [&](auto const& vals, auto const& values) {
    std::set<std::uint32_t> colors;
    for (auto v : values) colors.insert(col.at(v));
    if (colors.size() == 1) {
      hit = vals;
      return false;
    }
    return true;
  });
  return hit;
}

bool oracle_avoidable(PatternSchema const& s, std::uint64_t side, std::uint32_t colors) {
  ColoringEnumerator it(1, side, colors, false);
  while (it.next()) {
    if (!oracle_instance(s, it.current())) return true;
  }
  return false;
}

std::vector<PatternSchema> fixtures() {
  return {parse_pattern("{x,y,x+y}"), parse_pattern("{x,y,x*y,x+y}", false, 2), parse_pattern("{x,x*y,x+y}"),
          parse_pattern("{x,y,x*y,x+2*y}")};
}

Coloring permuted(Coloring const& col, std::vector<std::uint8_t> const& perm) {
  std::vector<std::uint8_t> cells;
  for (auto c : col.cells()) cells.push_back(perm[c]);
  return Coloring(1, col.side(), col.colors(), cells);
}

}  // namespace

TEST(Search, FindInstanceExamples) {
  auto const schur = parse_pattern("{x,y,x+y}");
  auto r = find_instance(schur, Coloring(1, 5, 2, Generator::constant(0)));
  ASSERT_EQ(r.status, SearchStatus::found);
  EXPECT_EQ(r.instance->values, (std::vector<std::uint64_t>{1, 1}));
  EXPECT_EQ(r.instance->value_set, (ValueSet{1, 2}));

  r = find_instance(schur, Coloring(1, 10, 2, Generator::parity()));
  ASSERT_EQ(r.status, SearchStatus::found);
  EXPECT_EQ(r.instance->values, (std::vector<std::uint64_t>{2, 2}));
  EXPECT_EQ(r.instance->color, 0u);

  r = find_instance(schur, Coloring(1, 4, 2, std::vector<std::uint8_t>{0, 1, 1, 0}));
  EXPECT_EQ(r.status, SearchStatus::none);
}

TEST(Search, FindInstanceNeedsOneDimension) {
  EXPECT_THROW(find_instance(parse_pattern("{x}"), Coloring(2, 3, 2, Generator::parity())), InputError);
}

TEST(Search, FindInstanceMatchesOracle) {
  std::mt19937_64 rng(3);
  auto patterns = fixtures();
  patterns.push_back(parse_pattern("{x,y,x+y}", true));
  patterns.push_back(parse_pattern("{a*x, a*y, x*y, a*(x+y)}"));
  patterns.push_back(parse_pattern("{x+3, 2*x}"));
  for (int t = 0; t < 300; ++t) {
    auto const& s = patterns[static_cast<std::size_t>(t) % patterns.size()];
    std::uint64_t const side = 1 + rng() % 24;
    Coloring const col(1, side, 2 + static_cast<std::uint32_t>(rng() % 2), Generator::random(rng()));
    auto const expected = oracle_instance(s, col);
    for (unsigned w : {1u, 3u}) {
      auto const r = find_instance(s, col, w);
      ASSERT_EQ(r.status == SearchStatus::found, expected.has_value()) << s.to_string();
      if (expected) { EXPECT_EQ(r.instance->values, *expected) << s.to_string(); }
    }
  }
}

TEST(Search, ColorPermutationInvariance) {
  std::mt19937_64 rng(4);
  auto const patterns = fixtures();
  for (int t = 0; t < 200; ++t) {
    auto const& s = patterns[static_cast<std::size_t>(t) % patterns.size()];
    Coloring const col(1, 1 + rng() % 30, 3, Generator::random(rng()));
    std::vector<std::uint8_t> perm{0, 1, 2};
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_EQ(find_instance(s, col).status, find_instance(s, permuted(col, perm)).status);
  }
}

TEST(Search, FindAllListsInstancesInOrder) {
  auto const s = parse_pattern("{x,y,x+y}");
  Coloring const col(1, 12, 2, Generator::random(8));
  std::vector<std::vector<std::uint64_t>> expected;
  for_each_assignment(s, 12, [&](auto const& vals, auto const& values) {
    std::set<std::uint32_t> colors;
    for (auto v : values) colors.insert(col.at(v));
    if (colors.size() == 1) expected.push_back(vals);
    return true;
  });
  auto const all = find_all_instances(s, col);
  ASSERT_EQ(all.size(), expected.size());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i].values, expected[i]);
  EXPECT_EQ(find_all_instances(s, col, 2).size(), std::min<std::size_t>(2, expected.size()));
}

TEST(Search, EnumerateValueSetsSchurFive) {
  auto const sets = enumerate_value_sets(parse_pattern("{x,y,x+y}"), 5);
  EXPECT_EQ(sets, (std::vector<ValueSet>{{1, 2}, {1, 2, 3}, {1, 3, 4}, {1, 4, 5}, {2, 3, 5}, {2, 4}}));
}

TEST(Search, AvoidSchurFour) {
  auto const s = parse_pattern("{x,y,x+y}");
  for (auto e : {Engine::backtracking, Engine::sat, Engine::exhaustive}) {
    SearchOptions o;
    o.engine = e;
    auto r = find_avoiding_coloring(s, 4, 2, o);
    ASSERT_EQ(r.verdict, Verdict::avoiding) << to_string(e);
    auto const& c = r.coloring->cells();
    EXPECT_EQ(c[0], c[3]);
    EXPECT_EQ(c[1], c[2]);
    EXPECT_NE(c[0], c[1]);
    EXPECT_EQ(find_avoiding_coloring(s, 5, 2, o).verdict, Verdict::unsat) << to_string(e);
  }
}

TEST(Search, BacktrackingReturnsLeastAvoidingColoring) {
  auto const s = parse_pattern("{x,y,x+y}");
  SearchOptions o;
  o.symmetry_break = false;
  for (std::uint64_t n = 1; n <= 8; ++n) {
    std::optional<std::vector<std::uint8_t>> least;
    ColoringEnumerator it(1, n, 3, false);
    while (it.next() && !least) {
      if (!oracle_instance(s, it.current())) least = it.cells();
    }
    auto r = find_avoiding_coloring(s, n, 3, o);
    ASSERT_EQ(r.verdict, Verdict::avoiding);
    EXPECT_EQ(r.coloring->cells(), *least) << n;
  }
}

TEST(Search, MinTwoSumProductAvoidableAtFifty) {
  SearchOptions o;
  auto r = find_avoiding_coloring(parse_pattern("{x,y,x*y,x+y}", false, 2), 50, 2, o);
  ASSERT_EQ(r.verdict, Verdict::avoiding);
  EXPECT_EQ(find_instance(parse_pattern("{x,y,x*y,x+y}", false, 2), *r.coloring).status, SearchStatus::none);
}

TEST(Search, EnginesAgreeWithOracle) {
  for (auto const& s : fixtures()) {
    for (std::uint64_t n = 1; n <= 9; ++n) {
      bool const expected = oracle_avoidable(s, n, 2);
      for (auto e : {Engine::backtracking, Engine::sat, Engine::exhaustive}) {
        for (bool brk : {false, true}) {
          SearchOptions o;
          o.engine = e;
          o.symmetry_break = brk;
          auto r = find_avoiding_coloring(s, n, 2, o);
          EXPECT_EQ(r.verdict == Verdict::avoiding, expected) << s.to_string() << " N=" << n << " " << to_string(e);
          if (r.coloring) { EXPECT_FALSE(oracle_instance(s, *r.coloring).has_value()); }
        }
      }
    }
  }
}

TEST(Search, ParallelBacktrackingIsWorkerIndependent) {
  auto const s = parse_pattern("{x,y,x+y}");
  SearchOptions o;
  o.split_depth = 4;
  auto const one = find_avoiding_coloring(s, 13, 3, o);
  for (unsigned w : {2u, 5u, 8u}) {
    o.workers = w;
    auto const r = find_avoiding_coloring(s, 13, 3, o);
    EXPECT_EQ(r.coloring->cells(), one.coloring->cells());
    EXPECT_EQ(r.nodes, one.nodes);
  }
}

TEST(Search, NodeBudgetGivesUnknown) {
  SearchOptions o;
  o.node_budget = 5;
  EXPECT_EQ(find_avoiding_coloring(parse_pattern("{x,y,x+y}"), 14, 3, o).verdict, Verdict::unknown);
  o.engine = Engine::sat;
  o.node_budget = 1;
  EXPECT_EQ(find_avoiding_coloring(parse_pattern("{x,y,x+y}"), 14, 3, o).verdict, Verdict::unknown);
}

TEST(Search, SchurThresholds) {
  auto const s = parse_pattern("{x,y,x+y}");
  auto const two = threshold_number(s, 2, 20);
  ASSERT_EQ(two.status, SearchStatus::found);
  EXPECT_EQ(*two.threshold, 5u);
  EXPECT_EQ(two.certificate->side(), 4u);
  EXPECT_EQ(two.rows.size(), 5u);

  auto const three = threshold_number(s, 3, 20);
  ASSERT_EQ(three.status, SearchStatus::found);
  EXPECT_EQ(*three.threshold, 14u);
  EXPECT_EQ(three.certificate->side(), 13u);
  EXPECT_EQ(find_instance(s, *three.certificate).status, SearchStatus::none);
  EXPECT_GE(*three.threshold, *two.threshold);
}

TEST(Search, ThresholdMonotonicity) {
  for (auto const& s : fixtures()) {
    auto const r = threshold_number(s, 2, 40);
    if (r.status != SearchStatus::found) continue;
    for (std::uint64_t n = *r.threshold; n <= *r.threshold + 2; ++n) {
      EXPECT_EQ(find_avoiding_coloring(s, n, 2).verdict, Verdict::unsat) << s.to_string() << " " << n;
    }
    EXPECT_EQ(find_avoiding_coloring(s, *r.threshold - 1, 2).verdict, Verdict::avoiding);
  }
}

TEST(Search, ThresholdUnforcedUpToMax) {
  auto const r = threshold_number(parse_pattern("{x, 2*x}"), 2, 10);
  EXPECT_EQ(r.status, SearchStatus::none);
  EXPECT_EQ(r.rows.size(), 10u);
}

TEST(Search, ParseEngine) {
  EXPECT_EQ(parse_engine("bt"), Engine::backtracking);
  EXPECT_EQ(parse_engine("sat"), Engine::sat);
  EXPECT_THROW(parse_engine("magic"), InputError);
}
