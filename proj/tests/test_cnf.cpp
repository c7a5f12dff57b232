#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "rscavity/cnf.hpp"
#include "rscavity/error.hpp"
#include "support.hpp"

using namespace rscavity;

namespace {

Formula one_clause() { return Formula(3, 3, {{{1, 1}, {2, 1}, {3, 1}}}); }
Formula two_clauses() { return Formula(3, 5, {{{1, 1}, {2, 1}, {3, 1}}, {{1, -1}, {4, 1}, {5, 1}}}); }

Formula parse(const std::string& text, DimacsMode mode = DimacsMode::strict) {
  std::istringstream in(text);
  return read_dimacs(in, mode);
}

}  // namespace

TEST(Occurrences, SinglePositive) {
  const Formula f = one_clause();
  const Occurrences& o = f.occurrences(1);
  EXPECT_EQ(o.positive, std::vector<std::size_t>{0});
  EXPECT_TRUE(o.negative.empty());
}

TEST(Occurrences, BothSigns) {
  const Formula f = two_clauses();
  EXPECT_EQ(f.occurrences(1).positive, std::vector<std::size_t>{0});
  EXPECT_EQ(f.occurrences(1).negative, std::vector<std::size_t>{1});
}

TEST(Occurrences, AbsentVariable) {
  const Formula f(3, 6, {{{1, 1}, {2, 1}, {3, 1}}});
  EXPECT_TRUE(f.occurrences(6).positive.empty());
  EXPECT_TRUE(f.occurrences(6).negative.empty());
  EXPECT_THROW(f.occurrences(7), InputError);
  EXPECT_THROW(f.occurrences(0), InputError);
}

TEST(Purity, Examples) {
  EXPECT_TRUE(one_clause().is_pure(2));
  EXPECT_FALSE(two_clauses().is_pure(1));
  EXPECT_TRUE(Formula(3, 4, {{{1, 1}, {2, 1}, {3, 1}}}).is_pure(4));
}

TEST(Assign, SatisfiedClauseDisappears) {
  const Formula g = one_clause().assign(1, 1);
  EXPECT_EQ(g.num_clauses(), 0u);
  EXPECT_EQ(g.num_vars(), 3u);
  EXPECT_TRUE(g.reduced());
}

TEST(Assign, FalsifiedLiteralStripped) {
  const Formula g = one_clause().assign(1, -1);
  ASSERT_EQ(g.num_clauses(), 1u);
  EXPECT_EQ(g.clause(0), (Clause{{2, 1}, {3, 1}}));
  const Formula h = Formula(3, 5, {{{1, -1}, {4, 1}, {5, 1}}}).assign(1, 1);
  ASSERT_EQ(h.num_clauses(), 1u);
  EXPECT_EQ(h.clause(0), (Clause{{4, 1}, {5, 1}}));
}

TEST(Assign, CountsMatchConditionedEnumeration) {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Formula f = oracle::random_formula(g, 8, 4 + trial % 6, 3);
    for (int s : {1, -1}) {
      const Formula a = f.assign(3, s);
      EXPECT_EQ(oracle::count(a), oracle::count(f, {{3, s}}) * 2);
    }
  }
}

TEST(Formula, RejectsRepeatedVariable) {
  EXPECT_THROW(Formula(3, 3, {{{1, 1}, {1, -1}, {2, 1}}}), InputError);
}

TEST(Formula, RejectsWrongWidth) {
  EXPECT_THROW(Formula(3, 3, {{{1, 1}, {2, 1}}}), InputError);
  EXPECT_NO_THROW(Formula(3, 3, {{{1, 1}, {2, 1}}}, Width::reduced));
}

TEST(Formula, RejectsOutOfRangeVariable) { EXPECT_THROW(Formula(2, 2, {{{1, 1}, {3, 1}}}), InputError); }

TEST(Dimacs, ReadsSingleClause) {
  const Formula f = parse("p cnf 3 1\n1 2 3 0\n");
  EXPECT_EQ(f.k(), 3u);
  EXPECT_EQ(f.num_vars(), 3u);
  ASSERT_EQ(f.num_clauses(), 1u);
  EXPECT_EQ(f.clause(0), (Clause{{1, 1}, {2, 1}, {3, 1}}));
  EXPECT_FALSE(f.reduced());
}

TEST(Dimacs, RoundTrip) {
  const Formula f = parse("c comment\np cnf 5 2\n1 -2 3 0\n-1 4 5 0\n");
  const Formula g = parse(to_dimacs(f));
  EXPECT_EQ(f.clauses(), g.clauses());
  EXPECT_EQ(to_dimacs(f), to_dimacs(g));
}

TEST(Dimacs, RoundTripRandom) {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Formula f = oracle::random_formula(g, 10, trial, 3);
    EXPECT_TRUE(same_clause_multiset(f, parse(to_dimacs(f))));
  }
}

TEST(Dimacs, StrictRejectsRepeatedVariable) {
  try {
    parse("p cnf 2 1\n1 1 2 0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("repeated variable"), std::string::npos);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Dimacs, LenientMergesAndDropsTautologies) {
  const Formula f = parse("p cnf 3 2\n1 1 2 0\n1 -1 3 0\n", DimacsMode::lenient);
  ASSERT_EQ(f.num_clauses(), 1u);
  EXPECT_EQ(f.clause(0), (Clause{{1, 1}, {2, 1}}));
}

TEST(Dimacs, ClausesMaySpanLines) {
  const Formula f = parse("p cnf 3 1\n1 2\n3 0\n");
  EXPECT_EQ(f.clause(0).size(), 3u);
}

TEST(Dimacs, Errors) {
  EXPECT_THROW(parse("1 2 3 0\n"), ParseError);
  EXPECT_THROW(parse("p cnf 3 1\n1 2 4 0\n"), ParseError);
  EXPECT_THROW(parse("p cnf 3 2\n1 2 3 0\n"), ParseError);
  EXPECT_THROW(parse("p cnf 3 1\n1 2 3\n"), ParseError);
  EXPECT_THROW(parse("p cnf 3 1\n0\n"), ParseError);
  EXPECT_THROW(parse("p cnf 3 1\n1 x 3 0\n"), ParseError);
  EXPECT_THROW(parse("p dnf 3 1\n1 2 3 0\n"), ParseError);
  EXPECT_THROW(parse("p cnf 3 1\np cnf 3 1\n1 2 3 0\n"), ParseError);
}

TEST(Dimacs, MixedWidthsAreReduced) {
  const Formula f = parse("p cnf 3 2\n1 2 3 0\n-1 2 0\n");
  EXPECT_TRUE(f.reduced());
  EXPECT_EQ(f.k(), 3u);
}

TEST(Dimacs, PercentEndsInput) {
  const Formula f = parse("p cnf 3 1\n1 2 3 0\n%\n0\n");
  EXPECT_EQ(f.num_clauses(), 1u);
}

TEST(Literal, IntEncoding) {
  EXPECT_EQ(Literal::from_int(-4), (Literal{4, -1}));
  EXPECT_EQ((Literal{7, 1}).to_int(), 7);
  EXPECT_EQ((Literal{2, 1}).negated(), (Literal{2, -1}));
  EXPECT_THROW(Literal::from_int(0), InputError);
}
