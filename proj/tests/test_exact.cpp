#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rscavity/error.hpp"
#include "rscavity/exact.hpp"
#include "rscavity/gen.hpp"
#include "rscavity/rng.hpp"
#include "support.hpp"

using namespace rscavity;

namespace {

Formula one_clause(int s1 = 1) { return Formula(3, 3, {{{1, s1}, {2, 1}, {3, 1}}}); }

Formula all_patterns() {
  std::vector<Clause> cs;
  for (unsigned p = 0; p < 8; ++p) {
    Clause c;
    for (std::uint32_t j = 0; j < 3; ++j) c.push_back({j + 1, (p >> j) & 1 ? 1 : -1});
    cs.push_back(c);
  }
  return Formula(3, 3, cs);
}

GWTree star(int clause_sign, int s2 = -1, int s3 = -1) {
  GWTree t;
  t.d = 1.0;
  t.k = 3;
  t.depth = 1;
  t.nodes = {{0, NodeKind::variable, -1, 0, {1}, 0.0, 0},
             {1, NodeKind::clause, 0, clause_sign, {2, 3}, 0.0, 0},
             {2, NodeKind::variable, 1, s2, {}, 0.0, 1},
             {3, NodeKind::variable, 1, s3, {}, 0.0, 1}};
  return t;
}

}  // namespace

TEST(Count, Examples) {
  EXPECT_EQ(count(Formula(3, 5, {})).count, 32);
  EXPECT_EQ(count(one_clause()).count, 7);
  const CountResult z = count(all_patterns());
  EXPECT_EQ(z.count, 0);
  EXPECT_TRUE(std::isinf(z.log_count) && z.log_count < 0);
}

TEST(Count, MatchesBruteForce) {
  std::mt19937_64 g(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint32_t n = 3 + trial % 12;
    const Formula f = oracle::random_formula(g, n, trial % (3 * n), 3);
    const CountResult z = count(f);
    ASSERT_EQ(z.count, oracle::count(f)) << to_dimacs(f);
    if (z.count > 0) EXPECT_NEAR(z.log_count, std::log(static_cast<double>(oracle::count(f))), 1e-12);
  }
}

TEST(Count, ComponentsAndIsolated) {
  const Formula f(2, 6, {{{1, 1}, {2, 1}}, {{4, 1}, {5, -1}}});
  const CountResult z = count(f);
  EXPECT_EQ(z.count, 3 * 3 * 4);
  EXPECT_EQ(z.isolated, 2u);
  EXPECT_EQ(z.components.size(), 2u);
}

TEST(Count, LargeFormulaBeyondMachineWords) {
  // 80 isolated variables: 2^80 does not fit in 64 bits.
  const CountResult z = count(Formula(3, 80, {}));
  EXPECT_EQ(z.count, BigInt(1) << 80);
  EXPECT_NEAR(z.log_count, 80 * std::numbers::ln2, 1e-9);
}

TEST(Count, CapThrowsResourceError) {
  std::vector<Clause> chain;
  for (std::uint32_t i = 1; i + 2 <= 40; ++i) chain.push_back({{i, 1}, {i + 1, -1}, {i + 2, 1}});
  EXPECT_THROW(count(Formula(3, 40, chain), 20), ResourceError);
}

TEST(CountConditioned, Examples) {
  EXPECT_EQ(count_conditioned(one_clause(), {{1, 1}}).count, 4);
  EXPECT_EQ(count_conditioned(one_clause(), {{1, -1}, {2, -1}, {3, -1}}).count, 0);
  EXPECT_EQ(count_conditioned(Formula(3, 3, {}), {{1, 1}}).count, 4);
  EXPECT_THROW(count_conditioned(one_clause(), {{1, 1}, {1, -1}}), InputError);
}

TEST(CountConditioned, MatchesBruteForce) {
  std::mt19937_64 g(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t n = 4 + trial % 10;
    const Formula f = oracle::random_formula(g, n, trial % (2 * n), 3);
    std::uniform_int_distribution<std::uint32_t> var(1, n);
    const std::uint32_t a = var(g);
    std::uint32_t b = var(g);
    if (b == a) b = a % n + 1;
    const std::vector<Literal> lits = {{a, g() & 1 ? 1 : -1}, {b, g() & 1 ? 1 : -1}};
    EXPECT_EQ(count_conditioned(f, lits).count, oracle::count(f, lits));
  }
}

TEST(CountSoft, Examples) {
  for (double beta : {0.1, 1.0, 3.0}) {
    EXPECT_NEAR(count_soft(one_clause(), beta).value, 7 + std::exp(-beta), 1e-12);
    EXPECT_NEAR(count_soft(Formula(3, 2, {}, Width::reduced), beta).value, 4.0, 1e-12);
  }
}

TEST(CountSoft, LargeBetaApproachesCount) {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Formula f = oracle::random_formula(g, 10, 5 + trial % 20, 3);
    const double z = static_cast<double>(oracle::count(f));
    EXPECT_LE(std::fabs(count_soft(f, 100.0).value - z), 1e-10 * std::max(z, 1.0));
    EXPECT_EQ(count_soft(f, std::numeric_limits<double>::infinity()).value, z);
  }
}

TEST(CountSoft, MatchesBruteForce) {
  std::mt19937_64 g(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Formula f = oracle::random_formula(g, 9, 10 + trial % 20, 3);
    const double beta = 0.3 + 0.1 * trial;
    const double want = oracle::count_soft(f, beta);
    EXPECT_NEAR(count_soft(f, beta).value, want, 1e-10 * want);
  }
}

TEST(Marginals, Examples) {
  const MarginalVector iso = marginals(Formula(3, 4, {{{1, 1}, {2, 1}, {3, 1}}}));
  EXPECT_EQ(iso.exact[3], Rational(1, 2));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(iso.exact[i], Rational(4, 7));
  EXPECT_EQ(marginals(one_clause(-1)).exact[0], Rational(3, 7));
  EXPECT_THROW(marginals(all_patterns()), InputError);
}

TEST(Marginals, MatchBruteForce) {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Formula f = oracle::random_formula(g, 8, trial % 14, 3);
    if (oracle::count(f) == 0) continue;
    const MarginalVector m = marginals(f);
    for (std::uint32_t x = 1; x <= 8; ++x) EXPECT_NEAR(m.value[x - 1], oracle::marginal(f, x), 1e-14);
  }
}

TEST(TreeCount, SingleRoot) {
  GWTree t = sample_gw_tree(1.0, 3, 0, 1);
  const TreeCountTable c = tree_count(t);
  EXPECT_EQ(c.plus[0], 1);
  EXPECT_EQ(c.minus[0], 1);
}

TEST(TreeCount, Star) {
  const TreeCountTable c = tree_count(star(1));
  EXPECT_EQ(c.plus[0], 4);
  EXPECT_EQ(c.minus[0], 3);
  EXPECT_EQ(c.root_marginal(), Rational(4, 7));
}

TEST(TreeCount, BoundaryFalsifyingChildren) {
  // Children fixed so that both of their literals are false: only the root
  // can satisfy the clause.
  NodeAssignment b(4, 0);
  b[2] = 1;  // literal sign -1
  b[3] = 1;
  const TreeCountTable c = tree_count(star(1, -1, -1), b);
  EXPECT_EQ(c.plus[0], 1);
  EXPECT_EQ(c.minus[0], 0);
}

TEST(TreeCount, MatchesBruteForceOnTreeFormula) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const GWTree t = sample_gw_tree(1.4, 3, 2, s);
    if (t.num_variables() > 20) continue;
    const TreeCountTable c = tree_count(t);
    const Formula f = tree_to_formula(t).formula;
    EXPECT_EQ(c.plus[0], oracle::count(f, {{1, 1}}));
    EXPECT_EQ(c.minus[0], oracle::count(f, {{1, -1}}));
  }
}

TEST(TreeCount, BoundaryMustCoverLeaves) {
  const GWTree t = star(1);
  EXPECT_THROW(tree_count(t, NodeAssignment(4, 0)), InputError);
}

TEST(Increment, ZeroDensityIsLogTwo) {
  const IncrementEstimate e = rs_increment_experiment(0.0, 3, 10, 20, 1);
  EXPECT_NEAR(e.mean, std::numbers::ln2, 1e-12);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(FreeEntropy, ZeroDensityIsLogTwo) {
  const FreeEntropySample e = free_entropy_experiment(0.0, 3, 12, 10, 1);
  EXPECT_NEAR(e.mean, std::numbers::ln2, 1e-12);
  EXPECT_EQ(e.satisfiable, 10u);
}

TEST(FreeEntropy, MatchesBruteForceAverage) {
  const std::size_t samples = 30;
  const FreeEntropySample e = free_entropy_experiment(2.0, 3, 10, samples, 77);
  double sum = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Formula f = sample_formula(2.0, 3, 10, derive_seed(77, "free-entropy", s));
    sum += std::log(std::max<double>(1.0, static_cast<double>(oracle::count(f)))) / 10.0;
  }
  EXPECT_NEAR(e.mean, sum / samples, 1e-12);
}
