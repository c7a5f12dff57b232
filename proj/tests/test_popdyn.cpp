#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "rscavity/error.hpp"
#include "rscavity/parallel.hpp"
#include "rscavity/popdyn.hpp"
#include "rscavity/rng.hpp"
#include "rscavity/thresholds.hpp"

using namespace rscavity;

namespace {

Population flipped(const Population& p) {
  std::vector<double> v(p.samples());
  for (double& x : v) x = 1.0 - x;
  return Population(v);
}

Population skewed(std::size_t n, std::uint64_t seed) {
  Stream s(seed, "test.skewed");
  std::vector<double> v(n);
  for (double& x : v) x = 0.2 + 0.7 * s.uniform_open() * s.uniform_open();
  return Population(v);
}

const IterateResult& converged_d1() {
  static const IterateResult r = iterate(1.0, 3, 100000, 25, 42);
  return r;
}

}  // namespace

TEST(Population, RejectsOutOfSupport) {
  EXPECT_THROW(Population({0.5, 1.0}), InputError);
  EXPECT_THROW(Population({0.0}), InputError);
  EXPECT_THROW(Population({std::nan("")}), InputError);
  EXPECT_THROW(Population(std::vector<double>{}), InputError);
  EXPECT_NO_THROW(Population({1.0}, Support{0.0, 1.0, false, true}));
}

TEST(BpStep, ZeroDensityGivesHalf) {
  const Population out = bp_step(skewed(1000, 1), 0.0, 3, 1000, 5);
  for (double x : out.samples()) EXPECT_EQ(x, 0.5);
}

// With every input equal to 1/2 the output is a function of d⁻ - d⁺ only:
// 1/(1 + (4/3)^(d⁻ - d⁺)) for k = 3. The frequency of the value 3/7
// (d⁻ - d⁺ = 1) must match the Skellam probability e^{-d} I_1(d).
TEST(BpStep, HalfPopulationSkellamLaw) {
  const double d = 1.0;
  const std::size_t n = 200000;
  const Population out = bp_step(Population::constant(10, 0.5), d, 3, n, 8);
  std::map<long, std::size_t> freq;
  for (double x : out.samples()) {
    const double j = std::log((1 - x) / x) / std::log(4.0 / 3.0);
    const long r = std::lround(j);
    ASSERT_NEAR(j, static_cast<double>(r), 1e-9);
    ++freq[r];
  }
  EXPECT_NEAR(1.0 / (1.0 + 4.0 / 3.0), 3.0 / 7.0, 1e-15);
  for (long j : {-2L, -1L, 0L, 1L, 2L}) {
    const double p = std::exp(-d) * std::cyl_bessel_i(static_cast<double>(std::labs(j)), d);
    const double f = static_cast<double>(freq[j]) / static_cast<double>(n);
    EXPECT_NEAR(f, p, 4 * std::sqrt(p * (1 - p) / static_cast<double>(n))) << "j=" << j;
  }
}

TEST(BpStep, OutputLawIsSymmetric) {
  const Population pop = skewed(100000, 2);
  // d+ and d- are exchangeable, so the output law is invariant under x -> 1-x
  // whatever the input law.
  const Population a = bp_step(pop, 1.0, 3, 100000, 11);
  const Population b = bp_step(pop, 1.0, 3, 100000, 12);
  const Population c = bp_step(pop, 1.0, 3, 100000, 13);
  const double noise = w1(b, c);
  EXPECT_LT(w1(flipped(a), b), 3 * noise + 1e-3);
  EXPECT_GT(w1(flipped(pop), pop), 0.05);
}

TEST(BpStep, StaysInOpenUnitInterval) {
  const Population out = bp_step(Population::constant(100, 0.999999), 40.0, 2, 5000, 3);
  for (double x : out.samples()) {
    EXPECT_GT(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(BpStep, ThreadCountInvariant) {
  const Population pop = skewed(5000, 3);
  set_max_threads(1);
  const Population a = bp_step(pop, 1.3, 3, 5000, 4);
  set_max_threads(4);
  const Population b = bp_step(pop, 1.3, 3, 5000, 4);
  set_max_threads(0);
  EXPECT_EQ(a.samples(), b.samples());
}

TEST(Iterate, ZeroItersIsHalf) {
  const IterateResult r = iterate(1.0, 3, 100, 0, 1);
  for (double x : r.population.samples()) EXPECT_EQ(x, 0.5);
  EXPECT_TRUE(r.w1_trace.empty());
}

TEST(Iterate, ConvergesAtDensityOne) {
  const IterateResult& r = converged_d1();
  ASSERT_EQ(r.w1_trace.size(), 25u);
  EXPECT_LT(r.w1_trace.back(), 2e-3);
}

TEST(Iterate, MeanIsHalf) {
  const IterateResult r = iterate(1.2, 3, 100000, 25, 3);
  EXPECT_NEAR(r.population.mean(), 0.5, 3 * r.population.std_error());
}

TEST(Bethe, ZeroDensityIsLogTwo) {
  const BetheEstimate e = bethe(skewed(1000, 5), 0.0, 3, 1000, 1);
  EXPECT_NEAR(e.value, std::numbers::ln2, 1e-15);
  for (double beta : {0.1, 1.0, 10.0}) EXPECT_NEAR(bethe_beta(skewed(1000, 5), 0.0, 3, beta, 1000, 1).value, std::numbers::ln2, 1e-15);
}

TEST(Bethe, BetweenMomentBoundsAtDensityOne) {
  const BetheEstimate e = bethe(converged_d1().population, 1.0, 3, 100000, 7);
  const MomentBounds mb = moment_bounds(1.0, 3);
  EXPECT_NEAR(mb.first_moment, 0.648637, 5e-7);
  EXPECT_GT(e.value, mb.second_moment - 3 * e.std_error);
  EXPECT_LT(e.value, mb.first_moment + 3 * e.std_error);
}

TEST(BetheBeta, InfinityReproducesBethe) {
  const Population& pop = converged_d1().population;
  const BetheEstimate a = bethe(pop, 1.0, 3, 20000, 9);
  const BetheEstimate b = bethe_beta(pop, 1.0, 3, std::numeric_limits<double>::infinity(), 20000, 9);
  EXPECT_EQ(a.value, b.value);
}

TEST(BetheBeta, LargeBetaApproachesBethe) {
  const Population& pop = converged_d1().population;
  const BetheEstimate a = bethe(pop, 1.0, 3, 100000, 9);
  const BetheEstimate b = bethe_beta(pop, 1.0, 3, 50.0, 100000, 10);
  EXPECT_LT(std::fabs(a.value - b.value), 3 * std::hypot(a.std_error, b.std_error));
}

TEST(BetheBeta, SmallBetaApproachesLogTwo) {
  const BetheEstimate e = bethe_beta(converged_d1().population, 1.0, 3, 1e-9, 10000, 1);
  EXPECT_NEAR(e.value, std::numbers::ln2, 1e-8);
}

TEST(BetheBeta, MonotoneInBetaOnPairedSamples) {
  const Population& pop = converged_d1().population;
  double prev = std::numbers::ln2;
  for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 50.0}) {
    const double v = bethe_beta(pop, 1.0, 3, beta, 100000, 3).value;
    EXPECT_LE(v, prev + 1e-12) << "beta=" << beta;
    prev = v;
  }
}

TEST(W1, Examples) {
  EXPECT_EQ(w1(std::vector<double>{0.3, 0.1}, std::vector<double>{0.1, 0.3}), 0.0);
  EXPECT_EQ(w1(std::vector<double>{0, 0}, std::vector<double>{1, 1}), 1.0);
  EXPECT_EQ(w1(std::vector<double>{0, 1}, std::vector<double>{0.5, 0.5}), 0.5);
}

TEST(W1, UnequalSizesMatchReplication) {
  // Replicating each sample of a size-2 and a size-3 measure to size 6
  // does not change the measures.
  const std::vector<double> a = {0.1, 0.7}, b = {0.2, 0.4, 0.9};
  const std::vector<double> a6 = {0.1, 0.1, 0.1, 0.7, 0.7, 0.7}, b6 = {0.2, 0.2, 0.4, 0.4, 0.9, 0.9};
  EXPECT_NEAR(w1(a, b), w1(a6, b6), 1e-15);
}

TEST(W1, SymmetricAndTriangle) {
  Stream s(9, "test.w1");
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(20 + trial), b(15 + 2 * trial), c(30);
    for (double& x : a) x = s.uniform();
    for (double& x : b) x = s.normal();
    for (double& x : c) x = s.exponential();
    EXPECT_NEAR(w1(a, b), w1(b, a), 1e-12);
    EXPECT_LE(w1(a, c), w1(a, b) + w1(b, c) + 1e-12);
  }
}

TEST(PopulationIo, RoundTrip) {
  const Population p = skewed(1000, 7);
  std::stringstream ss;
  write_population(ss, p);
  EXPECT_EQ(ss.str().size(), 8000u);
  EXPECT_EQ(read_population(ss).samples(), p.samples());
  std::stringstream bad("abc");
  EXPECT_THROW(read_population(bad), InputError);
}
