#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rscavity/error.hpp"
#include "rscavity/thresholds.hpp"

using namespace rscavity;

namespace {

// Crude independent minimiser for d_pure: dense scan then local refinement.
double scan_min(unsigned k) {
  double best_z = 0.0, best = std::numeric_limits<double>::infinity();
  for (double z = 0.01; z < 60.0; z += 0.001) {
    const double v = pure_function(z, k);
    if (v < best) best = v, best_z = z;
  }
  for (double h = 1e-3; h > 1e-12; h /= 2) {
    for (double z : {best_z - h, best_z + h}) {
      const double v = pure_function(z, k);
      if (v < best) best = v, best_z = z;
    }
  }
  return best;
}

}  // namespace

TEST(DGiant, Values) {
  EXPECT_EQ(d_giant(2), 1.0);
  EXPECT_EQ(d_giant(3), 0.5);
  EXPECT_EQ(d_giant(5), 0.25);
}

TEST(DCon, Values) {
  EXPECT_NEAR(d_con(2).value, 2.0, 1e-9);
  EXPECT_NEAR(d_con(3).value, 1.3431, 5e-5);
  EXPECT_NEAR(d_con(4).value, 1.2451, 5e-5);
  EXPECT_EQ(d_con(3).solver, Solver::bisection);
}

TEST(DCon, RootOfContractionConstant) {
  for (unsigned k = 2; k <= 12; ++k) {
    const ThresholdReport r = d_con(k);
    EXPECT_NEAR(contraction_constant(r.value, k), 1.0, 1e-9) << "k=" << k;
    EXPECT_LE(r.bracket_lo, r.value);
    EXPECT_GE(r.bracket_hi, r.value);
  }
}

TEST(DMs, Values) {
  EXPECT_NEAR(d_ms(2).value, 1.1625, 5e-5);
  EXPECT_NEAR(d_ms(3).value, 0.8792, 5e-5);
  for (unsigned k = 2; k <= 12; ++k) EXPECT_NEAR(ms_function(d_ms(k).value, k), 1.0, 1e-9);
}

TEST(DMs, BelowDCon) {
  for (unsigned k = 2; k <= 12; ++k) EXPECT_LT(d_ms(k).value, d_con(k).value) << "k=" << k;
}

TEST(DPure, Values) {
  EXPECT_NEAR(d_pure(2).value, 2.0, 1e-9);
  EXPECT_NEAR(d_pure(3).value, 4.9108, 5e-5);
  EXPECT_NEAR(d_pure(5).value, 7.0178, 5e-5);
}

TEST(DPure, MatchesScan) {
  for (unsigned k = 3; k <= 8; ++k) EXPECT_NEAR(d_pure(k).value, scan_min(k), 1e-8) << "k=" << k;
}

TEST(Ordering, GiantMsConPure) {
  for (unsigned k = 3; k <= 12; ++k) {
    EXPECT_LT(d_giant(k), d_ms(k).value);
    EXPECT_LT(d_con(k).value, d_pure(k).value);
  }
}

TEST(ContractionConstant, Values) {
  EXPECT_NEAR(contraction_constant(1.0, 3), 1 - std::exp(-0.5) / 2, 1e-15);
  EXPECT_NEAR(contraction_constant(1.0, 3), 0.696735, 5e-7);
  EXPECT_NEAR(contraction_constant(3.0, 2), 1.5, 1e-15);
}

TEST(MomentBounds, GoldenRatioAtKThree) {
  const double lambda = balance_lambda(3);
  EXPECT_NEAR(lambda, 0.6180340, 5e-8);
  EXPECT_NEAR(lambda * lambda + lambda, 1.0, 1e-12);
}

TEST(MomentBounds, BalanceEquation) {
  for (unsigned k = 3; k <= 10; ++k) {
    const double l = balance_lambda(k);
    EXPECT_NEAR((1 - l) * std::pow(1 + l, k - 1), 1.0, 1e-12);
  }
}

TEST(MomentBounds, ValuesAtDensityOne) {
  const MomentBounds m = moment_bounds(1.0, 3);
  EXPECT_NEAR(m.first_moment, std::numbers::ln2 + std::log(7.0 / 8.0) / 3, 1e-15);
  EXPECT_NEAR(m.first_moment, 0.648637, 5e-7);
  const double l = (std::sqrt(5.0) - 1) / 2;
  const double s = std::sqrt(l) + 1 / std::sqrt(l);
  EXPECT_NEAR(m.second_moment, std::log(s * s * s - std::pow(l, -1.5)) / 3, 1e-14);
  EXPECT_NEAR(m.second_moment, 0.632059, 5e-7);
}

TEST(MomentBounds, ZeroDensityAndOrder) {
  const MomentBounds z = moment_bounds(0.0, 3);
  EXPECT_NEAR(z.first_moment, std::numbers::ln2, 1e-15);
  EXPECT_NEAR(z.second_moment, std::numbers::ln2, 1e-15);
  for (double d = 0.1; d < 2.0; d += 0.1) {
    const MomentBounds m = moment_bounds(d, 3);
    EXPECT_LT(m.second_moment, m.first_moment);
  }
}

TEST(Asymptotics, KThree) {
  const Asymptotics a = reference_asymptotics(3);
  EXPECT_NEAR(a.d_sat, 3 * (8 * std::numbers::ln2 - (1 + std::numbers::ln2) / 2), 1e-12);
  EXPECT_NEAR(a.d_sat, 14.0958, 5e-5);
  EXPECT_NEAR(a.d_rsb, 12.477, 5e-4);
  EXPECT_NEAR(a.d_alg, 8.789, 5e-4);
}

TEST(SatReference, Table) {
  EXPECT_EQ(d_sat_reference(2).display, "2.0000");
  EXPECT_EQ(d_sat_reference(3).display, "12.801");
  EXPECT_EQ(d_sat_reference(4).display, "39.724");
  EXPECT_EQ(d_sat_reference(5).display, "105.585");
  EXPECT_FALSE(has_d_sat_reference(6));
  EXPECT_THROW(d_sat_reference(6), InputError);
}

TEST(Thresholds, RejectSmallK) {
  EXPECT_THROW(d_con(1), InputError);
  EXPECT_THROW(balance_lambda(2), InputError);
}
