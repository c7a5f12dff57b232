#include "rscavity/thresholds.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "rscavity/error.hpp"

namespace rscavity {

namespace {

constexpr double kRootTol = 1e-12;

void check_k(unsigned k, unsigned min_k = 2) {
  if (k < min_k) throw InputError("k must be at least " + std::to_string(min_k));
}

// Increasing g with g(0+) < 1: bracket [1e-9, 1] doubled until g(hi) >= 1,
// then bisection to width kRootTol.
ThresholdReport solve_increasing(const std::string& name, unsigned k, const std::function<double(double)>& g) {
  ThresholdReport r;
  r.name = name;
  r.k = k;
  r.solver = Solver::bisection;
  double lo = 1e-9;
  double hi = 1.0;
  while (g(hi) < 1.0) {
    lo = hi;
    hi *= 2.0;
    ++r.iterations;
    if (hi > 1e12) throw InvariantError(name + ": no sign change found while bracketing");
  }
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  while (hi - lo > kRootTol) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) < 1.0 ? lo : hi) = mid;
    ++r.iterations;
  }
  r.value = 0.5 * (lo + hi);
  r.residual = std::fabs(g(r.value) - 1.0);
  return r;
}

}  // namespace

const char* to_string(Solver s) {
  switch (s) {
    case Solver::closed_form: return "closed_form";
    case Solver::bisection: return "bisection";
    case Solver::golden_section: return "golden_section";
  }
  return "?";
}

double d_giant(unsigned k) {
  check_k(k);
  return 1.0 / (k - 1.0);
}

double contraction_constant(double d, unsigned k) {
  check_k(k);
  return d * (k - 1.0) / 2.0 * std::pow(1.0 - std::exp(-d / 2.0) / 2.0, k - 2.0);
}

double ms_function(double d, unsigned k) {
  check_k(k);
  const double e = std::exp(-d / 2.0);
  return d * (k - 1.0) * (1.0 - e / 4.0) * std::pow(1.0 - e / 2.0, k - 2.0);
}

double pure_function(double z, unsigned k) {
  check_k(k);
  return z / std::pow(-std::expm1(-z / 2.0), k - 1.0);
}

ThresholdReport d_con(unsigned k) {
  return solve_increasing("con", k, [k](double d) { return contraction_constant(d, k); });
}

ThresholdReport d_ms(unsigned k) {
  return solve_increasing("ms", k, [k](double d) { return ms_function(d, k); });
}

ThresholdReport d_giant_report(unsigned k) {
  ThresholdReport r;
  r.name = "giant";
  r.k = k;
  r.value = d_giant(k);
  return r;
}

ThresholdReport d_pure(unsigned k) {
  check_k(k);
  ThresholdReport r;
  r.name = "pure";
  r.k = k;
  if (k == 2) {
    r.value = 2.0;
    return r;
  }
  // f'(z) has the sign of (1 - e^{-z/2}) - z(k-1)e^{-z/2}/2: negative near 0,
  // positive for large z.
  auto slope_sign = [k](double z) {
    const double e = std::exp(-z / 2.0);
    return -std::expm1(-z / 2.0) - z * (k - 1.0) * e / 2.0;
  };
  double lo = 1e-3;
  double hi = lo;
  while (slope_sign(hi) < 0.0) {
    lo = hi;
    hi *= 1.25;
    ++r.iterations;
    if (hi > 1e6) throw InvariantError("pure: minimum not bracketed");
  }
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double e = a + invphi * (b - a);
  double fc = pure_function(c, k), fe = pure_function(e, k);
  while (b - a > 1e-10 * (1.0 + std::fabs(c))) {
    if (fc <= fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - invphi * (b - a);
      fc = pure_function(c, k);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + invphi * (b - a);
      fe = pure_function(e, k);
    }
    ++r.iterations;
  }
  const double z = 0.5 * (a + b);
  r.solver = Solver::golden_section;
  r.value = pure_function(z, k);
  r.residual = b - a;
  return r;
}

double balance_lambda(unsigned k) {
  check_k(k, 3);
  auto h = [k](double l) { return (1.0 - l) * std::pow(1.0 + l, k - 1.0) - 1.0; };
  double lo = 1e-6;
  while (h(lo) <= 0.0) {
    lo *= 2.0;
    if (lo >= 1.0) throw InvariantError("balance equation never positive");
  }
  double hi = lo;
  while (h(hi) > 0.0) {
    lo = hi;
    hi = std::min(1.0, hi + 0.01);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MomentBounds moment_bounds(double d, unsigned k) {
  check_k(k, 3);
  if (!(d >= 0.0)) throw InputError("density d must be non-negative");
  MomentBounds b;
  b.lambda = balance_lambda(k);
  const double kk = k;
  b.first_moment = std::numbers::ln2 + (d / kk) * std::log1p(-std::pow(2.0, -kk));
  const double s = std::sqrt(b.lambda) + 1.0 / std::sqrt(b.lambda);
  b.second_moment = (1.0 - d) * std::numbers::ln2 + (d / kk) * std::log(std::pow(s, kk) - std::pow(b.lambda, -kk / 2.0));
  return b;
}

Asymptotics reference_asymptotics(unsigned k) {
  check_k(k, 3);
  const double kk = k;
  const double two_k = std::pow(2.0, kk);
  const double ln2 = std::numbers::ln2;
  return {kk * (two_k * ln2 - (1.0 + ln2) / 2.0), kk * (two_k * ln2 - 2.0 * ln2), two_k * std::log(kk)};
}

bool has_d_sat_reference(unsigned k) { return k >= 2 && k <= 5; }

SatReference d_sat_reference(unsigned k) {
  switch (k) {
    case 2: return {2.0, "2.0000"};
    case 3: return {12.801, "12.801"};
    case 4: return {39.724, "39.724"};
    case 5: return {105.585, "105.585"};
    default: throw InputError("no tabulated satisfiability threshold for k=" + std::to_string(k));
  }
}

}  // namespace rscavity
