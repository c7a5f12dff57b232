#pragma once

#include <string>
#include <vector>

namespace rscavity {

enum class Solver { closed_form, bisection, golden_section };

const char* to_string(Solver s);

struct ThresholdReport {
  std::string name;  // giant, ms, con, pure
  unsigned k = 0;
  double value = 0.0;
  Solver solver = Solver::closed_form;
  double residual = 0.0;  // |g(value) - 1| for roots, 0 for closed forms
  unsigned iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// 1/(k-1).
double d_giant(unsigned k);

/// Contraction constant (d(k-1)/2)(1 - e^{-d/2}/2)^{k-2}.
double contraction_constant(double d, unsigned k);

/// d(k-1)(1 - e^{-d/2}/4)(1 - e^{-d/2}/2)^{k-2}.
double ms_function(double d, unsigned k);

/// z / (1 - e^{-z/2})^{k-1}.
double pure_function(double z, unsigned k);

/// Root of contraction_constant(d, k) = 1.
ThresholdReport d_con(unsigned k);
/// Root of ms_function(d, k) = 1.
ThresholdReport d_ms(unsigned k);
/// min over z > 0 of pure_function(z, k); exactly 2 for k = 2 (infimum at z → ∞).
ThresholdReport d_pure(unsigned k);
ThresholdReport d_giant_report(unsigned k);

struct MomentBounds {
  double first_moment = 0.0;
  double second_moment = 0.0;
  double lambda = 0.0;
};

/// Positive root of (1-λ)(1+λ)^{k-1} = 1, k >= 3.
double balance_lambda(unsigned k);

/// Upper bound log 2 + (d/k) log(1 - 2^{-k}) and lower bound
/// (1-d) log 2 + (d/k) log[(λ^{1/2} + λ^{-1/2})^k - λ^{-k/2}].
MomentBounds moment_bounds(double d, unsigned k);

struct Asymptotics {
  double d_sat = 0.0;  // k(2^k log 2 - (1 + log 2)/2)
  double d_rsb = 0.0;  // k(2^k log 2 - 2 log 2)
  double d_alg = 0.0;  // 2^k log k
};

/// Leading-order large-k formulas; informational only.
Asymptotics reference_asymptotics(unsigned k);

struct SatReference {
  double value = 0.0;
  std::string display;  // as tabulated
};

/// Tabulated satisfiability thresholds from the physics literature for
/// 2 <= k <= 5. Throws InputError otherwise.
SatReference d_sat_reference(unsigned k);
bool has_d_sat_reference(unsigned k);

}  // namespace rscavity
