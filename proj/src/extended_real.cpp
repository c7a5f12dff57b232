#include "rscavity/extended_real.hpp"

#include <cmath>
#include <sstream>

#include "rscavity/error.hpp"

namespace rscavity {

ExtendedReal::ExtendedReal(double v) : v_(v) {
  if (std::isnan(v)) throw InvariantError("extended real constructed from NaN");
}

bool ExtendedReal::is_finite() const { return std::isfinite(v_); }
bool ExtendedReal::is_plus_infinity() const { return std::isinf(v_) && v_ > 0; }
bool ExtendedReal::is_minus_infinity() const { return std::isinf(v_) && v_ < 0; }

ExtendedReal ExtendedReal::operator+(ExtendedReal o) const {
  if (std::isinf(v_) && std::isinf(o.v_) && (v_ > 0) != (o.v_ > 0)) {
    throw InvariantError("indeterminate sum of +inf and -inf");
  }
  return ExtendedReal(v_ + o.v_);
}

std::string ExtendedReal::str() const {
  if (is_plus_infinity()) return "inf";
  if (is_minus_infinity()) return "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v_;
  return os.str();
}

double log_logistic(ExtendedReal z) {
  const double x = z.value();
  if (z.is_plus_infinity()) return 0.0;
  if (z.is_minus_infinity()) return -std::numeric_limits<double>::infinity();
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double gamma_of(ExtendedReal z) {
  const double x = z.value();
  if (z.is_plus_infinity()) return 1.0;
  if (z.is_minus_infinity()) return 0.0;
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

ExtendedReal logit(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("probability outside [0,1]");
  if (p == 1.0) return ExtendedReal::plus_infinity();
  if (p == 0.0) return ExtendedReal::minus_infinity();
  return ExtendedReal(std::log(p) - std::log1p(-p));
}

double log_gamma_fn(std::span<const ExtendedReal> z) {
  double s = 0.0;
  for (ExtendedReal x : z) s += log_logistic(x);
  return s;
}

double gamma_fn(std::span<const ExtendedReal> z) {
  double g = 1.0;
  for (ExtendedReal x : z) g *= gamma_of(x);
  return g;
}

ExtendedReal clause_summand(int eps, double log_g) {
  if (log_g == 0.0) {
    if (eps > 0) return ExtendedReal::plus_infinity();
    throw InvariantError("clause fully falsified against the extremal value");
  }
  // log(1 - Γ) = log(-expm1(log Γ)); Γ = 0 gives log 1 = 0.
  const double l = std::log(-std::expm1(log_g));
  return ExtendedReal(eps > 0 ? -l : l);
}

}  // namespace rscavity
