#pragma once

#include <compare>
#include <limits>
#include <span>
#include <string>

namespace rscavity {

/// A real number or ±∞; never NaN.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  /// Throws InvariantError on NaN.
  ExtendedReal(double v);  // NOLINT(google-explicit-constructor)

  static ExtendedReal plus_infinity() { return ExtendedReal(std::numeric_limits<double>::infinity()); }
  static ExtendedReal minus_infinity() { return ExtendedReal(-std::numeric_limits<double>::infinity()); }

  double value() const { return v_; }
  bool is_finite() const;
  bool is_plus_infinity() const;
  bool is_minus_infinity() const;

  ExtendedReal operator-() const { return ExtendedReal(-v_); }
  /// Throws InvariantError for ∞ + (-∞).
  ExtendedReal operator+(ExtendedReal o) const;
  ExtendedReal& operator+=(ExtendedReal o) { return *this = *this + o; }
  /// Sign flip by ±1.
  ExtendedReal times_sign(int s) const { return s < 0 ? -*this : *this; }

  friend auto operator<=>(ExtendedReal a, ExtendedReal b) { return a.v_ <=> b.v_; }
  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }

  std::string str() const;

 private:
  double v_ = 0.0;
};

/// log((1 + tanh(z/2)) / 2); 0 at +∞, -∞ at -∞.
double log_logistic(ExtendedReal z);

/// γ(z) = (1 + tanh(z/2)) / 2, with γ(+∞) = 1 and γ(-∞) = 0.
double gamma_of(ExtendedReal z);

/// Inverse of γ on [0,1]: log(p / (1-p)).
ExtendedReal logit(double p);

/// Γ(z_1..z_q) = Π γ(z_i); the empty product is 1.
double gamma_fn(std::span<const ExtendedReal> z);

/// log Γ(z_1..z_q), summed termwise.
double log_gamma_fn(std::span<const ExtendedReal> z);

/// The summand -ε log(1 - Γ) of the log-likelihood recursions, given
/// log_g = log Γ and ε = ±1. A vanishing Γ gives 0; Γ = 1 gives +∞ when
/// ε = +1. Γ = 1 with ε = -1 has no value and throws InvariantError.
ExtendedReal clause_summand(int eps, double log_g);

}  // namespace rscavity
