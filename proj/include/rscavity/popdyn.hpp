#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace rscavity {

/// Interval with open or closed ends; infinite ends may be closed (the
/// value ±inf is then admitted).
struct Support {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double x) const;
  std::string describe() const;

  static Support open_unit() { return {0.0, 1.0, false, false}; }
};

/// Lower clamp of BP messages; the upper clamp is 1 - 2^-53, the largest
/// double below 1.
constexpr double kMessageFloor = 1e-300;

/// Fixed-size sample of a distribution. The constructor throws InputError
/// unless every sample lies in the support and the size is positive.
class Population {
 public:
  Population(std::vector<double> samples, Support support = Support::open_unit());

  /// N copies of `value`.
  static Population constant(std::size_t n, double value, Support support = Support::open_unit());

  std::size_t size() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }
  const Support& support() const { return support_; }
  double operator[](std::size_t i) const { return samples_[i]; }

  double mean() const;
  /// Standard error of the mean.
  double std_error() const;

 private:
  std::vector<double> samples_;
  Support support_;
};

/// One sweep of the BP operator: N fresh samples, each from its own stream
/// (seed, "bp", i). Messages are combined in the log domain and clamped to
/// [kMessageFloor, 1 - 2^-53].
Population bp_step(const Population& pop, double d, unsigned k, std::size_t n, std::uint64_t seed);

struct IterateResult {
  Population population;
  std::vector<double> w1_trace;  // W₁ between successive populations, one per sweep
};

/// `iters` sweeps from the constant-1/2 population of size N. Sweep t uses
/// seed derive_seed(seed, "iterate", t).
IterateResult iterate(double d, unsigned k, std::size_t n, unsigned iters, std::uint64_t seed);

struct BetheEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t mc_samples = 0;
  double variable_term = 0.0;  // E[log(Π_{d⁻} μ + Π_{d⁺} μ)]
  double clause_term = 0.0;    // E[log(1 - c Π_k μ)], c = 1 or 1 - e^{-β}
  double coefficient = 0.0;    // d(k-1)/k
  std::size_t degenerate = 0;  // clause samples hitting log 0 after clamping
};

/// Monte Carlo Bethe free entropy of `pop`: value = variable_term -
/// coefficient * clause_term. Each sample i uses stream (seed, "bethe", i).
BetheEstimate bethe(const Population& pop, double d, unsigned k, std::size_t mc, std::uint64_t seed);

/// The finite-temperature functional: messages 1 - (1-e^{-β})Πμ and clause
/// term log(1 - (1-e^{-β})Πμ). Draws the same random numbers as bethe() for
/// the same seed; beta = +inf reproduces bethe() exactly.
BetheEstimate bethe_beta(const Population& pop, double d, unsigned k, double beta, std::size_t mc,
                         std::uint64_t seed);

struct FixedPointBethe {
  BetheEstimate estimate;
  std::vector<double> w1_trace;
};

/// iterate() with seed derive_seed(seed, "fixed-point"), then bethe() of the
/// final population with seed derive_seed(seed, "fixed-point.bethe").
FixedPointBethe bethe_of_fixed_point(double d, unsigned k, std::size_t n, unsigned iters, std::size_t mc,
                                     std::uint64_t seed);

/// L1-Wasserstein distance of two empirical measures on the line. Equal sizes
/// pair the order statistics; otherwise the quantile functions are
/// integrated exactly. Infinite samples must match in count and sign.
double w1(const std::vector<double>& a, const std::vector<double>& b);
double w1(const Population& a, const Population& b);

/// Raw little-endian float64 samples.
void write_population(std::ostream& out, const Population& pop);
Population read_population(std::istream& in, Support support = Support::open_unit());
void write_population_file(const std::string& path, const Population& pop);
Population read_population_file(const std::string& path, Support support = Support::open_unit());

}  // namespace rscavity
