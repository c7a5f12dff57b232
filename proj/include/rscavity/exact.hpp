#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rscavity/cnf.hpp"
#include "rscavity/gen.hpp"

namespace rscavity {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Largest connected component (in variables) that is enumerated.
constexpr unsigned kDefaultComponentCap = 30;

struct CountResult {
  BigInt count;
  double log_count = 0.0;               // -inf iff count == 0
  std::size_t isolated = 0;             // free variables in no clause
  std::vector<std::size_t> components;  // variable count per enumerated component
};

/// Natural log of a non-negative integer; -inf for 0.
double log_of(const BigInt& x);

/// Z(Φ): number of satisfying assignments of all n variables.
/// Z = 2^isolated · Π Z(component); each component is enumerated in Gray-code
/// order. Throws ResourceError if a component has more than `cap` variables.
CountResult count(const Formula& f, unsigned cap = kDefaultComponentCap);

/// Z(Φ, L): satisfying assignments under which every literal of L is true.
/// The variables of L are fixed, not free. Throws InputError on a
/// complementary pair.
CountResult count_conditioned(const Formula& f, const std::vector<Literal>& literals,
                              unsigned cap = kDefaultComponentCap);

struct SoftCount {
  double value = 0.0;
  double log_value = 0.0;
};

/// Z_β(Φ) = Σ_σ exp(-β · #violated clauses). beta = +inf gives Z(Φ).
SoftCount count_soft(const Formula& f, double beta, unsigned cap = kDefaultComponentCap);

struct MarginalVector {
  std::vector<Rational> exact;  // P[σ(x)=1], index var-1
  std::vector<double> value;
};

/// Exact marginals under the uniform satisfying assignment.
/// Throws InputError if Φ is unsatisfiable.
MarginalVector marginals(const Formula& f, unsigned cap = kDefaultComponentCap);

/// Bottom-up subtree counts on a Galton-Watson tree.
/// For a variable node x: plus/minus = satisfying assignments of the subtree
/// rooted at x with x = +1 / -1.
struct TreeCountTable {
  std::vector<BigInt> plus;
  std::vector<BigInt> minus;

  BigInt total() const { return plus.front() + minus.front(); }
  /// P[root = +1].
  Rational root_marginal() const;
};

/// With a boundary, every variable at depth tree.depth is pinned to its value
/// (Z(b)=1, Z(-b)=0); the boundary must assign all of them. Entries at other
/// depths are ignored.
TreeCountTable tree_count(const GWTree& tree, const std::optional<NodeAssignment>& boundary = std::nullopt);

struct FreeEntropySample {
  double mean = 0.0;       // mean of log(Z∨1)/n
  double std_error = 0.0;
  std::size_t samples = 0;
  std::size_t satisfiable = 0;
};

/// log(Z∨1)/n over random formulas; sample s uses seed
/// derive_seed(seed, "free-entropy", s).
FreeEntropySample free_entropy_experiment(double d, unsigned k, std::uint32_t n, std::size_t samples,
                                          std::uint64_t seed, unsigned cap = kDefaultComponentCap);

struct IncrementEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::size_t unsat_extended = 0;
  std::size_t unsat_augmented = 0;
  std::size_t above_log2 = 0;  // samples with increment > log 2 (diagnostic)
};

/// Mean of log(Z(Φ‴)∨1) - log(Z(Φ″)∨1) over coupled samples.
IncrementEstimate rs_increment_experiment(double d, unsigned k, std::uint32_t n, std::size_t samples,
                                          std::uint64_t seed, unsigned cap = kDefaultComponentCap);

}  // namespace rscavity
