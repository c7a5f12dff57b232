#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "rscavity/extended_real.hpp"
#include "rscavity/gen.hpp"
#include "rscavity/popdyn.hpp"

namespace rscavity {

/// τ⁺ on every variable of the tree, top-down from τ⁺(root) = +1: a child w
/// of clause a under u satisfies a iff u's value τ⁺(u) does not.
NodeAssignment extremal_boundary(const GWTree& tree);

enum class BoundaryKind { plus_infinity, truncated, zero };

struct BoundaryMode {
  BoundaryKind kind = BoundaryKind::plus_infinity;
  double m = 50.0;  // boundary value for BoundaryKind::truncated

  static BoundaryMode plus_infinity() { return {BoundaryKind::plus_infinity, 0.0}; }
  static BoundaryMode truncated(double m) { return {BoundaryKind::truncated, m}; }
  static BoundaryMode zero() { return {BoundaryKind::zero, 0.0}; }
};

struct EtaTable {
  NodeAssignment tau;               // extremal boundary τ⁺
  std::vector<ExtendedReal> eta;    // per node; 0 on clause nodes

  ExtendedReal root() const { return eta.front(); }
  /// γ(η_root) = P[root = +1] under the chosen boundary.
  double root_marginal() const { return gamma_of(root()); }
};

/// Log-likelihood ratios log Z(x = τ⁺(x)) / Z(x = -τ⁺(x)) computed bottom-up.
/// Variables at the truncation depth get +∞ (pinned to τ⁺), +M, or 0
/// (unconditioned). With zero boundary, γ(η_root) is the exact marginal of the
/// tree formula.
EtaTable eta_tree(const GWTree& tree, BoundaryMode mode);

/// Three populations with supports (-∞,∞], (0,∞], (-∞,0].
struct TypedTriplet {
  Population all;
  Population plus;
  Population minus;

  static Support all_support() { return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), false, true}; }
  static Support plus_support() { return {0.0, std::numeric_limits<double>::infinity(), false, true}; }
  static Support minus_support() { return {-std::numeric_limits<double>::infinity(), 0.0, false, true}; }

  /// Validates each coordinate against its support.
  static TypedTriplet make(std::vector<double> all, std::vector<double> plus, std::vector<double> minus);
};

/// (p_•, p_⊕, p_⊖, p_○).
std::array<double, 4> type_probabilities(double d);

/// One sweep of the typed operator, N samples per coordinate. Output sample i
/// of coordinate c draws from stream (seed, "llstar.<c>", i), so two triplets
/// of equal sizes stepped with the same seed share every Poisson count, type
/// vector and sample index.
TypedTriplet ll_star_step(const TypedTriplet& in, double d, unsigned k, std::size_t n, std::uint64_t seed);

/// The single-type operator: Po(d) clauses with uniform signs s_i, each
/// adding -s_i log(1 - Γ(s_i η_{i,1..k-1})). Support (-∞,∞].
Population ll_plus_step(const Population& in, double d, unsigned k, std::size_t n, std::uint64_t seed);

struct DistResult {
  double value = 0.0;
  std::array<double, 3> weights{};    // (1 - e^{-t/2}, e^{-t/2}, e^{-t/2})
  std::array<double, 3> components{}; // coordinatewise W₁
  std::size_t truncated = 0;          // samples clipped to ±M
};

/// dist_t with samples clipped to [-M, M] before sorting.
DistResult dist_metric(const TypedTriplet& a, const TypedTriplet& b, double t, double m = 50.0);

struct ContractionEstimate {
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  double constant = 0.0;  // contraction_constant(d, k)
  std::size_t trials = 0;
  std::size_t skipped = 0;  // pairs at distance 0
  std::vector<double> ratios;
};

/// Draws pairs of random triplets (shifted exponentials on each support),
/// sorts every coordinate so that index pairing is the W₁-optimal coupling,
/// steps both with the same seed, and reports dist_d(out)/dist_d(in).
ContractionEstimate contraction_estimate(double d, unsigned k, std::size_t n, std::size_t trials,
                                         std::uint64_t seed, double m = 50.0);

struct PsiPhi {
  double psi = 0.0;
  double phi = 0.0;
  double phi_max = 0.0;
};

/// ψ_λ(w) = λw(1-w)/(1-λw), φ_λ(w) = ψ_λ(w) + ψ_λ(1-w), max φ_λ = (λ/2)/(1-λ/2).
PsiPhi psi_phi(double lambda, double w);

struct GapStats {
  unsigned depth = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double q95 = 0.0;
  double min = 0.0;
  std::size_t negative = 0;  // trials with gap < -1e-12
};

/// Gap γ(η_root) - γ(Θ_root) between the τ⁺-conditioned and unconditioned
/// root marginals at depths 1..max_depth. Trial t uses the same tree seed at
/// every depth, so the depth-l tree is the top of the depth-(l+1) tree.
std::vector<GapStats> boundary_influence_experiment(double d, unsigned k, unsigned max_depth, std::size_t trials,
                                                    std::uint64_t seed);

}  // namespace rscavity
