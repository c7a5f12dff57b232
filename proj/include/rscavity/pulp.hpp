#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rscavity/cnf.hpp"

namespace rscavity {

/// Elimination round; kNever (above every integer) for clauses that survive.
using Round = std::uint32_t;
constexpr Round kNever = std::numeric_limits<Round>::max();

struct EliminationTrace {
  std::vector<Round> round_of_clause;  // 1-based round, kNever if never removed
  Round rounds = 0;                    // rounds that removed at least one clause
};

/// Synchronous pure-literal elimination: each round removes every clause
/// that contains a variable pure in the residual formula.
EliminationTrace eliminate(const Formula& f);

/// Elimination on Φ[var ↦ s] without building it. Clauses satisfied by the
/// assignment are reported as round 0.
EliminationTrace eliminate_assigned(const Formula& f, std::uint32_t var, int s);

/// 𝔥_x(s): 0 if ¬(s·x) occurs nowhere, otherwise the latest round at which
/// elimination on Φ[x ↦ s] removes a clause that contained ¬(s·x).
Round height(const Formula& f, std::uint32_t var, int s);

/// Memoised heights for one formula. Not thread-safe.
class HeightOracle {
 public:
  explicit HeightOracle(const Formula& f) : f_(f) {}
  Round operator()(std::uint32_t var, int s);

 private:
  const Formula& f_;
  std::map<std::pair<std::uint32_t, int>, Round> memo_;
};

/// Optional tie-break keys (smaller first; equal keys fall back to index).
/// On tree formulas these are the Gaussian node labels.
struct PulpOrder {
  std::vector<double> clause_key;  // per clause index
  std::vector<double> var_key;     // index var-1
};

struct PulpStep {
  std::size_t clause = 0;
  Literal added;
};

struct ClosureResult {
  bool contradiction = false;
  std::vector<Literal> closure;  // initial literals first, then in order added
  std::vector<PulpStep> trace;
  std::optional<std::size_t> contradiction_clause;

  /// |L̄|, with the convention |L̄| = 2n after a contradiction.
  std::size_t size(std::uint32_t n) const { return contradiction ? 2 * static_cast<std::size_t>(n) : closure.size(); }
};

/// Grows `initial` to a closure satisfying PULP1 and PULP2, or reports a
/// contradiction. Among clauses with a falsified literal and no true one, the
/// closest to var(initial) in the factor graph is processed first (distances
/// frozen at the initial set, unreachable clauses last); its unassigned
/// variable of least height is set to satisfy it.
/// Throws InputError if `initial` has a complementary pair.
ClosureResult pulp(const Formula& f, const std::vector<Literal>& initial,
                   const std::optional<PulpOrder>& order = std::nullopt);

struct ClosureCheck {
  bool superset = true;  // closure ⊇ initial
  bool pulp1 = true;     // a clause with a literal in ¬L̄ has one in L̄
  bool pulp2 = true;     // L̄ has no complementary pair
  std::optional<std::size_t> pulp1_witness;

  bool ok() const { return superset && pulp1 && pulp2; }
};

ClosureCheck check_closure(const Formula& f, const std::vector<Literal>& initial,
                           const std::vector<Literal>& closure);

bool verify_closure(const Formula& f, const std::vector<Literal>& initial, const std::vector<Literal>& closure);

/// p_h on the depth-l tree: p_0 = 1, p_h = 1 - exp(-(d/2) p_{h-1}^{k-1}) for
/// h <= l, and 0 for h > l. Entry h of the result, h = 0..h_max.
std::vector<double> analytic_height_tail(double d, unsigned k, unsigned h_max, unsigned depth);

struct HeightTail {
  std::vector<double> analytic;               // index h = 0..h_max
  std::vector<std::size_t> at_least_plus;     // trials with 𝔥_root(+1) >= h
  std::vector<std::size_t> at_least_minus;    // trials with 𝔥_root(-1) >= h
  std::size_t trials = 0;

  double empirical(unsigned h, int s) const;
  /// Binomial standard deviation of the empirical frequency under the analytic p_h.
  double sigma(unsigned h) const;
};

/// Monte Carlo tail of the root heights over sampled depth-l trees.
HeightTail tree_height_tail_mc(double d, unsigned k, unsigned h_max, unsigned depth, std::size_t trials,
                               std::uint64_t seed);

}  // namespace rscavity
