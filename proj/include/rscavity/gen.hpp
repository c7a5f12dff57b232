#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "rscavity/cnf.hpp"

namespace rscavity {

/// Random k-CNF on n variables with Po(dn/k) clauses. Each clause has k
/// distinct variables (stored in ascending order) and independent uniform
/// signs. Throws InputError if n < k, d < 0 or k < 2.
Formula sample_formula(double d, unsigned k, std::uint32_t n, std::uint64_t seed);

/// One clause on k distinct uniform variables from 1..n with uniform signs.
Clause sample_clause(unsigned k, std::uint32_t n, std::uint64_t seed, std::string_view stream,
                     std::uint64_t index);

struct CouplingTriple {
  Formula base;       // n variables, Po(d(n-k+1)/k) clauses
  Formula extended;   // base plus delta_extended fresh clauses
  Formula augmented;  // n+1 variables: base plus delta_augmented clauses through x_{n+1}
  std::size_t delta_extended = 0;
  std::size_t delta_augmented = 0;
};

/// The three coupled formulas used by the free-entropy increment.
CouplingTriple sample_coupling(double d, unsigned k, std::uint32_t n, std::uint64_t seed);

enum class NodeKind : std::uint8_t { variable, clause };

struct GWNode {
  std::uint32_t id = 0;
  NodeKind kind = NodeKind::variable;
  std::int64_t parent = -1;  // -1 for the root
  int sign = 0;              // sign of the edge to the parent; 0 for the root
  std::vector<std::uint32_t> children;
  double label = 0.0;
  std::uint32_t depth = 0;   // variable level; a clause shares its parent's level
};

/// Galton-Watson tree: variables have Po(d) clause children, clauses have
/// k-1 variable children. Node ids are breadth-first, so nodes[0] is the root
/// and a node's children have consecutive ids.
struct GWTree {
  double d = 0.0;
  unsigned k = 3;
  std::uint32_t depth = 0;
  std::vector<GWNode> nodes;

  const GWNode& root() const { return nodes.front(); }
  std::size_t num_variables() const;
  std::size_t num_clauses() const;
};

constexpr std::size_t kDefaultTreeCap = 10'000'000;

/// Tree truncated at `depth` variable levels below the root. Every node draws
/// (sign, label, offspring count) from its own stream keyed by its id, so for
/// a fixed seed the tree of depth l is the top of the tree of depth l+1.
/// Throws ResourceError when the node count would exceed `cap`.
GWTree sample_gw_tree(double d, unsigned k, std::uint32_t depth, std::uint64_t seed,
                      std::size_t cap = kDefaultTreeCap);

/// Per-node value in {-1, 0, +1}, indexed by node id; 0 on clause nodes and
/// unassigned variables.
using NodeAssignment = std::vector<std::int8_t>;

struct TreeFormula {
  Formula formula;
  std::vector<std::uint32_t> var_of_node;     // 0 for clause nodes
  std::vector<std::size_t> clause_of_node;    // meaningful for clause nodes only
  std::vector<std::uint32_t> node_of_var;     // index var-1
  std::vector<std::uint32_t> node_of_clause;
};

/// Variables numbered in breadth-first order (root is variable 1). Each clause
/// lists its parent variable first, then its children in order.
TreeFormula tree_to_formula(const GWTree& tree);

/// First line: JSON metadata. Then one `parent child kind sign label` line per
/// node, the root having parent -1.
void write_tree(std::ostream& out, const GWTree& tree);

}  // namespace rscavity
