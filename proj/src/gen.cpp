#include "rscavity/gen.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <utility>

#include <nlohmann/json.hpp>

#include "rscavity/error.hpp"
#include "rscavity/rng.hpp"

namespace rscavity {

namespace {

void check_params(double d, unsigned k, std::uint32_t n) {
  if (k < 2) throw InputError("k must be at least 2");
  if (!(d >= 0.0)) throw InputError("density d must be non-negative");
  if (n < k) throw InputError("need n >= k (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
}

// First `count` entries of a uniform permutation of 1..n, without
// materialising the permutation.
std::vector<std::uint32_t> distinct_vars(Stream& rng, unsigned count, std::uint32_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> moved;  // position -> value
  auto value_at = [&](std::uint32_t pos) {
    for (const auto& [p, v] : moved) {
      if (p == pos) return v;
    }
    return pos + 1;
  };
  auto set_at = [&](std::uint32_t pos, std::uint32_t v) {
    for (auto& [p, old] : moved) {
      if (p == pos) {
        old = v;
        return;
      }
    }
    moved.emplace_back(pos, v);
  };
  std::vector<std::uint32_t> out(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto j = static_cast<std::uint32_t>(i + rng.below(n - i));
    const std::uint32_t vi = value_at(i);
    const std::uint32_t vj = value_at(j);
    out[i] = vj;
    set_at(j, vi);
    set_at(i, vj);
  }
  return out;
}

std::vector<Clause> sample_clauses(unsigned k, std::uint32_t n, std::size_t m, std::uint64_t seed,
                                   std::string_view stream) {
  std::vector<Clause> clauses;
  clauses.reserve(m);
  for (std::size_t i = 0; i < m; ++i) clauses.push_back(sample_clause(k, n, seed, stream, i));
  return clauses;
}

}  // namespace

Clause sample_clause(unsigned k, std::uint32_t n, std::uint64_t seed, std::string_view stream,
                     std::uint64_t index) {
  Stream rng(seed, stream, index);
  std::vector<std::uint32_t> vars = distinct_vars(rng, k, n);
  std::sort(vars.begin(), vars.end());
  Clause c(k);
  for (unsigned j = 0; j < k; ++j) c[j] = {vars[j], rng.sign()};
  return c;
}

Formula sample_formula(double d, unsigned k, std::uint32_t n, std::uint64_t seed) {
  check_params(d, k, n);
  Stream counts(seed, "formula.m");
  const std::size_t m = counts.poisson(d * n / k);
  return Formula(k, n, sample_clauses(k, n, m, seed, "formula.clause"));
}

CouplingTriple sample_coupling(double d, unsigned k, std::uint32_t n, std::uint64_t seed) {
  check_params(d, k, n);
  Stream counts(seed, "coupling.counts");
  const std::size_t m_base = counts.poisson(d * (n - k + 1) / k);
  const std::size_t delta2 = counts.poisson(d * (k - 1) / k);
  const std::size_t delta3 = counts.poisson(d);

  std::vector<Clause> base = sample_clauses(k, n, m_base, seed, "coupling.base");

  std::vector<Clause> extended = base;
  for (std::size_t i = 0; i < delta2; ++i) {
    extended.push_back(sample_clause(k, n, seed, "coupling.extended", i));
  }

  std::vector<Clause> augmented = base;
  const std::uint32_t fresh = n + 1;
  for (std::size_t i = 0; i < delta3; ++i) {
    Stream rng(seed, "coupling.augmented", i);
    std::vector<std::uint32_t> vars = distinct_vars(rng, k - 1, n);
    vars.push_back(fresh);
    std::sort(vars.begin(), vars.end());
    Clause c(k);
    for (unsigned j = 0; j < k; ++j) c[j] = {vars[j], rng.sign()};
    augmented.push_back(std::move(c));
  }

  return {Formula(k, n, std::move(base)), Formula(k, n, std::move(extended)),
          Formula(k, n + 1, std::move(augmented)), delta2, delta3};
}

std::size_t GWTree::num_variables() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const GWNode& v) { return v.kind == NodeKind::variable; }));
}

std::size_t GWTree::num_clauses() const { return nodes.size() - num_variables(); }

GWTree sample_gw_tree(double d, unsigned k, std::uint32_t depth, std::uint64_t seed, std::size_t cap) {
  if (k < 2) throw InputError("k must be at least 2");
  if (!(d >= 0.0)) throw InputError("density d must be non-negative");
  GWTree tree;
  tree.d = d;
  tree.k = k;
  tree.depth = depth;
  tree.nodes.push_back(GWNode{});
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    Stream rng(seed, "gw.node", id);
    const int sign = rng.sign();
    const double label = rng.normal();
    GWNode& node = tree.nodes[id];
    node.id = static_cast<std::uint32_t>(id);
    node.sign = node.parent < 0 ? 0 : sign;
    node.label = label;
    std::size_t offspring = 0;
    NodeKind child_kind = NodeKind::clause;
    std::uint32_t child_depth = node.depth;
    if (node.kind == NodeKind::variable) {
      if (node.depth < depth) offspring = rng.poisson(d);
    } else {
      offspring = k - 1;
      child_kind = NodeKind::variable;
      child_depth = node.depth + 1;
    }
    if (tree.nodes.size() + offspring > cap) {
      throw ResourceError("Galton-Watson tree exceeds the node cap of " + std::to_string(cap));
    }
    for (std::size_t c = 0; c < offspring; ++c) {
      GWNode child;
      child.kind = child_kind;
      child.parent = static_cast<std::int64_t>(id);
      child.depth = child_depth;
      tree.nodes[id].children.push_back(static_cast<std::uint32_t>(tree.nodes.size()));
      tree.nodes.push_back(std::move(child));
    }
  }
  return tree;
}

TreeFormula tree_to_formula(const GWTree& tree) {
  const std::size_t size = tree.nodes.size();
  std::vector<std::uint32_t> var_of_node(size, 0);
  std::vector<std::size_t> clause_of_node(size, 0);
  std::vector<std::uint32_t> node_of_var;
  std::vector<std::uint32_t> node_of_clause;
  for (const GWNode& v : tree.nodes) {
    if (v.kind == NodeKind::variable) {
      node_of_var.push_back(v.id);
      var_of_node[v.id] = static_cast<std::uint32_t>(node_of_var.size());
    } else {
      clause_of_node[v.id] = node_of_clause.size();
      node_of_clause.push_back(v.id);
    }
  }
  std::vector<Clause> clauses;
  clauses.reserve(node_of_clause.size());
  for (std::uint32_t cid : node_of_clause) {
    const GWNode& a = tree.nodes[cid];
    Clause c;
    c.reserve(a.children.size() + 1);
    c.push_back({var_of_node[static_cast<std::size_t>(a.parent)], a.sign});
    for (std::uint32_t y : a.children) c.push_back({var_of_node[y], tree.nodes[y].sign});
    clauses.push_back(std::move(c));
  }
  const auto n = static_cast<std::uint32_t>(node_of_var.size());
  return {Formula(tree.k, n, std::move(clauses)), std::move(var_of_node), std::move(clause_of_node),
          std::move(node_of_var), std::move(node_of_clause)};
}

void write_tree(std::ostream& out, const GWTree& tree) {
  const nlohmann::json header = {{"format", "gw-tree"},
                                 {"d", tree.d},
                                 {"k", tree.k},
                                 {"depth", tree.depth},
                                 {"nodes", tree.nodes.size()},
                                 {"variables", tree.num_variables()},
                                 {"clauses", tree.num_clauses()}};
  out << header.dump() << '\n';
  char buf[64];
  for (const GWNode& v : tree.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g", v.label);
    out << v.parent << ' ' << v.id << ' ' << (v.kind == NodeKind::variable ? 'v' : 'c') << ' ' << v.sign
        << ' ' << buf << '\n';
  }
}

}  // namespace rscavity
