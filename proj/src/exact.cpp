#include "rscavity/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "rscavity/error.hpp"
#include "rscavity/parallel.hpp"
#include "rscavity/rng.hpp"

namespace rscavity {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Component {
  std::vector<std::uint32_t> vars;
  std::vector<std::size_t> clauses;
};

struct Decomposition {
  std::vector<Component> components;
  std::size_t isolated = 0;
  std::size_t empty_clauses = 0;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// `fixed[v]` marks variables that are neither free nor enumerated.
Decomposition decompose(const Formula& f, const std::vector<bool>& fixed, unsigned cap) {
  const std::uint32_t n = f.num_vars();
  UnionFind uf(n + 1);
  std::vector<bool> used(n + 1, false);
  Decomposition out;
  for (const Clause& c : f.clauses()) {
    if (c.empty()) {
      ++out.empty_clauses;
      continue;
    }
    for (const Literal& l : c) {
      used[l.var] = true;
      uf.unite(c.front().var, l.var);
    }
  }
  std::vector<std::size_t> slot(n + 1, SIZE_MAX);
  for (std::uint32_t v = 1; v <= n; ++v) {
    if (!used[v]) {
      if (!fixed[v]) ++out.isolated;
      continue;
    }
    const std::size_t r = uf.find(v);
    if (slot[r] == SIZE_MAX) {
      slot[r] = out.components.size();
      out.components.emplace_back();
    }
    out.components[slot[r]].vars.push_back(v);
  }
  for (std::size_t i = 0; i < f.num_clauses(); ++i) {
    const Clause& c = f.clause(i);
    if (!c.empty()) out.components[slot[uf.find(c.front().var)]].clauses.push_back(i);
  }
  for (const Component& comp : out.components) {
    if (comp.vars.size() > cap || comp.vars.size() > 62) {
      throw ResourceError("connected component with " + std::to_string(comp.vars.size()) +
                          " variables exceeds the enumeration cap of " + std::to_string(cap));
    }
  }
  return out;
}

// Gray-code walk over all assignments of one component. `visit(mask,
// violated)` sees every assignment once; bit i of mask is variable vars[i].
template <class Visit>
void enumerate(const Formula& f, const Component& comp, Visit&& visit) {
  const std::size_t s = comp.vars.size();
  std::vector<std::uint32_t> local(f.num_vars() + 1, 0);
  for (std::size_t i = 0; i < s; ++i) local[comp.vars[i]] = static_cast<std::uint32_t>(i);

  struct Occ {
    std::uint32_t clause;
    int sign;
  };
  std::vector<std::vector<Occ>> occ(s);
  std::vector<std::uint32_t> true_count(comp.clauses.size(), 0);
  std::size_t violated = 0;
  for (std::size_t c = 0; c < comp.clauses.size(); ++c) {
    for (const Literal& l : f.clause(comp.clauses[c])) {
      occ[local[l.var]].push_back({static_cast<std::uint32_t>(c), l.sign});
      if (l.sign < 0) ++true_count[c];  // all variables start false
    }
    if (true_count[c] == 0) ++violated;
  }

  std::uint64_t mask = 0;
  visit(mask, violated);
  const std::uint64_t total = std::uint64_t{1} << s;
  for (std::uint64_t i = 1; i < total; ++i) {
    const int b = std::countr_zero(i);
    mask ^= std::uint64_t{1} << b;
    const bool now_true = (mask >> b) & 1;
    for (const Occ& o : occ[b]) {
      if ((o.sign > 0) == now_true) {
        if (true_count[o.clause]++ == 0) --violated;
      } else {
        if (--true_count[o.clause] == 0) ++violated;
      }
    }
    visit(mask, violated);
  }
}

std::uint64_t count_component(const Formula& f, const Component& comp) {
  std::uint64_t z = 0;
  enumerate(f, comp, [&](std::uint64_t, std::size_t violated) { z += violated == 0; });
  return z;
}

CountResult count_impl(const Formula& f, const std::vector<bool>& fixed, unsigned cap) {
  const Decomposition dec = decompose(f, fixed, cap);
  CountResult r;
  r.isolated = dec.isolated;
  for (const Component& c : dec.components) r.components.push_back(c.vars.size());
  if (dec.empty_clauses > 0) {
    r.count = 0;
    r.log_count = kNegInf;
    return r;
  }
  BigInt z = BigInt(1) << dec.isolated;
  double logz = static_cast<double>(dec.isolated) * std::numbers::ln2;
  for (const Component& c : dec.components) {
    const std::uint64_t zc = count_component(f, c);
    z *= zc;
    logz += zc == 0 ? kNegInf : std::log(static_cast<double>(zc));
    if (zc == 0) break;
  }
  r.count = std::move(z);
  r.log_count = r.count == 0 ? kNegInf : logz;
  return r;
}

}  // namespace

double log_of(const BigInt& x) {
  if (x < 0) throw InputError("log of a negative integer");
  if (x == 0) return kNegInf;
  const std::size_t bits = boost::multiprecision::msb(x) + 1;
  if (bits <= 63) return std::log(static_cast<double>(x.convert_to<std::uint64_t>()));
  const std::size_t shift = bits - 63;
  const BigInt top = x >> shift;
  return std::log(static_cast<double>(top.convert_to<std::uint64_t>())) +
         static_cast<double>(shift) * std::numbers::ln2;
}

CountResult count(const Formula& f, unsigned cap) {
  return count_impl(f, std::vector<bool>(f.num_vars() + 1, false), cap);
}

CountResult count_conditioned(const Formula& f, const std::vector<Literal>& literals, unsigned cap) {
  std::vector<int> value(f.num_vars() + 1, 0);
  std::vector<bool> fixed(f.num_vars() + 1, false);
  Formula g = f;
  for (const Literal& l : literals) {
    if (l.var < 1 || l.var > f.num_vars()) {
      throw InputError("literal " + std::to_string(l.to_int()) + " outside the formula's variables");
    }
    if (value[l.var] == -l.sign) {
      throw InputError("complementary literals on variable " + std::to_string(l.var));
    }
    if (value[l.var] == l.sign) continue;
    value[l.var] = l.sign;
    fixed[l.var] = true;
    g = g.assign(l.var, l.sign);
  }
  return count_impl(g, fixed, cap);
}

SoftCount count_soft(const Formula& f, double beta, unsigned cap) {
  if (!(beta > 0.0)) throw InputError("beta must be positive");
  const Decomposition dec = decompose(f, std::vector<bool>(f.num_vars() + 1, false), cap);
  const bool sharp = std::isinf(beta);
  double logz = static_cast<double>(dec.isolated) * std::numbers::ln2;
  // exact product of counts when beta is infinite
  double sharp_value = std::ldexp(1.0, static_cast<int>(dec.isolated));
  if (dec.empty_clauses > 0) logz = sharp ? kNegInf : logz - beta * static_cast<double>(dec.empty_clauses);
  for (const Component& c : dec.components) {
    if (logz == kNegInf) break;
    std::vector<std::uint64_t> hist(c.clauses.size() + 1, 0);
    enumerate(f, c, [&](std::uint64_t, std::size_t violated) { ++hist[violated]; });
    // log Σ_j hist[j] e^{-βj}, anchored at the smallest populated j
    std::size_t j0 = 0;
    while (hist[j0] == 0) ++j0;
    if (sharp) {
      logz = j0 == 0 ? logz + std::log(static_cast<double>(hist[0])) : kNegInf;
      sharp_value *= static_cast<double>(hist[0]);
      continue;
    }
    double acc = 0.0;
    for (std::size_t j = j0; j < hist.size(); ++j) {
      if (hist[j]) acc += static_cast<double>(hist[j]) * std::exp(-beta * static_cast<double>(j - j0));
    }
    logz += std::log(acc) - beta * static_cast<double>(j0);
  }
  if (sharp) return {logz == kNegInf ? 0.0 : sharp_value, logz};
  return {std::exp(logz), logz};
}

MarginalVector marginals(const Formula& f, unsigned cap) {
  const Decomposition dec = decompose(f, std::vector<bool>(f.num_vars() + 1, false), cap);
  if (dec.empty_clauses > 0) throw InputError("formula is unsatisfiable (empty clause)");
  MarginalVector out;
  out.exact.assign(f.num_vars(), Rational(1, 2));
  for (const Component& c : dec.components) {
    std::vector<std::uint64_t> ones(c.vars.size(), 0);
    std::uint64_t z = 0;
    enumerate(f, c, [&](std::uint64_t mask, std::size_t violated) {
      if (violated) return;
      ++z;
      for (std::uint64_t m = mask; m; m &= m - 1) ++ones[std::countr_zero(m)];
    });
    if (z == 0) throw InputError("formula is unsatisfiable");
    for (std::size_t i = 0; i < c.vars.size(); ++i) out.exact[c.vars[i] - 1] = Rational(BigInt(ones[i]), BigInt(z));
  }
  out.value.reserve(out.exact.size());
  for (const Rational& q : out.exact) out.value.push_back(q.convert_to<double>());
  return out;
}

Rational TreeCountTable::root_marginal() const {
  const BigInt z = total();
  if (z == 0) throw InputError("boundary condition admits no satisfying assignment");
  return Rational(plus.front(), z);
}

TreeCountTable tree_count(const GWTree& tree, const std::optional<NodeAssignment>& boundary) {
  const std::size_t size = tree.nodes.size();
  if (boundary && boundary->size() != size) {
    throw InputError("boundary assignment has " + std::to_string(boundary->size()) + " entries, tree has " +
                     std::to_string(size) + " nodes");
  }
  TreeCountTable t;
  t.plus.assign(size, 0);
  t.minus.assign(size, 0);
  for (std::size_t id = size; id-- > 0;) {
    const GWNode& x = tree.nodes[id];
    if (x.kind != NodeKind::variable) continue;
    if (boundary && x.depth == tree.depth) {
      const int b = (*boundary)[id];
      if (b != 1 && b != -1) {
        throw InputError("boundary leaves node " + std::to_string(id) + " at depth " +
                         std::to_string(tree.depth) + " unassigned");
      }
      t.plus[id] = b > 0 ? 1 : 0;
      t.minus[id] = b < 0 ? 1 : 0;
      continue;
    }
    BigInt zp = 1;
    BigInt zm = 1;
    for (std::uint32_t a : x.children) {
      const GWNode& clause = tree.nodes[a];
      BigInt all = 1;
      BigInt falsified = 1;
      for (std::uint32_t y : clause.children) {
        all *= t.plus[y] + t.minus[y];
        falsified *= tree.nodes[y].sign > 0 ? t.minus[y] : t.plus[y];
      }
      if (clause.sign > 0) {
        zp *= all;
        zm *= all - falsified;
      } else {
        zp *= all - falsified;
        zm *= all;
      }
    }
    t.plus[id] = std::move(zp);
    t.minus[id] = std::move(zm);
  }
  return t;
}

FreeEntropySample free_entropy_experiment(double d, unsigned k, std::uint32_t n, std::size_t samples,
                                          std::uint64_t seed, unsigned cap) {
  if (samples == 0) throw InputError("need at least one sample");
  std::vector<double> value(samples);
  std::vector<std::uint8_t> sat(samples);
  parallel_for(samples, [&](std::size_t s) {
    const CountResult z = count(sample_formula(d, k, n, derive_seed(seed, "free-entropy", s)), cap);
    sat[s] = z.count >= 1;
    value[s] = (z.count >= 1 ? z.log_count : 0.0) / static_cast<double>(n);
  });
  FreeEntropySample e;
  e.samples = samples;
  double sum = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    sum += value[s];
    e.satisfiable += sat[s];
  }
  e.mean = sum / static_cast<double>(samples);
  double ss = 0.0;
  for (double v : value) ss += (v - e.mean) * (v - e.mean);
  e.std_error = samples > 1 ? std::sqrt(ss / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
  return e;
}

IncrementEstimate rs_increment_experiment(double d, unsigned k, std::uint32_t n, std::size_t samples,
                                          std::uint64_t seed, unsigned cap) {
  if (samples == 0) throw InputError("need at least one sample");
  struct Row {
    double inc = 0.0;
    bool unsat2 = false;
    bool unsat3 = false;
  };
  std::vector<Row> rows(samples);
  parallel_for(samples, [&](std::size_t s) {
    const CouplingTriple cpl = sample_coupling(d, k, n, derive_seed(seed, "increment", s));
    const CountResult z2 = count(cpl.extended, cap);
    const CountResult z3 = count(cpl.augmented, cap);
    const double l2 = z2.count >= 1 ? z2.log_count : 0.0;
    const double l3 = z3.count >= 1 ? z3.log_count : 0.0;
    rows[s] = {l3 - l2, z2.count == 0, z3.count == 0};
  });
  IncrementEstimate e;
  e.samples = samples;
  double sum = 0.0;
  for (const Row& r : rows) {
    sum += r.inc;
    e.unsat_extended += r.unsat2;
    e.unsat_augmented += r.unsat3;
    e.above_log2 += r.inc > std::numbers::ln2 + 1e-12;
  }
  e.mean = sum / static_cast<double>(samples);
  double ss = 0.0;
  for (const Row& r : rows) ss += (r.inc - e.mean) * (r.inc - e.mean);
  e.std_error = samples > 1 ? std::sqrt(ss / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
  return e;
}

}  // namespace rscavity
