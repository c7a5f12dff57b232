#include "rscavity/pulp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <tuple>

#include "rscavity/error.hpp"
#include "rscavity/gen.hpp"
#include "rscavity/parallel.hpp"
#include "rscavity/rng.hpp"

namespace rscavity {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// Elimination on Φ, or on Φ[assigned.var ↦ assigned.sign] when given.
EliminationTrace eliminate_impl(const Formula& f, std::optional<Literal> assigned) {
  const std::size_t m = f.num_clauses();
  const std::uint32_t n = f.num_vars();
  EliminationTrace tr;
  tr.round_of_clause.assign(m, kNever);
  std::vector<bool> alive(m, true);
  const std::uint32_t skip = assigned ? assigned->var : 0;
  if (assigned) {
    const Occurrences& o = f.occurrences(assigned->var);
    for (std::size_t c : assigned->sign > 0 ? o.positive : o.negative) {
      alive[c] = false;
      tr.round_of_clause[c] = 0;
    }
  }

  std::vector<std::uint32_t> pos(n + 1, 0), neg(n + 1, 0);
  for (std::size_t c = 0; c < m; ++c) {
    if (!alive[c]) continue;
    for (const Literal& l : f.clause(c)) {
      if (l.var == skip) continue;
      ++(l.sign > 0 ? pos : neg)[l.var];
    }
  }
  auto pure_and_present = [&](std::uint32_t v) {
    return (pos[v] + neg[v] > 0) && (pos[v] == 0 || neg[v] == 0);
  };

  std::vector<bool> queued(n + 1, false);
  std::vector<std::uint32_t> frontier;
  for (std::uint32_t v = 1; v <= n; ++v) {
    if (v != skip && pure_and_present(v)) {
      frontier.push_back(v);
      queued[v] = true;
    }
  }

  std::vector<std::size_t> removed;
  std::vector<std::uint32_t> touched;
  for (Round r = 1; !frontier.empty(); ++r) {
    removed.clear();
    for (std::uint32_t v : frontier) {
      const Occurrences& o = f.occurrences(v);
      for (const auto* list : {&o.positive, &o.negative}) {
        for (std::size_t c : *list) {
          if (alive[c]) {
            alive[c] = false;
            tr.round_of_clause[c] = r;
            removed.push_back(c);
          }
        }
      }
    }
    if (removed.empty()) break;
    tr.rounds = r;
    touched.clear();
    for (std::size_t c : removed) {
      for (const Literal& l : f.clause(c)) {
        if (l.var == skip) continue;
        --(l.sign > 0 ? pos : neg)[l.var];
        touched.push_back(l.var);
      }
    }
    frontier.clear();
    for (std::uint32_t v : touched) {
      if (!queued[v] && pure_and_present(v)) {
        queued[v] = true;
        frontier.push_back(v);
      }
    }
  }
  return tr;
}

}  // namespace

EliminationTrace eliminate(const Formula& f) { return eliminate_impl(f, std::nullopt); }

EliminationTrace eliminate_assigned(const Formula& f, std::uint32_t var, int s) {
  if (s != 1 && s != -1) throw InputError("assignment value must be +1 or -1");
  f.occurrences(var);  // range check
  return eliminate_impl(f, Literal{var, s});
}

Round height(const Formula& f, std::uint32_t var, int s) {
  if (s != 1 && s != -1) throw InputError("assignment value must be +1 or -1");
  const Occurrences& o = f.occurrences(var);
  const std::vector<std::size_t>& opposed = s > 0 ? o.negative : o.positive;
  if (opposed.empty()) return 0;
  const EliminationTrace tr = eliminate_impl(f, Literal{var, s});
  Round h = 0;
  for (std::size_t c : opposed) h = std::max(h, tr.round_of_clause[c]);
  return h;
}

Round HeightOracle::operator()(std::uint32_t var, int s) {
  const auto key = std::make_pair(var, s);
  if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
  const Round h = height(f_, var, s);
  memo_.emplace(key, h);
  return h;
}

ClosureResult pulp(const Formula& f, const std::vector<Literal>& initial, const std::optional<PulpOrder>& order) {
  const std::uint32_t n = f.num_vars();
  const std::size_t m = f.num_clauses();
  if (order && (order->clause_key.size() != m || order->var_key.size() != n)) {
    throw InputError("tie-break keys do not match the formula's size");
  }
  std::vector<int> val(n + 1, 0);  // val[v] = s iff s·v ∈ L̄
  ClosureResult res;
  for (const Literal& l : initial) {
    if (l.var < 1 || l.var > n || (l.sign != 1 && l.sign != -1)) {
      throw InputError("initial literal " + std::to_string(l.to_int()) + " is not a literal of the formula");
    }
    if (val[l.var] == -l.sign) throw InputError("initial set contains complementary literals on variable " + std::to_string(l.var));
    if (val[l.var] == l.sign) continue;
    val[l.var] = l.sign;
    res.closure.push_back(l);
  }

  // Factor-graph distance from var(initial); a clause is one step past its
  // nearest variable.
  std::vector<std::size_t> var_dist(n + 1, kUnreached), clause_dist(m, kUnreached);
  std::deque<std::uint32_t> queue;
  for (const Literal& l : res.closure) {
    var_dist[l.var] = 0;
    queue.push_back(l.var);
  }
  while (!queue.empty()) {
    const std::uint32_t v = queue.front();
    queue.pop_front();
    const Occurrences& o = f.occurrences(v);
    for (const auto* list : {&o.positive, &o.negative}) {
      for (std::size_t c : *list) {
        if (clause_dist[c] != kUnreached) continue;
        clause_dist[c] = var_dist[v] + 1;
        for (const Literal& l : f.clause(c)) {
          if (var_dist[l.var] == kUnreached) {
            var_dist[l.var] = clause_dist[c] + 1;
            queue.push_back(l.var);
          }
        }
      }
    }
  }

  using Key = std::tuple<std::size_t, double, std::size_t>;
  auto key_of = [&](std::size_t c) { return Key{clause_dist[c], order ? order->clause_key[c] : 0.0, c}; };
  std::set<Key> pending;
  std::vector<bool> in_pending(m, false);
  auto refresh = [&](std::size_t c) {
    bool has_false = false, has_true = false;
    for (const Literal& l : f.clause(c)) {
      has_true |= val[l.var] == l.sign;
      has_false |= val[l.var] == -l.sign;
    }
    const bool want = has_false && !has_true;
    if (want == in_pending[c]) return;
    in_pending[c] = want;
    if (want) {
      pending.insert(key_of(c));
    } else {
      pending.erase(key_of(c));
    }
  };
  auto refresh_var = [&](std::uint32_t v) {
    const Occurrences& o = f.occurrences(v);
    for (std::size_t c : o.positive) refresh(c);
    for (std::size_t c : o.negative) refresh(c);
  };
  for (const Literal& l : res.closure) refresh_var(l.var);

  HeightOracle heights(f);
  while (!pending.empty()) {
    const std::size_t c = std::get<2>(*pending.begin());
    const Clause& cl = f.clause(c);
    std::optional<Literal> best;
    std::tuple<Round, double, std::uint32_t> best_key{};
    for (const Literal& l : cl) {
      if (val[l.var] != 0) continue;
      const std::tuple<Round, double, std::uint32_t> k{heights(l.var, l.sign),
                                                       order ? order->var_key[l.var - 1] : 0.0, l.var};
      if (!best || k < best_key) {
        best = l;
        best_key = k;
      }
    }
    if (!best) {
      res.contradiction = true;
      res.contradiction_clause = c;
      break;
    }
    val[best->var] = best->sign;
    res.closure.push_back(*best);
    res.trace.push_back({c, *best});
    refresh_var(best->var);
  }
  return res;
}

ClosureCheck check_closure(const Formula& f, const std::vector<Literal>& initial, const std::vector<Literal>& closure) {
  ClosureCheck chk;
  const std::uint32_t n = f.num_vars();
  std::vector<int> val(n + 1, 0);
  for (const Literal& l : closure) {
    if (l.var < 1 || l.var > n) throw InputError("closure literal outside the formula's variables");
    if (val[l.var] == -l.sign) chk.pulp2 = false;
    val[l.var] = l.sign;
  }
  for (const Literal& l : initial) {
    if (std::find(closure.begin(), closure.end(), l) == closure.end()) chk.superset = false;
  }
  if (!chk.pulp2) return chk;
  for (std::size_t c = 0; c < f.num_clauses(); ++c) {
    bool has_false = false, has_true = false;
    for (const Literal& l : f.clause(c)) {
      has_true |= val[l.var] == l.sign;
      has_false |= val[l.var] == -l.sign;
    }
    if (has_false && !has_true) {
      chk.pulp1 = false;
      chk.pulp1_witness = c;
      break;
    }
  }
  return chk;
}

bool verify_closure(const Formula& f, const std::vector<Literal>& initial, const std::vector<Literal>& closure) {
  return check_closure(f, initial, closure).ok();
}

std::vector<double> analytic_height_tail(double d, unsigned k, unsigned h_max, unsigned depth) {
  std::vector<double> p(h_max + 1, 0.0);
  p[0] = 1.0;
  for (unsigned h = 1; h <= h_max; ++h) {
    p[h] = h > depth ? 0.0 : -std::expm1(-(d / 2.0) * std::pow(p[h - 1], static_cast<double>(k - 1)));
  }
  return p;
}

double HeightTail::empirical(unsigned h, int s) const {
  const auto& v = s > 0 ? at_least_plus : at_least_minus;
  return static_cast<double>(v.at(h)) / static_cast<double>(trials);
}

double HeightTail::sigma(unsigned h) const {
  const double p = analytic.at(h);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

HeightTail tree_height_tail_mc(double d, unsigned k, unsigned h_max, unsigned depth, std::size_t trials,
                               std::uint64_t seed) {
  if (trials == 0) throw InputError("need at least one trial");
  std::vector<std::pair<Round, Round>> hs(trials);
  parallel_for(trials, [&](std::size_t t) {
    const GWTree tree = sample_gw_tree(d, k, depth, derive_seed(seed, "height-tail", t));
    const Formula f = tree_to_formula(tree).formula;
    hs[t] = {height(f, 1, +1), height(f, 1, -1)};
  });
  HeightTail out;
  out.trials = trials;
  out.analytic = analytic_height_tail(d, k, h_max, depth);
  out.at_least_plus.assign(h_max + 1, 0);
  out.at_least_minus.assign(h_max + 1, 0);
  for (const auto& [hp, hm] : hs) {
    for (unsigned h = 0; h <= h_max; ++h) {
      out.at_least_plus[h] += hp >= h;
      out.at_least_minus[h] += hm >= h;
    }
  }
  return out;
}

}  // namespace rscavity
