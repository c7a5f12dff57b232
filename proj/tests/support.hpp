#pragma once

// Reference implementations used as oracles. Deliberately naive: plain
// enumeration over all 2^n assignments and literal-by-literal evaluation.

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "rscavity/cnf.hpp"

namespace oracle {

using rscavity::Clause;
using rscavity::Formula;
using rscavity::Literal;

inline bool literal_true(const Literal& l, std::uint64_t mask) {
  const bool v = (mask >> (l.var - 1)) & 1;
  return l.sign > 0 ? v : !v;
}

inline int violated(const Formula& f, std::uint64_t mask) {
  int bad = 0;
  for (const Clause& c : f.clauses()) {
    bool sat = false;
    for (const Literal& l : c) sat = sat || literal_true(l, mask);
    bad += !sat;
  }
  return bad;
}

inline bool satisfies(const Formula& f, std::uint64_t mask) { return violated(f, mask) == 0; }

inline std::uint64_t count(const Formula& f, const std::vector<Literal>& assume = {}) {
  std::uint64_t z = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << f.num_vars()); ++mask) {
    bool ok = satisfies(f, mask);
    for (const Literal& l : assume) ok = ok && literal_true(l, mask);
    z += ok;
  }
  return z;
}

inline double count_soft(const Formula& f, double beta) {
  double z = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << f.num_vars()); ++mask) {
    z += std::exp(-beta * violated(f, mask));
  }
  return z;
}

// P[x_var = 1] under the uniform satisfying assignment.
inline double marginal(const Formula& f, std::uint32_t var) {
  std::uint64_t z = 0, ones = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << f.num_vars()); ++mask) {
    if (!satisfies(f, mask)) continue;
    ++z;
    ones += (mask >> (var - 1)) & 1;
  }
  return static_cast<double>(ones) / static_cast<double>(z);
}

// Synchronous pure-literal elimination on an explicit clause list; returns
// the round each clause is removed in (0 = never).
inline std::vector<unsigned> elimination_rounds(const std::vector<Clause>& clauses, std::uint32_t n) {
  std::vector<unsigned> round(clauses.size(), 0);
  for (unsigned r = 1;; ++r) {
    std::vector<int> pos(n + 1, 0), neg(n + 1, 0);
    for (std::size_t c = 0; c < clauses.size(); ++c) {
      if (round[c]) continue;
      for (const Literal& l : clauses[c]) (l.sign > 0 ? pos : neg)[l.var]++;
    }
    std::vector<std::size_t> removed;
    for (std::size_t c = 0; c < clauses.size(); ++c) {
      if (round[c]) continue;
      for (const Literal& l : clauses[c]) {
        if (pos[l.var] == 0 || neg[l.var] == 0) {
          removed.push_back(c);
          break;
        }
      }
    }
    if (removed.empty()) return round;
    for (std::size_t c : removed) round[c] = r;
  }
}

// Height by direct construction of Φ[x↦s]: 0 if ¬(s·x) occurs nowhere,
// -1 for "never", otherwise the last round removing a clause that held ¬(s·x).
inline long height(const Formula& f, std::uint32_t var, int s) {
  std::vector<Clause> reduced;
  std::vector<bool> had_opposite;
  bool any = false;
  for (const Clause& c : f.clauses()) {
    bool satisfied = false, opposite = false;
    Clause rest;
    for (const Literal& l : c) {
      if (l.var == var) {
        (l.sign == s ? satisfied : opposite) = true;
      } else {
        rest.push_back(l);
      }
    }
    if (satisfied) continue;
    any = any || opposite;
    reduced.push_back(rest);
    had_opposite.push_back(opposite);
  }
  if (!any) return 0;
  const std::vector<unsigned> round = elimination_rounds(reduced, f.num_vars());
  long h = 0;
  for (std::size_t c = 0; c < reduced.size(); ++c) {
    if (!had_opposite[c]) continue;
    if (round[c] == 0) return -1;
    h = std::max<long>(h, round[c]);
  }
  return h;
}

// Random k-CNF with exactly m clauses on distinct variables; independent of
// the library sampler.
inline Formula random_formula(std::mt19937_64& g, std::uint32_t n, std::size_t m, unsigned k) {
  std::vector<Clause> clauses;
  std::uniform_int_distribution<std::uint32_t> var(1, n);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < m; ++i) {
    std::set<std::uint32_t> vars;
    while (vars.size() < k) vars.insert(var(g));
    Clause c;
    for (std::uint32_t v : vars) c.push_back({v, coin(g) ? 1 : -1});
    clauses.push_back(c);
  }
  return Formula(k, n, clauses);
}

}  // namespace oracle
