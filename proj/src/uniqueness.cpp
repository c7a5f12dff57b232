#include "rscavity/uniqueness.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

#include "rscavity/error.hpp"
#include "rscavity/parallel.hpp"
#include "rscavity/rng.hpp"
#include "rscavity/thresholds.hpp"

namespace rscavity {

namespace {

enum Type { kAll = 0, kPlus = 1, kMinus = 2, kFree = 3 };

// log Ξ(ε, r) for one clause whose k-1 children are drawn by type.
double log_xi(Stream& rng, const TypedTriplet& in, const std::array<double, 4>& cum, unsigned k, int eps) {
  std::array<unsigned, 4> r{};
  for (unsigned j = 0; j + 1 < k; ++j) {
    const double u = rng.uniform();
    unsigned t = 0;
    while (t < 3 && u >= cum[t]) ++t;
    ++r[t];
  }
  double l = -static_cast<double>(r[kFree]) * std::numbers::ln2;
  const Population* pops[3] = {&in.all, &in.plus, &in.minus};
  for (int t = 0; t < 3; ++t) {
    const std::vector<double>& src = pops[t]->samples();
    for (unsigned c = 0; c < r[t]; ++c) {
      l += log_logistic(ExtendedReal(eps * src[rng.below(src.size())]));
    }
  }
  if (l == 0.0) {
    if (eps > 0) return -std::numeric_limits<double>::infinity();
    throw InvariantError("typed operator: clause factor vanished on the negative side");
  }
  return std::log(-std::expm1(l));
}

std::vector<double> clip(const std::vector<double>& v, double m, std::size_t& truncated) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > m || v[i] < -m) ++truncated;
    out[i] = std::clamp(v[i], -m, m);
  }
  return out;
}

}  // namespace

NodeAssignment extremal_boundary(const GWTree& tree) {
  NodeAssignment tau(tree.nodes.size(), 0);
  tau[0] = 1;
  for (const GWNode& w : tree.nodes) {
    if (w.kind != NodeKind::variable || w.parent < 0) continue;
    const GWNode& a = tree.nodes[static_cast<std::size_t>(w.parent)];
    const std::size_t u = static_cast<std::size_t>(a.parent);
    tau[w.id] = static_cast<std::int8_t>(a.sign != tau[u] ? w.sign : -w.sign);
  }
  return tau;
}

EtaTable eta_tree(const GWTree& tree, BoundaryMode mode) {
  EtaTable t;
  t.tau = extremal_boundary(tree);
  t.eta.assign(tree.nodes.size(), ExtendedReal(0.0));
  ExtendedReal leaf(0.0);
  switch (mode.kind) {
    case BoundaryKind::plus_infinity: leaf = ExtendedReal::plus_infinity(); break;
    case BoundaryKind::truncated: leaf = ExtendedReal(mode.m); break;
    case BoundaryKind::zero: leaf = ExtendedReal(0.0); break;
  }
  std::vector<ExtendedReal> args;
  for (std::size_t id = tree.nodes.size(); id-- > 0;) {
    const GWNode& x = tree.nodes[id];
    if (x.kind != NodeKind::variable) continue;
    if (x.depth == tree.depth) {
      t.eta[id] = leaf;
      continue;
    }
    ExtendedReal sum(0.0);
    for (std::uint32_t a : x.children) {
      const GWNode& clause = tree.nodes[a];
      const int eps = t.tau[id] * clause.sign;
      args.clear();
      for (std::uint32_t y : clause.children) args.push_back(t.eta[y].times_sign(eps));
      sum += clause_summand(eps, log_gamma_fn(args));
    }
    t.eta[id] = sum;
  }
  return t;
}

TypedTriplet TypedTriplet::make(std::vector<double> all, std::vector<double> plus, std::vector<double> minus) {
  return {Population(std::move(all), all_support()), Population(std::move(plus), plus_support()),
          Population(std::move(minus), minus_support())};
}

std::array<double, 4> type_probabilities(double d) {
  if (!(d >= 0.0)) throw InputError("density d must be non-negative");
  const double q = std::exp(-d / 2.0);
  const double p = -std::expm1(-d / 2.0);
  return {p * p, q * p, q * p, q * q};
}

TypedTriplet ll_star_step(const TypedTriplet& in, double d, unsigned k, std::size_t n, std::uint64_t seed) {
  if (k < 2) throw InputError("k must be at least 2");
  if (!(d > 0.0)) throw InputError("the typed operator needs d > 0");
  if (n == 0) throw InputError("population size must be positive");
  const std::array<double, 4> p = type_probabilities(d);
  const std::array<double, 4> cum = {p[0], p[0] + p[1], p[0] + p[1] + p[2], 1.0};
  std::vector<double> all(n), plus(n), minus(n);
  parallel_for(n, [&](std::size_t i) {
    {
      Stream rng(seed, "llstar.all", i);
      const std::uint32_t dp = rng.poisson_positive(d / 2.0);
      const std::uint32_t dm = rng.poisson_positive(d / 2.0);
      double s = 0.0;
      for (std::uint32_t c = 0; c < dp; ++c) s -= log_xi(rng, in, cum, k, +1);
      for (std::uint32_t c = 0; c < dm; ++c) s += log_xi(rng, in, cum, k, -1);
      all[i] = s;
    }
    {
      Stream rng(seed, "llstar.plus", i);
      const std::uint32_t dp = rng.poisson_positive(d / 2.0);
      double s = 0.0;
      for (std::uint32_t c = 0; c < dp; ++c) s -= log_xi(rng, in, cum, k, +1);
      plus[i] = std::max(s, DBL_MIN);
    }
    {
      Stream rng(seed, "llstar.minus", i);
      const std::uint32_t dm = rng.poisson_positive(d / 2.0);
      double s = 0.0;
      for (std::uint32_t c = 0; c < dm; ++c) s += log_xi(rng, in, cum, k, -1);
      minus[i] = std::min(s, -DBL_MIN);
    }
  });
  return TypedTriplet::make(std::move(all), std::move(plus), std::move(minus));
}

Population ll_plus_step(const Population& in, double d, unsigned k, std::size_t n, std::uint64_t seed) {
  if (k < 2) throw InputError("k must be at least 2");
  if (!(d >= 0.0)) throw InputError("density d must be non-negative");
  if (n == 0) throw InputError("population size must be positive");
  const std::vector<double>& src = in.samples();
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    Stream rng(seed, "llplus", i);
    const std::uint32_t count = rng.poisson(d);
    ExtendedReal s(0.0);
    for (std::uint32_t c = 0; c < count; ++c) {
      const int sign = rng.sign();
      double lg = 0.0;
      for (unsigned j = 0; j + 1 < k; ++j) lg += log_logistic(ExtendedReal(sign * src[rng.below(src.size())]));
      s += clause_summand(sign, lg);
    }
    out[i] = s.value();
  });
  return Population(std::move(out), TypedTriplet::all_support());
}

DistResult dist_metric(const TypedTriplet& a, const TypedTriplet& b, double t, double m) {
  if (!(t >= 0.0)) throw InputError("dist_t needs t >= 0");
  if (!(m > 0.0)) throw InputError("truncation level must be positive");
  DistResult r;
  const double q = std::exp(-t / 2.0);
  r.weights = {-std::expm1(-t / 2.0), q, q};
  const Population* pa[3] = {&a.all, &a.plus, &a.minus};
  const Population* pb[3] = {&b.all, &b.plus, &b.minus};
  for (int c = 0; c < 3; ++c) {
    if (pa[c]->size() != pb[c]->size()) throw InputError("dist_t needs matching population sizes per coordinate");
    r.components[c] = w1(clip(pa[c]->samples(), m, r.truncated), clip(pb[c]->samples(), m, r.truncated));
    r.value += r.weights[c] * r.components[c];
  }
  return r;
}

ContractionEstimate contraction_estimate(double d, unsigned k, std::size_t n, std::size_t trials,
                                         std::uint64_t seed, double m) {
  if (!(d > 0.0)) throw InputError("contraction estimate needs d > 0");
  if (n == 0 || trials == 0) throw InputError("need positive population size and trial count");
  ContractionEstimate e;
  e.constant = contraction_constant(d, k);
  auto random_triplet = [&](std::size_t trial, std::uint64_t member) {
    Stream rng(seed, "contraction.input", trial, member);
    const double all_shift = -3.0 + 4.0 * rng.uniform();
    const double plus_shift = 0.01 + rng.uniform();
    const double minus_shift = 0.01 + rng.uniform();
    const double scale[3] = {0.2 + 2.8 * rng.uniform(), 0.2 + 2.8 * rng.uniform(), 0.2 + 2.8 * rng.uniform()};
    std::vector<double> all(n), plus(n), minus(n);
    for (std::size_t i = 0; i < n; ++i) {
      all[i] = all_shift + scale[0] * rng.exponential();
      plus[i] = plus_shift + scale[1] * rng.exponential();
      minus[i] = -(minus_shift + scale[2] * rng.exponential());
    }
    std::sort(all.begin(), all.end());
    std::sort(plus.begin(), plus.end());
    std::sort(minus.begin(), minus.end());
    return TypedTriplet::make(std::move(all), std::move(plus), std::move(minus));
  };
  double sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const TypedTriplet a = random_triplet(t, 0);
    const TypedTriplet b = random_triplet(t, 1);
    const double din = dist_metric(a, b, d, m).value;
    if (!(din > 0.0)) {
      ++e.skipped;
      continue;
    }
    const std::uint64_t step_seed = derive_seed(seed, "contraction.step", t);
    const double dout = dist_metric(ll_star_step(a, d, k, n, step_seed), ll_star_step(b, d, k, n, step_seed), d, m).value;
    const double ratio = dout / din;
    e.ratios.push_back(ratio);
    e.max_ratio = std::max(e.max_ratio, ratio);
    sum += ratio;
  }
  e.trials = e.ratios.size();
  e.mean_ratio = e.trials ? sum / static_cast<double>(e.trials) : 0.0;
  return e;
}

PsiPhi psi_phi(double lambda, double w) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw InputError("lambda must lie in (0,1]");
  if (!(w >= 0.0 && w <= 1.0)) throw InputError("w must lie in [0,1]");
  auto psi = [lambda](double x) {
    if (lambda == 1.0) return x;  // λx(1-x)/(1-x) = x, including x = 1
    return lambda * x / (1.0 - lambda * x) * (1.0 - x);
  };
  return {psi(w), psi(w) + psi(1.0 - w), (lambda / 2.0) / (1.0 - lambda / 2.0)};
}

std::vector<GapStats> boundary_influence_experiment(double d, unsigned k, unsigned max_depth, std::size_t trials,
                                                    std::uint64_t seed) {
  if (trials == 0) throw InputError("need at least one trial");
  if (max_depth == 0) throw InputError("need max depth >= 1");
  std::vector<std::vector<double>> gaps(max_depth, std::vector<double>(trials));
  parallel_for(trials, [&](std::size_t t) {
    const std::uint64_t tree_seed = derive_seed(seed, "boundary-gap", t);
    for (unsigned l = 1; l <= max_depth; ++l) {
      const GWTree tree = sample_gw_tree(d, k, l, tree_seed);
      const double conditioned = eta_tree(tree, BoundaryMode::plus_infinity()).root_marginal();
      const double free = eta_tree(tree, BoundaryMode::zero()).root_marginal();
      gaps[l - 1][t] = conditioned - free;
    }
  });
  std::vector<GapStats> out;
  for (unsigned l = 1; l <= max_depth; ++l) {
    std::vector<double> g = gaps[l - 1];
    GapStats s;
    s.depth = l;
    double sum = 0.0;
    for (double x : g) {
      sum += x;
      s.negative += x < -1e-12;
    }
    s.mean = sum / static_cast<double>(trials);
    double ss = 0.0;
    for (double x : g) ss += (x - s.mean) * (x - s.mean);
    s.std_error = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials)) : 0.0;
    std::sort(g.begin(), g.end());
    s.min = g.front();
    const auto idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(trials))) - 1;
    s.q95 = g[std::min(idx, trials - 1)];
    out.push_back(s);
  }
  return out;
}

}  // namespace rscavity
