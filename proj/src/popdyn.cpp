#include "rscavity/popdyn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rscavity/error.hpp"
#include "rscavity/parallel.hpp"
#include "rscavity/rng.hpp"

namespace rscavity {

namespace {

constexpr double kMessageCeil = 1.0 - 0x1.0p-53;

double clamp_message(double x) { return std::clamp(x, kMessageFloor, kMessageCeil); }

// Neumaier-compensated running sum.
class Sum {
 public:
  void add(double x) {
    const double t = s_ + x;
    c_ += std::fabs(s_) >= std::fabs(x) ? (s_ - t) + x : (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

double logaddexp(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void check_bp_args(const Population& pop, double d, unsigned k) {
  if (k < 2) throw InputError("k must be at least 2");
  if (!(d >= 0.0) || !std::isfinite(d)) throw InputError("density d must be finite and non-negative");
  const Support& s = pop.support();
  if (s.lo < 0.0 || s.hi > 1.0 || s.lo_closed || s.hi_closed) {
    throw InputError("BP populations must be supported in (0,1)");
  }
}

double mean_of(const std::vector<double>& v) {
  Sum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  Sum s;
  for (double x : v) s.add((x - mean) * (x - mean));
  return std::sqrt(s.value() / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

bool Support::contains(double x) const {
  if (std::isnan(x)) return false;
  if (x < lo || x > hi) return false;
  if (x == lo && !lo_closed) return false;
  if (x == hi && !hi_closed) return false;
  return true;
}

std::string Support::describe() const {
  std::ostringstream os;
  os << (lo_closed ? '[' : '(') << lo << ',' << hi << (hi_closed ? ']' : ')');
  return os.str();
}

Population::Population(std::vector<double> samples, Support support)
    : samples_(std::move(samples)), support_(support) {
  if (samples_.empty()) throw InputError("population must have at least one sample");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!support_.contains(samples_[i])) {
      std::ostringstream os;
      os << "sample " << i << " = " << samples_[i] << " outside support " << support_.describe();
      throw InputError(os.str());
    }
  }
}

Population Population::constant(std::size_t n, double value, Support support) {
  return Population(std::vector<double>(n, value), support);
}

double Population::mean() const { return mean_of(samples_); }

double Population::std_error() const { return std_error_of(samples_, mean()); }

Population bp_step(const Population& pop, double d, unsigned k, std::size_t n, std::uint64_t seed) {
  check_bp_args(pop, d, k);
  if (n == 0) throw InputError("population size must be positive");
  const std::vector<double>& src = pop.samples();
  const std::uint64_t m = src.size();
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    Stream rng(seed, "bp", i);
    const std::uint32_t dminus = rng.poisson(d / 2.0);
    const std::uint32_t dplus = rng.poisson(d / 2.0);
    auto log_messages = [&](std::uint32_t count) {
      double s = 0.0;
      for (std::uint32_t c = 0; c < count; ++c) {
        double prod = 1.0;
        for (unsigned j = 0; j + 1 < k; ++j) prod *= src[rng.below(m)];
        s += std::log1p(-prod);
      }
      return s;
    };
    const double s_minus = log_messages(dminus);
    const double s_plus = log_messages(dplus);
    out[i] = clamp_message(1.0 / (1.0 + std::exp(s_plus - s_minus)));
  });
  return Population(std::move(out), pop.support());
}

IterateResult iterate(double d, unsigned k, std::size_t n, unsigned iters, std::uint64_t seed) {
  Population pop = Population::constant(n, 0.5);
  std::vector<double> trace;
  trace.reserve(iters);
  for (unsigned t = 0; t < iters; ++t) {
    Population next = bp_step(pop, d, k, n, derive_seed(seed, "iterate", t));
    trace.push_back(w1(pop, next));
    pop = std::move(next);
  }
  return {std::move(pop), std::move(trace)};
}

BetheEstimate bethe_beta(const Population& pop, double d, unsigned k, double beta, std::size_t mc,
                         std::uint64_t seed) {
  check_bp_args(pop, d, k);
  if (!(beta > 0.0)) throw InputError("beta must be positive");
  if (mc == 0) throw InputError("need at least one Monte Carlo sample");
  const double c = std::isinf(beta) ? 1.0 : -std::expm1(-beta);
  const std::vector<double>& src = pop.samples();
  const std::uint64_t m = src.size();
  std::vector<double> var_term(mc), clause_term(mc);
  std::vector<std::uint8_t> degenerate(mc, 0);
  parallel_for(mc, [&](std::size_t i) {
    Stream rng(seed, "bethe", i);
    const std::uint32_t dminus = rng.poisson(d / 2.0);
    const std::uint32_t dplus = rng.poisson(d / 2.0);
    auto log_messages = [&](std::uint32_t count) {
      double s = 0.0;
      for (std::uint32_t a = 0; a < count; ++a) {
        double prod = 1.0;
        for (unsigned j = 0; j + 1 < k; ++j) prod *= src[rng.below(m)];
        s += std::log1p(-c * prod);
      }
      return s;
    };
    const double a = log_messages(dminus);
    const double b = log_messages(dplus);
    var_term[i] = logaddexp(a, b);
    double prod = 1.0;
    for (unsigned j = 0; j < k; ++j) prod *= src[rng.below(m)];
    const double ct = std::log1p(-c * prod);
    if (std::isfinite(ct)) {
      clause_term[i] = ct;
    } else {
      degenerate[i] = 1;
      clause_term[i] = std::log(kMessageFloor);
    }
  });
  BetheEstimate e;
  e.mc_samples = mc;
  e.coefficient = d * (k - 1) / k;
  std::vector<double> value(mc);
  for (std::size_t i = 0; i < mc; ++i) {
    value[i] = var_term[i] - e.coefficient * clause_term[i];
    e.degenerate += degenerate[i];
  }
  e.variable_term = mean_of(var_term);
  e.clause_term = mean_of(clause_term);
  e.value = mean_of(value);
  e.std_error = std_error_of(value, e.value);
  return e;
}

BetheEstimate bethe(const Population& pop, double d, unsigned k, std::size_t mc, std::uint64_t seed) {
  return bethe_beta(pop, d, k, std::numeric_limits<double>::infinity(), mc, seed);
}

FixedPointBethe bethe_of_fixed_point(double d, unsigned k, std::size_t n, unsigned iters, std::size_t mc,
                                     std::uint64_t seed) {
  IterateResult it = iterate(d, k, n, iters, derive_seed(seed, "fixed-point"));
  return {bethe(it.population, d, k, mc, derive_seed(seed, "fixed-point.bethe")), std::move(it.w1_trace)};
}

double w1(const std::vector<double>& a_in, const std::vector<double>& b_in) {
  if (a_in.empty() || b_in.empty()) throw InputError("W1 of an empty population");
  std::vector<double> a = a_in, b = b_in;
  for (double x : a) {
    if (std::isnan(x)) throw InputError("W1 of a population containing NaN");
  }
  for (double x : b) {
    if (std::isnan(x)) throw InputError("W1 of a population containing NaN");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  auto gap = [](double x, double y) { return x == y ? 0.0 : std::fabs(x - y); };
  Sum s;
  if (a.size() == b.size()) {
    for (std::size_t i = 0; i < a.size(); ++i) s.add(gap(a[i], b[i]));
    return s.value() / static_cast<double>(a.size());
  }
  // Quantile functions are step functions with jumps at i/na and j/nb;
  // integrate |Qa - Qb| piece by piece using exact integer breakpoints.
  const std::uint64_t na = a.size(), nb = b.size();
  const std::uint64_t total = na * nb;
  std::uint64_t pos = 0, i = 0, j = 0;
  while (pos < total) {
    const std::uint64_t next = std::min((i + 1) * nb, (j + 1) * na);
    s.add(gap(a[i], b[j]) * static_cast<double>(next - pos));
    pos = next;
    if (pos == (i + 1) * nb) ++i;
    if (pos == (j + 1) * na) ++j;
  }
  return s.value() / static_cast<double>(total);
}

double w1(const Population& a, const Population& b) { return w1(a.samples(), b.samples()); }

void write_population(std::ostream& out, const Population& pop) {
  for (double x : pop.samples()) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    unsigned char buf[8];
    for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(bits >> (8 * b));
    out.write(reinterpret_cast<const char*>(buf), 8);
  }
}

Population read_population(std::istream& in, Support support) {
  std::vector<double> samples;
  unsigned char buf[8];
  while (in.read(reinterpret_cast<char*>(buf), 8)) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
    samples.push_back(std::bit_cast<double>(bits));
  }
  if (in.gcount() != 0) throw InputError("population file length is not a multiple of 8 bytes");
  return Population(std::move(samples), support);
}

void write_population_file(const std::string& path, const Population& pop) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  write_population(out, pop);
  if (!out) throw InputError("write failed for " + path);
}

Population read_population_file(const std::string& path, Support support) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return read_population(in, support);
}

}  // namespace rscavity
