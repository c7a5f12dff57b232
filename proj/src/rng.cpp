#include "rscavity/rng.hpp"

#include <cmath>
#include <numbers>

namespace rscavity {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
constexpr double kPoissonInversionLimit = 30.0;

// Hormann's PTRS, as in numpy's legacy generator.
std::uint32_t poisson_ptrs(Stream& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint32_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint32_t>(k);
    }
  }
}

// Inversion of the Poisson cdf starting from `target` in (0, 1).
std::uint32_t poisson_invert(double mean, double target) {
  double p = std::exp(-mean);
  double cdf = p;
  std::uint32_t k = 0;
  while (target > cdf) {
    ++k;
    p *= mean / k;
    cdf += p;
    if (p == 0.0 && k > mean) break;  // cdf rounding stalled short of target
  }
  return k;
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view name, std::uint64_t index) {
  return mix64(mix64(seed ^ stream_tag(name)) + kGamma * (index + 1));
}

Stream::Stream(std::uint64_t seed, std::string_view name, std::uint64_t i, std::uint64_t j) {
  std::uint64_t k = mix64(seed + kGamma);
  k = mix64(k ^ stream_tag(name));
  k = mix64(k + kGamma * (i + 1));
  k = mix64(k ^ (0xd1b54a32d192ed03ULL * (j + 1)));
  key_ = k;
}

std::uint64_t Stream::next() {
  ++counter_;
  return mix64(key_ + kGamma * counter_);
}

double Stream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Stream::uniform_open() {
  return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t Stream::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection; unbiased.
  std::uint64_t x = next();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = next();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

int Stream::sign() { return (next() >> 63) ? 1 : -1; }

double Stream::normal() {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Stream::exponential() { return -std::log(uniform_open()); }

std::uint32_t Stream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean >= kPoissonInversionLimit) return poisson_ptrs(*this, mean);
  return poisson_invert(mean, uniform());
}

std::uint32_t Stream::poisson_positive(double mean) {
  if (mean >= kPoissonInversionLimit) {
    for (;;) {
      const std::uint32_t k = poisson_ptrs(*this, mean);
      if (k > 0) return k;
    }
  }
  // Invert the conditional cdf: F(k | k >= 1) = (F(k) - F(0)) / (1 - F(0)).
  const double p0 = std::exp(-mean);
  const double target = p0 - std::expm1(-mean) * uniform_open();
  const std::uint32_t k = poisson_invert(mean, target);
  return k == 0 ? 1 : k;
}

}  // namespace rscavity
