#pragma once

#include <cstdint>
#include <string_view>

namespace rscavity {

/// FNV-1a over a stream name; used to key substreams.
constexpr std::uint64_t stream_tag(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x);

/// Seed of the named child stream `(seed, name, index)`.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);

/// Counter-based random stream.
///
/// The key is a hash of (seed, name, i, j); the n-th output is a SplitMix64
/// finaliser applied to key + n * golden-gamma. Any two streams with
/// different keys are independent for practical purposes, so every sample,
/// clause or tree node draws from its own stream and results do not depend on
/// how work is split across threads.
///
/// Distribution samplers are fixed algorithms (no std:: distributions) so
/// sequences are identical on every platform with IEEE doubles.
class Stream {
 public:
  Stream(std::uint64_t seed, std::string_view name, std::uint64_t i = 0, std::uint64_t j = 0);

  std::uint64_t next();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// +1 or -1 with probability 1/2 each.
  int sign();
  /// Standard normal via Box-Muller (one value per two uniforms).
  double normal();
  /// Exponential with rate 1.
  double exponential();
  /// Poisson(mean): inversion below mean 30, PTRS transformed rejection above.
  std::uint32_t poisson(double mean);
  /// Poisson(mean) conditioned on being >= 1. mean must be positive.
  std::uint32_t poisson_positive(double mean);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rscavity
