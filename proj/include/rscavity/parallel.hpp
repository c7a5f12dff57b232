#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace rscavity {

/// Worker count used by parallel_for. Defaults to the hardware concurrency,
/// capped by the RSCAVITY_THREADS environment variable when set.
std::size_t max_threads();

/// Overrides the worker count; 0 restores the default.
void set_max_threads(std::size_t threads);

namespace detail {
void run_parallel(std::size_t n, const std::function<void(std::size_t, std::size_t)>& chunk);
}

/// Calls body(i) for every i in [0, n). Each index must write only its own
/// output slot; results then do not depend on the thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  detail::run_parallel(n, [&body](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) body(i);
  });
}

}  // namespace rscavity
