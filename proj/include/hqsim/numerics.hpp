#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace hqsim {

// Positive zeros of J0, ascending. The returned snapshot holds at least
// `count` zeros and stays valid while the shared cache grows.
std::shared_ptr<const std::vector<double>> bessel_j0_zeros(std::size_t count);

// n-th zero (1-based).
double bessel_j0_zero(std::size_t n);

// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be
// written to per-index storage by the caller; ordering is thus deterministic.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

// Global default worker count used by sweeps (set by the CLI --threads flag).
unsigned default_threads();
void set_default_threads(unsigned threads);

}  // namespace hqsim
