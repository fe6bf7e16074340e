#include "hqsim/numerics.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

namespace hqsim {

namespace {

double j0_zero_newton(std::size_t n) {
  // McMahon asymptote as the starting point; J0' = -J1.
  const double beta = std::numbers::pi * (static_cast<double>(n) - 0.25);
  double x = beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta * beta * beta);
  for (int it = 0; it < 50; ++it) {
    const double f = std::cyl_bessel_j(0.0, x);
    const double df = -std::cyl_bessel_j(1.0, x);
    const double dx = f / df;
    x -= dx;
    if (std::abs(dx) <= 1e-15 * x) break;
  }
  return x;
}

std::mutex zero_mutex;
std::shared_ptr<const std::vector<double>> zero_table = std::make_shared<const std::vector<double>>();

std::atomic<unsigned> thread_default{1};

}  // namespace

std::shared_ptr<const std::vector<double>> bessel_j0_zeros(std::size_t count) {
  std::lock_guard lock(zero_mutex);
  if (zero_table->size() >= count) return zero_table;
  std::size_t target = std::max<std::size_t>(count, 2 * zero_table->size());
  target = std::max<std::size_t>(target, 256);
  auto grown = std::make_shared<std::vector<double>>(*zero_table);
  grown->reserve(target);
  for (std::size_t n = grown->size() + 1; n <= target; ++n) grown->push_back(j0_zero_newton(n));
  zero_table = std::move(grown);
  return zero_table;
}

double bessel_j0_zero(std::size_t n) { return (*bessel_j0_zeros(n))[n - 1]; }

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

unsigned default_threads() { return thread_default.load(); }

void set_default_threads(unsigned threads) { thread_default = threads == 0 ? 1 : threads; }

}  // namespace hqsim
