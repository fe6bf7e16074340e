#pragma once

#include <stdexcept>
#include <string>

namespace hqsim {

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Field or response evaluated where the lossless model is singular.
struct SingularityError : std::domain_error {
  using std::domain_error::domain_error;
};

struct DivergenceError : std::domain_error {
  using std::domain_error::domain_error;
};

struct NoResonanceError : std::runtime_error {
  NoResonanceError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), ratio_min(lo), ratio_max(hi) {}
  double ratio_min;
  double ratio_max;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotImplementedError : std::logic_error {
  using std::logic_error::logic_error;
};

struct StiffnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceDriftError : std::runtime_error {
  TraceDriftError(const std::string& what, double t, double drift)
      : std::runtime_error(what), time_ps(t), trace_drift(drift) {}
  double time_ps;
  double trace_drift;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hqsim
