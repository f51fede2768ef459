#pragma once

#include <stdexcept>
#include <string>

namespace prc {

// Bad experiment configuration: unknown key, unparseable value, failed
// validation. The CLI maps this to exit code 3.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The damped fixed-point solve ran out of iterations. Carries enough context
// to tell a slow solve from a diverging one. The CLI maps this to exit 2.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations(iterations), residual(residual) {}

  int iterations;
  double residual;
};

// A batch whose raw outputs (or targets) have zero spread cannot be
// standardized.
class DegenerateBatchError : public std::runtime_error {
 public:
  explicit DegenerateBatchError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace prc
