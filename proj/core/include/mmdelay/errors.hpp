#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mmdelay {

/// A numerical routine (quadrature, series, truncated sum) failed to reach
/// its requested accuracy within its work limit.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double last_width)
      : std::runtime_error(what), last_width_(last_width) {}

  /// Width of the last bracket (interval, or remaining tail) that failed to
  /// converge.
  double last_width() const noexcept { return last_width_; }

 private:
  double last_width_;
};

/// No parameter in the admissible range satisfies the stability condition
/// (arrival MGF times service MGF below one).
class StabilityError : public std::runtime_error {
 public:
  StabilityError(const std::string& what, double tightest_utilization,
                 std::optional<std::size_t> path = std::nullopt)
      : std::runtime_error(what),
        tightest_utilization_(tightest_utilization),
        path_(path) {}

  double tightest_utilization() const noexcept { return tightest_utilization_; }
  std::optional<std::size_t> path() const noexcept { return path_; }

 private:
  double tightest_utilization_;
  std::optional<std::size_t> path_;
};

/// The delay target cannot be met: the arrival rate is at or beyond the
/// service capability, or the required delay exceeds the configured cap.
class DivergenceError : public StabilityError {
 public:
  using StabilityError::StabilityError;
};

/// A simulation plan is inconsistent with the requested measurement.
class PlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mmdelay
