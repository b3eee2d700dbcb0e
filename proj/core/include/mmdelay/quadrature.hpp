#pragma once

#include <functional>
#include <span>

namespace mmdelay {

/// Accuracy and work limits for adaptive quadrature. Convergence is declared
/// once the summed error estimate drops below max(abs_tol, rel_tol * |I|).
struct QuadratureSpec {
  int max_subdivisions = 4000;
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over the finite
/// partition given by `breakpoints` (strictly increasing, at least two
/// points). The worst interval is bisected until the error criterion holds.
///
/// Throws EvaluationError (carrying the width of the worst remaining
/// interval) when max_subdivisions is exhausted.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints,
                                    const QuadratureSpec& spec);

}  // namespace mmdelay
