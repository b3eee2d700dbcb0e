#include "mmdelay/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmdelay/errors.hpp"

namespace mmdelay {
namespace {

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double lo;
  double hi;
  double value;
  double error;

  bool operator<(const Interval& other) const { return error < other.error; }
};

Interval gauss_kronrod(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (max_subdivisions < 1) throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
  if (!(abs_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: abs_tol must be positive");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: rel_tol must be positive");
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints,
                                    const QuadratureSpec& spec) {
  spec.validate();
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate_adaptive: need at least two breakpoints");

  std::priority_queue<Interval> heap;
  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) {
      throw std::invalid_argument("integrate_adaptive: breakpoints must be strictly increasing");
    }
    Interval piece = gauss_kronrod(f, breakpoints[i], breakpoints[i + 1]);
    total += piece.value;
    total_error += piece.error;
    heap.push(piece);
  }

  int subdivisions = 0;
  for (;;) {
    if (!std::isfinite(total) || !std::isfinite(total_error)) {
      throw EvaluationError("integrate_adaptive: integrand produced a non-finite value", heap.top().hi - heap.top().lo);
    }
    if (total_error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) break;
    const Interval worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (subdivisions >= spec.max_subdivisions || !(worst.lo < mid && mid < worst.hi)) {
      throw EvaluationError("integrate_adaptive: no convergence after " + std::to_string(subdivisions) +
                                " subdivisions (error " + std::to_string(total_error) + ")",
                            worst.hi - worst.lo);
    }
    heap.pop();
    const Interval left = gauss_kronrod(f, worst.lo, mid);
    const Interval right = gauss_kronrod(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }

  // Re-sum to shed the drift from incremental updates.
  double value = 0.0;
  double error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error, subdivisions};
}

}  // namespace mmdelay
