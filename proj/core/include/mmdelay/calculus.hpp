#pragma once

// MGF machinery shared by every topology: arrival factors, geometric and
// composition tail sums, and the infimum over the free parameter theta.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace mmdelay {

enum class ArrivalKind { deterministic, stochastic_dependent };

/// Constant-rate fluid arrival, optionally split across parallel paths.
struct ArrivalSpec {
  double rate = 1.0;               // Gbit per slot
  std::vector<double> splitting;   // empty: a single unsplit stream
  ArrivalKind kind = ArrivalKind::deterministic;

  void validate() const;
  /// Rate fraction carried by stream i (1 when unsplit).
  double share(std::size_t stream) const;
};

/// e^{theta rho}, or e^{theta z_i rho} for one stream of a split arrival.
double arrival_mgf_factor(const ArrivalSpec& arrival, double theta,
                          std::optional<std::size_t> stream = std::nullopt);

/// sum_{v >= tau} x^v = x^tau / (1 - x). StabilityError for x >= 1.
double geometric_tail(double x, std::uint64_t tau);

/// log of sum_{v >= w} h_v(x_1..x_k), h_v the complete homogeneous symmetric
/// polynomial. Built by a per-hop convolution DP over v, scaled by max x_i.
/// The sum stops once the binomial majorant of the remaining tail is below
/// `tol` times the partial sum.
///
/// StabilityError when some x_i >= 1; EvaluationError past `max_terms`.
double log_composition_tail_sum(std::span<const double> xs, std::uint64_t w, double tol = 1e-12,
                                std::uint64_t max_terms = 50'000'000);
double composition_tail_sum(std::span<const double> xs, std::uint64_t w, double tol = 1e-12,
                            std::uint64_t max_terms = 50'000'000);

struct ThetaSearchSpec {
  double theta_min = 1e-3;
  double theta_max = 1e2;
  int grid_points = 64;
  int refine_iters = 40;

  void validate() const;
};

/// One evaluation of a theta objective. The probe is stable when
/// utilization < 1; `value` is ignored otherwise.
struct ThetaProbe {
  double value = 0.0;
  double utilization = 0.0;
};

struct ThetaOptimum {
  double theta_star = 0.0;
  double value = 1.0;        // min(best probe, 1)
  double utilization = 0.0;  // at theta_star
};

/// Log-grid scan over [theta_min, theta_max], then golden-section
/// refinement in log theta around the best stable grid point. Ties go to
/// the smallest theta. StabilityError (tightest utilization seen) when no
/// probe is stable.
ThetaOptimum infimum_over_theta(const std::function<ThetaProbe(double)>& objective,
                                const ThetaSearchSpec& spec = {});

}  // namespace mmdelay
