#pragma once

// Effective capacity C(-theta) of the three layouts: exact for dispersion,
// lower/upper sandwiches for densification and hybrid, and the path-count
// scan over divisors of n.

#include <vector>

#include "mmdelay/calculus.hpp"
#include "mmdelay/channel.hpp"
#include "mmdelay/quadrature.hpp"

namespace mmdelay {

struct EffCapBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// -(1/theta) ln U_C(eta theta) for one link.
double link_effcap(const FadingLink& link, double theta, const QuadratureSpec& quad = {});

/// Sum over paths of the link effective capacity, path i getting power
/// split[i] * gamma_total at distance L. `split` must sum to 1; zero entries
/// are unused paths.
double dispersion_effcap(const std::vector<double>& split, double gamma_total, double distance_m, double theta,
                         const LinkParams& params, const QuadratureSpec& quad = {});

/// -(m/theta) ln U_C with power gamma/m per path: the equal-split optimum.
double dispersion_effcap_max(int m, double gamma_total, double distance_m, double theta, const LinkParams& params,
                             const QuadratureSpec& quad = {});

/// k hops with gamma/k and L/k each:
///   upper -(k/theta) ln U_C(eta theta / k),  lower -(1/theta) ln U_C(eta theta).
EffCapBounds densification_effcap_bounds(int k, double gamma_total, double distance_m, double theta,
                                         const LinkParams& params, const QuadratureSpec& quad = {});

/// m paths of k = n/m hops, each hop gamma/n at distance mL/n:
///   upper -(n/theta) ln U_C(eta theta / k),  lower -(m/theta) ln U_C(eta theta).
EffCapBounds hybrid_effcap_bounds(int n, int m, double gamma_total, double distance_m, double theta,
                                  const LinkParams& params, const QuadratureSpec& quad = {});

/// Constant-rate arrivals have R(theta) = rho at every theta.
double effective_bandwidth(const ArrivalSpec& arrival, double theta);

/// R(theta) <= C(-theta).
bool admissible(const ArrivalSpec& arrival, double theta, double effective_capacity);

std::vector<int> divisors(int n);

struct PathCountPoint {
  int m = 1;
  EffCapBounds bounds;
};

struct PathCountScan {
  std::vector<PathCountPoint> points;  // ascending m over divisors of n
  int argmax_lower = 1;                // ties go to the smaller m
  int argmax_upper = 1;
};

PathCountScan scan_path_count(int n, double gamma_total, double distance_m, double theta, const LinkParams& params,
                              const QuadratureSpec& quad = {});

}  // namespace mmdelay
