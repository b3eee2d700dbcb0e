#include "mmdelay/effcap.hpp"

#include <cmath>
#include <stdexcept>

namespace mmdelay {
namespace {

void check_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw std::invalid_argument("effective capacity: theta must be positive");
}

}  // namespace

double link_effcap(const FadingLink& link, double theta, const QuadratureSpec& quad) {
  check_theta(theta);
  return -log_service_mgf_decay(link, link.eta * theta, quad) / theta;
}

double dispersion_effcap(const std::vector<double>& split, double gamma_total, double distance_m, double theta,
                         const LinkParams& params, const QuadratureSpec& quad) {
  check_theta(theta);
  if (split.empty()) throw std::invalid_argument("dispersion_effcap: empty split");
  double total = 0.0;
  for (double s : split) {
    if (!(s >= 0.0)) throw std::invalid_argument("dispersion_effcap: negative power fraction");
    total += s;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("dispersion_effcap: split must sum to 1");

  double capacity = 0.0;
  for (double s : split) {
    if (s == 0.0) continue;  // no power, no service
    capacity += link_effcap(params.make(s * gamma_total, distance_m), theta, quad);
  }
  return capacity;
}

double dispersion_effcap_max(int m, double gamma_total, double distance_m, double theta, const LinkParams& params,
                             const QuadratureSpec& quad) {
  if (m < 1) throw std::invalid_argument("dispersion_effcap_max: m must be positive");
  check_theta(theta);
  const FadingLink link = params.make(gamma_total / m, distance_m);
  return -static_cast<double>(m) / theta * log_service_mgf_decay(link, link.eta * theta, quad);
}

EffCapBounds densification_effcap_bounds(int k, double gamma_total, double distance_m, double theta,
                                         const LinkParams& params, const QuadratureSpec& quad) {
  if (k < 1) throw std::invalid_argument("densification_effcap_bounds: k must be positive");
  return hybrid_effcap_bounds(k, 1, gamma_total, distance_m, theta, params, quad);
}

EffCapBounds hybrid_effcap_bounds(int n, int m, double gamma_total, double distance_m, double theta,
                                  const LinkParams& params, const QuadratureSpec& quad) {
  if (n < 1 || m < 1 || n % m != 0) throw std::invalid_argument("hybrid_effcap_bounds: m must divide n");
  check_theta(theta);
  const int k = n / m;
  const FadingLink hop = params.make(gamma_total / n, distance_m * m / n);
  const double x = hop.eta * theta;
  EffCapBounds out;
  out.upper = -static_cast<double>(n) / theta * log_service_mgf_decay(hop, x / k, quad);
  out.lower = k == 1 ? out.upper : -static_cast<double>(m) / theta * log_service_mgf_decay(hop, x, quad);
  return out;
}

double effective_bandwidth(const ArrivalSpec& arrival, double theta) {
  check_theta(theta);
  arrival.validate();
  return arrival.rate;
}

bool admissible(const ArrivalSpec& arrival, double theta, double effective_capacity) {
  return effective_bandwidth(arrival, theta) <= effective_capacity;
}

std::vector<int> divisors(int n) {
  if (n < 1) throw std::invalid_argument("divisors: n must be positive");
  std::vector<int> out;
  for (int d = 1; d <= n; ++d) {
    if (n % d == 0) out.push_back(d);
  }
  return out;
}

PathCountScan scan_path_count(int n, double gamma_total, double distance_m, double theta, const LinkParams& params,
                              const QuadratureSpec& quad) {
  PathCountScan scan;
  for (int m : divisors(n)) {
    scan.points.push_back({m, hybrid_effcap_bounds(n, m, gamma_total, distance_m, theta, params, quad)});
  }
  double best_lower = -INFINITY;
  double best_upper = -INFINITY;
  for (const PathCountPoint& p : scan.points) {
    if (p.bounds.lower > best_lower) {
      best_lower = p.bounds.lower;
      scan.argmax_lower = p.m;
    }
    if (p.bounds.upper > best_upper) {
      best_upper = p.bounds.upper;
      scan.argmax_upper = p.m;
    }
  }
  return scan;
}

}  // namespace mmdelay
