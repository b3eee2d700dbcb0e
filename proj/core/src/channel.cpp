#include "mmdelay/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mmdelay/errors.hpp"
#include "mmdelay/specfun.hpp"

namespace mmdelay {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double eta_from_bandwidth(double bandwidth_mhz, double slot_s) {
  return bandwidth_mhz * 1e-3 * std::numbers::log2e * slot_s;
}

FadingLink FadingLink::from_db(double gamma_db, double distance_m, double alpha, double nakagami_m,
                               double bandwidth_mhz, double slot_s) {
  FadingLink link{db_to_linear(gamma_db), distance_m, alpha, nakagami_m,
                  eta_from_bandwidth(bandwidth_mhz, slot_s)};
  link.validate();
  return link;
}

void FadingLink::validate() const {
  if (!(gamma_lin > 0.0) || !std::isfinite(gamma_lin)) throw std::invalid_argument("link: power must be positive");
  if (!(distance_m > 0.0)) throw std::invalid_argument("link: distance must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("link: path-loss exponent must be positive");
  if (!(nakagami_m >= 0.5)) throw std::invalid_argument("link: Nakagami M must be at least 0.5");
  if (!(eta > 0.0)) throw std::invalid_argument("link: eta must be positive");
}

FadingLink LinkParams::make(double gamma_lin, double distance_m) const {
  FadingLink link{gamma_lin, distance_m, alpha, nakagami_m, eta_from_bandwidth(bandwidth_mhz, slot_s)};
  link.validate();
  return link;
}

double FadingLink::mean_snr() const { return gamma_lin * std::pow(distance_m, -alpha); }

double FadingLink::kummer_argument() const { return nakagami_m / mean_snr(); }

double capacity_from_gain(const FadingLink& link, double xi) { return link.eta * std::log1p(xi * link.mean_snr()); }

double capacity_sample(const FadingLink& link, RandomSource& rng) {
  return capacity_from_gain(link, gamma_sample(link.nakagami_m, 1.0 / link.nakagami_m, rng));
}

double log_service_mgf_decay(const FadingLink& link, double x, const QuadratureSpec& quad) {
  if (!(x >= 0.0)) throw std::invalid_argument("service_mgf_decay: x must be non-negative");
  if (x == 0.0) return 0.0;
  const double m = link.nakagami_m;
  const double z = link.kummer_argument();
  return m * std::log(z) + log_kummer_u(m, 1.0 + m - x, z, quad);
}

double service_mgf_decay(const FadingLink& link, double x, const QuadratureSpec& quad) {
  if (x == 0.0) return 1.0;
  return std::exp(log_service_mgf_decay(link, x, quad));
}

ServiceMgfFactor service_mgf_factor(const FadingLink& link, double theta, const QuadratureSpec& quad) {
  return {service_mgf_decay(link, link.eta * theta, quad), theta};
}

namespace {

// Integrates f(s) * gamma_pdf(s; M, 1/M) over (0, inf). Panels are cut at
// s = 1 and s = 1/r so both the density bulk and the (1 + r s) knee land on
// panel edges.
template <class F>
double gamma_expectation(const FadingLink& link, F&& f, double rel_tol) {
  const double m = link.nakagami_m;
  const double log_norm = m * std::log(m) - boost::math::lgamma(m);
  auto integrand = [&](double s) -> double {
    if (s <= 0.0) return 0.0;
    const double density = std::exp(log_norm + (m - 1.0) * std::log(s) - m * s);
    return density == 0.0 ? 0.0 : f(s) * density;
  };

  std::vector<double> cuts = {0.0, 1.0, 1.0 / link.mean_snr()};
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  boost::math::quadrature::tanh_sinh<double> finite;
  boost::math::quadrature::exp_sinh<double> tail;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += finite.integrate(integrand, cuts[i], cuts[i + 1], rel_tol);
  total += tail.integrate(integrand, cuts.back(), std::numeric_limits<double>::infinity(), rel_tol);
  return total;
}

}  // namespace

double mgf_oracle(const FadingLink& link, double x, const QuadratureSpec& quad) {
  if (!(x >= 0.0)) throw std::invalid_argument("mgf_oracle: x must be non-negative");
  if (x == 0.0) return 1.0;
  const double r = link.mean_snr();
  // Factor out (1 + r)^{-x} so the tolerance applies to an O(1) quantity.
  const double pivot = std::log1p(r);
  const double scaled = gamma_expectation(
      link, [&](double s) { return std::exp(-x * (std::log1p(r * s) - pivot)); }, std::min(quad.rel_tol, 1e-10));
  if (!(scaled > 0.0) || !std::isfinite(scaled)) throw EvaluationError("mgf_oracle: quadrature failed", 0.0);
  return std::exp(-x * pivot) * scaled;
}

double mean_capacity(const FadingLink& link) {
  const double r = link.mean_snr();
  return link.eta * gamma_expectation(link, [&](double s) { return std::log1p(r * s); }, 1e-12);
}

double uniform_open(RandomSource& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

double standard_normal(RandomSource& rng) {
  for (;;) {
    const double u = 2.0 * uniform_open(rng) - 1.0;
    const double v = 2.0 * uniform_open(rng) - 1.0;
    const double s = u * u + v * v;
    if (s < 1.0 && s > 0.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double gamma_sample(double shape, double scale, RandomSource& rng) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw std::invalid_argument("gamma_sample: shape and scale must be positive");
  if (shape < 1.0) {
    const double boosted = gamma_sample(shape + 1.0, scale, rng);
    return boosted * std::pow(uniform_open(rng), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

}  // namespace mmdelay
