#pragma once

// Nakagami-m mm-wave link: per-slot capacity, its sampling, the fading-
// averaged service MGF decay factor U_C(x), and an independent oracle for it.

#include <random>

#include "mmdelay/quadrature.hpp"

namespace mmdelay {

/// Per-thread random engine. Callers own one each; nothing here is shared.
using RandomSource = std::mt19937_64;

/// One hop. Rates are in Gbit per slot, distances in meters.
struct FadingLink {
  double gamma_lin = 1.0;   // transmit power over noise, linear
  double distance_m = 1.0;
  double alpha = 2.0;       // path-loss exponent
  double nakagami_m = 1.0;  // Nakagami M, >= 0.5
  double eta = 1.0;         // B * log2(e) * slot, Gbit per slot

  /// Build from dB power and a bandwidth in MHz; `slot_s` scales eta.
  static FadingLink from_db(double gamma_db, double distance_m, double alpha, double nakagami_m,
                            double bandwidth_mhz, double slot_s = 1.0);

  /// Throws std::invalid_argument when a field is outside its domain.
  void validate() const;

  /// Mean received SNR r = gamma * l^{-alpha}.
  double mean_snr() const;
  /// Kummer argument M l^alpha / gamma = M / r.
  double kummer_argument() const;
};

/// Shared radio parameters; every hop of a homogeneous layout uses one set.
struct LinkParams {
  double alpha = 2.45;
  double nakagami_m = 3.0;
  double bandwidth_mhz = 500.0;
  double slot_s = 1.0;

  FadingLink make(double gamma_lin, double distance_m) const;
};

double db_to_linear(double db);
/// eta = B log2(e) * slot in Gbit per slot for a bandwidth in MHz.
double eta_from_bandwidth(double bandwidth_mhz, double slot_s = 1.0);

/// U_C evaluated at x = eta * theta; value in (0, 1].
struct ServiceMgfFactor {
  double value = 1.0;
  double theta = 0.0;
};

/// eta * ln(1 + xi * r) for a given power gain xi.
double capacity_from_gain(const FadingLink& link, double xi);

/// Draws xi ~ Gamma(M, 1/M) and returns the slot capacity.
double capacity_sample(const FadingLink& link, RandomSource& rng);

/// U_C(x) = (M l^a / g)^M U(M, 1 + M - x, M l^a / g) = E[(1 + xi r)^{-x}].
/// Exactly 1 at x = 0.
double service_mgf_decay(const FadingLink& link, double x, const QuadratureSpec& quad = {});
double log_service_mgf_decay(const FadingLink& link, double x, const QuadratureSpec& quad = {});

/// U_C(eta * theta) tagged with its theta.
ServiceMgfFactor service_mgf_factor(const FadingLink& link, double theta, const QuadratureSpec& quad = {});

/// E[(1 + xi r)^{-x}] by direct quadrature over the gamma density, with no
/// use of Kummer U. Meant as a cross-check of service_mgf_decay. The
/// QuadratureSpec supplies the relative tolerance only.
double mgf_oracle(const FadingLink& link, double x, const QuadratureSpec& quad = {});

/// E[capacity] by direct quadrature over the gamma density.
double mean_capacity(const FadingLink& link);

/// Uniform on the open interval (0, 1), 53-bit resolution.
double uniform_open(RandomSource& rng);
/// Standard normal (Marsaglia polar; the second variate is discarded).
double standard_normal(RandomSource& rng);
/// Gamma(shape, scale) by Marsaglia-Tsang; shape < 1 via the U^{1/a} boost.
double gamma_sample(double shape, double scale, RandomSource& rng);

}  // namespace mmdelay
