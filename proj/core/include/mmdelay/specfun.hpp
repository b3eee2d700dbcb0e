#pragma once

// Special-function kernel: confluent hypergeometric U, the 2F1(1, b; c; z)
// series, log-gamma, binomial coefficients and rising factorials.
//
// Every function here is pure and safe to call concurrently.

#include <cstdint>

#include "mmdelay/quadrature.hpp"

namespace mmdelay {

/// Kummer's confluent hypergeometric function of the second kind,
///
///   U(a, b, z) = 1/Gamma(a) * int_0^inf e^{-z t} t^{a-1} (1+t)^{b-a-1} dt,
///
/// for a > 0, z > 0. Evaluated by adaptive quadrature after the scaling
/// t = u / z, with geometric breakpoints that resolve both the e^{-u} decay
/// and the (1 + u/z) transition when z is small.
///
/// Throws std::invalid_argument outside the domain and EvaluationError when
/// the quadrature does not converge.
double kummer_u(double a, double b, double z, const QuadratureSpec& quad = {});

/// Natural log of kummer_u; avoids overflow for very small z.
double log_kummer_u(double a, double b, double z, const QuadratureSpec& quad = {});

/// Gauss hypergeometric 2F1(1, b; c; z) = sum_n (b)_n / (c)_n z^n for
/// 0 <= z < 1. The sum stops once the geometric tail estimate drops below
/// rel_tol times the partial sum (and at least 8 terms are in).
///
/// Throws StabilityError for z >= 1 and EvaluationError when more than
/// max_terms terms would be needed.
double hyp2f1_row1(double b, double c, double z, double rel_tol = 1e-14,
                   std::uint64_t max_terms = 10'000'000);

/// log Gamma(x) for x > 0 (Lanczos, g = 7).
double ln_gamma(double x);

/// Binomial coefficient C(n, k); 0 when k > n. Exact up to n = 67, log-space
/// beyond that.
double binom(std::uint64_t n, std::uint64_t k);

/// log C(n, k); -inf when k > n. Stays finite for n far beyond where the
/// coefficient itself overflows.
double log_binom(std::uint64_t n, std::uint64_t k);

/// Exact C(n, k) for n <= 67. Throws std::overflow_error above that.
std::uint64_t binom_exact(std::uint64_t n, std::uint64_t k);

/// Rising factorial (x)_n = x (x+1) ... (x+n-1); (x)_0 = 1.
double pochhammer(double x, std::uint64_t n);

}  // namespace mmdelay
