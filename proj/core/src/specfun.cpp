#include "mmdelay/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmdelay/errors.hpp"

namespace mmdelay {
namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr std::uint64_t kExactBinomLimit = 67;

}  // namespace

double ln_gamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("ln_gamma: x must be positive");
  if (x < 0.5) return ln_gamma(x + 1.0) - std::log(x);

  const double shifted = x - 1.0;
  double series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) series += kLanczos[i] / (shifted + static_cast<double>(i));
  const double t = shifted + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (shifted + 0.5) * std::log(t) - t + std::log(series);
}

std::uint64_t binom_exact(std::uint64_t n, std::uint64_t k) {
  if (n > kExactBinomLimit) throw std::overflow_error("binom_exact: n exceeds 67");
  if (k > n) return 0;
  k = std::min(k, n - k);
  __extension__ using u128 = unsigned __int128;
  u128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;  // stays integral: C(n-k+i, i)
  }
  return static_cast<std::uint64_t>(result);
}

double log_binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  if (n <= kExactBinomLimit) return std::log(static_cast<double>(binom_exact(n, k)));
  k = std::min(k, n - k);
  if (k <= 64) {
    double log_value = 0.0;
    for (std::uint64_t i = 1; i <= k; ++i) {
      log_value += std::log(static_cast<double>(n - k + i) / static_cast<double>(i));
    }
    return log_value;
  }
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  return ln_gamma(nd + 1.0) - ln_gamma(kd + 1.0) - ln_gamma(nd - kd + 1.0);
}

double binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  if (n <= kExactBinomLimit) return static_cast<double>(binom_exact(n, k));
  return std::exp(log_binom(n, k));
}

double pochhammer(double x, std::uint64_t n) {
  double result = 1.0;
  for (std::uint64_t i = 0; i < n; ++i) result *= x + static_cast<double>(i);
  return result;
}

double hyp2f1_row1(double b, double c, double z, double rel_tol, std::uint64_t max_terms) {
  if (!(b > 0.0) || !(c > 0.0)) throw std::invalid_argument("hyp2f1_row1: b and c must be positive");
  if (!(z >= 0.0)) throw std::invalid_argument("hyp2f1_row1: z must be non-negative");
  if (z >= 1.0) {
    throw StabilityError("hyp2f1_row1: series diverges for z >= 1 (utilization " + std::to_string(z) + ")", z);
  }
  if (z == 0.0) return 1.0;

  long double sum = 1.0L;
  long double term = 1.0L;
  for (std::uint64_t n = 0; n < max_terms; ++n) {
    const long double ratio = (static_cast<long double>(b) + n) / (static_cast<long double>(c) + n) * z;
    term *= ratio;
    sum += term;
    if (n + 1 >= 8) {
      // Future ratios are bounded by the current one when b > c and by z otherwise.
      const long double next_ratio =
          (b > c ? (static_cast<long double>(b) + n + 1) / (static_cast<long double>(c) + n + 1) : 1.0L) * z;
      if (next_ratio < 1.0L && term * next_ratio / (1.0L - next_ratio) <= rel_tol * sum) {
        return static_cast<double>(sum);
      }
    }
  }
  throw EvaluationError("hyp2f1_row1: series did not converge within " + std::to_string(max_terms) + " terms",
                        static_cast<double>(term));
}

double log_kummer_u(double a, double b, double z, const QuadratureSpec& quad) {
  if (!(a > 0.0)) throw std::invalid_argument("kummer_u: a must be positive");
  if (!(z > 0.0)) throw std::invalid_argument("kummer_u: z must be positive");
  quad.validate();

  // With t = u / z:
  //   U = z^{-a} (1 + a/z)^c * int_0^inf e^{-u} u^{a-1} / Gamma(a) * ((1 + u/z) / (1 + a/z))^c du
  // where c = b - a - 1. The normalized integral is O(1) for every z.
  const double c = b - a - 1.0;
  const double log_norm = ln_gamma(a);
  const double log_pivot = std::log1p(a / z);
  auto log_weight = [&](double u) { return -u - log_norm + c * (std::log1p(u / z) - log_pivot); };

  const double first = std::min(z, 1.0);
  const bool singular_origin = a < 1.0;

  // The first panel [0, first] is mapped to s in [0, 1]; for a < 1 the
  // substitution u = first * s^{1/a} absorbs the u^{a-1} singularity.
  // When z < 1 the stretch [z, 1] holding the (1 + u/z) transition is
  // covered in log u, tau in [1, 1 + span]; past u = 1 the variable is
  // shifted linearly so panels stay contiguous.
  const double span = -std::log(first);
  auto integrand = [&](double tau) -> double {
    if (tau <= 1.0) {
      if (singular_origin) {
        const double u = first * std::pow(tau, 1.0 / a);
        return std::exp(log_weight(u) + a * std::log(first) - std::log(a));
      }
      const double u = first * tau;
      if (u == 0.0) return a == 1.0 ? std::exp(log_weight(0.0)) * first : 0.0;
      return std::exp(log_weight(u) + (a - 1.0) * std::log(u)) * first;
    }
    if (tau <= 1.0 + span) {
      const double log_u = std::log(first) + (tau - 1.0);
      const double u = std::exp(log_u);
      return std::exp(log_weight(u) + a * log_u);
    }
    const double u = 1.0 + (tau - 1.0 - span);
    return std::exp(log_weight(u) + (a - 1.0) * std::log(u));
  };

  std::vector<double> breaks = {0.0, 1.0};
  for (double v = std::numbers::ln2; v < span - 1e-3; v += std::numbers::ln2) breaks.push_back(1.0 + v);
  if (span > 0.0) breaks.push_back(1.0 + span);
  double edge = 1.0;
  const double past_peak = 2.0 * (a + std::abs(c)) + 16.0;
  while (edge < past_peak || std::exp(log_weight(edge) + (a - 1.0) * std::log(edge)) * edge > 1e-25) {
    edge *= 2.0;
    breaks.push_back(1.0 + span + (edge - 1.0));
    if (edge > 1e6) break;
  }

  const QuadratureResult result = integrate_adaptive(integrand, breaks, quad);
  if (!(result.value > 0.0)) {
    throw EvaluationError("kummer_u: integral underflowed", breaks.back());
  }
  return -a * std::log(z) + c * log_pivot + std::log(result.value);
}

double kummer_u(double a, double b, double z, const QuadratureSpec& quad) {
  return std::exp(log_kummer_u(a, b, z, quad));
}

}  // namespace mmdelay
