#include "mmdelay/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mmdelay/errors.hpp"
#include "mmdelay/specfun.hpp"

namespace mmdelay {

void ArrivalSpec::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("arrival: rate must be positive");
  if (splitting.empty()) return;
  double total = 0.0;
  for (double z : splitting) {
    if (!(z > 0.0 && z <= 1.0)) throw std::invalid_argument("arrival: splitting coefficients must lie in (0, 1]");
    total += z;
  }
  if (std::abs(total - 1.0) > 1e-12 * static_cast<double>(splitting.size())) {
    throw std::invalid_argument("arrival: splitting coefficients must sum to 1");
  }
}

double ArrivalSpec::share(std::size_t stream) const {
  if (splitting.empty()) {
    if (stream != 0) throw std::out_of_range("arrival: stream index out of range");
    return 1.0;
  }
  if (stream >= splitting.size()) throw std::out_of_range("arrival: stream index out of range");
  return splitting[stream];
}

double arrival_mgf_factor(const ArrivalSpec& arrival, double theta, std::optional<std::size_t> stream) {
  if (!stream) return std::exp(theta * arrival.rate);
  if (arrival.splitting.empty()) throw std::out_of_range("arrival: stream given but no splitting configured");
  return std::exp(theta * arrival.share(*stream) * arrival.rate);
}

double geometric_tail(double x, std::uint64_t tau) {
  if (!(x >= 0.0)) throw std::invalid_argument("geometric_tail: x must be non-negative");
  if (x >= 1.0) throw StabilityError("geometric_tail: x >= 1", x);
  return std::pow(x, static_cast<double>(tau)) / (1.0 - x);
}

double log_composition_tail_sum(std::span<const double> xs, std::uint64_t w, double tol, std::uint64_t max_terms) {
  if (xs.empty()) throw std::invalid_argument("composition_tail_sum: need at least one factor");
  if (!(tol > 0.0)) throw std::invalid_argument("composition_tail_sum: tol must be positive");
  double x_max = 0.0;
  for (double x : xs) {
    if (!(x >= 0.0)) throw std::invalid_argument("composition_tail_sum: factors must be non-negative");
    x_max = std::max(x_max, x);
  }
  if (x_max >= 1.0) throw StabilityError("composition_tail_sum: factor >= 1", x_max);
  if (x_max == 0.0) return w == 0 ? 0.0 : -std::numeric_limits<double>::infinity();

  const std::size_t k = xs.size();
  std::vector<long double> scaled(k);
  for (std::size_t i = 0; i < k; ++i) scaled[i] = static_cast<long double>(xs[i]) / x_max;

  // cur[i] holds h_v(y_1..y_{i+1}) at the current v; advancing v uses
  //   h_v(y_1..y_i) = y_i h_{v-1}(y_1..y_i) + h_v(y_1..y_{i-1}).
  std::vector<long double> cur(k, 0.0L);
  auto advance = [&](std::uint64_t v) {
    long double below = v == 0 ? 1.0L : 0.0L;
    for (std::size_t i = 0; i < k; ++i) {
      cur[i] = scaled[i] * cur[i] + below;
      below = cur[i];
    }
  };
  for (std::uint64_t v = 0; v < w; ++v) advance(v);

  const long double kd = static_cast<long double>(k);
  const long double xl = x_max;
  // Majorant term C(k-1+v, v) x^{v-w}, tracked incrementally from v = w.
  long double majorant = std::exp(static_cast<long double>(log_binom(k - 1 + w, w)));
  long double sum = 0.0L;
  long double power = 1.0L;  // x^{v-w}
  for (std::uint64_t v = w;; ++v) {
    advance(v);
    sum += power * cur[k - 1];
    const long double ratio = (kd + v) / (v + 1.0L) * xl;
    majorant *= ratio;  // now the majorant term at v + 1
    if (ratio < 1.0L && majorant / (1.0L - ratio) <= tol * sum) break;
    if (v - w >= max_terms) {
      throw EvaluationError("composition_tail_sum: truncation cap exceeded",
                            static_cast<double>(majorant / (1.0L - std::min(ratio, 0.999999L))));
    }
    power *= xl;
  }
  return static_cast<double>(w) * std::log(x_max) + static_cast<double>(std::log(sum));
}

double composition_tail_sum(std::span<const double> xs, std::uint64_t w, double tol, std::uint64_t max_terms) {
  return std::exp(log_composition_tail_sum(xs, w, tol, max_terms));
}

void ThetaSearchSpec::validate() const {
  if (!(theta_min > 0.0) || !(theta_max > theta_min)) {
    throw std::invalid_argument("theta search: need 0 < theta_min < theta_max");
  }
  if (grid_points < 16) throw std::invalid_argument("theta search: grid_points must be at least 16");
  if (refine_iters < 0) throw std::invalid_argument("theta search: refine_iters must be non-negative");
}

ThetaOptimum infimum_over_theta(const std::function<ThetaProbe(double)>& objective, const ThetaSearchSpec& spec) {
  spec.validate();
  const double log_lo = std::log(spec.theta_min);
  const double log_hi = std::log(spec.theta_max);
  const double step = (log_hi - log_lo) / (spec.grid_points - 1);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  double tightest = kInf;
  bool any_stable = false;
  ThetaOptimum best{kInf, kInf, kInf};
  auto probe = [&](double log_theta) -> double {
    const double theta = std::exp(log_theta);
    const ThetaProbe p = objective(theta);
    tightest = std::min(tightest, p.utilization);
    if (!(p.utilization < 1.0)) return kInf;
    any_stable = true;
    const double value = std::isnan(p.value) ? kInf : p.value;
    if (value < best.value || (value == best.value && theta < best.theta_star)) best = {theta, value, p.utilization};
    return value;
  };

  int best_index = -1;
  double best_grid = kInf;
  for (int j = 0; j < spec.grid_points; ++j) {
    const double v = probe(log_lo + j * step);
    if (v < best_grid) {
      best_grid = v;
      best_index = j;
    }
  }
  if (!any_stable) {
    throw StabilityError("no stable theta in [" + std::to_string(spec.theta_min) + ", " +
                             std::to_string(spec.theta_max) + "] (tightest utilization " +
                             std::to_string(tightest) + ")",
                         tightest);
  }

  if (best_index >= 0 && spec.refine_iters > 0) {
    constexpr double kGolden = 0.6180339887498949;
    double a = log_lo + std::max(best_index - 1, 0) * step;
    double b = log_lo + std::min(best_index + 1, spec.grid_points - 1) * step;
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = probe(c);
    double fd = probe(d);
    for (int it = 0; it < spec.refine_iters; ++it) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kGolden * (b - a);
        fc = probe(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kGolden * (b - a);
        fd = probe(d);
      }
    }
  }

  best.value = std::min(best.value, 1.0);
  return best;
}

}  // namespace mmdelay
