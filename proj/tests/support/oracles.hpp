#pragma once

// Test-side reference implementations. Each one takes a different route
// from the library code it checks: direct enumeration, naive O(T^2) DPs,
// brute-force series, or dense grids.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "mmdelay/channel.hpp"

namespace oracle {

/// sum_{n < terms} (b)_n / (c)_n z^n in long double.
inline long double hyp2f1_row1_series(long double b, long double c, long double z, std::uint64_t terms) {
  long double term = 1.0L;
  long double sum = 1.0L;
  for (std::uint64_t n = 0; n + 1 < terms; ++n) {
    term *= (b + n) / (c + n) * z;
    sum += term;
  }
  return sum;
}

/// sum_{v >= w} C(k-1+v, v) x^v, summed term by term until the terms are
/// below 1e-40 of the running sum and decreasing.
inline long double binomial_power_tail(int k, std::uint64_t w, long double x) {
  long double term = 1.0L;  // C(k-1+v, v) x^v at v = 0
  long double sum = 0.0L;
  for (std::uint64_t v = 0;; ++v) {
    if (v >= w) sum += term;
    const long double next = term * (k + static_cast<long double>(v)) / (v + 1.0L) * x;
    if (v > w && next < term && next < 1e-40L * sum) break;
    term = next;
  }
  return sum;
}

/// sum over weak compositions (pi_1..pi_k) with w <= sum pi <= v_max of
/// prod x_i^{pi_i}, by explicit recursion over the exponents. Subtrees whose
/// total mass (all completions, ignoring the sum constraint) is below
/// `prune` are dropped; pruned_mass() bounds what they could have added.
class CompositionEnumerator {
 public:
  CompositionEnumerator(std::vector<double> xs, std::uint64_t w, std::uint64_t v_max, long double prune)
      : xs_(std::move(xs)), w_(w), v_max_(v_max), prune_(prune), tail_mass_(xs_.size() + 1, 1.0L) {
    for (std::size_t i = xs_.size(); i-- > 0;) tail_mass_[i] = tail_mass_[i + 1] / (1.0L - xs_[i]);
  }

  long double sum() {
    total_ = 0.0L;
    pruned_ = 0.0L;
    nodes_ = 0;
    recurse(0, 1.0L, 0);
    return total_;
  }

  std::uint64_t nodes() const { return nodes_; }
  long double pruned_mass() const { return pruned_; }

 private:
  void recurse(std::size_t i, long double prod, std::uint64_t used) {
    ++nodes_;
    if (i == xs_.size()) {
      if (used >= w_) total_ += prod;
      return;
    }
    long double p = prod;
    for (std::uint64_t pi = 0; used + pi <= v_max_; ++pi) {
      if (p * tail_mass_[i + 1] < prune_) {
        // Remaining exponents of hop i form a geometric series.
        pruned_ += p * tail_mass_[i];
        break;
      }
      recurse(i + 1, p, used + pi);
      p *= xs_[i];
      if (p == 0.0L) break;
    }
  }

  std::vector<double> xs_;
  std::uint64_t w_;
  std::uint64_t v_max_;
  long double prune_;
  std::vector<long double> tail_mass_;
  long double total_ = 0.0L;
  long double pruned_ = 0.0L;
  std::uint64_t nodes_ = 0;
};

/// The (min,+) tandem service F_k(t) straight from its definition,
/// O(k T^2): F_j(u) = min_{0<=v<=u} F_{j-1}(v) + S_j(v, u).
inline double minplus_naive(const std::vector<std::vector<double>>& caps, std::size_t t) {
  const std::size_t horizon = caps.front().size();
  auto service = [&](std::size_t j, std::size_t v, std::size_t u) {
    double s = 0.0;
    for (std::size_t q = v; q < u; ++q) s += caps[j][q];
    return s;
  };
  std::vector<double> f(horizon + 1);
  for (std::size_t u = 0; u <= horizon; ++u) f[u] = service(0, 0, u);
  for (std::size_t j = 1; j < caps.size(); ++j) {
    std::vector<double> next(horizon + 1);
    for (std::size_t u = 0; u <= horizon; ++u) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t v = 0; v <= u; ++v) best = std::min(best, f[v] + service(j, v, u));
      next[u] = best;
    }
    f.swap(next);
  }
  return f[t];
}

/// Minimum of f over `points` log-spaced values in [lo, hi]; +inf values
/// are skipped.
inline double dense_log_grid_min(const std::function<double(double)>& f, double lo, double hi, int points) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double theta = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    best = std::min(best, f(theta));
  }
  return best;
}

/// Single-queue bound psi^w / (1 - mu psi) at one theta, with psi from the
/// gamma-density quadrature oracle (no Kummer U). +inf when unstable.
inline double single_queue_bound_at(const mmdelay::FadingLink& link, double rate, std::uint64_t w, double theta) {
  const double psi = mmdelay::mgf_oracle(link, link.eta * theta);
  const double util = std::exp(theta * rate) * psi;
  if (!(util < 1.0)) return std::numeric_limits<double>::infinity();
  return std::pow(psi, static_cast<double>(w)) / (1.0 - util);
}

}  // namespace oracle
