#pragma once

// Probabilistic delay bounds for the three layouts: traffic dispersion
// (fork-join over single hops), densification (one relayed tandem path) and
// the hybrid of both. Also delay inversion and per-hop stability limits.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "mmdelay/calculus.hpp"
#include "mmdelay/channel.hpp"
#include "mmdelay/quadrature.hpp"

namespace mmdelay {

enum class TopologyKind { dispersion, densification, hybrid };

struct PathSpec {
  std::vector<FadingLink> hops;
};

struct TopologyConfig {
  TopologyKind kind = TopologyKind::dispersion;
  std::vector<PathSpec> paths;
  ArrivalSpec arrival;

  /// Shape checks per kind, plus link and arrival validation.
  void validate() const;
};

/// Equal split, power gamma/m per path, full distance L on each.
TopologyConfig make_dispersion(int m, double gamma_lin, double distance_m, const LinkParams& params,
                               double rate, ArrivalKind kind = ArrivalKind::deterministic);
/// One path of k hops, power gamma/k and distance L/k per hop.
TopologyConfig make_densification(int k, double gamma_lin, double distance_m, const LinkParams& params,
                                  double rate);
/// m equal-split paths of k = n/m hops, power gamma/n and distance mL/n per hop.
TopologyConfig make_hybrid(int n, int m, double gamma_lin, double distance_m, const LinkParams& params,
                           double rate, ArrivalKind kind = ArrivalKind::deterministic);

struct BoundOptions {
  ThetaSearchSpec theta;
  QuadratureSpec quad;
  double truncation_tol = 1e-12;
  /// Evaluate homogeneous paths through the closed forms (one path for
  /// identical parallel paths, the 2F1 series for identical hops).
  bool use_closed_forms = true;
};

struct BoundResult {
  double probability = 1.0;                       // in [0, 1]
  std::vector<double> theta_star;                 // per path
  std::vector<double> path_probability;           // per path, before combining
  std::vector<std::vector<double>> utilizations;  // per path, per hop, at theta_star
  bool stable = true;
};

/// Evaluates bounds for one topology at many w, caching the per-hop MGF
/// factors across calls. Not safe to share between threads.
class BoundEvaluator {
 public:
  explicit BoundEvaluator(TopologyConfig cfg, BoundOptions opts = {});
  ~BoundEvaluator();
  BoundEvaluator(BoundEvaluator&&) noexcept;
  BoundEvaluator& operator=(BoundEvaluator&&) noexcept;

  /// Combined bound; product form for deterministic arrivals, union form
  /// for dependent ones.
  BoundResult evaluate(std::uint64_t w);
  BoundResult evaluate_product(std::uint64_t w);
  BoundResult evaluate_union(std::uint64_t w);

  const TopologyConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

BoundResult dispersion_bound(const TopologyConfig& cfg, std::uint64_t w, const BoundOptions& opts = {});
/// Requires ArrivalKind::stochastic_dependent.
BoundResult dispersion_bound_union(const TopologyConfig& cfg, std::uint64_t w, const BoundOptions& opts = {});
BoundResult densification_bound(const TopologyConfig& cfg, std::uint64_t w, const BoundOptions& opts = {});
BoundResult hybrid_bound(const TopologyConfig& cfg, std::uint64_t w, const BoundOptions& opts = {});
/// Dispatches on cfg.kind and the arrival kind.
BoundResult evaluate_bound(const TopologyConfig& cfg, std::uint64_t w, const BoundOptions& opts = {});

/// 1 - prod (1 - p_i), evaluated as -expm1(sum log1p(-p_i)).
double combine_independent(const std::vector<double>& p);
/// min(1, sum p_i).
double combine_union(const std::vector<double>& p);

/// Smallest integer w with bound(w) <= epsilon, by doubling then bisection.
/// Since the infimum over theta need not be monotone in w for tandem paths,
/// the result is guaranteed to satisfy bound(w) <= epsilon < bound(w - 1).
/// Throws DivergenceError if the topology is unstable or w would pass w_cap.
std::uint64_t invert_delay(const TopologyConfig& cfg, double epsilon, const BoundOptions& opts = {},
                           std::uint64_t w_cap = 1'000'000);
std::uint64_t invert_delay(BoundEvaluator& evaluator, double epsilon, std::uint64_t w_cap = 1'000'000);

struct HopStability {
  std::size_t path = 0;
  std::size_t hop = 0;
  double rate_share = 1.0;
  /// Largest total arrival rate for which some theta in the search range
  /// keeps this hop stable.
  double max_stable_rate = 0.0;
  double utilization = 0.0;         // mu_i(theta) * phi_ij(theta)
  double effective_capacity = 0.0;  // -ln phi_ij(theta) / theta
  bool stable_at_theta = false;
  bool admissible = false;          // z_i rho <= effective capacity
};

struct StabilityReport {
  double theta = 0.0;
  double max_stable_rate = 0.0;  // tightest hop
  std::vector<HopStability> hops;
};

/// Per-hop stability limits. The hop effective capacity -ln phi(theta)/theta
/// is non-increasing in theta, so its supremum over the search range sits at
/// theta_min and no bisection over the rate is needed.
StabilityReport stability_report(const TopologyConfig& cfg, double theta, const BoundOptions& opts = {});

}  // namespace mmdelay
