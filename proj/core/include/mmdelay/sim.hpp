#pragma once

// Seeded Monte Carlo validation: discrete-time fluid queues over sampled
// Nakagami capacities, exact (min,+) tandem service on sample paths, and
// empirical violation frequencies and effective capacities.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mmdelay/channel.hpp"
#include "mmdelay/schemes.hpp"

namespace mmdelay {

struct SimPlan {
  std::uint64_t horizon_slots = 2000;
  std::uint64_t replications = 100000;
  std::uint64_t seed = 1;
  std::uint64_t warmup_slots = 0;
  /// Measurement slot; defaults to horizon - max(w) so every w fits.
  std::optional<std::uint64_t> measure_at;
  unsigned threads = 1;  // 0 picks the hardware concurrency

  /// Throws PlanError when the fields are inconsistent.
  void validate() const;
};

struct SimEstimate {
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
};

struct DelayPoint {
  std::uint64_t w = 0;
  std::uint64_t exceedances = 0;
  SimEstimate estimate;  // P(W >= w) with a 95% Clopper-Pearson interval
};

/// Independent engine for (seed, replication, hop). Identical inputs give
/// identical draws regardless of thread scheduling.
RandomSource rng_stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t hop);

/// Slot capacity for (path, hop, slot); the default draws from the link.
/// Tests replace it to force deterministic capacities.
using CapacitySampler =
    std::function<double(const FadingLink& link, std::size_t path, std::size_t hop, std::uint64_t slot,
                         RandomSource& rng)>;

/// Empirical P(W(t) >= w) at t = measure_at for every w in `w_grid`.
///
/// Each path is a tandem of fluid FIFO nodes fed z_i rho per slot; a node
/// sends min(backlog + input, capacity) and relays forward in the same slot.
/// Traffic that arrived by t has delay at least w when the path backlog at t
/// is positive and the last node cannot clear it within (t, t + w]. The
/// topology exceeds w when any path does. P(W >= 0) is 1.
std::vector<DelayPoint> simulate_delay(const TopologyConfig& cfg, const std::vector<std::uint64_t>& w_grid,
                                       const SimPlan& plan, const CapacitySampler& sampler = {});

/// Cumulative departures of every node of a fluid tandem: result[j][u] is
/// D_j(0, u) for u = 0..T. `input` holds per-slot arrivals, caps[j] per-slot
/// capacities of node j (both length T).
std::vector<std::vector<double>> fluid_tandem(const std::vector<double>& input,
                                              const std::vector<std::vector<double>>& caps);

/// Virtual delay inf{w >= 0 : A(0,t) <= D(0,t+w)} from cumulative curves
/// indexed by slot (index 0 is time 0). Returns nullopt when the departure
/// curve never catches up within its length.
std::optional<std::uint64_t> virtual_delay(const std::vector<double>& arrivals_cum,
                                           const std::vector<double>& departures_cum, std::uint64_t t,
                                           double tol = 1e-9);

/// F_k(u) for u = 0..T with F_1(u) = P_1(u) and
///   F_j(u) = min_{0<=v<=u} F_{j-1}(v) + P_j(u) - P_j(v),
/// P_j the prefix sums of caps[j]. Prefix minima make this O(kT).
std::vector<double> network_service_curve(const std::vector<std::vector<double>>& caps);

/// S_net(0, t) = (S_1 (x) ... (x) S_k)(0, t).
double minplus_network_service(const std::vector<std::vector<double>>& caps, std::uint64_t t);

/// 95% Clopper-Pearson interval for `successes` out of `trials`.
std::pair<double, double> clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95);

struct EffcapEstimate {
  SimEstimate estimate;       // bootstrap percentile interval
  double half_horizon_point;  // same estimator at T/2, a convergence check
};

/// -ln((1/R) sum_r exp(-theta S_net^(r)(0,T))) / (theta T) over R sampled
/// paths, with log-sum-exp and a 1000-resample bootstrap.
EffcapEstimate estimate_effcap(const PathSpec& path, double theta, const SimPlan& plan, int bootstrap_resamples = 1000);

}  // namespace mmdelay
