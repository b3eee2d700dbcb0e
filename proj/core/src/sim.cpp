#include "mmdelay/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "mmdelay/errors.hpp"

namespace mmdelay {
namespace {

constexpr std::uint64_t kBootstrapStream = std::numeric_limits<std::uint64_t>::max();
// Backlog below this is treated as an empty system.
constexpr double kEmptyBacklog = 1e-12;

unsigned resolve_threads(unsigned requested, std::uint64_t work) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(work, 1)));
}

// Static contiguous blocks: which replications a worker sees never depends
// on timing, and results are written by replication index.
template <class Body>
void parallel_blocks(std::uint64_t count, unsigned threads, Body&& body) {
  if (threads <= 1) {
    body(0u, std::uint64_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t lo = std::min(count, t * chunk);
    const std::uint64_t hi = std::min(count, lo + chunk);
    pool.emplace_back([&body, t, lo, hi] { body(t, lo, hi); });
  }
  for (auto& th : pool) th.join();
}

double log_mean_exp(const std::vector<double>& log_terms) {
  const double top = *std::max_element(log_terms.begin(), log_terms.end());
  if (!std::isfinite(top)) return top;
  long double acc = 0.0L;
  for (double v : log_terms) acc += std::exp(static_cast<long double>(v - top));
  return top + static_cast<double>(std::log(acc / static_cast<long double>(log_terms.size())));
}

}  // namespace

void SimPlan::validate() const {
  if (horizon_slots == 0) throw PlanError("plan: horizon must be positive");
  if (replications == 0) throw PlanError("plan: replications must be positive");
  if (measure_at) {
    if (*measure_at <= warmup_slots) throw PlanError("plan: measurement slot must come after warmup");
    if (*measure_at > horizon_slots) throw PlanError("plan: measurement slot beyond horizon");
  } else if (warmup_slots >= horizon_slots) {
    throw PlanError("plan: warmup must be shorter than the horizon");
  }
}

RandomSource rng_stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t hop) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(replication), hi(replication), lo(hop), hi(hop)};
  return RandomSource(seq);
}

std::pair<double, double> clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0 || successes > trials) throw std::invalid_argument("clopper_pearson: need 0 <= k <= n, n > 0");
  const double alpha = 1.0 - confidence;
  const auto k = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  const double low = successes == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
  const double high = successes == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
  return {low, high};
}

std::vector<DelayPoint> simulate_delay(const TopologyConfig& cfg, const std::vector<std::uint64_t>& w_grid,
                                       const SimPlan& plan, const CapacitySampler& sampler) {
  cfg.validate();
  plan.validate();
  if (w_grid.empty()) throw PlanError("simulate_delay: empty delay grid");
  const std::uint64_t w_max = *std::max_element(w_grid.begin(), w_grid.end());
  if (w_max >= plan.horizon_slots) throw PlanError("simulate_delay: horizon too short for the largest delay");
  const std::uint64_t t_meas = plan.measure_at.value_or(plan.horizon_slots - w_max);
  if (t_meas <= plan.warmup_slots) throw PlanError("simulate_delay: horizon too short to measure after warmup");
  if (t_meas + w_max > plan.horizon_slots) {
    throw PlanError("simulate_delay: measurement slot " + std::to_string(t_meas) + " plus delay " +
                    std::to_string(w_max) + " exceeds the horizon");
  }

  // Flatten hops so each gets its own stream index.
  struct HopRef {
    std::size_t path;
    std::size_t hop;
    const FadingLink* link;
  };
  std::vector<HopRef> hops;
  std::vector<std::size_t> path_begin;
  for (std::size_t i = 0; i < cfg.paths.size(); ++i) {
    path_begin.push_back(hops.size());
    for (std::size_t j = 0; j < cfg.paths[i].hops.size(); ++j) hops.push_back({i, j, &cfg.paths[i].hops[j]});
  }
  path_begin.push_back(hops.size());
  const std::size_t m = cfg.paths.size();
  std::vector<double> input(m);
  for (std::size_t i = 0; i < m; ++i) input[i] = cfg.arrival.share(m > 1 ? i : 0) * cfg.arrival.rate;

  const std::uint64_t slots = t_meas + w_max;
  const unsigned threads = resolve_threads(plan.threads, plan.replications);
  std::vector<std::vector<std::uint64_t>> counts(threads, std::vector<std::uint64_t>(w_grid.size(), 0));

  parallel_blocks(plan.replications, threads, [&](unsigned worker, std::uint64_t lo, std::uint64_t hi) {
    std::vector<RandomSource> streams;
    std::vector<double> backlog(hops.size());
    std::vector<double> path_backlog(m);
    std::vector<double> drained(m);
    std::vector<bool> path_exceeds(m);
    for (std::uint64_t rep = lo; rep < hi; ++rep) {
      streams.clear();
      for (std::size_t h = 0; h < hops.size(); ++h) streams.push_back(rng_stream(plan.seed, rep, h));
      std::fill(backlog.begin(), backlog.end(), 0.0);
      std::vector<double> drained_at_w(m * w_grid.size(), 0.0);

      for (std::uint64_t slot = 1; slot <= slots; ++slot) {
        for (std::size_t i = 0; i < m; ++i) {
          double flow = input[i];
          for (std::size_t h = path_begin[i]; h < path_begin[i + 1]; ++h) {
            const double cap = sampler ? sampler(*hops[h].link, hops[h].path, hops[h].hop, slot, streams[h])
                                       : capacity_sample(*hops[h].link, streams[h]);
            const double out = std::min(backlog[h] + flow, cap);
            backlog[h] += flow - out;
            flow = out;
          }
          if (slot == t_meas) {
            double q = 0.0;
            for (std::size_t h = path_begin[i]; h < path_begin[i + 1]; ++h) q += backlog[h];
            path_backlog[i] = q;
            drained[i] = 0.0;
          } else if (slot > t_meas) {
            drained[i] += flow;
          }
        }
        if (slot >= t_meas) {
          const std::uint64_t elapsed = slot - t_meas;
          for (std::size_t g = 0; g < w_grid.size(); ++g) {
            if (w_grid[g] == elapsed) {
              for (std::size_t i = 0; i < m; ++i) drained_at_w[g * m + i] = drained[i];
            }
          }
        }
      }

      for (std::size_t g = 0; g < w_grid.size(); ++g) {
        bool exceeds = w_grid[g] == 0;
        for (std::size_t i = 0; i < m && !exceeds; ++i) {
          const double q = path_backlog[i];
          exceeds = q > kEmptyBacklog && q >= drained_at_w[g * m + i] - kEmptyBacklog;
        }
        counts[worker][g] += exceeds ? 1 : 0;
      }
    }
  });

  std::vector<DelayPoint> out;
  for (std::size_t g = 0; g < w_grid.size(); ++g) {
    DelayPoint p;
    p.w = w_grid[g];
    for (const auto& c : counts) p.exceedances += c[g];
    const auto [low, high] = clopper_pearson(p.exceedances, plan.replications);
    p.estimate = {static_cast<double>(p.exceedances) / static_cast<double>(plan.replications), low, high,
                  plan.replications, plan.seed};
    out.push_back(p);
  }
  return out;
}

std::vector<std::vector<double>> fluid_tandem(const std::vector<double>& input,
                                              const std::vector<std::vector<double>>& caps) {
  const std::size_t horizon = input.size();
  std::vector<std::vector<double>> cum(caps.size(), std::vector<double>(horizon + 1, 0.0));
  std::vector<double> backlog(caps.size(), 0.0);
  for (std::size_t u = 0; u < horizon; ++u) {
    double flow = input[u];
    for (std::size_t j = 0; j < caps.size(); ++j) {
      if (caps[j].size() != horizon) throw std::invalid_argument("fluid_tandem: capacity length mismatch");
      const double out = std::min(backlog[j] + flow, caps[j][u]);
      backlog[j] += flow - out;
      flow = out;
      cum[j][u + 1] = cum[j][u] + out;
    }
  }
  return cum;
}

std::optional<std::uint64_t> virtual_delay(const std::vector<double>& arrivals_cum,
                                           const std::vector<double>& departures_cum, std::uint64_t t, double tol) {
  if (t >= arrivals_cum.size()) throw std::out_of_range("virtual_delay: t beyond the arrival curve");
  for (std::uint64_t u = t; u < departures_cum.size(); ++u) {
    if (arrivals_cum[t] <= departures_cum[u] + tol) return u - t;
  }
  return std::nullopt;
}

std::vector<double> network_service_curve(const std::vector<std::vector<double>>& caps) {
  if (caps.empty()) throw std::invalid_argument("network_service_curve: no hops");
  const std::size_t horizon = caps.front().size();
  std::vector<double> f(horizon + 1, 0.0);
  for (std::size_t u = 0; u < horizon; ++u) f[u + 1] = f[u] + caps[0][u];
  for (std::size_t j = 1; j < caps.size(); ++j) {
    if (caps[j].size() != horizon) throw std::invalid_argument("network_service_curve: capacity length mismatch");
    double prefix = 0.0;  // P_j(u)
    double best = f[0];   // min_{v <= u} F_{j-1}(v) - P_j(v)
    std::vector<double> next(horizon + 1, 0.0);
    for (std::size_t u = 1; u <= horizon; ++u) {
      prefix += caps[j][u - 1];
      best = std::min(best, f[u] - prefix);
      next[u] = prefix + best;
    }
    f.swap(next);
  }
  return f;
}

double minplus_network_service(const std::vector<std::vector<double>>& caps, std::uint64_t t) {
  const std::vector<double> curve = network_service_curve(caps);
  if (t >= curve.size()) throw std::out_of_range("minplus_network_service: t beyond the horizon");
  return curve[t];
}

EffcapEstimate estimate_effcap(const PathSpec& path, double theta, const SimPlan& plan, int bootstrap_resamples) {
  plan.validate();
  if (path.hops.empty()) throw std::invalid_argument("estimate_effcap: empty path");
  if (!(theta > 0.0)) throw std::invalid_argument("estimate_effcap: theta must be positive");
  if (bootstrap_resamples < 1) throw std::invalid_argument("estimate_effcap: need at least one resample");
  const std::uint64_t horizon = plan.horizon_slots;
  const std::uint64_t half = std::max<std::uint64_t>(horizon / 2, 1);
  const std::size_t k = path.hops.size();

  std::vector<double> log_full(plan.replications);
  std::vector<double> log_half(plan.replications);
  const unsigned threads = resolve_threads(plan.threads, plan.replications);
  parallel_blocks(plan.replications, threads, [&](unsigned, std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::vector<double>> caps(k, std::vector<double>(horizon));
    for (std::uint64_t rep = lo; rep < hi; ++rep) {
      for (std::size_t j = 0; j < k; ++j) {
        RandomSource rng = rng_stream(plan.seed, rep, j);
        for (auto& c : caps[j]) c = capacity_sample(path.hops[j], rng);
      }
      const std::vector<double> curve = network_service_curve(caps);
      log_full[rep] = -theta * curve[horizon];
      log_half[rep] = -theta * curve[half];
    }
  });

  auto estimator = [&](const std::vector<double>& logs, std::uint64_t t) {
    const double value = -log_mean_exp(logs) / (theta * static_cast<double>(t));
    if (!std::isfinite(value)) throw EvaluationError("estimate_effcap: non-finite estimate", 0.0);
    return value;
  };
  const double point = estimator(log_full, horizon);

  RandomSource rng = rng_stream(plan.seed, kBootstrapStream, kBootstrapStream);
  std::uniform_int_distribution<std::uint64_t> pick(0, plan.replications - 1);
  std::vector<double> boot(static_cast<std::size_t>(bootstrap_resamples));
  std::vector<double> resample(plan.replications);
  for (auto& b : boot) {
    for (auto& r : resample) r = log_full[pick(rng)];
    b = estimator(resample, horizon);
  }
  std::sort(boot.begin(), boot.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(boot.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return i + 1 < boot.size() ? boot[i] * (1.0 - frac) + boot[i + 1] * frac : boot[i];
  };

  EffcapEstimate out;
  out.estimate = {point, std::min(quantile(0.025), point), std::max(quantile(0.975), point), plan.replications,
                  plan.seed};
  out.half_horizon_point = estimator(log_half, half);
  return out;
}

}  // namespace mmdelay
