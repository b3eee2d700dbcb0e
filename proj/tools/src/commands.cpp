#include "mmdelay/commands.hpp"

#include <cstdint>
#include <map>
#include <string>

#include <fmt/format.h>

#include "mmdelay/effcap.hpp"
#include "mmdelay/errors.hpp"

namespace mmdelay::cli {
namespace {

std::string units(const ExperimentConfig& cfg) {
  return fmt::format(
      "units: gamma_db=dB distance_m=m rho,capacity=Gbit/slot theta=1/Gbit w=slots; slot_s={} bandwidth_mhz={} "
      "alpha={} nakagami_m={}{}",
      cfg.link.slot_s, cfg.link.bandwidth_mhz, cfg.link.alpha, cfg.link.nakagami_m,
      cfg.preset.empty() ? "" : " preset=" + cfg.preset);
}

Table make_table(const ExperimentConfig& cfg, std::string command, std::vector<std::string> columns) {
  Table table;
  table.command = std::move(command);
  table.units = units(cfg);
  table.columns = std::move(columns);
  return table;
}

Cell integral(double v) { return static_cast<std::int64_t>(v); }

Cell axis_cell(SweepAxis axis, double v) {
  if (axis == SweepAxis::w || axis == SweepAxis::m || axis == SweepAxis::k) return integral(v);
  return v;
}

std::string join_thetas(const std::vector<double>& thetas) {
  std::string out;
  for (double t : thetas) out += (out.empty() ? "" : ";") + fmt::format("{:.12g}", t);
  return out;
}

void require_axis(const ExperimentConfig& cfg, std::initializer_list<SweepAxis> allowed, const char* command) {
  for (SweepAxis a : allowed) {
    if (cfg.sweep.axis == a) return;
  }
  throw ConfigError(fmt::format("field 'sweep.axis': {} cannot sweep {}", command, axis_name(cfg.sweep.axis)));
}

}  // namespace

CommandOutput cmd_bound_sweep(const ExperimentConfig& cfg, bool strict) {
  require_axis(cfg, {SweepAxis::w, SweepAxis::rho, SweepAxis::gamma_db, SweepAxis::m, SweepAxis::k}, "bound-sweep");
  if (cfg.mode == BoundMode::invert && cfg.sweep.axis == SweepAxis::w) {
    throw ConfigError("field 'sweep.axis': invert mode solves for w and cannot sweep it");
  }
  CommandOutput out{make_table(cfg, "bound-sweep",
                               {"series", "axis", "axis_value", "w", "bound", "theta_star", "stable", "status"})};
  bool any_unstable = false;
  for (const SeriesConfig& series : cfg.series) {
    // One evaluator per distinct layout so w sweeps reuse cached MGF factors.
    std::optional<BoundEvaluator> shared;
    if (cfg.sweep.axis == SweepAxis::w) shared.emplace(build_topology(series, cfg.link), cfg.bound_options);

    for (double value : cfg.sweep.values) {
      std::vector<Cell> row = {series.label, std::string(axis_name(cfg.sweep.axis)), axis_cell(cfg.sweep.axis, value)};
      std::optional<BoundEvaluator> local;
      BoundEvaluator* evaluator = shared ? &*shared : nullptr;
      try {
        if (!evaluator) {
          local.emplace(build_topology(apply_axis(series, cfg.sweep.axis, value), cfg.link), cfg.bound_options);
          evaluator = &*local;
        }
        const std::uint64_t w = cfg.mode == BoundMode::invert
                                    ? invert_delay(*evaluator, cfg.epsilon, cfg.w_cap)
                                    : (cfg.sweep.axis == SweepAxis::w ? static_cast<std::uint64_t>(value) : cfg.w);
        const BoundResult r = evaluator->evaluate(w);
        row.insert(row.end(), {static_cast<std::int64_t>(w), r.probability, join_thetas(r.theta_star), true,
                               std::string("ok")});
      } catch (const DivergenceError&) {
        any_unstable = true;
        row.insert(row.end(), {Cell{}, Cell{}, Cell{}, false, std::string("diverged")});
      } catch (const StabilityError&) {
        any_unstable = true;
        row.insert(row.end(), {Cell{}, Cell{}, Cell{}, false, std::string("unstable")});
      } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("series '{}': {}", series.label, e.what()));
      }
      out.table.add_row(std::move(row));
    }
  }
  if (strict && any_unstable) out.exit_code = kExitUnstable;
  return out;
}

CommandOutput cmd_sim_validate(const ExperimentConfig& cfg, bool strict) {
  require_axis(cfg, {SweepAxis::w}, "sim-validate");
  CommandOutput out{make_table(cfg, "sim-validate",
                               {"series", "w", "exceedances", "replications", "empirical_p", "ci_low", "ci_high",
                                "analytic_bound", "dominated"})};
  std::vector<std::uint64_t> ws;
  for (double v : cfg.sweep.values) ws.push_back(static_cast<std::uint64_t>(v));

  bool violated = false;
  bool any_unstable = false;
  for (const SeriesConfig& series : cfg.series) {
    const TopologyConfig topo = build_topology(series, cfg.link);
    std::vector<DelayPoint> points;
    try {
      points = simulate_delay(topo, ws, cfg.plan);
    } catch (const PlanError& e) {
      throw ConfigError(fmt::format("field 'plan': {}", e.what()));
    }
    BoundEvaluator evaluator(topo, cfg.bound_options);
    for (const DelayPoint& p : points) {
      double bound = 1.0;  // an unstable layout only has the trivial bound
      try {
        bound = evaluator.evaluate(p.w).probability;
      } catch (const StabilityError&) {
        any_unstable = true;
      }
      const double half_width = 0.5 * (p.estimate.ci_high - p.estimate.ci_low);
      const bool dominated = p.estimate.point <= bound + half_width;
      violated = violated || !dominated;
      out.table.add_row({series.label, static_cast<std::int64_t>(p.w), static_cast<std::int64_t>(p.exceedances),
                         static_cast<std::int64_t>(p.estimate.replications), p.estimate.point, p.estimate.ci_low,
                         p.estimate.ci_high, bound, dominated});
    }
  }
  if (violated) {
    out.exit_code = kExitDominance;
  } else if (strict && any_unstable) {
    out.exit_code = kExitUnstable;
  }
  return out;
}

CommandOutput cmd_effcap_sweep(const ExperimentConfig& cfg, bool strict) {
  (void)strict;  // effective capacities are always defined
  require_axis(cfg, {SweepAxis::gamma_db, SweepAxis::m, SweepAxis::k, SweepAxis::theta}, "effcap-sweep");
  CommandOutput out{make_table(
      cfg, "effcap-sweep",
      {"series", "axis", "axis_value", "gamma_db", "theta", "n", "m", "k", "dispersion_max", "densification_lower",
       "densification_upper", "hybrid_lower", "hybrid_upper", "sim_estimate", "sim_ci_low", "sim_ci_high",
       "argmax_m_lower", "argmax_m_upper"})};
  for (const SeriesConfig& series : cfg.series) {
    for (double value : cfg.sweep.values) {
      SeriesConfig s;
      try {
        s = apply_axis(series, cfg.sweep.axis, value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("series '{}': {}", series.label, e.what()));
      }
      const TopologyParams& t = s.topology;
      if (!t.paths.empty()) throw ConfigError("effcap-sweep needs a homogeneous layout, not explicit paths");
      const double theta = cfg.sweep.axis == SweepAxis::theta ? value : cfg.qos_theta;
      const int n = cfg.effcap_n > 0 ? cfg.effcap_n : t.n;
      const int m = t.m;
      if (n % m != 0) {
        throw ConfigError(fmt::format("series '{}': m={} does not divide n={}", series.label, m, n));
      }
      const double gamma = db_to_linear(t.gamma_db);
      const double dispersion = dispersion_effcap_max(n, gamma, t.distance_m, theta, cfg.link);
      const EffCapBounds dens = densification_effcap_bounds(n, gamma, t.distance_m, theta, cfg.link);
      const EffCapBounds hyb = hybrid_effcap_bounds(n, m, gamma, t.distance_m, theta, cfg.link);
      const PathCountScan scan = scan_path_count(n, gamma, t.distance_m, theta, cfg.link);

      Cell sim_point;
      Cell sim_low;
      Cell sim_high;
      if (cfg.effcap_simulate) {
        // m identical paths, each a tandem of k hops carrying its share.
        const TopologyConfig topo = make_hybrid(n, m, gamma, t.distance_m, cfg.link, s.rate);
        const EffcapEstimate est = estimate_effcap(topo.paths.front(), theta, cfg.plan);
        sim_point = m * est.estimate.point;
        sim_low = m * est.estimate.ci_low;
        sim_high = m * est.estimate.ci_high;
      }
      out.table.add_row({series.label, std::string(axis_name(cfg.sweep.axis)), axis_cell(cfg.sweep.axis, value),
                         t.gamma_db, theta, static_cast<std::int64_t>(n), static_cast<std::int64_t>(m),
                         static_cast<std::int64_t>(n / m), dispersion, dens.lower, dens.upper, hyb.lower, hyb.upper,
                         sim_point, sim_low, sim_high, static_cast<std::int64_t>(scan.argmax_lower),
                         static_cast<std::int64_t>(scan.argmax_upper)});
    }
  }
  return out;
}

CommandOutput cmd_stability(const ExperimentConfig& cfg, bool strict) {
  require_axis(cfg, {SweepAxis::rho, SweepAxis::gamma_db, SweepAxis::m, SweepAxis::k, SweepAxis::theta}, "stability");
  CommandOutput out{make_table(cfg, "stability",
                               {"series", "axis", "axis_value", "rate", "theta", "path", "hop", "rate_share",
                                "max_stable_rate", "utilization", "effective_capacity", "stable_at_theta",
                                "admissible"})};
  bool any_unstable = false;
  for (const SeriesConfig& series : cfg.series) {
    for (double value : cfg.sweep.values) {
      TopologyConfig topo;
      try {
        topo = build_topology(apply_axis(series, cfg.sweep.axis, value), cfg.link);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("series '{}': {}", series.label, e.what()));
      }
      const double theta = cfg.sweep.axis == SweepAxis::theta ? value : cfg.qos_theta;
      const StabilityReport report = stability_report(topo, theta, cfg.bound_options);
      for (const HopStability& h : report.hops) {
        any_unstable = any_unstable || !h.stable_at_theta || !h.admissible;
        out.table.add_row({series.label, std::string(axis_name(cfg.sweep.axis)), axis_cell(cfg.sweep.axis, value),
                           topo.arrival.rate, theta, static_cast<std::int64_t>(h.path),
                           static_cast<std::int64_t>(h.hop), h.rate_share, h.max_stable_rate, h.utilization,
                           h.effective_capacity, h.stable_at_theta, h.admissible});
      }
    }
  }
  if (strict && any_unstable) out.exit_code = kExitUnstable;
  return out;
}

}  // namespace mmdelay::cli
