#include "mmdelay/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "mmdelay/errors.hpp"
#include "mmdelay/specfun.hpp"

namespace mmdelay {
namespace {

constexpr double kHomogeneousTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool close(double a, double b) { return std::abs(a - b) <= kHomogeneousTol * std::max(std::abs(a), std::abs(b)); }

bool same_link(const FadingLink& a, const FadingLink& b) {
  return close(a.gamma_lin, b.gamma_lin) && close(a.distance_m, b.distance_m) && close(a.alpha, b.alpha) &&
         close(a.nakagami_m, b.nakagami_m) && close(a.eta, b.eta);
}

bool homogeneous_hops(const PathSpec& path) {
  return std::all_of(path.hops.begin(), path.hops.end(),
                     [&](const FadingLink& hop) { return same_link(hop, path.hops.front()); });
}

const char* kind_name(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::dispersion: return "dispersion";
    case TopologyKind::densification: return "densification";
    case TopologyKind::hybrid: return "hybrid";
  }
  return "unknown";
}

struct PathBound {
  double probability = 1.0;
  double theta_star = 0.0;
  std::vector<double> utilizations;
};

}  // namespace

void TopologyConfig::validate() const {
  if (paths.empty()) throw std::invalid_argument("topology: at least one path is required");
  for (const PathSpec& path : paths) {
    if (path.hops.empty()) throw std::invalid_argument("topology: every path needs at least one hop");
    for (const FadingLink& hop : path.hops) hop.validate();
  }
  if (kind == TopologyKind::dispersion) {
    for (const PathSpec& path : paths) {
      if (path.hops.size() != 1) throw std::invalid_argument("topology: dispersion paths must have exactly one hop");
    }
  }
  if (kind == TopologyKind::densification && paths.size() != 1) {
    throw std::invalid_argument("topology: densification has exactly one path");
  }
  arrival.validate();
  const std::size_t m = paths.size();
  if (m > 1 && arrival.splitting.size() != m) {
    throw std::invalid_argument("topology: splitting needs one coefficient per path");
  }
  if (m == 1 && arrival.splitting.size() > 1) {
    throw std::invalid_argument("topology: splitting given for a single path");
  }
}

TopologyConfig make_dispersion(int m, double gamma_lin, double distance_m, const LinkParams& params, double rate,
                               ArrivalKind kind) {
  if (m < 1) throw std::invalid_argument("dispersion: m must be positive");
  TopologyConfig cfg;
  cfg.kind = TopologyKind::dispersion;
  const FadingLink link = params.make(gamma_lin / m, distance_m);
  cfg.paths.assign(static_cast<std::size_t>(m), PathSpec{{link}});
  cfg.arrival.rate = rate;
  cfg.arrival.kind = kind;
  if (m > 1) cfg.arrival.splitting.assign(static_cast<std::size_t>(m), 1.0 / m);
  cfg.validate();
  return cfg;
}

TopologyConfig make_densification(int k, double gamma_lin, double distance_m, const LinkParams& params,
                                  double rate) {
  if (k < 1) throw std::invalid_argument("densification: k must be positive");
  TopologyConfig cfg;
  cfg.kind = TopologyKind::densification;
  const FadingLink link = params.make(gamma_lin / k, distance_m / k);
  cfg.paths.push_back(PathSpec{std::vector<FadingLink>(static_cast<std::size_t>(k), link)});
  cfg.arrival.rate = rate;
  cfg.validate();
  return cfg;
}

TopologyConfig make_hybrid(int n, int m, double gamma_lin, double distance_m, const LinkParams& params, double rate,
                           ArrivalKind kind) {
  if (n < 1 || m < 1 || n % m != 0) throw std::invalid_argument("hybrid: m must be a positive divisor of n");
  const int k = n / m;
  TopologyConfig cfg;
  cfg.kind = TopologyKind::hybrid;
  const FadingLink link = params.make(gamma_lin / n, distance_m * m / n);
  cfg.paths.assign(static_cast<std::size_t>(m), PathSpec{std::vector<FadingLink>(static_cast<std::size_t>(k), link)});
  cfg.arrival.rate = rate;
  cfg.arrival.kind = kind;
  if (m > 1) cfg.arrival.splitting.assign(static_cast<std::size_t>(m), 1.0 / m);
  cfg.validate();
  return cfg;
}

double combine_independent(const std::vector<double>& p) {
  if (p.size() == 1) return p.front();
  double log_keep = 0.0;
  for (double pi : p) log_keep += std::log1p(-std::clamp(pi, 0.0, 1.0));
  return std::clamp(-std::expm1(log_keep), 0.0, 1.0);
}

double combine_union(const std::vector<double>& p) {
  double total = 0.0;
  for (double pi : p) total += pi;
  return std::min(total, 1.0);
}

struct BoundEvaluator::Impl {
  struct PathState {
    std::vector<FadingLink> hops;
    double share = 1.0;
    bool homogeneous = false;
    std::unordered_map<double, std::vector<double>> log_phi_cache;
  };

  TopologyConfig cfg;
  BoundOptions opts;
  std::vector<PathState> paths;
  bool identical_paths = false;

  Impl(TopologyConfig c, BoundOptions o) : cfg(std::move(c)), opts(o) {
    cfg.validate();
    opts.theta.validate();
    opts.quad.validate();
    for (std::size_t i = 0; i < cfg.paths.size(); ++i) {
      PathState state;
      state.hops = cfg.paths[i].hops;
      state.share = cfg.arrival.share(cfg.paths.size() > 1 ? i : 0);
      state.homogeneous = homogeneous_hops(cfg.paths[i]);
      paths.push_back(std::move(state));
    }
    identical_paths = paths.size() > 1 && std::all_of(paths.begin(), paths.end(), [&](const PathState& p) {
      const PathState& first = paths.front();
      if (!close(p.share, first.share) || p.hops.size() != first.hops.size()) return false;
      for (std::size_t j = 0; j < p.hops.size(); ++j) {
        if (!same_link(p.hops[j], first.hops[j])) return false;
      }
      return true;
    });
  }

  const std::vector<double>& log_phi(PathState& path, double theta) {
    auto it = path.log_phi_cache.find(theta);
    if (it != path.log_phi_cache.end()) return it->second;
    std::vector<double> values(path.hops.size());
    for (std::size_t j = 0; j < path.hops.size(); ++j) {
      if (j > 0 && path.homogeneous) {
        values[j] = values[0];
      } else {
        values[j] = log_service_mgf_decay(path.hops[j], path.hops[j].eta * theta, opts.quad);
      }
    }
    return path.log_phi_cache.emplace(theta, std::move(values)).first->second;
  }

  ThetaProbe probe(PathState& path, std::uint64_t w, double theta) {
    const std::vector<double>& lphi = log_phi(path, theta);
    const double log_mu = theta * path.share * cfg.arrival.rate;
    const std::size_t k = lphi.size();
    const auto worst = static_cast<std::size_t>(std::max_element(lphi.begin(), lphi.end()) - lphi.begin());
    const double u_max = std::exp(log_mu + lphi[worst]);
    if (!(u_max < 1.0)) return {kInf, u_max};
    const auto wd = static_cast<double>(w);

    // The v = w, ..., inf terms concentrated on the worst hop alone bound the
    // tail sum from below; for k = 1 this is the exact value.
    const double log_floor = wd * lphi[worst] - std::log1p(-u_max);
    if (k == 1 || log_floor >= 0.0) return {std::exp(log_floor), u_max};

    double log_value;
    if (path.homogeneous && opts.use_closed_forms) {
      const double kd = static_cast<double>(k);
      log_value = log_binom(k - 1 + w, w) + wd * lphi[0] + std::log(hyp2f1_row1(kd + wd, 1.0 + wd, u_max));
    } else {
      std::vector<double> xs(k);
      for (std::size_t j = 0; j < k; ++j) xs[j] = std::exp(log_mu + lphi[j]);
      log_value = -wd * log_mu + log_composition_tail_sum(xs, w, opts.truncation_tol);
    }
    return {std::exp(log_value), u_max};
  }

  PathBound path_bound(std::size_t index, std::uint64_t w) {
    PathState& path = paths[index];
    const ThetaOptimum best =
        infimum_over_theta([&](double theta) { return probe(path, w, theta); }, opts.theta);
    PathBound out;
    out.probability = std::clamp(best.value, 0.0, 1.0);
    out.theta_star = best.theta_star;
    const double log_mu = best.theta_star * path.share * cfg.arrival.rate;
    for (double l : log_phi(path, best.theta_star)) out.utilizations.push_back(std::exp(log_mu + l));
    return out;
  }

  std::vector<PathBound> all_paths(std::uint64_t w) {
    std::vector<PathBound> out;
    std::vector<std::size_t> failed;
    std::optional<StabilityError> first_error;
    const std::size_t distinct = identical_paths && opts.use_closed_forms ? 1 : paths.size();
    for (std::size_t i = 0; i < distinct; ++i) {
      try {
        out.push_back(path_bound(i, w));
      } catch (const StabilityError& e) {
        failed.push_back(i);
        if (!first_error) first_error.emplace(e);
      }
    }
    if (!failed.empty()) {
      std::string which;
      for (std::size_t i : failed) which += (which.empty() ? "" : ", ") + std::to_string(i);
      throw StabilityError(std::string(kind_name(cfg.kind)) + ": unstable on path " + which + ": " +
                               first_error->what(),
                           first_error->tightest_utilization(), failed.front());
    }
    return out;
  }

  BoundResult assemble(const std::vector<PathBound>& bounds, bool union_form) {
    BoundResult result;
    const std::size_t m = paths.size();
    for (std::size_t i = 0; i < m; ++i) {
      const PathBound& b = bounds[bounds.size() == 1 ? 0 : i];
      result.theta_star.push_back(b.theta_star);
      result.path_probability.push_back(b.probability);
      result.utilizations.push_back(b.utilizations);
    }
    if (union_form) {
      result.probability = combine_union(result.path_probability);
    } else if (bounds.size() == 1 && m > 1) {
      const double p = bounds.front().probability;
      result.probability = std::clamp(-std::expm1(static_cast<double>(m) * std::log1p(-p)), 0.0, 1.0);
    } else {
      result.probability = combine_independent(result.path_probability);
    }
    result.stable = true;
    return result;
  }
};

BoundEvaluator::BoundEvaluator(TopologyConfig cfg, BoundOptions opts)
    : impl_(std::make_unique<Impl>(std::move(cfg), opts)) {}
BoundEvaluator::~BoundEvaluator() = default;
BoundEvaluator::BoundEvaluator(BoundEvaluator&&) noexcept = default;
BoundEvaluator& BoundEvaluator::operator=(BoundEvaluator&&) noexcept = default;

const TopologyConfig& BoundEvaluator::config() const { return impl_->cfg; }

BoundResult BoundEvaluator::evaluate_product(std::uint64_t w) { return impl_->assemble(impl_->all_paths(w), false); }

BoundResult BoundEvaluator::evaluate_union(std::uint64_t w) { return impl_->assemble(impl_->all_paths(w), true); }

BoundResult BoundEvaluator::evaluate(std::uint64_t w) {
  return impl_->cfg.arrival.kind == ArrivalKind::stochastic_dependent ? evaluate_union(w) : evaluate_product(w);
}

BoundResult dispersion_bound(const TopologyConfig& cfg, std::uint64_t w, const BoundOptions& opts) {
  if (cfg.kind != TopologyKind::dispersion) throw std::invalid_argument("dispersion_bound: wrong topology kind");
  return BoundEvaluator(cfg, opts).evaluate_product(w);
}

BoundResult dispersion_bound_union(const TopologyConfig& cfg, std::uint64_t w, const BoundOptions& opts) {
  if (cfg.kind != TopologyKind::dispersion) throw std::invalid_argument("dispersion_bound_union: wrong topology kind");
  if (cfg.arrival.kind != ArrivalKind::stochastic_dependent) {
    throw std::invalid_argument("dispersion_bound_union: needs dependent stochastic arrivals");
  }
  return BoundEvaluator(cfg, opts).evaluate_union(w);
}

BoundResult densification_bound(const TopologyConfig& cfg, std::uint64_t w, const BoundOptions& opts) {
  if (cfg.kind != TopologyKind::densification) throw std::invalid_argument("densification_bound: wrong topology kind");
  return BoundEvaluator(cfg, opts).evaluate_product(w);
}

BoundResult hybrid_bound(const TopologyConfig& cfg, std::uint64_t w, const BoundOptions& opts) {
  if (cfg.kind != TopologyKind::hybrid) throw std::invalid_argument("hybrid_bound: wrong topology kind");
  return BoundEvaluator(cfg, opts).evaluate(w);
}

BoundResult evaluate_bound(const TopologyConfig& cfg, std::uint64_t w, const BoundOptions& opts) {
  return BoundEvaluator(cfg, opts).evaluate(w);
}

std::uint64_t invert_delay(BoundEvaluator& evaluator, double epsilon, std::uint64_t w_cap) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("invert_delay: epsilon must lie in (0, 1]");
  double last_utilization = 0.0;
  auto bound = [&](std::uint64_t w) {
    try {
      const BoundResult r = evaluator.evaluate(w);
      for (const auto& path : r.utilizations) {
        for (double u : path) last_utilization = std::max(last_utilization, u);
      }
      return r.probability;
    } catch (const DivergenceError&) {
      throw;
    } catch (const StabilityError& e) {
      throw DivergenceError(std::string("invert_delay: ") + e.what(), e.tightest_utilization(), e.path());
    }
  };

  if (bound(0) <= epsilon) return 0;
  std::uint64_t lo = 0;
  std::uint64_t hi = 1;
  while (bound(hi) > epsilon) {
    if (hi >= w_cap) {
      throw DivergenceError("invert_delay: delay target exceeds the cap of " + std::to_string(w_cap) + " slots",
                            last_utilization);
    }
    lo = hi;
    hi = std::min(2 * hi, w_cap);
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (bound(mid) <= epsilon ? hi : lo) = mid;
  }
  return hi;
}

std::uint64_t invert_delay(const TopologyConfig& cfg, double epsilon, const BoundOptions& opts, std::uint64_t w_cap) {
  BoundEvaluator evaluator(cfg, opts);
  return invert_delay(evaluator, epsilon, w_cap);
}

StabilityReport stability_report(const TopologyConfig& cfg, double theta, const BoundOptions& opts) {
  cfg.validate();
  opts.theta.validate();
  if (!(theta > 0.0)) throw std::invalid_argument("stability_report: theta must be positive");
  StabilityReport report;
  report.theta = theta;
  report.max_stable_rate = kInf;
  const double theta_min = opts.theta.theta_min;
  for (std::size_t i = 0; i < cfg.paths.size(); ++i) {
    const double share = cfg.arrival.share(cfg.paths.size() > 1 ? i : 0);
    for (std::size_t j = 0; j < cfg.paths[i].hops.size(); ++j) {
      const FadingLink& hop = cfg.paths[i].hops[j];
      HopStability h;
      h.path = i;
      h.hop = j;
      h.rate_share = share;
      h.max_stable_rate = -log_service_mgf_decay(hop, hop.eta * theta_min, opts.quad) / theta_min / share;
      const double log_phi = log_service_mgf_decay(hop, hop.eta * theta, opts.quad);
      h.effective_capacity = -log_phi / theta;
      h.utilization = std::exp(theta * share * cfg.arrival.rate + log_phi);
      h.stable_at_theta = h.utilization < 1.0;
      h.admissible = share * cfg.arrival.rate <= h.effective_capacity;
      report.max_stable_rate = std::min(report.max_stable_rate, h.max_stable_rate);
      report.hops.push_back(h);
    }
  }
  return report;
}

}  // namespace mmdelay
