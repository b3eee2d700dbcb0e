#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mmdelay/errors.hpp"
#include "mmdelay/schemes.hpp"
#include "oracles.hpp"

using namespace mmdelay;

namespace {

const LinkParams kParams{};
const double kGamma85 = db_to_linear(85.0);
constexpr double kL = 1000.0;

BoundOptions general_route() {
  BoundOptions o;
  o.use_closed_forms = false;
  return o;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("combining per-path bounds") {
  CHECK(combine_union({0.1, 0.2}) == doctest::Approx(0.3));
  CHECK(combine_union({0.6, 0.6}) == 1.0);
  for (int m : {1, 2, 5}) {
    const double p = 0.07;
    CHECK(combine_independent(std::vector<double>(m, p)) == doctest::Approx(1.0 - std::pow(1.0 - p, m)).epsilon(1e-14));
  }
  CHECK(combine_independent({1.0, 0.2}) == 1.0);
  CHECK(combine_independent({0.0, 0.0}) == 0.0);
}

TEST_CASE("builders allocate power and distance homogeneously") {
  const auto d = make_dispersion(4, kGamma85, kL, kParams, 2.0);
  REQUIRE(d.paths.size() == 4);
  CHECK(d.paths[2].hops.size() == 1);
  CHECK(d.paths[2].hops[0].gamma_lin == doctest::Approx(kGamma85 / 4));
  CHECK(d.paths[2].hops[0].distance_m == kL);
  CHECK(d.arrival.splitting == std::vector<double>(4, 0.25));

  const auto k = make_densification(3, kGamma85, kL, kParams, 2.0);
  REQUIRE(k.paths.size() == 1);
  CHECK(k.paths[0].hops.size() == 3);
  CHECK(k.paths[0].hops[1].distance_m == doctest::Approx(kL / 3));

  const auto h = make_hybrid(12, 3, kGamma85, kL, kParams, 2.0);
  REQUIRE(h.paths.size() == 3);
  CHECK(h.paths[0].hops.size() == 4);
  CHECK(h.paths[0].hops[0].gamma_lin == doctest::Approx(kGamma85 / 12));
  CHECK(h.paths[0].hops[0].distance_m == doctest::Approx(kL / 4));
  CHECK_THROWS_AS(make_hybrid(12, 5, kGamma85, kL, kParams, 2.0), std::invalid_argument);
}

TEST_CASE("topology shape validation") {
  auto cfg = make_dispersion(2, kGamma85, kL, kParams, 2.0);
  cfg.paths[0].hops.push_back(cfg.paths[0].hops[0]);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  auto dens = make_densification(2, kGamma85, kL, kParams, 2.0);
  dens.paths.push_back(dens.paths[0]);
  CHECK_THROWS_AS(dens.validate(), std::invalid_argument);
  auto hyb = make_hybrid(4, 2, kGamma85, kL, kParams, 2.0);
  hyb.arrival.splitting = {1.0};
  CHECK_THROWS_AS(hyb.validate(), std::invalid_argument);
}

TEST_CASE("one dispersion path is the single-queue bound") {
  // One 85 dB hop has mean capacity near 1.85, so it carries 1.5 and not 2.
  const auto cfg = make_dispersion(1, kGamma85, kL, kParams, 1.5);
  const FadingLink& link = cfg.paths[0].hops[0];
  for (std::uint64_t w : {1u, 3u, 8u}) {
    const double grid = oracle::dense_log_grid_min(
        [&](double t) { return oracle::single_queue_bound_at(link, 1.5, w, t); }, 1e-3, 1e2, 10000);
    const BoundResult r = dispersion_bound(cfg, w);
    CAPTURE(w);
    CHECK(r.probability <= std::min(grid, 1.0) * (1.0 + 1e-9));
    CHECK(r.probability >= std::min(grid, 1.0) * 0.99);
  }
}

TEST_CASE("homogeneous dispersion at the 85 dB point against the oracle and the general route") {
  for (int m : {2, 4}) {
    const auto cfg = make_dispersion(m, kGamma85, kL, kParams, 2.0);
    const FadingLink& link = cfg.paths[0].hops[0];
    for (std::uint64_t w : {1u, 2u, 5u}) {
      const double per_path = oracle::dense_log_grid_min(
          [&](double t) { return oracle::single_queue_bound_at(link, 2.0 / m, w, t); }, 1e-3, 1e2, 10000);
      const double expected = -std::expm1(m * std::log1p(-std::min(per_path, 1.0)));
      const BoundResult fast = dispersion_bound(cfg, w);
      const BoundResult slow = dispersion_bound(cfg, w, general_route());
      CAPTURE(m);
      CAPTURE(w);
      CHECK(rel(fast.probability, expected) < 0.01);
      CHECK(rel(fast.probability, slow.probability) < 1e-8);
      CHECK(fast.theta_star.size() == static_cast<std::size_t>(m));
    }
  }
  // Dispersing across four paths beats two at this operating point.
  const double m2 = dispersion_bound(make_dispersion(2, kGamma85, kL, kParams, 2.0), 1).probability;
  const double m4 = dispersion_bound(make_dispersion(4, kGamma85, kL, kParams, 2.0), 1).probability;
  CHECK(m4 < m2);
}

TEST_CASE("densification closed form agrees with the composition DP") {
  for (int k : {2, 3, 4, 8}) {
    const auto cfg = make_densification(k, kGamma85, kL, kParams, 2.0);
    for (std::uint64_t w : {0u, 1u, 2u, 5u, 12u}) {
      const double fast = densification_bound(cfg, w).probability;
      const double slow = densification_bound(cfg, w, general_route()).probability;
      CAPTURE(k);
      CAPTURE(w);
      if (fast < 1.0 || slow < 1.0) CHECK(rel(fast, slow) < 1e-8);
    }
  }
}

TEST_CASE("one-hop densification equals one-path dispersion") {
  const auto d = make_dispersion(1, kGamma85, kL, kParams, 1.5);
  const auto k = make_densification(1, kGamma85, kL, kParams, 1.5);
  for (std::uint64_t w : {1u, 2u, 6u}) CHECK(dispersion_bound(d, w).probability == densification_bound(k, w).probability);
}

TEST_CASE("more relays shrink the densification bound") {
  const auto k2 = make_densification(2, kGamma85, kL, kParams, 2.0);
  const auto k4 = make_densification(4, kGamma85, kL, kParams, 2.0);
  for (std::uint64_t w : {1u, 2u, 3u, 5u}) CHECK(densification_bound(k4, w).probability < densification_bound(k2, w).probability);
}

TEST_CASE("heterogeneous tandem matches enumeration at the optimizing theta") {
  TopologyConfig cfg;
  cfg.kind = TopologyKind::densification;
  cfg.paths.push_back(PathSpec{{kParams.make(kGamma85 / 2, 400.0), kParams.make(kGamma85 / 2, 600.0)}});
  cfg.arrival.rate = 2.0;
  for (std::uint64_t w : {1u, 3u, 6u}) {
    const BoundResult r = densification_bound(cfg, w);
    const double theta = r.theta_star[0];
    const double mu = std::exp(theta * 2.0);
    std::vector<double> xs;
    for (const FadingLink& hop : cfg.paths[0].hops) xs.push_back(mu * mgf_oracle(hop, hop.eta * theta));
    oracle::CompositionEnumerator e(xs, w, 1'000'000, 1e-30L);
    CHECK(e.pruned_mass() < 1e-20L);
    const double ref = static_cast<double>(e.sum()) / std::pow(mu, static_cast<double>(w));
    CAPTURE(w);
    CHECK(rel(r.path_probability[0], std::min(ref, 1.0)) < 1e-6);
  }
}

TEST_CASE("hybrid reduces exactly to dispersion and densification") {
  for (int m : {2, 4}) {
    const auto h = make_hybrid(m, m, kGamma85, kL, kParams, 2.0);
    const auto d = make_dispersion(m, kGamma85, kL, kParams, 2.0);
    for (std::uint64_t w : {1u, 4u}) CHECK(hybrid_bound(h, w).probability == dispersion_bound(d, w).probability);
  }
  for (int n : {2, 4}) {
    const auto h = make_hybrid(n, 1, kGamma85, kL, kParams, 2.0);
    const auto k = make_densification(n, kGamma85, kL, kParams, 2.0);
    for (std::uint64_t w : {1u, 4u}) CHECK(hybrid_bound(h, w).probability == densification_bound(k, w).probability);
  }
}

TEST_CASE("union and product forms agree when per-path bounds are small") {
  const auto dep = make_dispersion(2, kGamma85, kL, kParams, 2.0, ArrivalKind::stochastic_dependent);
  const auto ind = make_dispersion(2, kGamma85, kL, kParams, 2.0);
  for (std::uint64_t w = 1; w <= 6; ++w) {
    const BoundResult u = dispersion_bound_union(dep, w);
    const BoundResult p = dispersion_bound(ind, w);
    CHECK(u.probability == doctest::Approx(std::min(1.0, u.path_probability[0] + u.path_probability[1])));
    if (u.path_probability[0] <= 1e-3 && u.path_probability[1] <= 1e-3) CHECK(rel(u.probability, p.probability) < 0.05);
  }
  CHECK_THROWS_AS(dispersion_bound_union(ind, 1), std::invalid_argument);
}

TEST_CASE("bounds are probabilities, non-increasing in w and in power") {
  const std::vector<TopologyConfig> configs = {
      make_dispersion(3, kGamma85, kL, kParams, 1.5),
      make_densification(3, kGamma85, kL, kParams, 1.5),
      make_hybrid(6, 2, kGamma85, kL, kParams, 1.5),
  };
  for (const auto& cfg : configs) {
    BoundEvaluator ev(cfg);
    double prev = 1.0;
    for (std::uint64_t w = 0; w <= 20; ++w) {
      const double p = ev.evaluate(w).probability;
      CHECK(p >= 0.0);
      CHECK(p <= prev * (1.0 + 1e-12));
      prev = p;
    }
  }
  for (std::uint64_t w : {1u, 3u}) {
    double prev = 1.0;
    for (double g = 78.0; g <= 90.0; g += 2.0) {
      const double p = evaluate_bound(make_hybrid(4, 2, db_to_linear(g), kL, kParams, 1.5), w).probability;
      CHECK(p <= prev * (1.0 + 1e-12));
      prev = p;
    }
  }
}

TEST_CASE("unstable paths are named") {
  TopologyConfig cfg;
  cfg.kind = TopologyKind::dispersion;
  cfg.paths.push_back(PathSpec{{kParams.make(kGamma85, kL)}});
  cfg.paths.push_back(PathSpec{{kParams.make(kGamma85, 1e5)}});
  cfg.arrival.rate = 2.0;
  cfg.arrival.splitting = {0.5, 0.5};
  try {
    dispersion_bound(cfg, 2);
    FAIL("expected StabilityError");
  } catch (const StabilityError& e) {
    REQUIRE(e.path().has_value());
    CHECK(*e.path() == 1);
    CHECK(e.tightest_utilization() >= 1.0);
  }
}

TEST_CASE("delay inversion") {
  const auto cfg = make_hybrid(12, 3, kGamma85, kL, kParams, 5.0);
  CHECK(invert_delay(cfg, 1.0) == 0);
  BoundEvaluator ev(cfg);
  for (double eps : {1e-1, 1e-3, 1e-6}) {
    const std::uint64_t w = invert_delay(ev, eps);
    CAPTURE(eps);
    CHECK(ev.evaluate(w).probability <= eps);
    if (w > 0) CHECK(ev.evaluate(w - 1).probability > eps);
  }
  std::uint64_t prev = 0;
  for (double rho : {3.0, 4.0, 5.0, 6.0, 6.8}) {
    const std::uint64_t w = invert_delay(make_hybrid(12, 3, kGamma85, kL, kParams, rho), 1e-3);
    CHECK(w >= prev);
    prev = w;
  }
  CHECK_THROWS_AS(invert_delay(make_hybrid(12, 3, kGamma85, kL, kParams, 50.0), 1e-3), DivergenceError);
  CHECK_THROWS_AS(invert_delay(cfg, 1e-300, {}, 8), DivergenceError);
  CHECK_THROWS_AS(invert_delay(cfg, 0.0), std::invalid_argument);
}

TEST_CASE("stability report") {
  const auto single = make_dispersion(1, kGamma85, kL, kParams, 2.0);
  const StabilityReport r = stability_report(single, 2.0);
  REQUIRE(r.hops.size() == 1);
  CHECK(r.max_stable_rate >= 1.5);
  CHECK(r.max_stable_rate <= 2.5);
  // The supremum sits near the mean capacity, the theta -> 0 limit.
  CHECK(r.max_stable_rate == doctest::Approx(mean_capacity(single.paths[0].hops[0])).epsilon(0.01));
  CHECK(r.hops[0].effective_capacity == doctest::Approx(-log_service_mgf_decay(single.paths[0].hops[0], single.paths[0].hops[0].eta * 2.0) / 2.0));
  CHECK(r.hops[0].stable_at_theta == (r.hops[0].utilization < 1.0));
  CHECK(r.hops[0].admissible == (2.0 <= r.hops[0].effective_capacity));

  double prev = 0.0;
  for (double g = 70.0; g <= 200.0; g += 10.0) {
    const double rate = stability_report(make_dispersion(1, db_to_linear(g), kL, kParams, 1.0), 1.0).max_stable_rate;
    CHECK(rate > prev);
    prev = rate;
  }
  CHECK(prev > 15.0);

  // A load stable on one link stays stable when split across m copies of it.
  FadingLink link = kParams.make(kGamma85, kL);
  TopologyConfig split;
  split.kind = TopologyKind::dispersion;
  split.paths.assign(3, PathSpec{{link}});
  split.arrival.rate = 1.5;
  split.arrival.splitting = {0.2, 0.3, 0.5};
  const StabilityReport sr = stability_report(split, 1.0);
  for (const HopStability& h : sr.hops) CHECK(h.stable_at_theta);
}
