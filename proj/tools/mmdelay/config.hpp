#pragma once

// Experiment configuration: a schema-versioned YAML document describing the
// radio parameters, one or more topology series, a single sweep axis, bound
// and simulation settings, and the output destination.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmdelay/calculus.hpp"
#include "mmdelay/channel.hpp"
#include "mmdelay/schemes.hpp"
#include "mmdelay/sim.hpp"

namespace mmdelay::cli {

/// Any invalid or inconsistent configuration. The message names the field
/// and, when known, the line in the file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One hop of an explicitly listed path; unset fields fall back to the
/// series' shared values.
struct HopParams {
  double gamma_db = 0.0;
  double distance_m = 0.0;
};

struct TopologyParams {
  TopologyKind kind = TopologyKind::dispersion;
  double gamma_db = 85.0;     // sum power over all hops
  double distance_m = 1000.0; // source-destination distance L
  int m = 1;                  // parallel paths (dispersion, hybrid)
  int k = 1;                  // hops (densification)
  int n = 1;                  // total hops (hybrid)
  std::vector<std::vector<HopParams>> paths;  // explicit layout; overrides m/k/n
  std::vector<double> splitting;              // explicit layout only
};

struct SeriesConfig {
  std::string label;
  TopologyParams topology;
  double rate = 2.0;
  ArrivalKind arrival_kind = ArrivalKind::deterministic;
};

enum class SweepAxis { w, rho, gamma_db, m, k, theta };

struct SweepConfig {
  SweepAxis axis = SweepAxis::w;
  std::vector<double> values;
};

enum class BoundMode { bound, invert };

struct ExperimentConfig {
  int schema_version = 1;
  std::string preset;
  LinkParams link;
  std::vector<SeriesConfig> series;
  SweepConfig sweep;

  BoundMode mode = BoundMode::bound;
  std::uint64_t w = 1;        // delay target when w is not the sweep axis
  double epsilon = 1e-3;      // invert mode
  std::uint64_t w_cap = 1'000'000;
  BoundOptions bound_options;

  double qos_theta = 2.0;     // effective capacity and stability
  int effcap_n = 0;           // 0: take topology n
  bool effcap_simulate = false;

  SimPlan plan;

  std::string output_path;    // empty: stdout
  std::string output_format = "csv";
};

const char* axis_name(SweepAxis axis);
const char* kind_name(TopologyKind kind);

/// Parameter pack named by `preset`; throws ConfigError for unknown names.
LinkParams preset_link(const std::string& preset);

ExperimentConfig parse_config(const std::string& yaml_text, const std::string& preset_override = "");
ExperimentConfig load_config(const std::string& path, const std::string& preset_override = "");

/// Applies one sweep value to a series, returning the adjusted copy.
SeriesConfig apply_axis(const SeriesConfig& series, SweepAxis axis, double value);

/// Builds the library topology for a series.
TopologyConfig build_topology(const SeriesConfig& series, const LinkParams& link);

}  // namespace mmdelay::cli
