#include "mmdelay/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace mmdelay::cli {
namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& message) {
  const YAML::Mark mark = node.Mark();
  if (mark.line >= 0) throw ConfigError(fmt::format("line {}: field '{}': {}", mark.line + 1, field, message));
  throw ConfigError(fmt::format("field '{}': {}", field, message));
}

// A mapping whose keys are checked against an allow-list so typos surface
// as errors instead of silently falling back to defaults.
class Section {
 public:
  Section(const YAML::Node& node, std::string path, std::set<std::string> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node_) return;
    if (!node_.IsMap()) fail(node_, path_, "expected a mapping");
    for (const auto& item : node_) {
      const auto key = item.first.as<std::string>();
      if (!allowed.count(key)) fail(item.first, field(key), "unknown key");
    }
  }

  bool has(const std::string& key) const { return node_ && node_[key]; }
  YAML::Node node(const std::string& key) const { return node_ ? node_[key] : YAML::Node(); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class T>
  void read(const std::string& key, T& out) const {
    if (!has(key)) return;
    const YAML::Node value = node_[key];
    try {
      out = value.as<T>();
    } catch (const YAML::Exception&) {
      fail(value, field(key), "cannot convert '" + value.Scalar() + "'");
    }
  }

  template <class T>
  void read_positive(const std::string& key, T& out) const {
    read(key, out);
    if (has(key) && !(out > T{0})) fail(node_[key], field(key), "must be positive");
  }

 private:
  YAML::Node node_;
  std::string path_;
};

TopologyKind parse_kind(const YAML::Node& node, const std::string& field) {
  const auto text = node.as<std::string>();
  if (text == "dispersion") return TopologyKind::dispersion;
  if (text == "densification") return TopologyKind::densification;
  if (text == "hybrid") return TopologyKind::hybrid;
  fail(node, field, "expected dispersion, densification or hybrid");
}

ArrivalKind parse_arrival_kind(const YAML::Node& node, const std::string& field) {
  const auto text = node.as<std::string>();
  if (text == "deterministic") return ArrivalKind::deterministic;
  if (text == "dependent") return ArrivalKind::stochastic_dependent;
  fail(node, field, "expected deterministic or dependent");
}

SweepAxis parse_axis(const YAML::Node& node, const std::string& field) {
  const auto text = node.as<std::string>();
  if (text == "w") return SweepAxis::w;
  if (text == "rho") return SweepAxis::rho;
  if (text == "gamma_db") return SweepAxis::gamma_db;
  if (text == "m") return SweepAxis::m;
  if (text == "k") return SweepAxis::k;
  if (text == "theta") return SweepAxis::theta;
  fail(node, field, "expected one of w, rho, gamma_db, m, k, theta");
}

void read_topology(const YAML::Node& node, const std::string& path, TopologyParams& topo) {
  const Section s(node, path, {"kind", "gamma_db", "distance_m", "m", "k", "n", "paths", "splitting"});
  if (s.has("kind")) topo.kind = parse_kind(s.node("kind"), s.field("kind"));
  s.read("gamma_db", topo.gamma_db);
  s.read_positive("distance_m", topo.distance_m);
  s.read_positive("m", topo.m);
  s.read_positive("k", topo.k);
  s.read_positive("n", topo.n);
  s.read("splitting", topo.splitting);
  if (s.has("paths")) {
    const YAML::Node paths = s.node("paths");
    if (!paths.IsSequence() || paths.size() == 0) fail(paths, s.field("paths"), "expected a non-empty list");
    topo.paths.clear();
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const std::string ppath = fmt::format("{}[{}]", s.field("paths"), i);
      const Section p(paths[i], ppath, {"hops"});
      const YAML::Node hops = p.node("hops");
      if (!hops || !hops.IsSequence() || hops.size() == 0) fail(paths[i], p.field("hops"), "expected a non-empty list");
      std::vector<HopParams> out;
      for (std::size_t j = 0; j < hops.size(); ++j) {
        const Section h(hops[j], fmt::format("{}[{}]", p.field("hops"), j), {"gamma_db", "distance_m"});
        HopParams hop;
        if (!h.has("gamma_db") || !h.has("distance_m")) fail(hops[j], h.field("gamma_db"), "hops need gamma_db and distance_m");
        h.read("gamma_db", hop.gamma_db);
        h.read_positive("distance_m", hop.distance_m);
        out.push_back(hop);
      }
      topo.paths.push_back(std::move(out));
    }
  }
}

void read_arrival(const YAML::Node& node, const std::string& path, SeriesConfig& series) {
  const Section s(node, path, {"rate", "kind"});
  s.read_positive("rate", series.rate);
  if (s.has("kind")) series.arrival_kind = parse_arrival_kind(s.node("kind"), s.field("kind"));
}

std::string default_label(const SeriesConfig& series) {
  const TopologyParams& t = series.topology;
  if (!t.paths.empty()) return fmt::format("{} custom", kind_name(t.kind));
  switch (t.kind) {
    case TopologyKind::dispersion: return fmt::format("dispersion m={}", t.m);
    case TopologyKind::densification: return fmt::format("densification k={}", t.k);
    case TopologyKind::hybrid: return fmt::format("hybrid n={} m={}", t.n, t.m);
  }
  return "series";
}

void check_integral(const YAML::Node& node, const std::string& field, double v, double min) {
  if (v != std::floor(v) || v < min) fail(node, field, fmt::format("value {} must be an integer >= {}", v, min));
}

}  // namespace

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::w: return "w";
    case SweepAxis::rho: return "rho";
    case SweepAxis::gamma_db: return "gamma_db";
    case SweepAxis::m: return "m";
    case SweepAxis::k: return "k";
    case SweepAxis::theta: return "theta";
  }
  return "?";
}

const char* kind_name(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::dispersion: return "dispersion";
    case TopologyKind::densification: return "densification";
    case TopologyKind::hybrid: return "hybrid";
  }
  return "?";
}

LinkParams preset_link(const std::string& preset) {
  if (preset == "paper-sec6") return LinkParams{2.45, 3.0, 500.0, 1.0};
  throw ConfigError("unknown preset '" + preset + "' (available: paper-sec6)");
}

ExperimentConfig parse_config(const std::string& yaml_text, const std::string& preset_override) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  if (!root || !root.IsMap()) throw ConfigError("config must be a YAML mapping");

  const Section top(root, "",
                    {"schema_version", "preset", "link", "topology", "arrival", "series", "sweep", "bound",
                     "theta_search", "qos", "effcap", "plan", "output"});
  ExperimentConfig cfg;
  if (!top.has("schema_version")) throw ConfigError("field 'schema_version': required");
  top.read("schema_version", cfg.schema_version);
  if (cfg.schema_version != 1) fail(root["schema_version"], "schema_version", "only version 1 is supported");

  top.read("preset", cfg.preset);
  if (!preset_override.empty()) cfg.preset = preset_override;
  const Section link(top.node("link"), "link", {"bandwidth_mhz", "alpha", "nakagami_m", "slot_s"});
  if (!cfg.preset.empty()) {
    cfg.link = preset_link(cfg.preset);
  } else if (!top.has("link")) {
    throw ConfigError("field 'link': required when no preset is given");
  }
  link.read_positive("bandwidth_mhz", cfg.link.bandwidth_mhz);
  link.read_positive("alpha", cfg.link.alpha);
  link.read("nakagami_m", cfg.link.nakagami_m);
  link.read_positive("slot_s", cfg.link.slot_s);
  if (!(cfg.link.nakagami_m >= 0.5)) fail(top.node("link")["nakagami_m"], "link.nakagami_m", "must be at least 0.5");

  SeriesConfig base;
  if (!top.has("topology")) throw ConfigError("field 'topology': required");
  read_topology(top.node("topology"), "topology", base.topology);
  read_arrival(top.node("arrival"), "arrival", base);

  if (top.has("series")) {
    const YAML::Node list = top.node("series");
    if (!list.IsSequence() || list.size() == 0) fail(list, "series", "expected a non-empty list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = fmt::format("series[{}]", i);
      const Section s(list[i], path, {"label", "topology", "arrival"});
      SeriesConfig series = base;
      read_topology(s.node("topology"), s.field("topology"), series.topology);
      read_arrival(s.node("arrival"), s.field("arrival"), series);
      series.label = default_label(series);
      s.read("label", series.label);
      cfg.series.push_back(std::move(series));
    }
  } else {
    base.label = default_label(base);
    cfg.series.push_back(base);
  }

  if (!top.has("sweep")) throw ConfigError("field 'sweep': required");
  const Section sweep(top.node("sweep"), "sweep", {"axis", "values"});
  if (!sweep.has("axis")) fail(top.node("sweep"), "sweep.axis", "required");
  cfg.sweep.axis = parse_axis(sweep.node("axis"), "sweep.axis");
  sweep.read("values", cfg.sweep.values);
  if (cfg.sweep.values.empty()) fail(top.node("sweep"), "sweep.values", "sweep list must not be empty");
  for (double v : cfg.sweep.values) {
    const YAML::Node at = sweep.node("values");
    switch (cfg.sweep.axis) {
      case SweepAxis::w: check_integral(at, "sweep.values", v, 0); break;
      case SweepAxis::m:
      case SweepAxis::k: check_integral(at, "sweep.values", v, 1); break;
      case SweepAxis::rho:
      case SweepAxis::theta:
        if (!(v > 0.0)) fail(at, "sweep.values", "values must be positive");
        break;
      case SweepAxis::gamma_db:
        if (!std::isfinite(v)) fail(at, "sweep.values", "values must be finite");
        break;
    }
  }

  const Section bound(top.node("bound"), "bound", {"mode", "w", "epsilon", "w_cap", "closed_forms", "truncation_tol"});
  if (bound.has("mode")) {
    const auto mode = bound.node("mode").as<std::string>();
    if (mode == "bound") {
      cfg.mode = BoundMode::bound;
    } else if (mode == "invert") {
      cfg.mode = BoundMode::invert;
    } else {
      fail(bound.node("mode"), "bound.mode", "expected bound or invert");
    }
  }
  bound.read("w", cfg.w);
  bound.read_positive("epsilon", cfg.epsilon);
  if (cfg.epsilon > 1.0) fail(bound.node("epsilon"), "bound.epsilon", "must not exceed 1");
  bound.read_positive("w_cap", cfg.w_cap);
  bound.read("closed_forms", cfg.bound_options.use_closed_forms);
  bound.read_positive("truncation_tol", cfg.bound_options.truncation_tol);

  const Section theta(top.node("theta_search"), "theta_search", {"min", "max", "grid_points", "refine_iters"});
  theta.read_positive("min", cfg.bound_options.theta.theta_min);
  theta.read_positive("max", cfg.bound_options.theta.theta_max);
  theta.read("grid_points", cfg.bound_options.theta.grid_points);
  theta.read("refine_iters", cfg.bound_options.theta.refine_iters);
  try {
    cfg.bound_options.theta.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'theta_search': ") + e.what());
  }

  const Section qos(top.node("qos"), "qos", {"theta"});
  qos.read_positive("theta", cfg.qos_theta);

  const Section effcap(top.node("effcap"), "effcap", {"n", "simulate"});
  effcap.read_positive("n", cfg.effcap_n);
  effcap.read("simulate", cfg.effcap_simulate);

  const Section plan(top.node("plan"), "plan",
                     {"horizon_slots", "replications", "seed", "warmup_slots", "measure_at", "threads"});
  plan.read_positive("horizon_slots", cfg.plan.horizon_slots);
  plan.read_positive("replications", cfg.plan.replications);
  plan.read("seed", cfg.plan.seed);
  plan.read("warmup_slots", cfg.plan.warmup_slots);
  if (plan.has("measure_at")) cfg.plan.measure_at = plan.node("measure_at").as<std::uint64_t>();
  plan.read("threads", cfg.plan.threads);
  try {
    cfg.plan.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'plan': ") + e.what());
  }

  const Section output(top.node("output"), "output", {"path", "format"});
  output.read("path", cfg.output_path);
  output.read("format", cfg.output_format);
  if (cfg.output_format != "csv" && cfg.output_format != "jsonl") {
    fail(output.node("format"), "output.format", "expected csv or jsonl");
  }

  // Build every series once so layout errors surface at load time.
  for (std::size_t i = 0; i < cfg.series.size(); ++i) {
    try {
      build_topology(cfg.series[i], cfg.link);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("series '{}': {}", cfg.series[i].label, e.what()));
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::string& preset_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), preset_override);
}

SeriesConfig apply_axis(const SeriesConfig& series, SweepAxis axis, double value) {
  SeriesConfig out = series;
  const bool structural = axis == SweepAxis::gamma_db || axis == SweepAxis::m || axis == SweepAxis::k;
  if (structural && !out.topology.paths.empty()) {
    throw std::invalid_argument(fmt::format("axis {} cannot vary an explicit path layout", axis_name(axis)));
  }
  switch (axis) {
    case SweepAxis::rho: out.rate = value; break;
    case SweepAxis::gamma_db: out.topology.gamma_db = value; break;
    case SweepAxis::m: out.topology.m = static_cast<int>(value); break;
    case SweepAxis::k:
      if (out.topology.kind == TopologyKind::hybrid) {
        const int k = static_cast<int>(value);
        if (out.topology.n % k != 0) throw std::invalid_argument(fmt::format("k={} does not divide n={}", k, out.topology.n));
        out.topology.m = out.topology.n / k;
      } else {
        out.topology.k = static_cast<int>(value);
      }
      break;
    case SweepAxis::w:
    case SweepAxis::theta: break;
  }
  return out;
}

TopologyConfig build_topology(const SeriesConfig& series, const LinkParams& link) {
  const TopologyParams& t = series.topology;
  if (t.paths.empty()) {
    const double gamma = db_to_linear(t.gamma_db);
    switch (t.kind) {
      case TopologyKind::dispersion: return make_dispersion(t.m, gamma, t.distance_m, link, series.rate, series.arrival_kind);
      case TopologyKind::densification: return make_densification(t.k, gamma, t.distance_m, link, series.rate);
      case TopologyKind::hybrid: return make_hybrid(t.n, t.m, gamma, t.distance_m, link, series.rate, series.arrival_kind);
    }
  }
  TopologyConfig cfg;
  cfg.kind = t.kind;
  for (const auto& hops : t.paths) {
    PathSpec path;
    for (const HopParams& h : hops) path.hops.push_back(link.make(db_to_linear(h.gamma_db), h.distance_m));
    cfg.paths.push_back(std::move(path));
  }
  cfg.arrival.rate = series.rate;
  cfg.arrival.kind = series.arrival_kind;
  cfg.arrival.splitting = t.splitting;
  if (cfg.arrival.splitting.empty() && cfg.paths.size() > 1) {
    cfg.arrival.splitting.assign(cfg.paths.size(), 1.0 / static_cast<double>(cfg.paths.size()));
  }
  cfg.validate();
  return cfg;
}

}  // namespace mmdelay::cli
