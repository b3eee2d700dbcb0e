// mmdelay: configuration-driven delay-bound and effective-capacity runner.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <yaml-cpp/exceptions.h>

#include "mmdelay/commands.hpp"
#include "mmdelay/errors.hpp"

namespace {

using namespace mmdelay::cli;

struct Flags {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string preset;
  bool strict = false;
};

int run(const std::string& command, const Flags& flags) {
  ExperimentConfig cfg = load_config(flags.config, flags.preset);
  if (flags.seed) cfg.plan.seed = *flags.seed;
  if (flags.threads) cfg.plan.threads = *flags.threads;
  if (!flags.out.empty()) cfg.output_path = flags.out;
  const Format format = parse_format(flags.format.empty() ? cfg.output_format : flags.format);

  CommandOutput result;
  if (command == "bound-sweep") {
    result = cmd_bound_sweep(cfg, flags.strict);
  } else if (command == "sim-validate") {
    result = cmd_sim_validate(cfg, flags.strict);
  } else if (command == "effcap-sweep") {
    result = cmd_effcap_sweep(cfg, flags.strict);
  } else {
    result = cmd_stability(cfg, flags.strict);
  }

  if (cfg.output_path.empty()) {
    write_table(std::cout, result.table, format);
  } else {
    std::ofstream file(cfg.output_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write '" + cfg.output_path + "'");
    write_table(file, result.table, format);
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay bounds and effective capacity for mm-wave dispersion, densification and hybrid layouts"};
  app.require_subcommand(1);
  Flags flags;
  for (const char* name : {"bound-sweep", "sim-validate", "effcap-sweep", "stability"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", flags.config, "Experiment YAML file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "Output path (default: stdout)");
    sub->add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option("--seed", flags.seed, "Override plan.seed");
    sub->add_option("--threads", flags.threads, "Override plan.threads (0: all cores)");
    sub->add_option("--preset", flags.preset, "Parameter pack")->check(CLI::IsMember({"paper-sec6"}));
    sub->add_flag("--strict", flags.strict, "Exit with status 3 when a configuration is unstable");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const YAML::Exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
