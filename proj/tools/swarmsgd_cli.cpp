// Command-line front end: simulate, compare, bounds, validate, sweep.
//
// Exit codes: 0 success, 1 runtime or validation failure, 2 bad config.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "swarmsgd/error.hpp"
#include "swarmsgd/experiment.hpp"
#include "swarmsgd/io.hpp"

namespace fs = std::filesystem;
using namespace swarmsgd;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
};

ExperimentConfig load(const Options& o) {
  ExperimentConfig cfg = load_experiment_config(o.config);
  if (o.out) cfg.output_dir = *o.out;
  if (o.jobs) {
    if (*o.jobs < 1) throw ConfigError("--jobs", "must be at least 1");
    cfg.jobs = *o.jobs;
  }
  if (o.seed) cfg.master_seed = *o.seed;
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text << '\n';
}

int cmd_simulate(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const auto results = simulate(cfg);
  write_simulation_outputs(results, cfg.output_dir);
  int hits = 0;
  for (const auto& r : results) hits += r.trace.summary.T_hit.has_value();
  std::cerr << results.size() << " runs written to " << cfg.output_dir << " (" << hits << " reached the threshold)\n";
  return 0;
}

int cmd_compare(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const ComparisonReport rep = compare(cfg);
  write_file(fs::path(cfg.output_dir) / "comparison.json", comparison_report_to_json(rep));
  std::cout << "d=" << rep.d << " N=" << rep.N << " T_s=" << rep.T_s_mean << " T_c=" << rep.T_c_mean
            << " ratio=" << rep.ratio << " predicted=" << rep.predicted_ratio << " excluded=" << rep.excluded
            << " lemma4_violations=" << rep.lemma4_violations << '\n';
  return rep.lemma4_violations == 0 ? 0 : kExitRuntime;
}

int cmd_bounds(const Options& o) {
  const BoundsRequest req = parse_bounds_request(read_text_file(o.config));
  const std::string report = bounds_report_json(req);
  if (o.out) write_file(fs::path(*o.out) / "bounds.json", report);
  std::cout << report << '\n';
  return 0;
}

int cmd_validate(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const ValidationReport rep = validate(cfg);
  write_file(fs::path(cfg.output_dir) / "validation.json", validation_report_to_json(rep));
  std::cout << "lemma4 pass rate " << rep.lemma4_pass_rate << ", lemma2 pass rate " << rep.lemma2_pass_rate << '\n';
  return rep.lemma4_ok && rep.lemma2_ok ? 0 : kExitRuntime;
}

int cmd_sweep(const Options& o) {
  const ExperimentConfig cfg = load(o);
  const auto rows = sweep(cfg);
  const fs::path path = fs::path(cfg.output_dir) / "sweep.csv";
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  write_sweep_csv(f, rows);
  std::cerr << rows.size() << " rows written to " << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swarming-based asynchronous SGD simulator"};
  app.require_subcommand(1);

  Options opts;
  std::optional<std::string> out;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub, bool experiment) {
    sub->add_option("--config", opts.config, experiment ? "Experiment JSON" : "Bound parameter JSON")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory (overrides output_dir)");
    if (experiment) {
      sub->add_option("--jobs", jobs, "Concurrent replications");
      sub->add_option("--seed", seed, "Master seed (overrides master_seed)");
    }
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "Run the configured scheme for every replication");
  auto* compare_cmd = app.add_subcommand("compare", "Swarm vs centralized threshold hitting times");
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate the convergence bounds for a parameter file");
  auto* validate_cmd = app.add_subcommand("validate", "Check the one-step inequalities along a short run");
  auto* sweep_cmd = app.add_subcommand("sweep", "Bounds over a grid of gamma, a, N, lambda2 (long CSV)");
  for (auto* sub : {simulate_cmd, compare_cmd, validate_cmd, sweep_cmd}) add_common(sub, true);
  add_common(bounds_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  opts.out = out;
  opts.jobs = jobs;
  opts.seed = seed;

  try {
    if (*simulate_cmd) return cmd_simulate(opts);
    if (*compare_cmd) return cmd_compare(opts);
    if (*bounds_cmd) return cmd_bounds(opts);
    if (*validate_cmd) return cmd_validate(opts);
    if (*sweep_cmd) return cmd_sweep(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
