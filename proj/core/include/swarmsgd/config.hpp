#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swarmsgd/engine.hpp"
#include "swarmsgd/objective.hpp"

namespace swarmsgd {

enum class GraphKind { complete, erdos_renyi, file };

struct GraphConfig {
  GraphKind kind = GraphKind::erdos_renyi;
  /// Edge probability; defaults to min(1, 10/N).
  std::optional<double> p;
  std::string path;
  /// Draw a fresh random graph for every replication (otherwise one graph for all).
  bool resample_per_run = true;
  int max_attempts = kDefaultErdosRenyiAttempts;
};

struct ValidateSettings {
  std::uint64_t updates = 500;
  std::uint64_t record_every = 1;
  int lemma2_states = 20;
  int lemma2_replications = 10000;
  int noise_samples_per_thread = 2000;
  double min_lemma2_pass_rate = 0.95;
};

/// Grid for the `sweep` subcommand. Empty axes fall back to the run's value.
struct SweepSettings {
  std::vector<double> gamma;
  std::vector<double> attraction;
  std::vector<int> n_threads;
  /// Empty means lambda2 = N (complete graph).
  std::vector<double> lambda2;
  /// Absent means N - 1.
  std::optional<double> d_bar;
  std::uint64_t K = 10000;
  int noise_samples = 100000;
};

/// One experiment: objective, per-run scalars, topology and replication plan.
/// Defaults mirror the online ridge study: rho 0.1, gamma 0.01, a 1, dt 0.02,
/// threshold 0.1, p = 10/N, x0 = 0, 100 replications.
struct ExperimentConfig {
  explicit ExperimentConfig(ObjectiveSpec objective_spec) : objective(std::move(objective_spec)) {}

  ObjectiveSpec objective;
  /// Seed, threshold and horizon are filled per replication; a horizon left
  /// unset here is derived from the predicted crossing time.
  RunConfig run;
  GraphConfig graph;
  /// Common starting point of every thread; zero when absent.
  std::optional<Vector> init_point;
  int replications = 100;
  double threshold = 0.1;
  std::uint64_t master_seed = 0;
  std::string output_dir = "out";
  int jobs = 1;
  ValidateSettings validate;
  SweepSettings sweep;
};

/// Ridge instance (d, N) with the study's settings and x_tilde drawn from the master seed.
ExperimentConfig ridge_study_config(int d, int N, std::uint64_t master_seed);

/// Parse and validate a JSON experiment document. Throws ConfigError naming the field.
ExperimentConfig parse_experiment_config(std::string_view text);
ExperimentConfig load_experiment_config(const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace swarmsgd
