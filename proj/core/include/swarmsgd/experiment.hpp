#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swarmsgd/config.hpp"
#include "swarmsgd/engine.hpp"
#include "swarmsgd/metrics.hpp"
#include "swarmsgd/theory.hpp"
#include "swarmsgd/topology.hpp"

namespace swarmsgd {

// Sub-stream ids for split_seed. Changing any of these changes every run.
inline constexpr std::uint64_t kXTildeStream = 0x5854494c44450001ULL;
inline constexpr std::uint64_t kFixedGraphStream = 0x4752415048000001ULL;
inline constexpr std::uint64_t kSweepStream = 0x5357454550000001ULL;

/// Seeds of replication r: run = split(master, r), then one sub-stream each
/// for the graph (1), the swarm run (2), the centralized run (3) and
/// auxiliary estimators (4). With a fixed topology the graph seed is
/// split(master, kFixedGraphStream) for every r.
struct ReplicationSeeds {
  std::uint64_t run;
  std::uint64_t graph;
  std::uint64_t swarm;
  std::uint64_t centralized;
  std::uint64_t aux;
};

ReplicationSeeds replication_seeds(const ExperimentConfig& cfg, int replication);

double default_edge_probability(int N);

struct BuiltGraph {
  Graph graph;
  int attempts;
};

BuiltGraph build_graph(const ExperimentConfig& cfg, std::uint64_t graph_seed);

Vector initial_point(const ExperimentConfig& cfg);
Positions initial_positions(const ExperimentConfig& cfg);

/// Noise-free prediction of the first hitting time for a scheme: the batch
/// recursion needs k steps; a swarm covers them in about k*dt of virtual
/// time, the centralized scheme in k*H_N*dt.
std::optional<double> predicted_crossing_time(const ExperimentConfig& cfg, Scheme scheme);

/// Per-replication RunConfig: scheme, seed, threshold and (if unset) a
/// horizon of ten times the predicted crossing time.
RunConfig resolve_run_config(const ExperimentConfig& cfg, Scheme scheme, std::uint64_t seed);

/// Runs fn(0..count-1) on up to `jobs` threads; rethrows the first failure.
void for_each_index(int count, int jobs, const std::function<void(int)>& fn);

struct ReplicationResult {
  int replication;
  ReplicationSeeds seeds;
  Trace trace;
  double lambda2;
  int graph_attempts;
};

std::vector<ReplicationResult> simulate(const ExperimentConfig& cfg);

/// run_NNN.csv per replication plus summary.json in `dir`.
void write_simulation_outputs(const std::vector<ReplicationResult>& results, const std::string& dir);

struct RunComparison {
  int replication;
  std::uint64_t seed;
  std::optional<double> T_s;
  std::optional<double> T_c;
  bool excluded;
  double lambda2;
};

struct ComparisonReport {
  int d;
  int N;
  double threshold;
  double T_s_mean;
  double T_c_mean;
  double ratio;
  double predicted_ratio;
  int excluded;
  /// Replications where the swarm hit the threshold strictly first.
  int swarm_faster;
  std::uint64_t lemma4_checked;
  std::uint64_t lemma4_violations;
  std::vector<RunComparison> per_run;
};

/// Swarm vs centralized hitting times over cfg.replications runs from the
/// same start. Runs that never hit the threshold are excluded and counted.
/// Every recorded swarm state is also put through lemma4_check.
ComparisonReport compare(const ExperimentConfig& cfg);

std::string comparison_report_to_json(const ComparisonReport& report);
ComparisonReport comparison_report_from_json(std::string_view text);

struct Lemma4Entry {
  std::uint64_t k;
  InequalityCheck check;
};

struct Lemma2Entry {
  std::uint64_t k;
  Lemma2Result result;
};

struct ValidationReport {
  std::vector<Lemma4Entry> lemma4;
  std::vector<Lemma2Entry> lemma2;
  double lemma4_pass_rate;
  double lemma2_pass_rate;
  bool lemma4_ok;
  bool lemma2_ok;
};

/// Short swarm trajectory (replication 0): lemma4_check at every recorded
/// state, lemma2_monte_carlo_check at evenly spaced recorded states.
ValidationReport validate(const ExperimentConfig& cfg);

std::string validation_report_to_json(const ValidationReport& report);

/// Parse a bound-parameter document. Required: kappa, L, sigma_sq, gamma, a,
/// lambda2, d_bar, N. Optional: K (10000), U0, V0, f0_gap, G0 (= U0), D.
struct BoundsRequest {
  theory::BoundParams params;
  double G0;
  std::optional<double> D;
};

BoundsRequest parse_bounds_request(std::string_view text);

/// Every bound with its admissibility; inadmissible bounds carry the reason.
std::string bounds_report_json(const BoundsRequest& request);

struct SweepRow {
  double gamma;
  double a;
  int N;
  double lambda2;
  std::string bound;
  std::string quantity;
  double value;
};

/// Bounds over the grid gamma x a x N x lambda2. kappa and L come from the
/// objective, sigma^2 is estimated at the start point, U0 = |x0 - x*|^2, V0 = 0.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg);

inline constexpr std::string_view kSweepCsvHeader = "gamma,a,N,lambda2,bound,quantity,value";
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace swarmsgd
