#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <string_view>
#include <vector>

#include "swarmsgd/metrics.hpp"
#include "swarmsgd/objective.hpp"
#include "swarmsgd/topology.hpp"
#include "swarmsgd/types.hpp"

namespace swarmsgd {

enum class Scheme { swarm_event_driven, swarm_global_tick, centralized };

std::string_view to_string(Scheme s) noexcept;
std::optional<Scheme> parse_scheme(std::string_view s) noexcept;

/// Scalars of a single simulated run.
struct RunConfig {
  int n_threads = 20;
  double step_size = 0.01;
  double attraction = 1.0;
  double mean_sample_time = 0.02;
  /// Exactly one of the two horizons is set. For the centralized scheme an
  /// update is one synchronized batch step.
  std::optional<std::uint64_t> max_updates;
  std::optional<double> max_virtual_time;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::swarm_event_driven;
  std::uint64_t record_every = 1;
  /// Error level defining the summary's first hitting time.
  double threshold = 0.1;
  /// End the run at the first hitting time instead of the horizon.
  bool stop_at_threshold = false;

  void validate() const;
};

struct TraceRecord {
  std::uint64_t k;
  double t;
  double U;
  double Vbar;
  double f_gap;
  double grad_norm_sq;
};

struct TraceSummary {
  Scheme scheme = Scheme::swarm_event_driven;
  std::uint64_t seed = 0;
  double threshold = 0.0;
  /// Virtual time of the first update after which the error is <= threshold.
  std::optional<double> T_hit;
  std::optional<std::uint64_t> k_hit;
  TraceRecord final{};
  std::uint64_t updates = 0;
  std::uint64_t samples_consumed = 0;
  std::vector<std::uint64_t> per_thread_updates;
  double wall_time = 0.0;
};

struct Trace {
  std::vector<TraceRecord> records;
  TraceSummary summary;
};

struct ObservedState {
  std::uint64_t k;
  double t;
  const Positions& positions;
  const MetricSnapshot& metrics;
};

/// Called at every recorded state of a swarm run.
using StateObserver = std::function<void(const ObservedState&)>;

struct Event {
  double time;
  int thread;
};

/// Mutable state of an event-driven swarm run.
class SwarmState {
 public:
  explicit SwarmState(Positions init);

  void schedule(int thread, double fire_time);
  std::size_t pending() const noexcept { return queue_.size(); }

  Positions positions;
  double virtual_clock = 0.0;
  std::vector<std::uint64_t> per_thread_update_counts;
  std::uint64_t global_update_count = 0;

 private:
  friend Event next_event(SwarmState& state);

  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      return a.time > b.time || (a.time == b.time && a.thread > b.thread);
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
};

/// Pop the earliest pending event (ties go to the lower thread id) and
/// advance the virtual clock to it.
Event next_event(SwarmState& state);

/// x_i <- x_i + gamma * (-g - a sum_j alpha_ij (x_i - x_j)), neighbours read as-is.
void swarm_update(Positions& positions, int i, Eigen::Ref<const Vector> g, const Graph& graph,
                  double step_size, double attraction);

/// Asynchronous swarm: one exponential clock per thread, merged in a priority queue.
Trace run_swarm(const RunConfig& config, const Graph& graph, const ObjectiveSpec& spec,
                const Positions& init, const StateObserver& observer = {});

/// Same process driven by the merged clock: Exp(dt/N) ticks, uniform updater.
Trace run_swarm_global_tick(const RunConfig& config, const Graph& graph, const ObjectiveSpec& spec,
                            const Positions& init, const StateObserver& observer = {});

/// Synchronized batch SGD: N oracle calls per step, step lasts the slowest call.
Trace run_centralized(const RunConfig& config, const ObjectiveSpec& spec, Eigen::Ref<const Vector> init);

/// Dispatch on config.scheme. Centralized runs start from row 0 of init.
Trace run(const RunConfig& config, const Graph& graph, const ObjectiveSpec& spec, const Positions& init,
          const StateObserver& observer = {});

}  // namespace swarmsgd
