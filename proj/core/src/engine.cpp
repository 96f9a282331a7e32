#include "swarmsgd/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "swarmsgd/error.hpp"

namespace swarmsgd {

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::swarm_event_driven: return "swarm_event_driven";
    case Scheme::swarm_global_tick: return "swarm_global_tick";
    case Scheme::centralized: return "centralized";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view s) noexcept {
  for (Scheme v : {Scheme::swarm_event_driven, Scheme::swarm_global_tick, Scheme::centralized})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (n_threads < 1) throw InvalidArgument("n_threads must be positive");
  if (scheme != Scheme::centralized && n_threads < 2)
    throw InvalidArgument("swarm schemes need at least 2 threads");
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) throw InvalidArgument("step_size must be >= 0");
  if (!(attraction >= 0.0) || !std::isfinite(attraction)) throw InvalidArgument("attraction must be >= 0");
  if (!(mean_sample_time > 0.0)) throw InvalidArgument("mean_sample_time must be positive");
  if (max_updates.has_value() == max_virtual_time.has_value())
    throw InvalidArgument("exactly one of max_updates / max_virtual_time must be set");
  if (max_virtual_time && !(*max_virtual_time > 0.0)) throw InvalidArgument("max_virtual_time must be positive");
  if (record_every < 1) throw InvalidArgument("record_every must be >= 1");
  if (!(threshold > 0.0)) throw InvalidArgument("threshold must be positive");
}

SwarmState::SwarmState(Positions init)
    : positions(std::move(init)), per_thread_update_counts(static_cast<std::size_t>(positions.rows()), 0) {}

void SwarmState::schedule(int thread, double fire_time) {
  if (thread < 0 || thread >= positions.rows()) throw InvalidArgument("schedule: thread id out of range");
  queue_.push({fire_time, thread});
}

Event next_event(SwarmState& state) {
  if (state.queue_.empty()) throw Error("internal: event queue is empty");
  const Event ev = state.queue_.top();
  state.queue_.pop();
  if (ev.time < state.virtual_clock) throw Error("internal: event fires before the virtual clock");
  state.virtual_clock = ev.time;
  return ev;
}

void swarm_update(Positions& positions, int i, Eigen::Ref<const Vector> g, const Graph& graph,
                  double step_size, double attraction) {
  // Accumulate the attraction against the pre-update row, then write once.
  const auto m = positions.cols();
  auto xi = positions.row(i);
  for (Eigen::Index c = 0; c < m; ++c) {
    double pull = 0.0;
    for (int j : graph.neighbors(i)) pull += xi(c) - positions(j, c);
    const double step = -g(c) - attraction * pull;
    xi(c) += step_size * step;
  }
}

namespace {

using Clock = std::chrono::steady_clock;

void check_inputs(const RunConfig& config, const Graph& graph, const ObjectiveSpec& spec,
                  const Positions& init) {
  config.validate();
  if (graph.size() != config.n_threads)
    throw InvalidArgument("graph has " + std::to_string(graph.size()) + " vertices but n_threads = " +
                          std::to_string(config.n_threads));
  if (init.rows() != config.n_threads || init.cols() != spec.dim())
    throw InvalidArgument("initial positions must be " + std::to_string(config.n_threads) + " x " +
                          std::to_string(spec.dim()));
}

// Tracks the centroid incrementally, detects the first hitting time and
// emits decimated records.
class SwarmRecorder {
 public:
  SwarmRecorder(const RunConfig& config, const ObjectiveSpec& spec, const Positions& positions,
                const StateObserver& observer, Trace& trace)
      : config_(config),
        spec_(spec),
        observer_(observer),
        trace_(trace),
        x_star_(spec.optimum()),
        sum_(positions.colwise().sum().transpose()),
        mean_(spec.dim()),
        grad_(spec.dim()),
        old_row_(spec.dim()) {}

  void before_update(const Positions& positions, int i) { old_row_ = positions.row(i).transpose(); }

  // Returns true if the run should stop at this update.
  bool after_update(const Positions& positions, int i, std::uint64_t k, double t) {
    sum_ += positions.row(i).transpose() - old_row_;
    bool crossed = false;
    if (!trace_.summary.T_hit) {
      mean_ = sum_ / static_cast<double>(positions.rows());
      double err;
      if (x_star_) {
        err = (mean_ - *x_star_).squaredNorm();
      } else {
        grad_exact_into(spec_, mean_, grad_);
        err = grad_.squaredNorm();
      }
      if (err <= config_.threshold) {
        trace_.summary.T_hit = t;
        trace_.summary.k_hit = k;
        crossed = true;
      }
    }
    if (crossed || k % config_.record_every == 0) record(positions, k, t);
    return crossed && config_.stop_at_threshold;
  }

  void record(const Positions& positions, std::uint64_t k, double t) {
    if (!trace_.records.empty() && trace_.records.back().k == k) return;
    const MetricSnapshot s = snapshot(positions, spec_, x_star_);
    trace_.records.push_back({k, t, s.U, s.Vbar, s.f_gap, s.grad_norm_sq});
    if (observer_) observer_(ObservedState{k, t, positions, s});
  }

 private:
  const RunConfig& config_;
  const ObjectiveSpec& spec_;
  const StateObserver& observer_;
  Trace& trace_;
  const std::optional<Vector>& x_star_;
  Vector sum_;
  Vector mean_;
  Vector grad_;
  Vector old_row_;
};

void init_summary(Trace& trace, const RunConfig& config) {
  trace.summary.scheme = config.scheme;
  trace.summary.seed = config.seed;
  trace.summary.threshold = config.threshold;
}

void finish(Trace& trace, Clock::time_point start) {
  trace.summary.final = trace.records.back();
  trace.summary.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

Trace run_swarm(const RunConfig& config, const Graph& graph, const ObjectiveSpec& spec,
                const Positions& init, const StateObserver& observer) {
  if (config.scheme != Scheme::swarm_event_driven)
    throw InvalidArgument("run_swarm requires scheme swarm_event_driven");
  check_inputs(config, graph, spec, init);
  const auto start = Clock::now();
  Trace trace;
  init_summary(trace, config);
  Rng rng(config.seed);

  SwarmState state(init);
  const int n = config.n_threads;
  for (int i = 0; i < n; ++i) state.schedule(i, rng.exponential(config.mean_sample_time));

  SwarmRecorder recorder(config, spec, state.positions, observer, trace);
  recorder.record(state.positions, 0, 0.0);
  Vector g(spec.dim());
  double last_update_time = 0.0;
  while (!config.max_updates || state.global_update_count < *config.max_updates) {
    const Event ev = next_event(state);
    if (config.max_virtual_time && ev.time > *config.max_virtual_time) break;
    const int i = ev.thread;
    // This oracle call's duration is the gap until thread i's next update.
    const double gap =
        sample_gradient_into(spec, state.positions.row(i).transpose(), config.mean_sample_time, rng, g);
    recorder.before_update(state.positions, i);
    swarm_update(state.positions, i, g, graph, config.step_size, config.attraction);
    state.schedule(i, ev.time + gap);
    last_update_time = ev.time;
    ++state.global_update_count;
    ++state.per_thread_update_counts[i];
    if (recorder.after_update(state.positions, i, state.global_update_count, ev.time)) break;
  }
  recorder.record(state.positions, state.global_update_count, last_update_time);

  trace.summary.updates = state.global_update_count;
  trace.summary.samples_consumed = state.global_update_count;
  trace.summary.per_thread_updates = std::move(state.per_thread_update_counts);
  finish(trace, start);
  return trace;
}

Trace run_swarm_global_tick(const RunConfig& config, const Graph& graph, const ObjectiveSpec& spec,
                            const Positions& init, const StateObserver& observer) {
  if (config.scheme != Scheme::swarm_global_tick)
    throw InvalidArgument("run_swarm_global_tick requires scheme swarm_global_tick");
  check_inputs(config, graph, spec, init);
  const auto start = Clock::now();
  Trace trace;
  init_summary(trace, config);
  Rng rng(config.seed);

  const int n = config.n_threads;
  const double tick_mean = config.mean_sample_time / n;
  Positions positions = init;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n), 0);
  std::uint64_t k = 0;
  double clock = 0.0;

  SwarmRecorder recorder(config, spec, positions, observer, trace);
  recorder.record(positions, 0, 0.0);
  Vector g(spec.dim());
  while (!config.max_updates || k < *config.max_updates) {
    const double t = clock + rng.exponential(tick_mean);
    if (config.max_virtual_time && t > *config.max_virtual_time) break;
    clock = t;
    const int i = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    sample_gradient_into(spec, positions.row(i).transpose(), config.mean_sample_time, rng, g);
    recorder.before_update(positions, i);
    swarm_update(positions, i, g, graph, config.step_size, config.attraction);
    ++k;
    ++counts[i];
    if (recorder.after_update(positions, i, k, clock)) break;
  }
  recorder.record(positions, k, clock);

  trace.summary.updates = k;
  trace.summary.samples_consumed = k;
  trace.summary.per_thread_updates = std::move(counts);
  finish(trace, start);
  return trace;
}

Trace run_centralized(const RunConfig& config, const ObjectiveSpec& spec, Eigen::Ref<const Vector> init) {
  if (config.scheme != Scheme::centralized) throw InvalidArgument("run_centralized requires scheme centralized");
  config.validate();
  if (init.size() != spec.dim()) throw InvalidArgument("initial point dimension mismatch");
  const auto start = Clock::now();
  Trace trace;
  init_summary(trace, config);
  Rng rng(config.seed);

  const int n = config.n_threads;
  const auto& x_star = spec.optimum();
  Vector x = init;
  Vector g(spec.dim());
  Vector batch(spec.dim());
  Vector grad(spec.dim());
  std::uint64_t k = 0;
  double clock = 0.0;

  auto record = [&](std::uint64_t step, double t) {
    if (!trace.records.empty() && trace.records.back().k == step) return;
    const MetricSnapshot s = snapshot_point(x, spec, x_star);
    trace.records.push_back({step, t, s.U, s.Vbar, s.f_gap, s.grad_norm_sq});
  };

  record(0, 0.0);
  while (!config.max_updates || k < *config.max_updates) {
    batch.setZero();
    double slowest = 0.0;
    for (int i = 0; i < n; ++i) {
      slowest = std::max(slowest, sample_gradient_into(spec, x, config.mean_sample_time, rng, g));
      batch += g;
    }
    const double t = clock + slowest;
    if (config.max_virtual_time && t > *config.max_virtual_time) break;
    clock = t;
    x -= config.step_size * (batch / n);
    ++k;

    bool crossed = false;
    if (!trace.summary.T_hit) {
      double err;
      if (x_star) {
        err = (x - *x_star).squaredNorm();
      } else {
        grad_exact_into(spec, x, grad);
        err = grad.squaredNorm();
      }
      if (err <= config.threshold) {
        trace.summary.T_hit = clock;
        trace.summary.k_hit = k;
        crossed = true;
      }
    }
    if (crossed || k % config.record_every == 0) record(k, clock);
    if (crossed && config.stop_at_threshold) break;
  }
  record(k, clock);

  trace.summary.updates = k;
  trace.summary.samples_consumed = k * static_cast<std::uint64_t>(n);
  finish(trace, start);
  return trace;
}

Trace run(const RunConfig& config, const Graph& graph, const ObjectiveSpec& spec, const Positions& init,
          const StateObserver& observer) {
  switch (config.scheme) {
    case Scheme::swarm_event_driven: return run_swarm(config, graph, spec, init, observer);
    case Scheme::swarm_global_tick: return run_swarm_global_tick(config, graph, spec, init, observer);
    case Scheme::centralized: return run_centralized(config, spec, init.row(0).transpose());
  }
  throw Error("unknown scheme");
}

}  // namespace swarmsgd
