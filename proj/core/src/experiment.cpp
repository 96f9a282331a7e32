#include "swarmsgd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "swarmsgd/error.hpp"
#include "swarmsgd/io.hpp"

namespace swarmsgd {

using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

Scheme swarm_scheme_of(const ExperimentConfig& cfg) {
  return cfg.run.scheme == Scheme::centralized ? Scheme::swarm_event_driven : cfg.run.scheme;
}

double lambda2_or_zero(const Graph& g) {
  try {
    return algebraic_connectivity(g);
  } catch (const DisconnectedGraph& e) {
    return e.lambda2();
  }
}

}  // namespace

ReplicationSeeds replication_seeds(const ExperimentConfig& cfg, int replication) {
  const std::uint64_t run = split_seed(cfg.master_seed, static_cast<std::uint64_t>(replication));
  const std::uint64_t graph = cfg.graph.resample_per_run ? split_seed(run, 1) : split_seed(cfg.master_seed, kFixedGraphStream);
  return {run, graph, split_seed(run, 2), split_seed(run, 3), split_seed(run, 4)};
}

double default_edge_probability(int N) { return std::min(1.0, 10.0 / N); }

BuiltGraph build_graph(const ExperimentConfig& cfg, std::uint64_t graph_seed) {
  const int n = cfg.run.n_threads;
  switch (cfg.graph.kind) {
    case GraphKind::complete: return {complete_graph(n), 1};
    case GraphKind::file: {
      Graph g = graph_from_json(read_text_file(cfg.graph.path));
      if (g.size() != n)
        throw ConfigError("graph.path", "graph has " + std::to_string(g.size()) + " vertices, run.n_threads = " +
                                            std::to_string(n));
      return {std::move(g), 1};
    }
    case GraphKind::erdos_renyi: {
      Rng rng(graph_seed);
      auto draw = erdos_renyi_connected(n, cfg.graph.p.value_or(default_edge_probability(n)), rng,
                                        cfg.graph.max_attempts);
      return {std::move(draw.graph), draw.attempts};
    }
  }
  throw Error("unknown graph kind");
}

Vector initial_point(const ExperimentConfig& cfg) {
  return cfg.init_point ? *cfg.init_point : Vector::Zero(cfg.objective.dim());
}

Positions initial_positions(const ExperimentConfig& cfg) {
  const Vector x0 = initial_point(cfg);
  Positions p(cfg.run.n_threads, cfg.objective.dim());
  for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) = x0.transpose();
  return p;
}

std::optional<double> predicted_crossing_time(const ExperimentConfig& cfg, Scheme scheme) {
  const auto& x_star = cfg.objective.optimum();
  const auto& reg = cfg.objective.regularity();
  if (!x_star || !(reg.kappa > 0.0)) return std::nullopt;
  const double G0 = (initial_point(cfg) - *x_star).squaredNorm();
  const auto steps = theory::noiseless_crossing_steps(reg.kappa, reg.L, cfg.run.step_size, G0, cfg.threshold);
  if (!steps) return std::nullopt;
  const double k = static_cast<double>(std::max<std::uint64_t>(*steps, 1));
  const double dt = cfg.run.mean_sample_time;
  if (scheme == Scheme::centralized) return k * theory::harmonic_speedup(cfg.run.n_threads).H_N * dt;
  return k * dt;
}

RunConfig resolve_run_config(const ExperimentConfig& cfg, Scheme scheme, std::uint64_t seed) {
  RunConfig rc = cfg.run;
  rc.scheme = scheme;
  rc.seed = seed;
  rc.threshold = cfg.threshold;
  if (!rc.max_updates && !rc.max_virtual_time) {
    const auto predicted = predicted_crossing_time(cfg, scheme);
    if (!predicted)
      throw ConfigError("run.max_virtual_time",
                        "no horizon given and the crossing time cannot be predicted for this objective");
    rc.max_virtual_time = 10.0 * *predicted;
  }
  return rc;
}

void for_each_index(int count, int jobs, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<ReplicationResult> simulate(const ExperimentConfig& cfg) {
  std::vector<std::optional<ReplicationResult>> slots(static_cast<std::size_t>(cfg.replications));
  const Positions init = initial_positions(cfg);
  for_each_index(cfg.replications, cfg.jobs, [&](int r) {
    const ReplicationSeeds seeds = replication_seeds(cfg, r);
    const RunConfig rc =
        resolve_run_config(cfg, cfg.run.scheme, cfg.run.scheme == Scheme::centralized ? seeds.centralized : seeds.swarm);
    if (cfg.run.scheme == Scheme::centralized) {
      Trace t = run_centralized(rc, cfg.objective, init.row(0).transpose());
      slots[r] = ReplicationResult{r, seeds, std::move(t), 0.0, 0};
      return;
    }
    BuiltGraph g = build_graph(cfg, seeds.graph);
    Trace t = run(rc, g.graph, cfg.objective, init);
    slots[r] = ReplicationResult{r, seeds, std::move(t), lambda2_or_zero(g.graph), g.attempts};
  });
  std::vector<ReplicationResult> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

void write_simulation_outputs(const std::vector<ReplicationResult>& results, const std::string& dir) {
  std::filesystem::create_directories(dir);
  json runs = json::array();
  for (const auto& r : results) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%03d.csv", r.replication);
    std::ofstream csv(std::filesystem::path(dir) / name, std::ios::binary);
    if (!csv) throw Error("cannot write " + (std::filesystem::path(dir) / name).string());
    write_trace_csv(csv, r.trace.records);
    json s = json::parse(summary_to_json(r.trace.summary));
    s["replication"] = r.replication;
    s["trace_file"] = name;
    s["lambda2"] = r.lambda2;
    s["graph_attempts"] = r.graph_attempts;
    runs.push_back(std::move(s));
  }
  std::ofstream summary(std::filesystem::path(dir) / "summary.json", std::ios::binary);
  if (!summary) throw Error("cannot write summary.json in " + dir);
  summary << json{{"runs", runs}}.dump(2) << '\n';
}

ComparisonReport compare(const ExperimentConfig& cfg) {
  const int reps = cfg.replications;
  const Positions init = initial_positions(cfg);
  const Scheme swarm_scheme = swarm_scheme_of(cfg);

  struct Slot {
    RunComparison run;
    std::uint64_t checked = 0;
    std::uint64_t violations = 0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(reps));

  for_each_index(reps, cfg.jobs, [&](int r) {
    const ReplicationSeeds seeds = replication_seeds(cfg, r);
    BuiltGraph g = build_graph(cfg, seeds.graph);
    Slot& slot = slots[r];

    RunConfig swarm_rc = resolve_run_config(cfg, swarm_scheme, seeds.swarm);
    swarm_rc.stop_at_threshold = true;
    const StateObserver check_lemma4 = [&](const ObservedState& s) {
      ++slot.checked;
      if (!lemma4_check(s.positions, g.graph, cfg.objective, swarm_rc.attraction).holds) ++slot.violations;
    };
    const Trace swarm = run(swarm_rc, g.graph, cfg.objective, init, check_lemma4);

    RunConfig central_rc = resolve_run_config(cfg, Scheme::centralized, seeds.centralized);
    central_rc.stop_at_threshold = true;
    const Trace central = run_centralized(central_rc, cfg.objective, init.row(0).transpose());

    slot.run = {r, seeds.run, swarm.summary.T_hit, central.summary.T_hit,
                !swarm.summary.T_hit || !central.summary.T_hit, lambda2_or_zero(g.graph)};
  });

  ComparisonReport rep{};
  rep.d = cfg.objective.dim();
  rep.N = cfg.run.n_threads;
  rep.threshold = cfg.threshold;
  rep.predicted_ratio = theory::harmonic_speedup(rep.N).delta_t_c_over_delta_t;
  double sum_s = 0.0;
  double sum_c = 0.0;
  int included = 0;
  for (const auto& s : slots) {
    rep.per_run.push_back(s.run);
    rep.lemma4_checked += s.checked;
    rep.lemma4_violations += s.violations;
    if (s.run.excluded) {
      ++rep.excluded;
      continue;
    }
    ++included;
    sum_s += *s.run.T_s;
    sum_c += *s.run.T_c;
    if (*s.run.T_s < *s.run.T_c) ++rep.swarm_faster;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.T_s_mean = included ? sum_s / included : nan;
  rep.T_c_mean = included ? sum_c / included : nan;
  rep.ratio = included ? rep.T_c_mean / rep.T_s_mean : nan;
  return rep;
}

std::string comparison_report_to_json(const ComparisonReport& r) {
  json runs = json::array();
  for (const auto& p : r.per_run) {
    runs.push_back({{"replication", p.replication},
                    {"seed", p.seed},
                    {"T_s", optional_number(p.T_s)},
                    {"T_c", optional_number(p.T_c)},
                    {"excluded", p.excluded},
                    {"lambda2", p.lambda2}});
  }
  json j{{"instance", {{"d", r.d}, {"N", r.N}}},
         {"threshold", r.threshold},
         {"T_s_mean", number_or_null(r.T_s_mean)},
         {"T_c_mean", number_or_null(r.T_c_mean)},
         {"ratio", number_or_null(r.ratio)},
         {"predicted_ratio", r.predicted_ratio},
         {"excluded", r.excluded},
         {"swarm_faster", r.swarm_faster},
         {"lemma4_checked", r.lemma4_checked},
         {"lemma4_violations", r.lemma4_violations},
         {"per_run", runs}};
  return j.dump(2);
}

ComparisonReport comparison_report_from_json(std::string_view text) {
  const json j = json::parse(text);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto num = [&](const char* key) { return j.at(key).is_null() ? nan : j.at(key).get<double>(); };
  ComparisonReport r{};
  r.d = j.at("instance").at("d").get<int>();
  r.N = j.at("instance").at("N").get<int>();
  r.threshold = j.at("threshold").get<double>();
  r.T_s_mean = num("T_s_mean");
  r.T_c_mean = num("T_c_mean");
  r.ratio = num("ratio");
  r.predicted_ratio = j.at("predicted_ratio").get<double>();
  r.excluded = j.at("excluded").get<int>();
  r.swarm_faster = j.at("swarm_faster").get<int>();
  r.lemma4_checked = j.at("lemma4_checked").get<std::uint64_t>();
  r.lemma4_violations = j.at("lemma4_violations").get<std::uint64_t>();
  for (const auto& p : j.at("per_run")) {
    r.per_run.push_back({p.at("replication").get<int>(), p.at("seed").get<std::uint64_t>(), optional_from(p.at("T_s")),
                         optional_from(p.at("T_c")), p.at("excluded").get<bool>(), p.at("lambda2").get<double>()});
  }
  return r;
}

ValidationReport validate(const ExperimentConfig& cfg) {
  const ReplicationSeeds seeds = replication_seeds(cfg, 0);
  BuiltGraph g = build_graph(cfg, seeds.graph);
  RunConfig rc = resolve_run_config(cfg, swarm_scheme_of(cfg), seeds.swarm);
  rc.max_updates = cfg.validate.updates;
  rc.max_virtual_time.reset();
  rc.record_every = cfg.validate.record_every;

  ValidationReport rep{};
  std::vector<std::pair<std::uint64_t, Positions>> states;
  const StateObserver observe = [&](const ObservedState& s) {
    rep.lemma4.push_back({s.k, lemma4_check(s.positions, g.graph, cfg.objective, rc.attraction)});
    states.emplace_back(s.k, s.positions);
  };
  run(rc, g.graph, cfg.objective, initial_positions(cfg), observe);

  const int wanted = std::min<int>(cfg.validate.lemma2_states, static_cast<int>(states.size()));
  Rng rng(seeds.aux);
  Lemma2Options opts;
  opts.noise_samples_per_thread = cfg.validate.noise_samples_per_thread;
  for (int s = 0; s < wanted; ++s) {
    // Evenly spaced over the recorded states, first and last included.
    const std::size_t idx = wanted == 1 ? 0 : static_cast<std::size_t>(s) * (states.size() - 1) / (wanted - 1);
    rep.lemma2.push_back({states[idx].first, lemma2_monte_carlo_check(states[idx].second, g.graph, cfg.objective, rc,
                                                                      cfg.validate.lemma2_replications, rng, opts)});
  }

  auto rate = [](auto const& v, auto pred) {
    if (v.empty()) return 1.0;
    return static_cast<double>(std::count_if(v.begin(), v.end(), pred)) / static_cast<double>(v.size());
  };
  rep.lemma4_pass_rate = rate(rep.lemma4, [](const Lemma4Entry& e) { return e.check.holds; });
  rep.lemma2_pass_rate = rate(rep.lemma2, [](const Lemma2Entry& e) { return e.result.holds; });
  rep.lemma4_ok = rep.lemma4_pass_rate == 1.0;
  rep.lemma2_ok = rep.lemma2_pass_rate >= cfg.validate.min_lemma2_pass_rate;
  return rep;
}

std::string validation_report_to_json(const ValidationReport& r) {
  json checks = json::array();
  for (const auto& e : r.lemma4)
    checks.push_back({{"check", "lemma4"}, {"k", e.k}, {"holds", e.check.holds}, {"lhs", e.check.lhs}, {"rhs", e.check.rhs}});
  for (const auto& e : r.lemma2)
    checks.push_back({{"check", "lemma2"},
                      {"k", e.k},
                      {"holds", e.result.holds},
                      {"lhs", e.result.empirical_mean},
                      {"rhs", e.result.rhs},
                      {"std_err", e.result.std_err},
                      {"sigma_sq", e.result.sigma_sq}});
  json j{{"lemma4_pass_rate", r.lemma4_pass_rate},
         {"lemma2_pass_rate", r.lemma2_pass_rate},
         {"lemma4_ok", r.lemma4_ok},
         {"lemma2_ok", r.lemma2_ok},
         {"checks", checks}};
  return j.dump(2);
}

BoundsRequest parse_bounds_request(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed bounds JSON: ") + e.what());
  }
  auto req = [&](const char* key) -> double {
    if (!j.contains(key) || j.at(key).is_null()) throw ConfigError(key, "missing required field");
    if (!j.at(key).is_number()) throw ConfigError(key, "must be a number");
    return j.at(key).get<double>();
  };
  auto opt = [&](const char* key, double fallback) -> double {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(key, "must be a number");
    return j.at(key).get<double>();
  };
  BoundsRequest r{};
  auto& p = r.params;
  p.kappa = req("kappa");
  p.L = req("L");
  p.sigma_sq = req("sigma_sq");
  p.gamma = req("gamma");
  p.a = req("a");
  p.lambda2 = req("lambda2");
  p.d_bar = req("d_bar");
  const double n = req("N");
  if (n < 1 || n != std::floor(n)) throw ConfigError("N", "must be a positive integer");
  p.N = static_cast<int>(n);
  const double k = opt("K", 10000);
  if (k < 1 || k != std::floor(k)) throw ConfigError("K", "must be a positive integer");
  p.K = static_cast<std::uint64_t>(k);
  p.U0 = opt("U0", 0.0);
  p.V0 = opt("V0", 0.0);
  p.f0_gap = opt("f0_gap", 0.0);
  r.G0 = opt("G0", p.U0);
  if (j.contains("D") && !j.at("D").is_null()) r.D = req("D");
  return r;
}

namespace {

template <class F>
json guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return json{{"admissible", false}, {"error", e.what()}};
  }
}

json bounds_json(const BoundsRequest& req) {
  const auto& p = req.params;
  json out;
  out["params"] = {{"kappa", p.kappa}, {"L", p.L},   {"sigma_sq", p.sigma_sq}, {"gamma", p.gamma},
                   {"a", p.a},         {"lambda2", p.lambda2}, {"d_bar", p.d_bar}, {"N", p.N},
                   {"K", p.K},         {"U0", p.U0}, {"V0", p.V0},             {"f0_gap", p.f0_gap},
                   {"G0", req.G0}};
  out["harmonic"] = guarded([&] {
    const auto h = theory::harmonic_speedup(p.N);
    return json{{"N", p.N}, {"H_N", h.H_N}, {"delta_t_c_over_delta_t", h.delta_t_c_over_delta_t}};
  });
  out["strong_convex"] = guarded([&] {
    const auto b = theory::strong_convex_bound(p);
    return json{{"admissible", b.admissible},
                {"corollary_admissible", b.corollary_admissible},
                {"hat_omega", b.hat_omega},
                {"ambiguous_root", b.ambiguous_root},
                {"C", b.C},
                {"phi_star", number_or_null(b.phi_star)},
                {"phi_0", number_or_null(b.phi(0))},
                {"phi_K", number_or_null(b.phi(static_cast<double>(p.K)))},
                {"gamma_caps", {b.gamma_caps[0], b.gamma_caps[1], number_or_null(b.gamma_caps[2])}}};
  });
  out["centralized"] = guarded([&] {
    const auto b = theory::centralized_bound(p.kappa, p.L, p.sigma_sq, p.gamma, p.N, req.G0);
    return json{{"admissible", true},
                {"phi_star_star", b.phi_star_star},
                {"contraction", b.contraction},
                {"trajectory_K", b.trajectory(static_cast<double>(p.K))}};
  });
  out["convex"] = guarded([&] {
    const auto b = theory::convex_bound(p, req.D);
    return json{{"admissible", true},
                {"tilde_omega", b.tilde_omega},
                {"mu", b.mu},
                {"bound_at_K", b.bound_at_K},
                {"D", b.D},
                {"gamma_rule_value", b.gamma_rule_value},
                {"gamma_rule_cap", number_or_null(b.gamma_rule_cap)},
                {"gamma_rule_ok", b.gamma_rule_ok},
                {"phi_K_star", b.phi_K_star}};
  });
  out["nonconvex"] = guarded([&] {
    const auto b = theory::nonconvex_bound(p);
    return json{{"admissible", true},
                {"attraction_ok", b.attraction_ok},
                {"check_omega", b.check_omega},
                {"check_mu", b.check_mu},
                {"bound_at_K", b.bound_at_K}};
  });
  return out;
}

}  // namespace

std::string bounds_report_json(const BoundsRequest& request) { return bounds_json(request).dump(2); }

namespace {

// Booleans become 0/1 and nulls NaN so the sweep stays a numeric long table.
double scalar(const json& v) {
  if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
  if (v.is_number()) return v.get<double>();
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::vector<SweepRow> sweep(const ExperimentConfig& cfg) {
  const auto& s = cfg.sweep;
  const auto& reg = cfg.objective.regularity();
  const Vector x0 = initial_point(cfg);
  Rng rng(split_seed(cfg.master_seed, kSweepStream));
  const double sigma_sq = estimate_noise_variance(cfg.objective, x0, s.noise_samples, rng);
  const auto& x_star = cfg.objective.optimum();
  const double U0 = x_star ? (x0 - *x_star).squaredNorm() : 0.0;
  const double f0_gap = value(cfg.objective, x0) - cfg.objective.optimal_value().value_or(0.0);

  const std::vector<double> gammas = s.gamma.empty() ? std::vector<double>{cfg.run.step_size} : s.gamma;
  const std::vector<double> attractions = s.attraction.empty() ? std::vector<double>{cfg.run.attraction} : s.attraction;
  const std::vector<int> ns = s.n_threads.empty() ? std::vector<int>{cfg.run.n_threads} : s.n_threads;

  std::vector<SweepRow> rows;
  for (double gamma : gammas)
    for (double a : attractions)
      for (int n : ns) {
        const std::vector<double> l2s = s.lambda2.empty() ? std::vector<double>{static_cast<double>(n)} : s.lambda2;
        for (double l2 : l2s) {
          theory::BoundParams p;
          p.kappa = reg.kappa;
          p.L = reg.L;
          p.sigma_sq = sigma_sq;
          p.gamma = gamma;
          p.a = a;
          p.lambda2 = l2;
          p.d_bar = s.d_bar.value_or(n - 1.0);
          p.N = n;
          p.K = s.K;
          p.U0 = U0;
          p.V0 = 0.0;
          p.f0_gap = f0_gap;
          BoundsRequest req{p, U0, std::nullopt};
          const json report = bounds_json(req);
          for (const char* bound : {"harmonic", "strong_convex", "centralized", "convex", "nonconvex"}) {
            for (const auto& [key, v] : report.at(bound).items()) {
              if (v.is_array()) {
                for (std::size_t i = 0; i < v.size(); ++i)
                  rows.push_back({gamma, a, n, l2, bound, key + "_" + std::to_string(i), scalar(v[i])});
              } else if (!v.is_string()) {
                rows.push_back({gamma, a, n, l2, bound, key, scalar(v)});
              }
            }
          }
        }
      }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows)
    out << format_double(r.gamma) << ',' << format_double(r.a) << ',' << r.N << ',' << format_double(r.lambda2) << ','
        << r.bound << ',' << r.quantity << ',' << format_double(r.value) << '\n';
}

}  // namespace swarmsgd
