#include "swarmsgd/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "swarmsgd/error.hpp"
#include "swarmsgd/experiment.hpp"

namespace swarmsgd {

using nlohmann::json;

namespace {

// Typed read of an optional key; `path` is used in error messages.
template <class T>
std::optional<T> get(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + "." + key, "has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, const std::string& path, T fallback) {
  return get<T>(j, key, path).value_or(fallback);
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ObjectiveSpec parse_objective(const json& j, std::uint64_t master_seed) {
  const std::string path = "objective";
  if (!j.is_object()) throw ConfigError(path, "must be an object");
  const auto kind = get<std::string>(j, "kind", path);
  if (!kind) throw ConfigError("objective.kind", "missing required field");
  try {
    if (*kind == "ridge") {
      const double rho = get_or(j, "rho", path, 0.1);
      if (auto xt = get<std::vector<double>>(j, "x_tilde", path)) return ObjectiveSpec::ridge(rho, to_vector(*xt));
      const auto dim = get<int>(j, "dim", path);
      if (!dim) throw ConfigError("objective.dim", "missing required field (or give objective.x_tilde)");
      const auto seed = get_or(j, "x_tilde_seed", path, split_seed(master_seed, kXTildeStream));
      Rng rng(seed);
      return ObjectiveSpec::ridge(rho, draw_x_tilde(*dim, rng));
    }
    if (*kind == "quadratic") {
      const auto rows = get<std::vector<std::vector<double>>>(j, "Q", path);
      if (!rows) throw ConfigError("objective.Q", "missing required field");
      const auto b = get<std::vector<double>>(j, "b", path);
      if (!b) throw ConfigError("objective.b", "missing required field");
      const auto m = static_cast<Eigen::Index>(rows->size());
      Matrix Q(m, m);
      for (Eigen::Index r = 0; r < m; ++r) {
        if (static_cast<Eigen::Index>((*rows)[r].size()) != m) throw ConfigError("objective.Q", "must be square");
        for (Eigen::Index c = 0; c < m; ++c) Q(r, c) = (*rows)[r][c];
      }
      return ObjectiveSpec::quadratic(Q, to_vector(*b), get_or(j, "noise_std", path, 1.0));
    }
    if (*kind == "nonconvex_sine") {
      const auto dim = get<int>(j, "dim", path);
      if (!dim) throw ConfigError("objective.dim", "missing required field");
      return ObjectiveSpec::nonconvex_sine(*dim, get_or(j, "noise_std", path, 1.0));
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError("objective.kind", "unknown objective kind '" + *kind + "'");
}

void parse_run(const json& j, ExperimentConfig& cfg) {
  const std::string path = "run";
  if (!j.is_object()) throw ConfigError(path, "must be an object");
  RunConfig& r = cfg.run;
  r.n_threads = get_or(j, "n_threads", path, r.n_threads);
  r.step_size = get_or(j, "step_size", path, r.step_size);
  r.attraction = get_or(j, "attraction", path, r.attraction);
  r.mean_sample_time = get_or(j, "mean_sample_time", path, r.mean_sample_time);
  r.max_updates = get<std::uint64_t>(j, "max_updates", path);
  r.max_virtual_time = get<double>(j, "max_virtual_time", path);
  r.record_every = get_or(j, "record_every", path, r.record_every);
  if (auto s = get<std::string>(j, "scheme", path)) {
    const auto scheme = parse_scheme(*s);
    if (!scheme) throw ConfigError("run.scheme", "unknown scheme '" + *s + "'");
    r.scheme = *scheme;
  }
  if (r.max_updates && r.max_virtual_time)
    throw ConfigError("run.max_updates", "set only one of max_updates / max_virtual_time");
  if (auto init = get<std::vector<double>>(j, "init", path)) {
    cfg.init_point = to_vector(*init);
  } else if (auto v = get<double>(j, "init_value", path)) {
    cfg.init_point = Vector::Constant(cfg.objective.dim(), *v);
  }
}

void parse_graph(const json& j, GraphConfig& g) {
  const std::string path = "graph";
  if (!j.is_object()) throw ConfigError(path, "must be an object");
  if (auto kind = get<std::string>(j, "kind", path)) {
    if (*kind == "complete") g.kind = GraphKind::complete;
    else if (*kind == "erdos_renyi") g.kind = GraphKind::erdos_renyi;
    else if (*kind == "file") g.kind = GraphKind::file;
    else throw ConfigError("graph.kind", "unknown graph kind '" + *kind + "'");
  }
  g.p = get<double>(j, "p", path);
  g.path = get_or(j, "path", path, std::string{});
  g.resample_per_run = get_or(j, "resample_per_run", path, g.resample_per_run);
  g.max_attempts = get_or(j, "max_attempts", path, g.max_attempts);
  if (g.kind == GraphKind::file && g.path.empty()) throw ConfigError("graph.path", "required for kind 'file'");
  if (g.p && !(*g.p > 0.0 && *g.p <= 1.0)) throw ConfigError("graph.p", "must lie in (0, 1]");
  if (g.max_attempts < 1) throw ConfigError("graph.max_attempts", "must be positive");
}

void parse_validate(const json& j, ValidateSettings& v) {
  const std::string path = "validate";
  v.updates = get_or(j, "updates", path, v.updates);
  v.record_every = get_or(j, "record_every", path, v.record_every);
  v.lemma2_states = get_or(j, "lemma2_states", path, v.lemma2_states);
  v.lemma2_replications = get_or(j, "lemma2_replications", path, v.lemma2_replications);
  v.noise_samples_per_thread = get_or(j, "noise_samples_per_thread", path, v.noise_samples_per_thread);
  v.min_lemma2_pass_rate = get_or(j, "min_lemma2_pass_rate", path, v.min_lemma2_pass_rate);
  if (v.updates < 1) throw ConfigError("validate.updates", "must be positive");
  if (v.record_every < 1) throw ConfigError("validate.record_every", "must be positive");
  if (v.lemma2_states < 0) throw ConfigError("validate.lemma2_states", "must be non-negative");
  if (v.lemma2_replications < 1000) throw ConfigError("validate.lemma2_replications", "must be >= 1000");
  if (v.noise_samples_per_thread < 100) throw ConfigError("validate.noise_samples_per_thread", "must be >= 100");
}

void parse_sweep(const json& j, SweepSettings& s) {
  const std::string path = "sweep";
  s.gamma = get_or(j, "gamma", path, s.gamma);
  s.attraction = get_or(j, "attraction", path, s.attraction);
  s.n_threads = get_or(j, "n_threads", path, s.n_threads);
  s.lambda2 = get_or(j, "lambda2", path, s.lambda2);
  s.d_bar = get<double>(j, "d_bar", path);
  s.K = get_or(j, "K", path, s.K);
  s.noise_samples = get_or(j, "noise_samples", path, s.noise_samples);
  if (s.K < 2) throw ConfigError("sweep.K", "must be > 1");
  if (s.noise_samples < 100) throw ConfigError("sweep.noise_samples", "must be >= 100");
}

}  // namespace

ExperimentConfig ridge_study_config(int d, int N, std::uint64_t master_seed) {
  Rng rng(split_seed(master_seed, kXTildeStream));
  ExperimentConfig cfg(ObjectiveSpec::ridge(0.1, draw_x_tilde(d, rng)));
  cfg.run.n_threads = N;
  cfg.run.step_size = 0.01;
  cfg.run.attraction = 1.0;
  cfg.run.mean_sample_time = 0.02;
  cfg.run.record_every = 100;
  cfg.graph.kind = GraphKind::erdos_renyi;
  cfg.master_seed = master_seed;
  return cfg;
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  if (!j.contains("objective")) throw ConfigError("objective", "missing required field");

  const auto master_seed = get_or(j, "master_seed", "config", std::uint64_t{0});
  ExperimentConfig cfg(parse_objective(j.at("objective"), master_seed));
  cfg.master_seed = master_seed;
  if (j.contains("run")) parse_run(j.at("run"), cfg);
  if (j.contains("graph")) parse_graph(j.at("graph"), cfg.graph);
  if (j.contains("validate")) parse_validate(j.at("validate"), cfg.validate);
  if (j.contains("sweep")) parse_sweep(j.at("sweep"), cfg.sweep);
  cfg.replications = get_or(j, "replications", "config", cfg.replications);
  cfg.threshold = get_or(j, "threshold", "config", cfg.threshold);
  cfg.output_dir = get_or(j, "output_dir", "config", cfg.output_dir);
  cfg.jobs = get_or(j, "jobs", "config", cfg.jobs);

  if (cfg.replications < 1) throw ConfigError("replications", "must be >= 1");
  if (!(cfg.threshold > 0.0)) throw ConfigError("threshold", "must be positive");
  if (cfg.jobs < 1) throw ConfigError("jobs", "must be >= 1");
  if (cfg.init_point && cfg.init_point->size() != cfg.objective.dim())
    throw ConfigError("run.init", "length must equal the objective dimension");

  // Everything except seed/horizon/threshold is checked now.
  RunConfig probe = cfg.run;
  probe.max_updates = 1;
  probe.max_virtual_time.reset();
  try {
    probe.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("run", e.what());
  }
  return cfg;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_text_file(path));
}

}  // namespace swarmsgd
