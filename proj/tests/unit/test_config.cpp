#include <gtest/gtest.h>

#include <string>

#include "swarmsgd/config.hpp"
#include "swarmsgd/error.hpp"

using namespace swarmsgd;

namespace {

std::string field_of(const std::string& text) {
  try {
    parse_experiment_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST(ExperimentConfig, DefaultsFollowRidgeStudy) {
  const auto cfg = parse_experiment_config(R"({"objective": {"kind": "ridge", "dim": 20}})");
  EXPECT_EQ(cfg.objective.kind(), "ridge");
  EXPECT_EQ(cfg.objective.dim(), 20);
  EXPECT_NEAR(cfg.objective.regularity().kappa, 2.0 / 3.0 + 0.2, 1e-15);
  EXPECT_EQ(cfg.run.step_size, 0.01);
  EXPECT_EQ(cfg.run.attraction, 1.0);
  EXPECT_EQ(cfg.run.mean_sample_time, 0.02);
  EXPECT_EQ(cfg.threshold, 0.1);
  EXPECT_EQ(cfg.replications, 100);
  EXPECT_EQ(cfg.graph.kind, GraphKind::erdos_renyi);
  EXPECT_FALSE(cfg.graph.p);
  EXPECT_TRUE(cfg.graph.resample_per_run);
  EXPECT_FALSE(cfg.init_point);
}

TEST(ExperimentConfig, XTildeDrawnFromSeed) {
  const auto a = parse_experiment_config(R"({"master_seed": 4, "objective": {"kind": "ridge", "dim": 5}})");
  const auto b = parse_experiment_config(R"({"master_seed": 4, "objective": {"kind": "ridge", "dim": 5}})");
  const auto c = parse_experiment_config(R"({"master_seed": 5, "objective": {"kind": "ridge", "dim": 5}})");
  EXPECT_EQ(*a.objective.optimum(), *b.objective.optimum());
  EXPECT_NE(*a.objective.optimum(), *c.objective.optimum());
  const auto d = parse_experiment_config(
      R"({"master_seed": 5, "objective": {"kind": "ridge", "dim": 5, "x_tilde_seed": 4}})");
  const auto e = parse_experiment_config(
      R"({"master_seed": 6, "objective": {"kind": "ridge", "dim": 5, "x_tilde_seed": 4}})");
  EXPECT_EQ(*d.objective.optimum(), *e.objective.optimum());
  EXPECT_NE(*c.objective.optimum(), *d.objective.optimum());
}

TEST(ExperimentConfig, ExplicitFields) {
  const auto cfg = parse_experiment_config(R"({
    "objective": {"kind": "nonconvex_sine", "dim": 3, "noise_std": 0.5},
    "run": {"n_threads": 7, "step_size": 0.002, "attraction": 2, "max_updates": 1000,
            "scheme": "swarm_global_tick", "init_value": 1.5, "record_every": 10},
    "graph": {"kind": "complete"},
    "replications": 3, "threshold": 0.5, "master_seed": 99, "output_dir": "x", "jobs": 2})");
  EXPECT_EQ(cfg.run.n_threads, 7);
  EXPECT_EQ(cfg.run.scheme, Scheme::swarm_global_tick);
  EXPECT_EQ(*cfg.run.max_updates, 1000u);
  EXPECT_EQ(cfg.run.record_every, 10u);
  EXPECT_EQ(*cfg.init_point, Vector::Constant(3, 1.5));
  EXPECT_EQ(cfg.graph.kind, GraphKind::complete);
  EXPECT_EQ(cfg.replications, 3);
  EXPECT_EQ(cfg.master_seed, 99u);
  EXPECT_EQ(cfg.output_dir, "x");
  EXPECT_EQ(cfg.jobs, 2);
}

TEST(ExperimentConfig, ErrorsNameTheField) {
  EXPECT_EQ(field_of(R"({"run": {}})"), "objective");
  EXPECT_EQ(field_of(R"({"objective": {"kind": "ridge"}})"), "objective.dim");
  EXPECT_EQ(field_of(R"({"objective": {"kind": "cubic", "dim": 2}})"), "objective.kind");
  EXPECT_EQ(field_of(R"({"objective": {"kind": "ridge", "dim": 2}, "replications": 0})"), "replications");
  EXPECT_EQ(field_of(R"({"objective": {"kind": "ridge", "dim": 2}, "threshold": -1})"), "threshold");
  EXPECT_EQ(field_of(R"({"objective": {"kind": "ridge", "dim": 2}, "graph": {"kind": "ring"}})"), "graph.kind");
  EXPECT_EQ(field_of(R"({"objective": {"kind": "ridge", "dim": 2}, "graph": {"p": 2}})"), "graph.p");
  EXPECT_EQ(field_of(R"({"objective": {"kind": "ridge", "dim": 2}, "run": {"scheme": "x"}})"), "run.scheme");
  EXPECT_EQ(field_of(R"({"objective": {"kind": "ridge", "dim": 2}, "run": {"max_updates": 5, "max_virtual_time": 1}})"),
            "run.max_updates");
  EXPECT_EQ(field_of(R"({"objective": {"kind": "ridge", "dim": 2}, "run": {"step_size": "big"}})"), "run.step_size");
  EXPECT_EQ(field_of(R"({"objective": {"kind": "ridge", "dim": 2, "rho": -1}})"), "objective");
  EXPECT_EQ(field_of("[1, 2]"), "");
  EXPECT_EQ(field_of("{"), "");
}

TEST(ExperimentConfig, RidgeStudyConfig) {
  const auto cfg = ridge_study_config(20, 50, 3);
  EXPECT_EQ(cfg.objective.dim(), 20);
  EXPECT_EQ(cfg.run.n_threads, 50);
  const Vector xt = std::get<RidgeParams>(cfg.objective.params()).x_tilde;
  EXPECT_GE(xt.minCoeff(), 0.0);
  EXPECT_LT(xt.maxCoeff(), 1.0);
  EXPECT_EQ(std::get<RidgeParams>(ridge_study_config(20, 20, 3).objective.params()).x_tilde, xt);
  const auto parsed = parse_experiment_config(R"({"master_seed": 3, "objective": {"kind": "ridge", "dim": 20}})");
  EXPECT_EQ(std::get<RidgeParams>(parsed.objective.params()).x_tilde, xt);
}
