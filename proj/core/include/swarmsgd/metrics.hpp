#pragma once

#include <cstdint>
#include <optional>

#include "swarmsgd/objective.hpp"
#include "swarmsgd/rng.hpp"
#include "swarmsgd/topology.hpp"
#include "swarmsgd/types.hpp"

namespace swarmsgd {

struct RunConfig;

/// Error and cohesion statistics of a set of thread solutions.
///
/// U is |xbar - x*|^2 and is NaN when the objective has no closed-form
/// optimum; f_gap then carries grad_norm_sq instead of f(xbar) - f*.
struct MetricSnapshot {
  double U;
  double Vbar;
  double f_gap;
  double grad_norm_sq;
};

/// Row mean of the positions.
Vector centroid(const Positions& positions);

/// (1/N) sum_i |x_i - xbar|^2
double dispersion(const Positions& positions, Eigen::Ref<const Vector> mean);

MetricSnapshot snapshot(const Positions& positions, const ObjectiveSpec& spec,
                        const std::optional<Vector>& x_star);

/// Snapshot of a single solution (centralized scheme, Vbar = 0).
MetricSnapshot snapshot_point(Eigen::Ref<const Vector> x, const ObjectiveSpec& spec,
                              const std::optional<Vector>& x_star);

/// Incremental mean: value_k = (1 - 1/k) value_{k-1} + (1/k) x.
class RunningAverage {
 public:
  RunningAverage() = default;
  explicit RunningAverage(int dim) : value_(Vector::Zero(dim)) {}

  void push(Eigen::Ref<const Vector> x);

  std::uint64_t count() const noexcept { return count_; }
  const Vector& value() const noexcept { return value_; }

 private:
  std::uint64_t count_ = 0;
  Vector value_;
};

inline RunningAverage running_average_push(RunningAverage ra, Eigen::Ref<const Vector> x) {
  ra.push(x);
  return ra;
}

/// Uniform draw from {0, ..., K-1}.
std::uint64_t select_random_index(std::uint64_t K, Rng& rng);

struct InequalityCheck {
  double lhs;
  double rhs;
  bool holds;
};

inline constexpr double kLemma4RelativeSlack = 1e-9;

/// sum_i |grad f(x_i) + a sum_j alpha_ij (x_i - x_j)|^2
///   <= 2 sum_i |grad f(x_i)|^2 + 8 a^2 N dbar^2 Vbar
InequalityCheck lemma4_check(const Positions& positions, const Graph& graph, const ObjectiveSpec& spec,
                             double a);

struct Lemma2Result {
  double empirical_mean;
  double rhs;
  double std_err;
  bool holds;
  double vbar_before;
  double sigma_sq;
};

struct Lemma2Options {
  /// Oracle calls per thread position for the local noise variance estimate.
  int noise_samples_per_thread = 2000;
  double se_slack = 3.0;
};

inline constexpr int kMinLemma2Replications = 1000;

/// Monte-Carlo check of the one-step dispersion bound.
///
/// Freezes the state, applies one global-tick update (uniform updater,
/// fresh oracle noise) n_replications times and compares the mean
/// resulting Vbar with the conditional-expectation bound
///   Vbar - (2g/N^2) sum grad_i'e_i - (2/N) a l2 g Vbar
///        + (g^2/N^2) sum |grad_i + a sum alpha_ij (x_i - x_j)|^2 + g^2 s^2 / N.
/// s^2 is the mean over thread positions of the local oracle variance.
Lemma2Result lemma2_monte_carlo_check(const Positions& positions, const Graph& graph,
                                      const ObjectiveSpec& spec, const RunConfig& config,
                                      int n_replications, Rng& rng, const Lemma2Options& options = {});

}  // namespace swarmsgd
