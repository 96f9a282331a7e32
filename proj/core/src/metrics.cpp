#include "swarmsgd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "swarmsgd/engine.hpp"
#include "swarmsgd/error.hpp"

namespace swarmsgd {

namespace {

void check_positions(const Positions& positions, const ObjectiveSpec& spec) {
  if (positions.rows() < 1) throw InvalidArgument("positions must have at least one row");
  if (positions.cols() != spec.dim())
    throw InvalidArgument("dimension mismatch: objective has m=" + std::to_string(spec.dim()) +
                          ", positions have " + std::to_string(positions.cols()) + " columns");
}

void check_graph(const Positions& positions, const Graph& graph) {
  if (positions.rows() != graph.size())
    throw InvalidArgument("positions have " + std::to_string(positions.rows()) + " rows but graph has " +
                          std::to_string(graph.size()) + " vertices");
}

// sum_j alpha_ij (x_i - x_j)
Vector attraction_sum(const Positions& positions, const Graph& graph, int i) {
  Vector s = Vector::Zero(positions.cols());
  for (int j : graph.neighbors(i)) s += (positions.row(i) - positions.row(j)).transpose();
  return s;
}

}  // namespace

Vector centroid(const Positions& positions) { return positions.colwise().mean().transpose(); }

double dispersion(const Positions& positions, Eigen::Ref<const Vector> mean) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < positions.rows(); ++i)
    acc += (positions.row(i).transpose() - mean).squaredNorm();
  return acc / static_cast<double>(positions.rows());
}

MetricSnapshot snapshot(const Positions& positions, const ObjectiveSpec& spec,
                        const std::optional<Vector>& x_star) {
  check_positions(positions, spec);
  const Vector mean = centroid(positions);
  MetricSnapshot s = snapshot_point(mean, spec, x_star);
  s.Vbar = dispersion(positions, mean);
  return s;
}

MetricSnapshot snapshot_point(Eigen::Ref<const Vector> x, const ObjectiveSpec& spec,
                        const std::optional<Vector>& x_star) {
  if (x.size() != spec.dim()) throw InvalidArgument("dimension mismatch in snapshot");
  MetricSnapshot s{};
  s.grad_norm_sq = grad_exact(spec, x).squaredNorm();
  s.Vbar = 0.0;
  if (x_star) {
    if (x_star->size() != spec.dim()) throw InvalidArgument("x_star dimension mismatch");
    s.U = (x - *x_star).squaredNorm();
    s.f_gap = value(spec, x) - value(spec, *x_star);
  } else {
    s.U = std::numeric_limits<double>::quiet_NaN();
    s.f_gap = s.grad_norm_sq;
  }
  return s;
}

void RunningAverage::push(Eigen::Ref<const Vector> x) {
  if (count_ == 0 && value_.size() == 0) value_ = Vector::Zero(x.size());
  if (x.size() != value_.size()) throw InvalidArgument("running average dimension mismatch");
  ++count_;
  const double w = 1.0 / static_cast<double>(count_);
  value_ = (1.0 - w) * value_ + w * x;
}

std::uint64_t select_random_index(std::uint64_t K, Rng& rng) {
  if (K < 1) throw InvalidArgument("random index needs K >= 1");
  return rng.uniform_index(K);
}

InequalityCheck lemma4_check(const Positions& positions, const Graph& graph, const ObjectiveSpec& spec,
                             double a) {
  check_positions(positions, spec);
  check_graph(positions, graph);
  const auto n = static_cast<double>(positions.rows());
  const auto d_bar = static_cast<double>(max_degree(graph));
  double lhs = 0.0;
  double grad_sq = 0.0;
  for (int i = 0; i < graph.size(); ++i) {
    const Vector g = grad_exact(spec, positions.row(i).transpose());
    grad_sq += g.squaredNorm();
    lhs += (g + a * attraction_sum(positions, graph, i)).squaredNorm();
  }
  const double vbar = dispersion(positions, centroid(positions));
  const double rhs = 2.0 * grad_sq + 8.0 * a * a * n * d_bar * d_bar * vbar;
  return {lhs, rhs, lhs <= rhs * (1.0 + kLemma4RelativeSlack)};
}

Lemma2Result lemma2_monte_carlo_check(const Positions& positions, const Graph& graph,
                                      const ObjectiveSpec& spec, const RunConfig& config,
                                      int n_replications, Rng& rng, const Lemma2Options& options) {
  check_positions(positions, spec);
  check_graph(positions, graph);
  if (n_replications < kMinLemma2Replications)
    throw InvalidArgument("one-step dispersion check needs at least " + std::to_string(kMinLemma2Replications) +
                          " replications");
  const int n = graph.size();
  const double nd = n;
  const double gamma = config.step_size;
  const double a = config.attraction;
  const double lambda2 = algebraic_connectivity(graph);

  const Vector mean = centroid(positions);
  const double vbar = dispersion(positions, mean);

  double grad_dot_e = 0.0;
  double coupled_sq = 0.0;
  double sigma_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector xi = positions.row(i).transpose();
    const Vector g = grad_exact(spec, xi);
    grad_dot_e += g.dot(xi - mean);
    coupled_sq += (g + a * attraction_sum(positions, graph, i)).squaredNorm();
    sigma_sq += estimate_noise_variance(spec, xi, options.noise_samples_per_thread, rng);
  }
  sigma_sq /= nd;

  const double rhs = vbar - 2.0 * gamma / (nd * nd) * grad_dot_e - 2.0 / nd * a * lambda2 * gamma * vbar +
                     gamma * gamma / (nd * nd) * coupled_sq + gamma * gamma * sigma_sq / nd;

  Positions work = positions;
  Vector g(spec.dim());
  // Shifted sums: exact mean when every replicate is identical (gamma = 0).
  double shift = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int r = 0; r < n_replications; ++r) {
    const int i = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    sample_gradient_into(spec, work.row(i).transpose(), config.mean_sample_time, rng, g);
    swarm_update(work, i, g, graph, gamma, a);
    const double v = dispersion(work, centroid(work));
    work.row(i) = positions.row(i);
    if (r == 0) shift = v;
    sum += v - shift;
    sum_sq += (v - shift) * (v - shift);
  }
  const double reps = n_replications;
  const double mean_dev = sum / reps;
  const double emp = shift + mean_dev;
  const double var = std::max(0.0, (sum_sq - reps * mean_dev * mean_dev) / (reps - 1.0));
  const double se = std::sqrt(var / reps);
  return {emp, rhs, se, emp <= rhs + options.se_slack * se, vbar, sigma_sq};
}

}  // namespace swarmsgd
