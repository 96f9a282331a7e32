#include "swarmsgd/objective.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "swarmsgd/error.hpp"

namespace swarmsgd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dim(const ObjectiveSpec& spec, Eigen::Index n) {
  if (n != spec.dim())
    throw InvalidArgument("dimension mismatch: objective has m=" + std::to_string(spec.dim()) +
                          ", got " + std::to_string(n));
}

}  // namespace

ObjectiveSpec::ObjectiveSpec(Params p, int dim) : params_(std::move(p)), dim_(dim) {}

ObjectiveSpec ObjectiveSpec::ridge(double rho, Vector x_tilde) {
  if (!(rho > 0.0)) throw InvalidArgument("ridge penalty rho must be positive");
  if (x_tilde.size() < 1) throw InvalidArgument("ridge x_tilde must be non-empty");
  if ((x_tilde.array() < 0.0).any() || (x_tilde.array() > 1.0).any())
    throw InvalidArgument("ridge x_tilde entries must lie in [0, 1]");
  const int m = static_cast<int>(x_tilde.size());
  ObjectiveSpec s(RidgeParams{rho, std::move(x_tilde)}, m);
  s.finalize();
  return s;
}

ObjectiveSpec ObjectiveSpec::quadratic(Matrix Q, Vector b, double noise_std) {
  if (Q.rows() < 1 || Q.rows() != Q.cols()) throw InvalidArgument("quadratic Q must be square and non-empty");
  if (b.size() != Q.rows()) throw InvalidArgument("quadratic b must match Q's dimension");
  if (!(noise_std >= 0.0)) throw InvalidArgument("noise_std must be non-negative");
  if (!Q.isApprox(Q.transpose(), 1e-12)) throw InvalidArgument("quadratic Q must be symmetric");
  const int m = static_cast<int>(Q.rows());
  ObjectiveSpec s(QuadraticParams{std::move(Q), std::move(b), noise_std}, m);
  s.finalize();
  return s;
}

ObjectiveSpec ObjectiveSpec::nonconvex_sine(int dim, double noise_std) {
  if (dim < 1) throw InvalidArgument("nonconvex_sine dimension must be positive");
  if (!(noise_std >= 0.0)) throw InvalidArgument("noise_std must be non-negative");
  ObjectiveSpec s(NonconvexSineParams{dim, noise_std}, dim);
  s.finalize();
  return s;
}

void ObjectiveSpec::finalize() {
  std::visit(Overloaded{
                 [&](const RidgeParams& r) {
                   const double h = 2.0 / 3.0 + 2.0 * r.rho;
                   regularity_ = {h, h, ConvexityClass::strongly_convex};
                   optimum_ = r.x_tilde / (1.0 + 3.0 * r.rho);
                 },
                 [&](const QuadraticParams& q) {
                   Eigen::SelfAdjointEigenSolver<Matrix> eig(q.Q, Eigen::EigenvaluesOnly);
                   const double lo = eig.eigenvalues()(0);
                   const double hi = eig.eigenvalues()(dim_ - 1);
                   if (!(lo > 0.0)) throw InvalidArgument("quadratic Q must be positive definite");
                   regularity_ = {lo, hi, ConvexityClass::strongly_convex};
                   optimum_ = Vector(-q.Q.ldlt().solve(q.b));
                 },
                 [&](const NonconvexSineParams&) {
                   regularity_ = {0.0, 7.0, ConvexityClass::nonconvex};
                   // Both terms are nonnegative and vanish at 0.
                   optimal_value_ = 0.0;
                 },
             },
             params_);
  if (optimum_) optimal_value_ = value(*this, *optimum_);
}

std::string_view ObjectiveSpec::kind() const noexcept {
  switch (params_.index()) {
    case 0: return "ridge";
    case 1: return "quadratic";
    default: return "nonconvex_sine";
  }
}

double value(const ObjectiveSpec& spec, Eigen::Ref<const Vector> x) {
  check_dim(spec, x.size());
  return std::visit(Overloaded{
                        [&](const RidgeParams& r) {
                          // E[(u'x - v)^2] = |x - x_tilde|^2 / 3 + 1 since E[uu'] = I/3.
                          return (x - r.x_tilde).squaredNorm() / 3.0 + r.rho * x.squaredNorm() + 1.0;
                        },
                        [&](const QuadraticParams& q) { return 0.5 * x.dot(q.Q * x) + q.b.dot(x); },
                        [&](const NonconvexSineParams&) {
                          double f = 0.0;
                          for (Eigen::Index i = 0; i < x.size(); ++i) {
                            const double s = std::sin(x(i));
                            f += 0.5 * x(i) * x(i) + 3.0 * s * s;
                          }
                          return f;
                        },
                    },
                    spec.params());
}

void grad_exact_into(const ObjectiveSpec& spec, Eigen::Ref<const Vector> x, Eigen::Ref<Vector> out) {
  check_dim(spec, x.size());
  std::visit(Overloaded{
                 [&](const RidgeParams& r) {
                   out = (2.0 / 3.0 + 2.0 * r.rho) * x - (2.0 / 3.0) * r.x_tilde;
                 },
                 [&](const QuadraticParams& q) { out.noalias() = q.Q * x + q.b; },
                 [&](const NonconvexSineParams&) {
                   for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = x(i) + 3.0 * std::sin(2.0 * x(i));
                 },
             },
             spec.params());
}

Vector grad_exact(const ObjectiveSpec& spec, Eigen::Ref<const Vector> x) {
  Vector g(spec.dim());
  grad_exact_into(spec, x, g);
  return g;
}

double sample_gradient_into(const ObjectiveSpec& spec, Eigen::Ref<const Vector> x, double mean_time,
                            Rng& rng, Eigen::Ref<Vector> out) {
  check_dim(spec, x.size());
  if (!(mean_time > 0.0)) throw InvalidArgument("mean sampling time must be positive");
  const Eigen::Index m = x.size();
  if (const auto* r = std::get_if<RidgeParams>(&spec.params())) {
    // g = 2(u'x - v)u + 2 rho x, v = u'x_tilde + eps
    for (Eigen::Index i = 0; i < m; ++i) out(i) = rng.uniform(-1.0, 1.0);
    const double eps = rng.normal();
    const double residual = out.dot(x) - out.dot(r->x_tilde) - eps;
    out = 2.0 * residual * out + 2.0 * r->rho * x;
  } else {
    grad_exact_into(spec, x, out);
    const double s = std::holds_alternative<QuadraticParams>(spec.params())
                         ? std::get<QuadraticParams>(spec.params()).noise_std
                         : std::get<NonconvexSineParams>(spec.params()).noise_std;
    if (s > 0.0)
      for (Eigen::Index i = 0; i < m; ++i) out(i) += s * rng.normal();
  }
  return rng.exponential(mean_time);
}

GradientSample sample_gradient(const ObjectiveSpec& spec, Eigen::Ref<const Vector> x, double mean_time,
                               Rng& rng) {
  GradientSample s{Vector(spec.dim()), 0.0};
  s.sampling_time = sample_gradient_into(spec, x, mean_time, rng, s.g);
  return s;
}

double estimate_noise_variance(const ObjectiveSpec& spec, Eigen::Ref<const Vector> x, int n_samples,
                               Rng& rng) {
  if (n_samples < kMinNoiseSamples)
    throw InvalidArgument("noise variance estimate needs at least " + std::to_string(kMinNoiseSamples) +
                          " samples");
  const Vector exact = grad_exact(spec, x);
  Vector g(spec.dim());
  double acc = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    sample_gradient_into(spec, x, 1.0, rng, g);
    acc += (g - exact).squaredNorm();
  }
  return acc / n_samples;
}

Vector draw_x_tilde(int dim, Rng& rng) {
  if (dim < 1) throw InvalidArgument("dimension must be positive");
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.uniform01();
  return v;
}

}  // namespace swarmsgd
