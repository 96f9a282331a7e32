#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "swarmsgd/rng.hpp"
#include "swarmsgd/types.hpp"

namespace swarmsgd {

/// Online ridge regression: f(x) = E[(u'x - v)^2] + rho |x|^2 with
/// u ~ U[-1,1]^m, v = u'x_tilde + eps, eps ~ N(0,1).
struct RidgeParams {
  double rho;
  Vector x_tilde;
};

/// f(x) = x'Qx/2 + b'x, Q symmetric positive definite; oracle adds N(0, s^2 I).
struct QuadraticParams {
  Matrix Q;
  Vector b;
  double noise_std = 1.0;
};

/// f(x) = sum_i x_i^2/2 + 3 sin^2(x_i); smooth, L = 7, nonconvex.
struct NonconvexSineParams {
  int dim;
  double noise_std = 1.0;
};

enum class ConvexityClass { strongly_convex, convex, nonconvex };

struct Regularity {
  double kappa;
  double L;
  ConvexityClass convexity;
};

struct GradientSample {
  Vector g;
  double sampling_time;
};

/// Immutable objective with exact gradient, stochastic oracle and known constants.
class ObjectiveSpec {
 public:
  using Params = std::variant<RidgeParams, QuadraticParams, NonconvexSineParams>;

  static ObjectiveSpec ridge(double rho, Vector x_tilde);
  static ObjectiveSpec quadratic(Matrix Q, Vector b, double noise_std = 1.0);
  static ObjectiveSpec nonconvex_sine(int dim, double noise_std = 1.0);

  int dim() const noexcept { return dim_; }
  const Params& params() const noexcept { return params_; }
  std::string_view kind() const noexcept;

  const Regularity& regularity() const noexcept { return regularity_; }
  /// Closed-form minimizer; absent for nonconvex_sine.
  const std::optional<Vector>& optimum() const noexcept { return optimum_; }
  /// Global minimum value f*. Known for every variant (0 for nonconvex_sine,
  /// whose minimizer is not exposed).
  std::optional<double> optimal_value() const noexcept { return optimal_value_; }

 private:
  ObjectiveSpec(Params p, int dim);
  void finalize();

  Params params_;
  int dim_;
  Regularity regularity_{};
  std::optional<Vector> optimum_;
  std::optional<double> optimal_value_;
};

double value(const ObjectiveSpec& spec, Eigen::Ref<const Vector> x);

Vector grad_exact(const ObjectiveSpec& spec, Eigen::Ref<const Vector> x);
void grad_exact_into(const ObjectiveSpec& spec, Eigen::Ref<const Vector> x, Eigen::Ref<Vector> out);

/// One oracle call: unbiased noisy gradient plus an Exp(mean_time) generation time.
/// Randomness is consumed as: gradient noise first, then the sampling time.
GradientSample sample_gradient(const ObjectiveSpec& spec, Eigen::Ref<const Vector> x, double mean_time,
                               Rng& rng);

/// Allocation-free variant of sample_gradient; returns the sampling time.
double sample_gradient_into(const ObjectiveSpec& spec, Eigen::Ref<const Vector> x, double mean_time,
                            Rng& rng, Eigen::Ref<Vector> out);

inline std::optional<Vector> optimum(const ObjectiveSpec& spec) { return spec.optimum(); }
inline Regularity regularity(const ObjectiveSpec& spec) { return spec.regularity(); }

inline constexpr int kMinNoiseSamples = 100;

/// Empirical mean of |g(x) - grad f(x)|^2 over n_samples oracle calls.
double estimate_noise_variance(const ObjectiveSpec& spec, Eigen::Ref<const Vector> x, int n_samples,
                               Rng& rng);

/// x_tilde drawn uniformly from [0,1]^m.
Vector draw_x_tilde(int dim, Rng& rng);

}  // namespace swarmsgd
