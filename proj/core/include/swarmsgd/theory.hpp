#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace swarmsgd::theory {

/// Expected slowdown of a synchronized batch of N exponential oracle calls.
struct HarmonicSpeedup {
  double H_N;
  /// Predicted ratio of centralized to swarm wall-clock per unit of progress.
  double delta_t_c_over_delta_t;
};

HarmonicSpeedup harmonic_speedup(int N);

/// Inputs shared by the swarm bounds. Not every bound reads every field.
struct BoundParams {
  double kappa = 0.0;
  double L = 0.0;
  double sigma_sq = 0.0;
  double gamma = 0.0;
  double a = 0.0;
  double lambda2 = 0.0;
  double d_bar = 0.0;
  int N = 0;
  std::uint64_t K = 0;
  double U0 = 0.0;
  double V0 = 0.0;
  double f0_gap = 0.0;
};

struct HatOmega {
  double value;
  /// Both roots of the defining quadratic lie in (0,1); the smaller was taken.
  bool ambiguous;
  double residual;
};

/// Coefficients (A, B, C) of A w^2 + B w + C = 0 whose root in (0,1) is the
/// Lyapunov weight of the strongly convex analysis.
std::array<double, 3> hat_omega_coefficients(double kappa, double L, double gamma, double a, double lambda2,
                                             double d_bar, int N);

/// Root in (0,1) of the weight equation. Throws InadmissibleParameters when
/// no such root exists.
HatOmega solve_hat_omega(double kappa, double L, double gamma, double a, double lambda2, double d_bar, int N);

struct StrongConvexBound {
  double hat_omega;
  bool ambiguous_root;
  /// Per-update contraction rate of the bound.
  double C;
  double phi_star;
  /// N/((1+wN)L), N/(2 kappa), N l2 / (4a(N+1) dbar^2)
  std::array<double, 3> gamma_caps;
  /// gamma below all three caps.
  bool admissible;
  /// The extra step-size condition under which phi* = O(sigma^2 / (kappa l2)).
  bool corollary_admissible;
  double U0;
  double V0;

  /// Bound on E|xbar_k - x*|^2 after k global updates.
  double phi(double k) const;
};

/// Check-after-solve: w-hat is computed for the given gamma, then gamma is
/// tested against the caps that depend on it.
StrongConvexBound strong_convex_bound(const BoundParams& p);

struct CentralizedBound {
  double phi_star_star;
  double contraction;
  double G0;

  /// Bound on E|x_k - x*|^2 after k batch steps.
  double trajectory(double k) const;
};

/// Throws InadmissibleParameters unless 0 < gamma < 2/L.
CentralizedBound centralized_bound(double kappa, double L, double sigma_sq, double gamma, int N, double G0);

struct ConvexBound {
  double tilde_omega;
  double mu;
  /// Bound on E[f(x~_K) - f*] for the running average of the centroids.
  double bound_at_K;
  double D;
  /// D sqrt(l2 N) / (sigma sqrt(K))
  double gamma_rule_value;
  /// min(l2/(8a dbar^2), (2L + a l2)N / (4(NL + L + a l2)L))
  double gamma_rule_cap;
  bool gamma_rule_ok;
  double phi_K_star;
};

/// gamma = D sqrt(l2 N) / (sigma sqrt(K))
double gamma_from_rule(double D, double sigma, double lambda2, int N, std::uint64_t K);

/// When D is absent it is implied by gamma through the step-size rule.
/// Throws InadmissibleParameters unless w~ in (0,1) and mu > 0.
ConvexBound convex_bound(const BoundParams& p, std::optional<double> D = std::nullopt);

struct NonconvexBound {
  double check_omega;
  double check_mu;
  /// Bound on E|grad f(xbar_R)|^2 / L for R uniform on {0..K-1}.
  double bound_at_K;
  bool attraction_ok;
};

/// Throws InadmissibleParameters unless a > 5L/(4 l2), w-check in (0,1) and mu-check > 0.
NonconvexBound nonconvex_bound(const BoundParams& p);

/// Steps for the noiseless centralized recursion to bring G0 below threshold.
/// Absent when the contraction is not in (0,1). Zero when G0 <= threshold.
std::optional<std::uint64_t> noiseless_crossing_steps(double kappa, double L, double gamma, double G0,
                                                      double threshold);

}  // namespace swarmsgd::theory
