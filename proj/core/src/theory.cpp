#include "swarmsgd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "swarmsgd/error.hpp"

namespace swarmsgd::theory {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be positive and finite");
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be non-negative");
}

bool in_unit_interval(double w) { return w > 0.0 && w < 1.0; }

}  // namespace

HarmonicSpeedup harmonic_speedup(int N) {
  if (N < 1) throw InvalidArgument("harmonic number needs N >= 1");
  double h = 0.0;
  // Smallest terms first.
  for (int i = N; i >= 1; --i) h += 1.0 / i;
  return {h, h};
}

std::array<double, 3> hat_omega_coefficients(double kappa, double L, double gamma, double a, double lambda2,
                                             double d_bar, int N) {
  const double n = N;
  const double klg = kappa * L * gamma;
  const double a2d2g = a * a * d_bar * d_bar * gamma;
  const double A = klg;
  const double B = -(kappa + (n - 1.0) / n * klg - L - a * lambda2 + 4.0 * a2d2g);
  const double C = -(-kappa + klg / n + L + 4.0 / n * a2d2g);
  return {A, B, C};
}

HatOmega solve_hat_omega(double kappa, double L, double gamma, double a, double lambda2, double d_bar, int N) {
  require_positive(kappa, "kappa");
  require_positive(L, "L");
  require_positive(gamma, "gamma");
  require_nonnegative(a, "a");
  require_positive(lambda2, "lambda2");
  require_nonnegative(d_bar, "d_bar");
  if (N < 2) throw InvalidArgument("N must be >= 2");

  const auto [A, B, C] = hat_omega_coefficients(kappa, L, gamma, a, lambda2, d_bar, N);
  std::vector<double> roots;
  if (A == 0.0) {
    if (B != 0.0) roots.push_back(-C / B);
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      // Cancellation-free pair.
      const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
      if (q != 0.0) {
        roots.push_back(q / A);
        roots.push_back(C / q);
      } else {
        roots.push_back(0.0);
      }
    }
  }

  auto poly = [&](double w) { return (A * w + B) * w + C; };
  std::vector<double> admissible;
  for (double w : roots) {
    // One Newton polish step.
    const double d = 2.0 * A * w + B;
    if (d != 0.0) w -= poly(w) / d;
    if (in_unit_interval(w)) admissible.push_back(w);
  }
  if (admissible.empty())
    throw InadmissibleParameters("no root of the weight equation lies in (0,1)");
  std::sort(admissible.begin(), admissible.end());
  const double w = admissible.front();
  return {w, admissible.size() > 1, poly(w)};
}

double StrongConvexBound::phi(double k) const {
  return phi_star + (U0 + hat_omega * V0 - phi_star) * std::pow(1.0 - C, k);
}

StrongConvexBound strong_convex_bound(const BoundParams& p) {
  require_nonnegative(p.sigma_sq, "sigma_sq");
  require_nonnegative(p.U0, "U0");
  require_nonnegative(p.V0, "V0");
  const HatOmega w = solve_hat_omega(p.kappa, p.L, p.gamma, p.a, p.lambda2, p.d_bar, p.N);
  const double n = p.N;
  const double inf = std::numeric_limits<double>::infinity();
  const double one_wn = 1.0 + w.value * n;

  StrongConvexBound b{};
  b.hat_omega = w.value;
  b.ambiguous_root = w.ambiguous;
  b.U0 = p.U0;
  b.V0 = p.V0;
  b.gamma_caps = {n / (one_wn * p.L), n / (2.0 * p.kappa),
                  p.a * p.d_bar > 0.0 ? n * p.lambda2 / (4.0 * p.a * (n + 1.0) * p.d_bar * p.d_bar) : inf};
  b.admissible = p.gamma < *std::min_element(b.gamma_caps.begin(), b.gamma_caps.end());
  b.C = 2.0 / n * p.kappa * p.gamma - 2.0 / (n * n) * p.kappa * one_wn * p.L * p.gamma * p.gamma;
  b.phi_star = one_wn * p.gamma * p.sigma_sq / (2.0 * p.kappa * n - 2.0 * p.kappa * one_wn * p.L * p.gamma);

  const double a2d2 = p.a * p.a * p.d_bar * p.d_bar;
  const double cap10 = (p.a * p.lambda2 + 2.0 * p.L - 2.0 * p.kappa) / (2.0 * (p.kappa * p.L + 4.0 * a2d2));
  b.corollary_admissible = b.admissible && p.gamma < std::min(cap10, 2.0 / p.L);
  return b;
}

double CentralizedBound::trajectory(double k) const {
  return phi_star_star + (G0 - phi_star_star) * std::pow(contraction, k - 1.0);
}

CentralizedBound centralized_bound(double kappa, double L, double sigma_sq, double gamma, int N, double G0) {
  require_positive(kappa, "kappa");
  require_positive(L, "L");
  require_nonnegative(sigma_sq, "sigma_sq");
  require_nonnegative(G0, "G0");
  if (N < 1) throw InvalidArgument("N must be >= 1");
  if (!(gamma > 0.0) || !(gamma < 2.0 / L)) throw InadmissibleParameters("centralized bound needs 0 < gamma < 2/L");
  const double n = N;
  return {gamma * sigma_sq / (kappa * n * (2.0 - L * gamma)), 1.0 - 2.0 * kappa * gamma + kappa * L * gamma * gamma,
          G0};
}

double gamma_from_rule(double D, double sigma, double lambda2, int N, std::uint64_t K) {
  require_positive(D, "D");
  require_positive(sigma, "sigma");
  require_positive(lambda2, "lambda2");
  if (N < 1 || K < 1) throw InvalidArgument("N and K must be positive");
  return D * std::sqrt(lambda2 * N) / (sigma * std::sqrt(static_cast<double>(K)));
}

ConvexBound convex_bound(const BoundParams& p, std::optional<double> D) {
  require_positive(p.L, "L");
  require_positive(p.sigma_sq, "sigma_sq");
  require_positive(p.gamma, "gamma");
  require_nonnegative(p.a, "a");
  require_positive(p.lambda2, "lambda2");
  require_nonnegative(p.d_bar, "d_bar");
  require_nonnegative(p.U0, "U0");
  require_nonnegative(p.V0, "V0");
  if (p.N < 2) throw InvalidArgument("N must be >= 2");
  if (p.K < 2) throw InvalidArgument("K must be > 1");

  const double n = p.N;
  const double k = static_cast<double>(p.K);
  const double sigma = std::sqrt(p.sigma_sq);
  const double a2d2g = p.a * p.a * p.d_bar * p.d_bar * p.gamma;
  const double denom = n * p.L + p.a * n * p.lambda2 - 4.0 * n * a2d2g;
  if (!(denom > 0.0)) throw InadmissibleParameters("convex weight denominator is not positive");

  ConvexBound b{};
  b.tilde_omega = (n * p.L + 4.0 * a2d2g) / denom;
  if (!in_unit_interval(b.tilde_omega)) throw InadmissibleParameters("convex weight outside (0,1)");
  const double one_wn = 1.0 + b.tilde_omega * n;
  b.mu = p.gamma / (n * n) - one_wn * p.gamma * p.gamma * p.L / (n * n * n);
  if (!(b.mu > 0.0)) throw InadmissibleParameters("convex rate mu is not positive");
  b.bound_at_K =
      (p.U0 + b.tilde_omega * p.V0 + one_wn * k * p.gamma * p.gamma * p.sigma_sq / (n * n)) / (2.0 * n * k * b.mu);

  b.D = D ? *D : p.gamma * sigma * std::sqrt(k) / std::sqrt(p.lambda2 * n);
  b.gamma_rule_value = gamma_from_rule(b.D, sigma, p.lambda2, p.N, p.K);
  const double inf = std::numeric_limits<double>::infinity();
  const double cap_a = p.a * p.d_bar > 0.0 ? p.lambda2 / (8.0 * p.a * p.d_bar * p.d_bar) : inf;
  const double cap_l = (2.0 * p.L + p.a * p.lambda2) * n / (4.0 * (n * p.L + p.L + p.a * p.lambda2) * p.L);
  b.gamma_rule_cap = std::min(cap_a, cap_l);
  b.gamma_rule_ok = b.gamma_rule_value <= b.gamma_rule_cap;
  const double ratio = (2.0 * n * p.L + p.a * p.lambda2) / (2.0 * p.L + p.a * p.lambda2);
  b.phi_K_star = sigma * std::sqrt(n) / (b.D * std::sqrt(p.lambda2 * k)) *
                 (p.U0 + b.tilde_omega * p.V0 + (1.0 + ratio) * b.D * b.D * p.lambda2 / n);
  return b;
}

NonconvexBound nonconvex_bound(const BoundParams& p) {
  require_positive(p.L, "L");
  require_nonnegative(p.sigma_sq, "sigma_sq");
  require_positive(p.gamma, "gamma");
  require_nonnegative(p.a, "a");
  require_positive(p.lambda2, "lambda2");
  require_nonnegative(p.d_bar, "d_bar");
  require_nonnegative(p.f0_gap, "f0_gap");
  require_nonnegative(p.V0, "V0");
  if (p.N < 2) throw InvalidArgument("N must be >= 2");
  if (p.K < 2) throw InvalidArgument("K must be > 1");

  NonconvexBound b{};
  b.attraction_ok = p.a > 5.0 * p.L / (4.0 * p.lambda2);
  if (!b.attraction_ok) throw InadmissibleParameters("attraction must exceed 5L/(4 lambda2)");
  const double n = p.N;
  const double k = static_cast<double>(p.K);
  const double coupling = 2.0 * p.L * p.L + 4.0 * p.a * p.a * p.d_bar * p.d_bar;
  const double denom = 4.0 * n * (p.a * p.lambda2 - p.L) - 4.0 * n * coupling * p.gamma;
  if (!(denom > 0.0)) throw InadmissibleParameters("nonconvex weight denominator is not positive");
  b.check_omega = (n * p.L + 2.0 * coupling * p.gamma) / denom;
  if (!in_unit_interval(b.check_omega)) throw InadmissibleParameters("nonconvex weight outside (0,1)");
  b.check_mu = p.gamma / (2.0 * n * n) - (2.0 + 4.0 * b.check_omega * n) * p.L * p.gamma * p.gamma / (n * n * n);
  if (!(b.check_mu > 0.0)) throw InadmissibleParameters("nonconvex rate mu is not positive");
  b.bound_at_K = ((p.f0_gap + b.check_omega * p.L * p.V0) / p.L +
                  (0.5 + b.check_omega * n) * k * p.gamma * p.gamma * p.sigma_sq / (n * n)) /
                 (n * k * b.check_mu);
  return b;
}

std::optional<std::uint64_t> noiseless_crossing_steps(double kappa, double L, double gamma, double G0,
                                                      double threshold) {
  if (!(threshold > 0.0)) return std::nullopt;
  if (G0 <= threshold) return 0;
  const double c = 1.0 - 2.0 * kappa * gamma + kappa * L * gamma * gamma;
  if (!(c > 0.0 && c < 1.0)) return std::nullopt;
  return static_cast<std::uint64_t>(std::ceil(std::log(threshold / G0) / std::log(c)));
}

}  // namespace swarmsgd::theory
