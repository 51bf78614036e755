#pragma once

#include <functional>
#include <vector>

#include "loghe/spectral.hpp"

namespace loghe {

/// One evaluated inequality: both sides, their difference, and an echo of the
/// inputs so a violating case can be reproduced from the report alone.
struct GapReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // rhs - lhs
  double eps = 0.0;
  double alpha = 0.0;
  double norm_u = 0.0;
  double norm_v = 0.0;
};

/// int u^2 log|u| dx <= eps ||u||_V^2 + (d/4) log(1/eps) ||u||^2 + ||u||^2 log||u||.
GapReport log_sobolev_gap(const SpectralField& u, const SpectralBasis& basis,
                          double eps, int d = 1);

/// log_+ variant: rhs gains the additive constant m(D)/(2e).
GapReport log_sobolev_plus_gap(const SpectralField& u, const SpectralBasis& basis,
                               double eps, int d = 1);

/// (u log|u| - v log|v|, u - v) against the eps/alpha estimate.
GapReport lemma31_gap(const SpectralField& u, const SpectralField& v,
                      const SpectralBasis& basis, double eps, double alpha, int d = 1);

/// int |u-v|^2 log_+(|u| v |v|) dx against the estimate with the extra
/// (4 m(D))^{1-alpha} term.
GapReport lemma32_gap(const SpectralField& u, const SpectralField& v,
                      const SpectralBasis& basis, double eps, double alpha, int d = 1);

using TimeFn = std::function<double(double)>;

/// Bound for Y <= c + int (a Y + b Y^alpha): constant-coefficient closed form.
double gronwall_alpha_bound(double c, double a, double b, double alpha,
                            double t, double t0 = 0.0);
/// Same bound with time-dependent coefficients, integrated numerically.
double gronwall_alpha_bound(double c, const TimeFn& a, const TimeFn& b, double alpha,
                            double t, double t0 = 0.0);

/// Bound for X <= M + int (c1 X + c2 X log X): constant-coefficient closed form.
double log_gronwall_bound(double M, double c1, double c2, double t);
double log_gronwall_bound(const TimeFn& M, const TimeFn& c1, const TimeFn& c2, double t);

/// T_p = log(p / (p - 1 + theta)), decreasing in p on [2, inf).
double horizon_Tp(double p, double theta);

/// gamma(z) = z^2 / (z - 1 + theta) for z >= 2.
double gamma_map(double z, double theta);

/// Horizon segments covering [0, T]: q(i) = gamma^i(p), T(i) = T_{q(i)},
/// kappa = first n with sum_{i<=n} T(i) >= T, S(i+1) = S(i) + T(kappa - i).
struct Schedule {
  double p = 2.0;
  double theta = 0.0;
  double T = 0.0;
  std::vector<double> q;         // q(0..kappa)
  std::vector<double> horizons;  // T(0..kappa)
  int kappa = 0;
  std::vector<double> S;         // S(0..kappa+1), S(0) = 0
};

Schedule build_schedule(double p, double theta, double T);

/// rho(x) = x/e on [0, e], log x beyond; continuous at the knee.
double rho(double x);

/// Phi(z) = exp(int_0^z dx / (1 + x + x rho(x))); concave, >= 1, increasing.
double phi(double z);
double phi_prime(double z);

/// Uniqueness horizon (e / (4 (1 + L2^2)))^2.
double t_star(double L2);

/// Adaptive Gauss-Kronrod (G7/K15) to absolute tolerance; exposed for the
/// double-oracle tests against brute-force panel quadrature.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12);

}  // namespace loghe
