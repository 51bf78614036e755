#pragma once

#include <functional>
#include <string>

#include "loghe/spectral.hpp"

namespace loghe {

/// x log|x| with the continuous extension 0 at x = 0.
double xlogx(double x);

/// log(1 v z) for z >= 0; throws on negative input.
double log_plus(double z);

/// Scalar diffusion coefficient sigma with its growth-hypothesis constants.
/// Constants are stored only when the kind supplies them; the H.1 pair for
/// linear_cut_log is fitted by a numerical sweep, not given analytically,
/// and is flagged as empirical.
struct DiffusionModel {
  enum class Kind { zero, linear_cut_log, sublinear, custom };

  Kind kind = Kind::zero;
  double theta = 0.0;          // H.2 exponent, in [0,1)
  double C1 = 0.0, C2 = 0.0;   // H.2: |sigma(x)| <= C1 + C2 |x|^theta
  double C3 = 0.0, C4 = 0.0;   // H.3: |sigma(x)| <= C3 + C4 |x| log_+(|x|)^{1/2}
  double L1 = 0.0, L2 = 0.0;   // H.1 log-Lipschitz constants
  bool h1_empirical = false;
  std::function<double(double)> eval;

  double operator()(double x) const { return eval ? eval(x) : 0.0; }

  static DiffusionModel zero();
  /// sigma(x) = x (log|x|)^{1/2} for |x| >= e, sigma(x) = x for |x| <= e.
  static DiffusionModel linear_cut_log();
  static DiffusionModel sublinear(double theta, double C1 = 1.0, double C2 = 1.0);
  static DiffusionModel custom(std::function<double(double)> f, double C3, double C4);

  std::string kind_name() const;
};

/// Galerkin drift: component j is the quadrature of e_j * v log|v|,
/// v = synthesize(y). Throws NumericalError naming the mode on non-finite output.
SpectralField drift_F(const SpectralField& y, const SpectralBasis& basis);

/// Quadrature of v^2/2 log|v| - v^2/4; drift_F is its exact gradient on the
/// discrete level, which is what the finite-difference oracle checks.
double potential_psi(const SpectralField& y, const SpectralBasis& basis);

/// Projected diffusion: component j is the quadrature of e_j * sigma(v).
SpectralField diffusion_G(const SpectralField& y, const SpectralBasis& basis,
                          const DiffusionModel& model);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Locality radius delta = min{ (sum ||e_i||_inf^2)^{-1/2}, sqrt(m(D))/e }.
double loglip_delta(const SpectralBasis& basis);

/// max_j |F_j(y)| against C~1 + C~2 |y| log_+|y| with the constants assembled
/// from the basis sup-norms and m(D).
BoundCheck f_bound_check(const SpectralField& y, const SpectralBasis& basis);

/// max_j |F_j(y)-F_j(z)| against the local log-Lipschitz bound; requires
/// |y-z| <= loglip_delta(basis).
BoundCheck f_loglip_check(const SpectralField& y, const SpectralField& z,
                          const SpectralBasis& basis);

/// max_j |G_j(y)| against C~3 + C~4 |y| log_+(|y|)^{1/2}, constants assembled
/// from the model's H.3 pair by the same recipe as f_bound_check.
BoundCheck g_bound_check(const SpectralField& y, const SpectralBasis& basis,
                         const DiffusionModel& model);

}  // namespace loghe
