#include "loghe/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "loghe/nonlinearity.hpp"

namespace loghe {

namespace {

constexpr double kE = 2.71828182845904523536028747135266250;

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
constexpr double kKronrodNodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
constexpr double kKronrodWeights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double kGaussWeights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870};

struct GkResult {
  double integral;
  double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double fx = f(c + h * kKronrodNodes[i]);
    kron += kKronrodWeights[i] * fx;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fx;
  }
  return {h * kron, std::abs(h * (kron - gauss))};
}

double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double tol, int depth) {
  GkResult r = gk15(f, a, b);
  if (r.error <= tol || depth >= 48) return r.integral;
  const double c = 0.5 * (a + b);
  return adaptive_gk(f, a, c, 0.5 * tol, depth + 1) +
         adaptive_gk(f, c, b, 0.5 * tol, depth + 1);
}

// ||u||^2 log ||u|| with the 0 log 0 = 0 convention.
double sq_log(double norm) { return norm == 0.0 ? 0.0 : norm * norm * std::log(norm); }

SpectralField field_diff(const SpectralField& u, const SpectralField& v) {
  if (u.size() != v.size())
    throw std::invalid_argument("field size mismatch between u and v");
  SpectralField d;
  d.coeffs.resize(u.coeffs.size());
  for (std::size_t i = 0; i < d.coeffs.size(); ++i) d.coeffs[i] = u.coeffs[i] - v.coeffs[i];
  return d;
}

void check_eps_alpha(double eps, double alpha) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
}

double phi_integrand(double x) { return 1.0 / (1.0 + x + x * rho(x)); }

// Integral of the Phi integrand from 0 to z, splitting at the rho knee and
// reusing cached checkpoints so Monte Carlo loops do not re-integrate [0, e].
double phi_exponent(double z) {
  static const double at_e = adaptive_gk(phi_integrand, 0.0, kE, 1e-13, 0);
  static const double at_10 = at_e + adaptive_gk(phi_integrand, kE, 10.0, 1e-13, 0);
  static const double at_100 = at_10 + adaptive_gk(phi_integrand, 10.0, 100.0, 1e-13, 0);
  if (z <= kE) return adaptive_gk(phi_integrand, 0.0, z, 1e-13, 0);
  if (z <= 10.0) return at_e + adaptive_gk(phi_integrand, kE, z, 1e-13, 0);
  if (z <= 100.0) return at_10 + adaptive_gk(phi_integrand, 10.0, z, 1e-13, 0);
  return at_100 + adaptive_gk(phi_integrand, 100.0, z, 1e-13, 0);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol) {
  if (a == b) return 0.0;
  return adaptive_gk(f, a, b, abs_tol, 0);
}

GapReport log_sobolev_gap(const SpectralField& u, const SpectralBasis& basis,
                          double eps, int d) {
  if (!(eps > 0.0)) throw std::invalid_argument("log_sobolev_gap: eps must be > 0");
  GridFunction g = synthesize(u, basis);
  for (double& x : g.values) x = x * xlogx(x);  // u^2 log|u|, 0 at 0
  GapReport r;
  r.eps = eps;
  r.norm_u = h_norm(u);
  r.lhs = quad_integral(basis.quad, g);
  const double vn = v_norm(u, basis);
  r.rhs = eps * vn * vn + 0.25 * d * std::log(1.0 / eps) * r.norm_u * r.norm_u + sq_log(r.norm_u);
  r.gap = r.rhs - r.lhs;
  return r;
}

GapReport log_sobolev_plus_gap(const SpectralField& u, const SpectralBasis& basis,
                               double eps, int d) {
  if (!(eps > 0.0)) throw std::invalid_argument("log_sobolev_plus_gap: eps must be > 0");
  GridFunction g = synthesize(u, basis);
  for (double& x : g.values) x = x * x * log_plus(std::abs(x));
  GapReport r;
  r.eps = eps;
  r.norm_u = h_norm(u);
  r.lhs = quad_integral(basis.quad, g);
  const double vn = v_norm(u, basis);
  r.rhs = eps * vn * vn + 0.25 * d * std::log(1.0 / eps) * r.norm_u * r.norm_u + sq_log(r.norm_u) +
          basis.measure() / (2.0 * kE);
  r.gap = r.rhs - r.lhs;
  return r;
}

GapReport lemma31_gap(const SpectralField& u, const SpectralField& v,
                      const SpectralBasis& basis, double eps, double alpha, int d) {
  check_eps_alpha(eps, alpha);
  GridFunction gu = synthesize(u, basis);
  GridFunction gv = synthesize(v, basis);
  GridFunction integrand;
  integrand.values.resize(gu.values.size());
  for (std::size_t k = 0; k < gu.values.size(); ++k)
    integrand.values[k] = (xlogx(gu.values[k]) - xlogx(gv.values[k])) * (gu.values[k] - gv.values[k]);

  GapReport r;
  r.eps = eps;
  r.alpha = alpha;
  r.norm_u = h_norm(u);
  r.norm_v = h_norm(v);
  r.lhs = quad_integral(basis.quad, integrand);

  const SpectralField z = field_diff(u, v);
  const double zn = h_norm(z);
  const double zv = v_norm(z, basis);
  r.rhs = eps * zv * zv + (1.0 + 0.25 * d * std::log(1.0 / eps)) * zn * zn + sq_log(zn) +
          (std::pow(r.norm_u, 2.0 * (1.0 - alpha)) + std::pow(r.norm_v, 2.0 * (1.0 - alpha))) *
              std::pow(zn, 2.0 * alpha) / (2.0 * (1.0 - alpha) * kE);
  r.gap = r.rhs - r.lhs;
  return r;
}

GapReport lemma32_gap(const SpectralField& u, const SpectralField& v,
                      const SpectralBasis& basis, double eps, double alpha, int d) {
  check_eps_alpha(eps, alpha);
  GridFunction gu = synthesize(u, basis);
  GridFunction gv = synthesize(v, basis);
  GridFunction integrand;
  integrand.values.resize(gu.values.size());
  for (std::size_t k = 0; k < gu.values.size(); ++k) {
    const double dz = gu.values[k] - gv.values[k];
    integrand.values[k] = dz * dz * log_plus(std::max(std::abs(gu.values[k]), std::abs(gv.values[k])));
  }

  GapReport r;
  r.eps = eps;
  r.alpha = alpha;
  r.norm_u = h_norm(u);
  r.norm_v = h_norm(v);
  r.lhs = quad_integral(basis.quad, integrand);

  const SpectralField z = field_diff(u, v);
  const double zn = h_norm(z);
  const double zv = v_norm(z, basis);
  const double amortized = 1.0 / (2.0 * (1.0 - alpha) * kE);
  r.rhs = eps * zv * zv + 0.25 * d * std::log(1.0 / eps) * zn * zn + sq_log(zn) +
          amortized * (std::pow(r.norm_u, 2.0 * (1.0 - alpha)) + std::pow(r.norm_v, 2.0 * (1.0 - alpha))) *
              std::pow(zn, 2.0 * alpha) +
          amortized * std::pow(4.0 * basis.measure(), 1.0 - alpha) * std::pow(zn, 2.0 * alpha);
  r.gap = r.rhs - r.lhs;
  return r;
}

double gronwall_alpha_bound(double c, double a, double b, double alpha, double t, double t0) {
  if (alpha < 0.0 || alpha >= 1.0) throw std::invalid_argument("gronwall_alpha_bound: alpha must lie in [0,1)");
  if (c < 0.0) throw std::invalid_argument("gronwall_alpha_bound: c must be >= 0");
  if (t < t0) throw std::invalid_argument("gronwall_alpha_bound: t must be >= t0");
  const double q = 1.0 - alpha;
  const double span = t - t0;
  const double term1 = std::pow(c, q) * std::exp(q * a * span);
  const double term2 =
      (a == 0.0) ? q * b * span : (b / a) * (std::exp(q * a * span) - 1.0);
  return std::pow(term1 + term2, 1.0 / q);
}

double gronwall_alpha_bound(double c, const TimeFn& a, const TimeFn& b, double alpha,
                            double t, double t0) {
  if (alpha < 0.0 || alpha >= 1.0) throw std::invalid_argument("gronwall_alpha_bound: alpha must lie in [0,1)");
  if (c < 0.0) throw std::invalid_argument("gronwall_alpha_bound: c must be >= 0");
  if (t < t0) throw std::invalid_argument("gronwall_alpha_bound: t must be >= t0");
  const double q = 1.0 - alpha;
  const double a_total = integrate_adaptive(a, t0, t, 1e-12);
  const double term1 = std::pow(c, q) * std::exp(q * a_total);
  auto outer = [&](double s) {
    const double tail = integrate_adaptive(a, s, t, 1e-12);
    return b(s) * std::exp(q * tail);
  };
  const double term2 = q * integrate_adaptive(outer, t0, t, 1e-10);
  return std::pow(term1 + term2, 1.0 / q);
}

double log_gronwall_bound(double M, double c1, double c2, double t) {
  if (M < 1.0) throw std::invalid_argument("log_gronwall_bound: M must be >= 1");
  if (t < 0.0) throw std::invalid_argument("log_gronwall_bound: t must be >= 0");
  const double e2 = std::exp(c2 * t);
  const double inner = (c2 == 0.0) ? c1 * t : (c1 / c2) * (1.0 - std::exp(-c2 * t));
  return std::pow(M, e2) * std::exp(e2 * inner);
}

double log_gronwall_bound(const TimeFn& M, const TimeFn& c1, const TimeFn& c2, double t) {
  if (M(0.0) < 1.0) throw std::invalid_argument("log_gronwall_bound: M(0) must be >= 1");
  if (t < 0.0) throw std::invalid_argument("log_gronwall_bound: t must be >= 0");
  const double C2t = integrate_adaptive(c2, 0.0, t, 1e-12);
  auto inner = [&](double s) {
    return c1(s) * std::exp(-integrate_adaptive(c2, 0.0, s, 1e-12));
  };
  const double e2 = std::exp(C2t);
  return std::pow(M(t), e2) * std::exp(e2 * integrate_adaptive(inner, 0.0, t, 1e-10));
}

double horizon_Tp(double p, double theta) {
  if (p < 2.0) throw std::invalid_argument("horizon_Tp: p must be >= 2");
  if (theta < 0.0 || theta >= 1.0) throw std::invalid_argument("horizon_Tp: theta must lie in [0,1)");
  return std::log(p / (p - 1.0 + theta));
}

double gamma_map(double z, double theta) {
  if (z < 2.0) throw std::invalid_argument("gamma_map: z must be >= 2");
  if (theta < 0.0 || theta >= 1.0) throw std::invalid_argument("gamma_map: theta must lie in [0,1)");
  return z * z / (z - 1.0 + theta);
}

Schedule build_schedule(double p, double theta, double T) {
  if (p < 2.0) throw std::invalid_argument("build_schedule: p must be >= 2");
  if (theta < 0.0 || theta >= 1.0) throw std::invalid_argument("build_schedule: theta must lie in [0,1)");
  if (!(T > 0.0)) throw std::invalid_argument("build_schedule: T must be > 0");

  Schedule s;
  s.p = p;
  s.theta = theta;
  s.T = T;

  constexpr int kCap = 10'000'000;  // the horizon series diverges, so this is unreachable
  double z = p;
  double partial = 0.0;
  for (int i = 0;; ++i) {
    if (i > kCap) throw std::logic_error("build_schedule: iteration cap hit");
    const double Ti = horizon_Tp(z, theta);
    s.q.push_back(z);
    s.horizons.push_back(Ti);
    partial += Ti;
    if (partial >= T) {
      s.kappa = i;
      break;
    }
    z = gamma_map(z, theta);
  }

  s.S.assign(s.kappa + 2, 0.0);
  for (int i = 0; i <= s.kappa; ++i) s.S[i + 1] = s.S[i] + s.horizons[s.kappa - i];
  return s;
}

double rho(double x) {
  if (x < 0.0) throw std::invalid_argument("rho: argument must be nonnegative");
  return x <= kE ? x / kE : std::log(x);
}

double phi(double z) {
  if (z < 0.0) throw std::invalid_argument("phi: argument must be nonnegative");
  if (z == 0.0) return 1.0;
  return std::exp(phi_exponent(z));
}

double phi_prime(double z) {
  if (z < 0.0) throw std::invalid_argument("phi_prime: argument must be nonnegative");
  return phi(z) * phi_integrand(z);
}

double t_star(double L2) {
  if (L2 < 0.0) throw std::invalid_argument("t_star: L2 must be >= 0");
  const double r = kE / (4.0 * (1.0 + L2 * L2));
  return r * r;
}

}  // namespace loghe
