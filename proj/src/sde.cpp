#include "loghe/sde.hpp"

#include <omp.h>

#include <cmath>
#include <string>

#include "loghe/errors.hpp"
#include "loghe/rng.hpp"

namespace loghe {

namespace {

// ||u||^{p-2} ||u||_V^2 with 0^0 = 1 so p = 2 reduces to ||u||_V^2.
double moment_density(double h, double v, double p) {
  if (p == 2.0) return v * v;
  if (h == 0.0) return 0.0;
  return std::pow(h, p - 2.0) * v * v;
}

bool finite(const SpectralField& g) {
  for (double c : g.coeffs)
    if (!std::isfinite(c)) return false;
  return true;
}

SpectralField project_initial(const Vec& u0, int n) {
  SpectralField g;
  g.coeffs.assign(n, 0.0);
  const std::size_t m = std::min<std::size_t>(u0.size(), n);
  for (std::size_t i = 0; i < m; ++i) g.coeffs[i] = u0[i];
  return g;
}

struct Recorder {
  Trajectory traj;
  int stride;

  Recorder(const SimConfig& cfg, std::size_t K) : stride(cfg.snapshot_stride) {
    if (stride <= 0) stride = std::max<int>(1, static_cast<int>(K / 100));
    traj.moment_powers = cfg.moment_powers;
    traj.moment_integrals.assign(cfg.moment_powers.size(), 0.0);
    traj.times.reserve(K + 1);
    traj.h_norms.reserve(K + 1);
    traj.v_norms.reserve(K + 1);
  }

  // false when a norm is non-finite (coefficients may be finite while the
  // squared sums already overflow); the caller flags that as an explosion
  bool record(const SdeState& s, const SpectralBasis& basis, std::size_t k, std::size_t K, double dt) {
    const double h = h_norm(s.g);
    const double v = v_norm(s.g, basis);
    if (!std::isfinite(h) || !std::isfinite(v)) return false;
    traj.times.push_back(s.t);
    traj.h_norms.push_back(h);
    traj.v_norms.push_back(v);
    traj.sup_h_norm = std::max(traj.sup_h_norm, h);
    if (k > 0) {
      const std::size_t i = traj.h_norms.size() - 1;
      for (std::size_t pi = 0; pi < traj.moment_powers.size(); ++pi) {
        const double p = traj.moment_powers[pi];
        const double f0 = moment_density(traj.h_norms[i - 1], traj.v_norms[i - 1], p);
        const double f1 = moment_density(h, v, p);
        traj.moment_integrals[pi] += 0.5 * dt * (f0 + f1);
      }
    }
    if (k % stride == 0 || k == K) {
      traj.snapshot_times.push_back(s.t);
      traj.snapshots.push_back(s.g);
    }
    return true;
  }
};

}  // namespace

std::size_t SimConfig::step_count() const {
  return static_cast<std::size_t>(std::ceil(T / dt - 1e-12));
}

void SimConfig::validate() const {
  if (n < 1) throw ConfigError("sim: n must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("sim: dt must be > 0");
  if (!(T >= dt)) throw ConfigError("sim: T must be >= dt");
  if (T / dt > 1e9) throw ConfigError("sim: T/dt too large for a step count");
  for (double c : u0)
    if (!std::isfinite(c)) throw ConfigError("sim: u0 has non-finite coefficients");
}

NoisePath brownian_increments(std::uint64_t seed, std::size_t K, double dt,
                              std::uint64_t offset) {
  if (K < 1) throw std::invalid_argument("brownian_increments: K must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("brownian_increments: dt must be > 0");
  NoisePath p;
  p.dt = dt;
  p.seed = seed;
  p.offset = offset;
  p.dW.resize(K);
  const double s = std::sqrt(dt);
  for (std::size_t k = 0; k < K; ++k) p.dW[k] = s * counter_normal(seed, offset + k);
  return p;
}

NoisePath coarsen(const NoisePath& path) {
  if (path.dW.size() % 2 != 0)
    throw std::invalid_argument("coarsen: increment count must be even");
  NoisePath out;
  out.dt = 2.0 * path.dt;
  out.seed = path.seed;
  out.offset = path.offset;
  out.dW.resize(path.dW.size() / 2);
  for (std::size_t k = 0; k < out.dW.size(); ++k)
    out.dW[k] = path.dW[2 * k] + path.dW[2 * k + 1];
  return out;
}

GalerkinSde::GalerkinSde(const SpectralBasis& basis, const DiffusionModel& model, double dt,
                         bool taming, bool log_drift)
    : basis_(basis), model_(model), dt_(dt), taming_(taming), log_drift_(log_drift) {
  if (!(dt > 0.0)) throw ConfigError("GalerkinSde: dt must be > 0");
  decay_.resize(basis.n);
  for (int j = 0; j < basis.n; ++j) decay_[j] = std::exp(-basis.lambdas[j] * dt);
}

SdeState GalerkinSde::step(const SdeState& state, double dW) const {
  const int n = basis_.n;
  SdeState next;
  next.t = state.t + dt_;
  next.g.coeffs.resize(n);

  Vec drift(n, 0.0);
  if (log_drift_) {
    SpectralField F = drift_F(state.g, basis_);
    if (taming_) {
      const double fn = h_norm(F);
      const double scale = 1.0 / (1.0 + dt_ * fn);
      for (double& f : F.coeffs) f *= scale;
    }
    drift = std::move(F.coeffs);
  }
  SpectralField G = diffusion_G(state.g, basis_, model_);

  for (int j = 0; j < n; ++j)
    next.g.coeffs[j] = decay_[j] * (state.g.coeffs[j] + dt_ * drift[j] + G.coeffs[j] * dW);
  return next;
}

Trajectory simulate(const SimConfig& cfg) {
  const SpectralBasis basis = build_basis(cfg.n, cfg.L, cfg.M);
  return simulate(cfg, basis);
}

Trajectory simulate(const SimConfig& cfg, const SpectralBasis& basis) {
  cfg.validate();
  return simulate(cfg, basis, brownian_increments(cfg.seed, cfg.step_count(), cfg.dt));
}

Trajectory simulate(const SimConfig& cfg, const SpectralBasis& basis, const NoisePath& path) {
  cfg.validate();
  if (basis.n != cfg.n) throw ConfigError("simulate: basis/config mode count mismatch");
  const std::size_t K = path.dW.size();
  GalerkinSde sde(basis, cfg.model, path.dt, cfg.taming, cfg.log_drift);
  Recorder rec(cfg, K);

  SdeState state{0.0, project_initial(cfg.u0, cfg.n)};
  rec.record(state, basis, 0, K, path.dt);
  for (std::size_t k = 0; k < K; ++k) {
    bool bad = false;
    try {
      state = sde.step(state, path.dW[k]);
      bad = !finite(state.g);
    } catch (const NumericalError&) {
      bad = true;
    }
    if (!bad) bad = !rec.record(state, basis, k + 1, K, path.dt);
    if (bad) {
      rec.traj.exploded = true;
      rec.traj.first_bad_time = (k + 1) * path.dt;
      break;
    }
  }
  return std::move(rec.traj);
}

CoupledResult coupled_simulate(const SimConfig& cfg, const SpectralBasis& basis,
                               const Vec& u0_a, const Vec& u0_b) {
  cfg.validate();
  const std::size_t K = cfg.step_count();
  const NoisePath path = brownian_increments(cfg.seed, K, cfg.dt);
  GalerkinSde sde(basis, cfg.model, cfg.dt, cfg.taming, cfg.log_drift);

  CoupledResult out;
  Recorder rec_a(cfg, K), rec_b(cfg, K);
  SdeState a{0.0, project_initial(u0_a, cfg.n)};
  SdeState b{0.0, project_initial(u0_b, cfg.n)};

  SpectralField z;
  z.coeffs.resize(cfg.n);
  double z_sq_prev = 0.0, z_l2_sq = 0.0;
  auto z_norm = [&](const SdeState& sa, const SdeState& sb) {
    for (int i = 0; i < cfg.n; ++i) z.coeffs[i] = sa.g.coeffs[i] - sb.g.coeffs[i];
    return h_norm(z);
  };

  rec_a.record(a, basis, 0, K, cfg.dt);
  rec_b.record(b, basis, 0, K, cfg.dt);
  double zn = z_norm(a, b);
  out.z_sup = zn;
  z_sq_prev = zn * zn;

  for (std::size_t k = 0; k < K; ++k) {
    bool bad = false;
    try {
      a = sde.step(a, path.dW[k]);
      b = sde.step(b, path.dW[k]);
      bad = !finite(a.g) || !finite(b.g);
    } catch (const NumericalError&) {
      bad = true;
    }
    if (!bad) {
      const bool ok_a = rec_a.record(a, basis, k + 1, K, cfg.dt);
      const bool ok_b = rec_b.record(b, basis, k + 1, K, cfg.dt);
      bad = !ok_a || !ok_b;
    }
    if (bad) {
      rec_a.traj.exploded = rec_b.traj.exploded = true;
      rec_a.traj.first_bad_time = rec_b.traj.first_bad_time = (k + 1) * cfg.dt;
      break;
    }
    zn = z_norm(a, b);
    out.z_sup = std::max(out.z_sup, zn);
    z_l2_sq += 0.5 * cfg.dt * (z_sq_prev + zn * zn);
    z_sq_prev = zn * zn;
  }
  out.a = std::move(rec_a.traj);
  out.b = std::move(rec_b.traj);
  out.z_l2 = std::sqrt(z_l2_sq);
  return out;
}

std::optional<double> hitting_time(const Trajectory& traj, double threshold, Monitor which) {
  if (!(threshold > 0.0)) throw std::invalid_argument("hitting_time: threshold must be > 0");
  if (which == Monitor::h_norm_sq) {
    for (std::size_t i = 0; i < traj.times.size(); ++i)
      if (traj.h_norms[i] * traj.h_norms[i] > threshold) return traj.times[i];
    return std::nullopt;
  }
  double acc = 0.0;
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    const double dt = traj.times[i] - traj.times[i - 1];
    acc += 0.5 * dt * (traj.v_norms[i - 1] * traj.v_norms[i - 1] + traj.v_norms[i] * traj.v_norms[i]);
    if (acc > threshold) return traj.times[i];
  }
  return std::nullopt;
}

double w_beta_p_norm(const Trajectory& traj, const SpectralBasis& basis,
                     double beta, double p) {
  if (!(beta > 0.0 && beta < 0.5)) throw std::invalid_argument("w_beta_p_norm: beta must lie in (0, 1/2)");
  if (!(p > 1.0 && p < 2.0)) throw std::invalid_argument("w_beta_p_norm: p must lie in (1, 2)");
  const std::size_t m = traj.snapshots.size();
  if (m < 50)
    throw std::invalid_argument("w_beta_p_norm: needs >= 50 snapshots, have " + std::to_string(m));

  const Vec& t = traj.snapshot_times;
  Vec w(m);  // trapezoid weights on the (possibly uneven) snapshot grid
  w[0] = 0.5 * (t[1] - t[0]);
  for (std::size_t i = 1; i + 1 < m; ++i) w[i] = 0.5 * (t[i + 1] - t[i - 1]);
  w[m - 1] = 0.5 * (t[m - 1] - t[m - 2]);

  const double expo = 1.0 + beta * p;
  double single = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    single += w[i] * std::pow(vstar_norm(traj.snapshots[i], basis), p);

  Vec partial(m, 0.0);
  auto row_sum = [&](std::size_t i) {
    SpectralField d;
    d.coeffs.resize(basis.n);
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      for (int c = 0; c < basis.n; ++c)
        d.coeffs[c] = traj.snapshots[i].coeffs[c] - traj.snapshots[j].coeffs[c];
      s += w[i] * w[j] * std::pow(vstar_norm(d, basis), p) / std::pow(std::abs(t[i] - t[j]), expo);
    }
    return s;
  };
  const long work = static_cast<long>(m) * static_cast<long>(m) * basis.n;
  if (work > 100000 && !omp_in_parallel()) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < m; ++i) partial[i] = row_sum(i);
  } else {
    for (std::size_t i = 0; i < m; ++i) partial[i] = row_sum(i);
  }
  double dbl = 0.0;
  for (std::size_t i = 0; i < m; ++i) dbl += partial[i];
  return std::pow(single + dbl, 1.0 / p);
}

}  // namespace loghe
