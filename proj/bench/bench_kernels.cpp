// Timings for the OpenMP kernels against their serial reference
// implementations, plus a bit-equality check on each pair.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "loghe/experiments.hpp"
#include "loghe/nonlinearity.hpp"
#include "loghe/reference.hpp"
#include "loghe/rng.hpp"
#include "loghe/sde.hpp"

using namespace loghe;

namespace {

SpectralField random_field(std::uint64_t seed, int n) {
  SpectralField f;
  f.coeffs.resize(n);
  for (int i = 0; i < n; ++i) f.coeffs[i] = counter_normal(seed, i);
  return f;
}

template <class F>
double time_it(F&& fn, int reps) {
  const double t0 = omp_get_wtime();
  for (int r = 0; r < reps; ++r) fn();
  return (omp_get_wtime() - t0) / reps;
}

bool equal(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", omp_get_max_threads());
  std::printf("%-28s %12s %12s %8s %6s\n", "kernel", "serial [ms]", "openmp [ms]", "speedup", "equal");

  // transform kernels at a deliberately large size so the parallel path engages
  {
    const int n = 256;
    const SpectralBasis basis = build_basis(n, kPi, 8 * n);
    const SpectralField f = random_field(42, n);
    GridFunction g_omp, g_ser;
    const double ts = time_it([&] { g_ser = ref::synthesize(f, basis); }, 50);
    const double tp = time_it([&] { g_omp = synthesize(f, basis); }, 50);
    std::printf("%-28s %12.4f %12.4f %8.2f %6s\n", "synthesize (n=256)", 1e3 * ts, 1e3 * tp,
                ts / tp, equal(g_omp.values, g_ser.values) ? "yes" : "NO");

    SpectralField p_omp, p_ser;
    const double ts2 = time_it([&] { p_ser = ref::project(g_ser, basis); }, 50);
    const double tp2 = time_it([&] { p_omp = project(g_ser, basis); }, 50);
    std::printf("%-28s %12.4f %12.4f %8.2f %6s\n", "project (n=256)", 1e3 * ts2, 1e3 * tp2,
                ts2 / tp2, equal(p_omp.coeffs, p_ser.coeffs) ? "yes" : "NO");

    SpectralField d_omp, d_ser;
    const double ts3 = time_it([&] { d_ser = ref::drift_F(f, basis); }, 50);
    const double tp3 = time_it([&] { d_omp = drift_F(f, basis); }, 50);
    std::printf("%-28s %12.4f %12.4f %8.2f %6s\n", "drift_F (n=256)", 1e3 * ts3, 1e3 * tp3,
                ts3 / tp3, equal(d_omp.coeffs, d_ser.coeffs) ? "yes" : "NO");
  }

  // W^{beta,p} double sum over snapshot pairs
  {
    SimConfig cfg;
    cfg.n = 16;
    cfg.dt = 1e-3;
    cfg.T = 0.5;
    cfg.u0 = {1.0};
    cfg.model = DiffusionModel::linear_cut_log();
    cfg.seed = 7;
    cfg.snapshot_stride = 1;
    const SpectralBasis basis = build_basis(cfg.n, cfg.L, 0);
    const Trajectory traj = simulate(cfg, basis);
    double w_ser = 0, w_omp = 0;
    const double ts = time_it([&] { w_ser = ref::w_beta_p_norm(traj, basis, 0.25, 1.5); }, 5);
    const double tp = time_it([&] { w_omp = w_beta_p_norm(traj, basis, 0.25, 1.5); }, 5);
    std::printf("%-28s %12.4f %12.4f %8.2f %6s\n", "w_beta_p (501 snapshots)", 1e3 * ts, 1e3 * tp,
                ts / tp, w_ser == w_omp ? "yes" : "NO");
  }

  // Monte Carlo ensemble map
  {
    SimConfig cfg;
    cfg.n = 32;
    cfg.dt = 1e-3;
    cfg.T = 0.25;
    cfg.u0 = {1.0};
    cfg.model = DiffusionModel::linear_cut_log();
    const SpectralBasis basis = build_basis(cfg.n, cfg.L, 0);
    const std::size_t R = 64;
    auto body = [&](std::size_t r) {
      SimConfig c = cfg;
      c.seed = derive_seed(99, r);
      return simulate(c, basis).sup_h_norm;
    };
    std::vector<double> ser, par;
    const double ts = time_it([&] { ser = detail::mc_map_serial<double>(R, body); }, 3);
    const double tp = time_it([&] { par = mc_map<double>(R, 0, body); }, 3);
    std::printf("%-28s %12.4f %12.4f %8.2f %6s\n", "mc ensemble (R=64, n=32)", 1e3 * ts, 1e3 * tp,
                ts / tp, equal(ser, par) ? "yes" : "NO");
  }

  return 0;
}
