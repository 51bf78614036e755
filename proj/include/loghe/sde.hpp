#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "loghe/nonlinearity.hpp"
#include "loghe/spectral.hpp"

namespace loghe {

struct SimConfig {
  int n = 0;
  double L = kPi;
  int M = 0;  // 0 -> 8n
  double dt = 0.0;
  double T = 0.0;
  Vec u0;  // eigenbasis coefficients; truncated/zero-padded to n (the projection P_n u0)
  DiffusionModel model = DiffusionModel::zero();
  std::uint64_t seed = 0;
  bool taming = false;        // drift replaced by F / (1 + dt |F|)
  bool log_drift = true;      // debug switch: false drops the u log|u| term
  int snapshot_stride = 0;    // 0 -> aim for ~100 stored snapshots
  Vec moment_powers{2.0};     // p values for int ||u||^{p-2} ||u||_V^2 dt

  std::size_t step_count() const;  // ceil(T/dt)
  void validate() const;
};

/// Brownian increments dW_k ~ N(0, dt); increment k is regenerated from
/// (seed, offset + k), which is how B^S_t = B(t+S) - B(S) is realized.
struct NoisePath {
  Vec dW;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t offset = 0;
};

NoisePath brownian_increments(std::uint64_t seed, std::size_t K, double dt,
                              std::uint64_t offset = 0);

/// Pairwise-summed increments at step 2*dt on the same Brownian path;
/// used by the step-size refinement tests.
NoisePath coarsen(const NoisePath& path);

struct SdeState {
  double t = 0.0;
  SpectralField g;
};

struct Trajectory {
  Vec times;
  Vec h_norms;
  Vec v_norms;
  double sup_h_norm = 0.0;
  Vec snapshot_times;
  std::vector<SpectralField> snapshots;
  Vec moment_powers;
  Vec moment_integrals;  // trapezoid int ||u||^{p-2} ||u||_V^2 dt per power
  bool exploded = false;
  double first_bad_time = 0.0;

  std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
  const SpectralField& final_state() const { return snapshots.back(); }
};

/// One exponential-Euler update of the mode system
///   g_j <- exp(-lambda_j dt) (g_j + dt F_j(g) + G_j(g) dW).
/// The integrating factor makes the pure heat flow exact per step.
class GalerkinSde {
 public:
  GalerkinSde(const SpectralBasis& basis, const DiffusionModel& model, double dt,
              bool taming = false, bool log_drift = true);

  /// Throws NumericalError if a drift/diffusion projection goes non-finite.
  SdeState step(const SdeState& state, double dW) const;

  double dt() const { return dt_; }

 private:
  const SpectralBasis& basis_;
  DiffusionModel model_;
  double dt_;
  bool taming_;
  bool log_drift_;
  Vec decay_;  // exp(-lambda_j dt)
};

Trajectory simulate(const SimConfig& cfg);
Trajectory simulate(const SimConfig& cfg, const SpectralBasis& basis);
Trajectory simulate(const SimConfig& cfg, const SpectralBasis& basis, const NoisePath& path);

struct CoupledResult {
  Trajectory a;
  Trajectory b;
  double z_sup = 0.0;  // sup_t ||u_a(t) - u_b(t)||
  double z_l2 = 0.0;   // (int ||Z||^2 dt)^{1/2}
};

/// Two initial conditions, one Brownian path.
CoupledResult coupled_simulate(const SimConfig& cfg, const SpectralBasis& basis,
                               const Vec& u0_a, const Vec& u0_b);

enum class Monitor { h_norm_sq, v_integral };

/// First grid time at which the monitored quantity exceeds the threshold.
std::optional<double> hitting_time(const Trajectory& traj, double threshold, Monitor which);

/// Discrete W^{beta,p}([0,T]; V*) norm from the stored snapshots:
/// p-th root of  sum_i w_i ||u_i||_{V*}^p  +  sum_{i != j} w_i w_j
/// ||u_i - u_j||_{V*}^p / |t_i - t_j|^{1 + beta p}.
double w_beta_p_norm(const Trajectory& traj, const SpectralBasis& basis,
                     double beta, double p);

}  // namespace loghe
