#pragma once

#include "loghe/sde.hpp"
#include "loghe/spectral.hpp"

// Serial reference implementations of the OpenMP kernels. Loop nesting and
// accumulation order match the parallel versions, so results are expected to
// be bit-identical; the parity tests and the benchmark rely on that.

namespace loghe::ref {

SpectralField project(const GridFunction& g, const SpectralBasis& basis);
GridFunction synthesize(const SpectralField& f, const SpectralBasis& basis);
SpectralField drift_F(const SpectralField& y, const SpectralBasis& basis);

double w_beta_p_norm(const Trajectory& traj, const SpectralBasis& basis,
                     double beta, double p);

}  // namespace loghe::ref
