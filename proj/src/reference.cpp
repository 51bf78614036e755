#include "loghe/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "loghe/nonlinearity.hpp"

namespace loghe::ref {

SpectralField project(const GridFunction& g, const SpectralBasis& basis) {
  if (static_cast<int>(g.values.size()) != basis.node_count())
    throw std::invalid_argument("ref::project: grid/quadrature size mismatch");
  const int n = basis.n;
  const int M = basis.node_count();
  SpectralField f;
  f.coeffs.resize(n);
  for (int i = 0; i < n; ++i) {
    const double* row = basis.e_at_nodes.data() + static_cast<std::size_t>(i) * M;
    double s = 0.0;
    for (int k = 0; k < M; ++k) s += basis.quad.weights[k] * g.values[k] * row[k];
    f.coeffs[i] = s;
  }
  return f;
}

GridFunction synthesize(const SpectralField& f, const SpectralBasis& basis) {
  if (f.size() != basis.n)
    throw std::invalid_argument("ref::synthesize: field/basis size mismatch");
  const int n = basis.n;
  const int M = basis.node_count();
  GridFunction g;
  g.values.resize(M);
  for (int k = 0; k < M; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += f.coeffs[i] * basis.e_at_nodes[static_cast<std::size_t>(i) * M + k];
    g.values[k] = s;
  }
  return g;
}

SpectralField drift_F(const SpectralField& y, const SpectralBasis& basis) {
  GridFunction v = ref::synthesize(y, basis);
  for (double& x : v.values) x = xlogx(x);
  return ref::project(v, basis);
}

double w_beta_p_norm(const Trajectory& traj, const SpectralBasis& basis,
                     double beta, double p) {
  if (!(beta > 0.0 && beta < 0.5)) throw std::invalid_argument("ref::w_beta_p_norm: beta out of range");
  if (!(p > 1.0 && p < 2.0)) throw std::invalid_argument("ref::w_beta_p_norm: p out of range");
  const std::size_t m = traj.snapshots.size();
  if (m < 50) throw std::invalid_argument("ref::w_beta_p_norm: needs >= 50 snapshots");

  const Vec& t = traj.snapshot_times;
  Vec w(m);
  w[0] = 0.5 * (t[1] - t[0]);
  for (std::size_t i = 1; i + 1 < m; ++i) w[i] = 0.5 * (t[i + 1] - t[i - 1]);
  w[m - 1] = 0.5 * (t[m - 1] - t[m - 2]);

  const double expo = 1.0 + beta * p;
  double single = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    single += w[i] * std::pow(vstar_norm(traj.snapshots[i], basis), p);

  Vec partial(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    SpectralField d;
    d.coeffs.resize(basis.n);
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      for (int c = 0; c < basis.n; ++c)
        d.coeffs[c] = traj.snapshots[i].coeffs[c] - traj.snapshots[j].coeffs[c];
      s += w[i] * w[j] * std::pow(vstar_norm(d, basis), p) / std::pow(std::abs(t[i] - t[j]), expo);
    }
    partial[i] = s;
  }
  double dbl = 0.0;
  for (std::size_t i = 0; i < m; ++i) dbl += partial[i];
  return std::pow(single + dbl, 1.0 / p);
}

}  // namespace loghe::ref
