#include "loghe/spectral.hpp"

#include <omp.h>

#include <cmath>
#include <string>

#include "loghe/errors.hpp"

namespace loghe {

namespace {

void require_field_size(const SpectralField& f, const SpectralBasis& basis, const char* op) {
  if (f.size() != basis.n)
    throw std::invalid_argument(std::string(op) + ": field has " + std::to_string(f.size()) +
                                " coefficients, basis has n = " + std::to_string(basis.n));
}

void require_grid_size(const GridFunction& g, const SpectralBasis& basis, const char* op) {
  if (static_cast<int>(g.values.size()) != basis.node_count())
    throw std::invalid_argument(std::string(op) + ": grid has " + std::to_string(g.values.size()) +
                                " values, quadrature has M = " + std::to_string(basis.node_count()));
}

}  // namespace

double Quadrature::length() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double SpectralBasis::eigenfunction(int i, double x) const {
  return std::sqrt(2.0 / L) * std::sin(i * kPi * x / L);
}

SpectralBasis build_basis(int n, double L, int M) {
  if (n < 1) throw ConfigError("build_basis: mode count n must be >= 1, got " + std::to_string(n));
  if (!(L > 0.0)) throw ConfigError("build_basis: domain length L must be > 0, got " + std::to_string(L));
  if (M == 0) M = 8 * n;
  if (M < 4 * n)
    throw ConfigError("build_basis: quadrature needs M >= 4n nodes, got M = " + std::to_string(M) +
                      " for n = " + std::to_string(n));

  SpectralBasis b;
  b.n = n;
  b.L = L;
  b.lambdas.resize(n);
  b.sup_norms.assign(n, std::sqrt(2.0 / L));
  for (int i = 0; i < n; ++i) {
    const double k = (i + 1) * kPi / L;
    b.lambdas[i] = k * k;
  }

  const double h = L / M;
  b.quad.nodes.resize(M);
  b.quad.weights.assign(M, h);
  for (int k = 0; k < M; ++k) b.quad.nodes[k] = (k + 0.5) * h;

  b.e_at_nodes.resize(static_cast<std::size_t>(n) * M);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < M; ++k)
      b.e_at_nodes[static_cast<std::size_t>(i) * M + k] = b.eigenfunction(i + 1, b.quad.nodes[k]);
  return b;
}

namespace {

// Entering the OpenMP runtime costs a few microseconds even for a 1-thread
// team, which dwarfs these kernels at SDE-step sizes. The serial branch must
// therefore bypass the pragma entirely, not rely on an if clause.
inline bool go_parallel(long work) { return work > 16384 && !omp_in_parallel(); }

inline double project_one(const GridFunction& g, const SpectralBasis& basis, int i, int M) {
  const double* row = basis.e_at_nodes.data() + static_cast<std::size_t>(i) * M;
  double s = 0.0;
  for (int k = 0; k < M; ++k) s += basis.quad.weights[k] * g.values[k] * row[k];
  return s;
}

inline double synth_one(const SpectralField& f, const SpectralBasis& basis, int k, int n, int M) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f.coeffs[i] * basis.e_at_nodes[static_cast<std::size_t>(i) * M + k];
  return s;
}

}  // namespace

SpectralField project(const GridFunction& g, const SpectralBasis& basis) {
  require_grid_size(g, basis, "project");
  const int n = basis.n;
  const int M = basis.node_count();
  SpectralField f;
  f.coeffs.resize(n);
  if (go_parallel(static_cast<long>(n) * M)) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) f.coeffs[i] = project_one(g, basis, i, M);
  } else {
    for (int i = 0; i < n; ++i) f.coeffs[i] = project_one(g, basis, i, M);
  }
  return f;
}

GridFunction synthesize(const SpectralField& f, const SpectralBasis& basis) {
  require_field_size(f, basis, "synthesize");
  const int n = basis.n;
  const int M = basis.node_count();
  GridFunction g;
  g.values.resize(M);
  if (go_parallel(static_cast<long>(n) * M)) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < M; ++k) g.values[k] = synth_one(f, basis, k, n, M);
  } else {
    for (int k = 0; k < M; ++k) g.values[k] = synth_one(f, basis, k, n, M);
  }
  return g;
}

GridFunction synthesize_derivative(const SpectralField& f, const SpectralBasis& basis) {
  require_field_size(f, basis, "synthesize_derivative");
  const int M = basis.node_count();
  GridFunction g;
  g.values.assign(M, 0.0);
  const double amp = std::sqrt(2.0 / basis.L);
  for (int i = 0; i < basis.n; ++i) {
    const double k = (i + 1) * kPi / basis.L;
    for (int j = 0; j < M; ++j)
      g.values[j] += f.coeffs[i] * amp * k * std::cos(k * basis.quad.nodes[j]);
  }
  return g;
}

double quad_integral(const Quadrature& quad, const GridFunction& g) {
  if (g.values.size() != quad.nodes.size())
    throw std::invalid_argument("quad_integral: grid/quadrature size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) s += quad.weights[k] * g.values[k];
  return s;
}

double h_norm(const SpectralField& f) {
  double s = 0.0;
  for (double c : f.coeffs) s += c * c;
  return std::sqrt(s);
}

double v_norm(const SpectralField& f, const SpectralBasis& basis) {
  require_field_size(f, basis, "v_norm");
  double s = 0.0;
  for (int i = 0; i < basis.n; ++i) s += basis.lambdas[i] * f.coeffs[i] * f.coeffs[i];
  return std::sqrt(s);
}

double vstar_norm(const SpectralField& f, const SpectralBasis& basis) {
  require_field_size(f, basis, "vstar_norm");
  double s = 0.0;
  for (int i = 0; i < basis.n; ++i) s += f.coeffs[i] * f.coeffs[i] / basis.lambdas[i];
  return std::sqrt(s);
}

double poincare_gap(const SpectralField& f, const SpectralBasis& basis) {
  require_field_size(f, basis, "poincare_gap");
  // sum of (lambda_i/lambda_1 - 1) g_i^2, each term >= 0
  double s = 0.0;
  for (int i = 0; i < basis.n; ++i)
    s += (basis.lambdas[i] / basis.lambdas[0] - 1.0) * f.coeffs[i] * f.coeffs[i];
  return s;
}

}  // namespace loghe
