#pragma once

#include <vector>

namespace loghe {

using Vec = std::vector<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Composite midpoint rule on (0, L): M uniform cells, nodes strictly
/// interior so eigenfunctions never get sampled on the boundary.
struct Quadrature {
  Vec nodes;
  Vec weights;

  double length() const;  // sum of weights = L
};

/// Function values on the quadrature nodes.
struct GridFunction {
  Vec values;
};

/// Coefficients (g_1,...,g_n) of u = sum_i g_i e_i.
struct SpectralField {
  Vec coeffs;

  int size() const { return static_cast<int>(coeffs.size()); }
};

/// Dirichlet eigenbasis of the negative Laplacian on (0, L):
/// e_i(x) = sqrt(2/L) sin(i pi x / L), lambda_i = (i pi / L)^2.
struct SpectralBasis {
  int n = 0;
  double L = kPi;
  Vec lambdas;            // strictly increasing, lambda_1 > 0
  Vec sup_norms;          // ||e_i||_inf = sqrt(2/L)
  Quadrature quad;
  Vec e_at_nodes;         // row-major [i * M + k] = e_{i+1}(x_k)

  int node_count() const { return static_cast<int>(quad.nodes.size()); }
  double measure() const { return L; }  // m(D)
  double eigenfunction(int i, double x) const;  // i is 1-based
};

/// M = 0 picks the default resolution M = 8n. Requires M >= 4n.
SpectralBasis build_basis(int n, double L = kPi, int M = 0);

SpectralField project(const GridFunction& g, const SpectralBasis& basis);
GridFunction synthesize(const SpectralField& f, const SpectralBasis& basis);
/// Grid values of u' for band-limited u (used to cross-check the V norm).
GridFunction synthesize_derivative(const SpectralField& f, const SpectralBasis& basis);

double quad_integral(const Quadrature& quad, const GridFunction& g);

double h_norm(const SpectralField& f);
double v_norm(const SpectralField& f, const SpectralBasis& basis);
double vstar_norm(const SpectralField& f, const SpectralBasis& basis);

/// (1/lambda_1) ||u||_V^2 - ||u||^2; nonnegative for every field.
double poincare_gap(const SpectralField& f, const SpectralBasis& basis);

}  // namespace loghe
