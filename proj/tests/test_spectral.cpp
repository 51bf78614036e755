#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "loghe/errors.hpp"
#include "loghe/rng.hpp"
#include "loghe/spectral.hpp"

using namespace loghe;

namespace {

SpectralField random_field(std::uint64_t seed, int n, double amp = 1.0) {
  SpectralField f;
  f.coeffs.resize(n);
  for (int i = 0; i < n; ++i) f.coeffs[i] = amp * counter_normal(seed, i);
  return f;
}

}  // namespace

TEST_CASE("eigenvalues on (0, pi) are i^2") {
  const SpectralBasis b = build_basis(3, kPi);
  REQUIRE(b.lambdas.size() == 3);
  CHECK(b.lambdas[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.lambdas[1] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(b.lambdas[2] == doctest::Approx(9.0).epsilon(1e-14));
  for (std::size_t i = 1; i < b.lambdas.size(); ++i) CHECK(b.lambdas[i] > b.lambdas[i - 1]);
}

TEST_CASE("sup norm of e_1 on (0, pi)") {
  const SpectralBasis b = build_basis(1, kPi);
  CHECK(b.sup_norms[0] == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-14));
  CHECK(b.sup_norms[0] == doctest::Approx(0.79788).epsilon(1e-4));
}

TEST_CASE("quadrature Gram matrix is the identity to 1e-10") {
  const SpectralBasis b = build_basis(8, kPi, 64);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      double g = 0.0;
      for (int k = 0; k < b.node_count(); ++k)
        g += b.quad.weights[k] * b.e_at_nodes[i * b.node_count() + k] *
             b.e_at_nodes[j * b.node_count() + k];
      CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-10);
    }
  }
}

TEST_CASE("eigenfunctions satisfy the eigenvalue equation (finite differences)") {
  const SpectralBasis b = build_basis(4, 2.0);
  const double h = 1e-5;
  for (int i = 1; i <= 4; ++i) {
    for (double x : {0.3, 0.9, 1.7}) {
      const double lap =
          (b.eigenfunction(i, x + h) - 2.0 * b.eigenfunction(i, x) + b.eigenfunction(i, x - h)) /
          (h * h);
      CHECK(lap == doctest::Approx(-b.lambdas[i - 1] * b.eigenfunction(i, x)).epsilon(1e-5));
    }
  }
}

TEST_CASE("quadrature weights sum to L and nodes are interior") {
  const SpectralBasis b = build_basis(5, 3.5);
  CHECK(b.quad.length() == doctest::Approx(3.5).epsilon(1e-14));
  for (double x : b.quad.nodes) {
    CHECK(x > 0.0);
    CHECK(x < 3.5);
  }
}

TEST_CASE("build_basis rejects bad configurations") {
  CHECK_THROWS_AS(build_basis(0, kPi), ConfigError);
  CHECK_THROWS_AS(build_basis(4, -1.0), ConfigError);
  CHECK_THROWS_AS(build_basis(4, kPi, 15), ConfigError);
}

TEST_CASE("projection of a basis sample is the unit coefficient vector") {
  const SpectralBasis b = build_basis(4, kPi);
  SpectralField e2;
  e2.coeffs = {0.0, 1.0, 0.0, 0.0};
  const SpectralField back = project(synthesize(e2, b), b);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(back.coeffs[i] - e2.coeffs[i]) <= 1e-10);
}

TEST_CASE("zero grid projects to zero") {
  const SpectralBasis b = build_basis(3, kPi);
  GridFunction g;
  g.values.assign(b.node_count(), 0.0);
  for (double c : project(g, b).coeffs) CHECK(c == 0.0);
}

TEST_CASE("modes above the truncation are dropped") {
  // samples of e_1 + 0.5 e_3 projected onto a 2-mode basis -> (1, 0)
  const SpectralBasis b2 = build_basis(2, kPi, 64);
  GridFunction g;
  g.values.resize(b2.node_count());
  for (int k = 0; k < b2.node_count(); ++k) {
    const double x = b2.quad.nodes[k];
    g.values[k] = b2.eigenfunction(1, x) + 0.5 * b2.eigenfunction(3, x);
  }
  const SpectralField f = project(g, b2);
  CHECK(std::abs(f.coeffs[0] - 1.0) <= 1e-10);
  CHECK(std::abs(f.coeffs[1]) <= 1e-10);
}

TEST_CASE("project(synthesize(f)) is the identity to 1e-10") {
  const SpectralBasis b = build_basis(12, kPi);
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const SpectralField f = random_field(derive_seed(11, s), 12, 3.0);
    const SpectralField back = project(synthesize(f, b), b);
    for (int i = 0; i < 12; ++i) CHECK(std::abs(back.coeffs[i] - f.coeffs[i]) <= 1e-10);
  }
}

TEST_CASE("synthesize of zero coefficients is the zero grid") {
  const SpectralBasis b = build_basis(6, kPi);
  SpectralField f;
  f.coeffs.assign(6, 0.0);
  for (double v : synthesize(f, b).values) CHECK(v == 0.0);
}

TEST_CASE("e_1 value at the midpoint of (0, pi)") {
  const SpectralBasis b = build_basis(1, kPi);
  SpectralField f;
  f.coeffs = {1.0};
  CHECK(b.eigenfunction(1, kPi / 2) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-14));
}

TEST_CASE("norms of eigenfunctions on (0, pi)") {
  const SpectralBasis b = build_basis(2, kPi);
  SpectralField e1, e2;
  e1.coeffs = {1.0, 0.0};
  e2.coeffs = {0.0, 1.0};
  CHECK(h_norm(e1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(v_norm(e1, b) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(vstar_norm(e1, b) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(v_norm(e2, b) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(vstar_norm(e2, b) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("Poincare inequality holds spectrally") {
  const SpectralBasis b = build_basis(10, 2.7);
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const SpectralField f = random_field(derive_seed(13, s), 10, 2.0);
    const double h = h_norm(f);
    const double v = v_norm(f, b);
    CHECK(h * h <= v * v / b.lambdas[0] * (1.0 + 1e-14));
    CHECK(poincare_gap(f, b) >= 0.0);
  }
}

TEST_CASE("poincare_gap equality and arithmetic cases") {
  const SpectralBasis b = build_basis(2, kPi);
  SpectralField e1, e2;
  e1.coeffs = {1.0, 0.0};
  e2.coeffs = {0.0, 1.0};
  CHECK(poincare_gap(e1, b) == 0.0);
  CHECK(poincare_gap(e2, b) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("Bessel: projection cannot gain H norm over the grid function") {
  const SpectralBasis b = build_basis(8, kPi);
  for (std::uint64_t s = 0; s < 200; ++s) {
    GridFunction g;
    g.values.resize(b.node_count());
    for (int k = 0; k < b.node_count(); ++k)
      g.values[k] = counter_normal(derive_seed(17, s), k);  // rough, not band-limited
    GridFunction sq = g;
    for (double& v : sq.values) v *= v;
    const double l2_sq = quad_integral(b.quad, sq);
    const double h = h_norm(project(g, b));
    CHECK(h * h <= l2_sq + 1e-8);
  }
}

TEST_CASE("spectral V norm agrees with quadrature of |u'|^2 for band-limited fields") {
  const SpectralBasis b = build_basis(8, kPi, 64);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const SpectralField f = random_field(derive_seed(23, s), 8);
    GridFunction du = synthesize_derivative(f, b);
    for (double& v : du.values) v *= v;
    const double quad_v_sq = quad_integral(b.quad, du);
    const double v = v_norm(f, b);
    CHECK(std::abs(v * v - quad_v_sq) <= 1e-8 * (1.0 + v * v));
  }
}

TEST_CASE("size mismatches are contract violations") {
  const SpectralBasis b = build_basis(4, kPi);
  SpectralField f;
  f.coeffs = {1.0, 2.0};
  CHECK_THROWS_AS(synthesize(f, b), std::invalid_argument);
  CHECK_THROWS_AS(v_norm(f, b), std::invalid_argument);
  GridFunction g;
  g.values.assign(7, 0.0);
  CHECK_THROWS_AS(project(g, b), std::invalid_argument);
}
