#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "loghe/experiments.hpp"
#include "loghe/inequalities.hpp"
#include "loghe/nonlinearity.hpp"
#include "loghe/rng.hpp"

using namespace loghe;

namespace {

constexpr double kE = 2.71828182845904523536;

SpectralField random_field(std::uint64_t seed, int n, double log_amp_lo = -2.0,
                           double log_amp_hi = 1.0) {
  const double amp = std::pow(10.0, log_amp_lo + (log_amp_hi - log_amp_lo) * counter_uniform(seed, 900));
  SpectralField f;
  f.coeffs.resize(n);
  for (int i = 0; i < n; ++i) f.coeffs[i] = amp * counter_normal(seed, i);
  return f;
}

}  // namespace

TEST_CASE("log-Sobolev gap for e_1 at eps = 1") {
  const SpectralBasis b = build_basis(1, kPi, 20000);
  SpectralField u;
  u.coeffs = {1.0};
  const GapReport r = log_sobolev_gap(u, b, 1.0, 1);
  CHECK(r.lhs == doctest::Approx(-0.4189).epsilon(1e-3));
  CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.gap == doctest::Approx(1.4189).epsilon(1e-3));
}

TEST_CASE("log-Sobolev gap of the zero field is 0 = 0") {
  const SpectralBasis b = build_basis(4, kPi);
  SpectralField u;
  u.coeffs.assign(4, 0.0);
  const GapReport r = log_sobolev_gap(u, b, 1.0, 1);
  CHECK(r.lhs == 0.0);
  CHECK(r.rhs == 0.0);
  CHECK_THROWS_AS(log_sobolev_gap(u, b, 0.0, 1), std::invalid_argument);
}

TEST_CASE("scaling identity for the logarithmic integral") {
  const SpectralBasis b = build_basis(6, kPi);
  auto log_integral = [&](const SpectralField& f) {
    GridFunction g = synthesize(f, b);
    for (double& x : g.values) x = x * xlogx(x);
    return quad_integral(b.quad, g);
  };
  for (std::uint64_t s = 0; s < 50; ++s) {
    const SpectralField u = random_field(derive_seed(301, s), 6, -1.0, 0.5);
    const double base = log_integral(u);
    const double h2 = h_norm(u) * h_norm(u);
    for (double c : {2.0, 10.0}) {
      SpectralField cu = u;
      for (double& x : cu.coeffs) x *= c;
      const double lhs = log_integral(cu);
      const double rhs = c * c * base + c * c * std::log(c) * h2;
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs) + std::abs(rhs)));
    }
  }
}

TEST_CASE("log-Sobolev randomized suite stays nonnegative") {
  const SpectralBasis b = build_basis(8, kPi);
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const SpectralField u = random_field(derive_seed(307, s), 8);
    for (double eps : {0.01, 0.1, 1.0}) {
      const GapReport r = log_sobolev_gap(u, b, eps, 1);
      CHECK(r.gap >= -1e-8 * (1.0 + std::abs(r.rhs)));
    }
  }
}

TEST_CASE("log_plus variant: zero field and small fields") {
  const SpectralBasis b = build_basis(4, kPi);
  SpectralField u;
  u.coeffs.assign(4, 0.0);
  const GapReport r0 = log_sobolev_plus_gap(u, b, 1.0, 1);
  CHECK(r0.lhs == 0.0);
  CHECK(r0.rhs == doctest::Approx(kPi / (2.0 * kE)).epsilon(1e-12));
  CHECK(r0.rhs == doctest::Approx(0.5779).epsilon(1e-4));

  // |u| <= 1 everywhere kills the lhs
  u.coeffs = {0.1, -0.2, 0.05, 0.0};
  const GapReport r1 = log_sobolev_plus_gap(u, b, 0.5, 1);
  CHECK(r1.lhs == 0.0);
  CHECK(r1.gap >= 0.0);
}

TEST_CASE("log_plus variant randomized suite") {
  const SpectralBasis b = build_basis(8, kPi);
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const SpectralField u = random_field(derive_seed(311, s), 8);
    for (double eps : {0.01, 0.1, 1.0}) {
      const GapReport r = log_sobolev_plus_gap(u, b, eps, 1);
      CHECK(r.gap >= -1e-8 * (1.0 + std::abs(r.rhs)));
    }
  }
}

TEST_CASE("lemma31_gap: u = v collapses both sides") {
  const SpectralBasis b = build_basis(5, kPi);
  const SpectralField u = random_field(313, 5);
  const GapReport r = lemma31_gap(u, u, b, 0.25, 0.5);
  CHECK(r.lhs == 0.0);
  CHECK(r.rhs == 0.0);
  CHECK_THROWS_AS(lemma31_gap(u, u, b, 0.25, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lemma31_gap(u, u, b, -1.0, 0.5), std::invalid_argument);
}

TEST_CASE("lemma31_gap at (e_1, 0) with eps = 1/4, alpha = 1/2") {
  const SpectralBasis b = build_basis(1, kPi, 20000);
  SpectralField u, v;
  u.coeffs = {1.0};
  v.coeffs = {0.0};
  const GapReport r = lemma31_gap(u, v, b, 0.25, 0.5);
  CHECK(r.lhs == doctest::Approx(-0.4189).epsilon(1e-3));
  CHECK(r.gap >= 0.0);
}

TEST_CASE("lemma31_gap randomized suite (1e4 cases)") {
  const SpectralBasis b = build_basis(8, kPi);
  const double eps_grid[3] = {0.05, 0.25, 1.0};
  const double alpha_grid[3] = {0.3, 0.5, 0.9};
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const SpectralField u = random_field(derive_seed(317, 2 * s), 8);
    const SpectralField v = random_field(derive_seed(317, 2 * s + 1), 8);
    const GapReport r = lemma31_gap(u, v, b, eps_grid[s % 3], alpha_grid[(s / 3) % 3]);
    CHECK(r.gap >= -1e-8 * (1.0 + std::abs(r.lhs) + std::abs(r.rhs)));
  }
}

TEST_CASE("lemma32_gap: small fields and the (2 e_1, 0) oracle case") {
  const SpectralBasis b = build_basis(4, kPi);
  SpectralField u, v;
  u.coeffs = {0.3, 0.1, 0.0, -0.2};
  v.coeffs = {0.0, 0.0, 0.0, 0.0};
  const GapReport small = lemma32_gap(u, v, b, 0.25, 0.5);
  CHECK(small.lhs == 0.0);  // |u| v |v| <= 1 everywhere
  CHECK(small.gap >= 0.0);

  const SpectralBasis fine = build_basis(1, kPi, 20000);
  SpectralField u2, v2;
  u2.coeffs = {2.0};
  v2.coeffs = {0.0};
  const GapReport r = lemma32_gap(u2, v2, fine, 0.25, 0.5);
  CHECK(r.lhs > 0.0);  // 2 e_1 exceeds 1 on part of the domain
  CHECK(r.gap >= 0.0);
}

TEST_CASE("lemma32_gap randomized suite (1e4 cases)") {
  const SpectralBasis b = build_basis(8, kPi);
  const double eps_grid[3] = {0.05, 0.25, 1.0};
  const double alpha_grid[3] = {0.3, 0.5, 0.9};
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const SpectralField u = random_field(derive_seed(331, 2 * s), 8);
    const SpectralField v = random_field(derive_seed(331, 2 * s + 1), 8);
    const GapReport r = lemma32_gap(u, v, b, eps_grid[s % 3], alpha_grid[(s / 3) % 3]);
    CHECK(r.gap >= -1e-8 * (1.0 + std::abs(r.lhs) + std::abs(r.rhs)));
  }
}

TEST_CASE("Gronwall alpha bound: closed-form saturation cases") {
  for (double t : {0.5, 1.0, 2.0}) {
    for (double alpha : {0.0, 0.3, 0.7})
      CHECK(std::abs(gronwall_alpha_bound(1.0, 1.0, 0.0, alpha, t) - std::exp(t)) <=
            1e-10 * std::exp(t));
    CHECK(std::abs(gronwall_alpha_bound(0.0, 0.0, 1.0, 0.5, t) - t * t / 4.0) <= 1e-10);
  }
  CHECK_THROWS_AS(gronwall_alpha_bound(1.0, 1.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("Gronwall alpha bound dominates integrated solutions") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::uint64_t cs = derive_seed(337, s);
    const double a = 2.0 * counter_uniform(cs, 0);
    const double b = 2.0 * counter_uniform(cs, 1);
    const double alpha = counter_uniform(cs, 2) < 0.5 ? 0.3 : 0.7;
    const double c = counter_uniform(cs, 3);
    auto f = [&](double, double y) { return a * y + b * std::pow(std::max(y, 0.0), alpha); };
    double y = c, t = 0.0;
    for (double tc : {0.5, 1.0, 2.0}) {
      y = rk4_integrate(f, y, t, tc, 1e-4);
      t = tc;
      CHECK(y <= gronwall_alpha_bound(c, a, b, alpha, tc) + 1e-6);
    }
  }
}

TEST_CASE("Gronwall callable path agrees with the constant path") {
  auto ca = [](double) { return 0.7; };
  auto cb = [](double) { return 1.3; };
  for (double t : {0.4, 1.7}) {
    CHECK(gronwall_alpha_bound(0.5, ca, cb, 0.3, t) ==
          doctest::Approx(gronwall_alpha_bound(0.5, 0.7, 1.3, 0.3, t)).epsilon(1e-9));
    CHECK(log_gronwall_bound([](double) { return 1.5; }, ca, cb, t) ==
          doctest::Approx(log_gronwall_bound(1.5, 0.7, 1.3, t)).epsilon(1e-9));
  }

  // genuinely time-dependent coefficients against a dense-grid oracle
  auto at = [](double s) { return 0.3 + 0.1 * s; };
  auto bt = [](double s) { return 1.0 + 0.5 * s; };
  const double alpha = 0.4, c0 = 0.8, T = 1.5, q = 1.0 - alpha;
  auto int_a = [&](double lo, double hi) {
    const int N = 20000;
    double acc = 0.0;
    const double h = (hi - lo) / N;
    for (int i = 0; i < N; ++i) acc += h * at(lo + (i + 0.5) * h);
    return acc;
  };
  double term2 = 0.0;
  {
    const int N = 4000;
    const double h = T / N;
    for (int i = 0; i < N; ++i) {
      const double s = (i + 0.5) * h;
      term2 += h * bt(s) * std::exp(q * int_a(s, T));
    }
    term2 *= q;
  }
  const double oracle = std::pow(std::pow(c0, q) * std::exp(q * int_a(0.0, T)) + term2, 1.0 / q);
  CHECK(gronwall_alpha_bound(c0, at, bt, alpha, T) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("log-Gronwall bound: classical limit and 2^e case") {
  CHECK(log_gronwall_bound(2.0, 0.5, 0.0, 1.0) == doctest::Approx(2.0 * std::exp(0.5)).epsilon(1e-12));
  CHECK(log_gronwall_bound(2.0, 0.0, 1.0, 1.0) == doctest::Approx(std::pow(2.0, kE)).epsilon(1e-12));
  CHECK(std::pow(2.0, kE) == doctest::Approx(6.5808).epsilon(1e-4));
  CHECK_THROWS_AS(log_gronwall_bound(0.5, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("log-Gronwall bound dominates integrated solutions") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::uint64_t cs = derive_seed(347, s);
    const double c1 = counter_uniform(cs, 0);
    const double c2 = counter_uniform(cs, 1);
    const double M = 1.0 + counter_uniform(cs, 2);
    auto f = [&](double, double x) { return c1 * x + c2 * x * std::log(x); };
    double x = M, t = 0.0;
    for (double tc : {0.5, 1.0, 2.0}) {
      x = rk4_integrate(f, x, t, tc, 1e-4);
      t = tc;
      CHECK(x <= log_gronwall_bound(M, c1, c2, tc) + 1e-6);
    }
  }
}

TEST_CASE("horizon and gamma map values") {
  CHECK(horizon_Tp(2.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(horizon_Tp(2.0, 0.0) == doctest::Approx(0.69315).epsilon(1e-4));
  CHECK(gamma_map(2.0, 0.5) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  CHECK(horizon_Tp(2.0, 0.5) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(horizon_Tp(1.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma_map(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("T_p decreases in p; gamma iterates grow by more than 1 - theta") {
  for (double theta : {0.0, 0.3, 0.9}) {
    double prev = horizon_Tp(2.0, theta);
    for (double p = 2.5; p <= 20.0; p += 0.5) {
      const double cur = horizon_Tp(p, theta);
      CHECK(cur < prev);
      prev = cur;
    }
    for (double z = 2.0; z <= 50.0; z += 1.0) CHECK(gamma_map(z, theta) - z > 1.0 - theta);
  }
}

TEST_CASE("schedule for p = 2, theta = 0, T = 1") {
  const Schedule s = build_schedule(2.0, 0.0, 1.0);
  CHECK(s.kappa == 2);
  REQUIRE(s.q.size() == 3);
  CHECK(s.q[0] == doctest::Approx(2.0));
  CHECK(s.q[1] == doctest::Approx(4.0));
  CHECK(s.q[2] == doctest::Approx(16.0 / 3.0));
  CHECK(s.horizons[0] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(s.horizons[1] == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-14));
  CHECK(s.horizons[2] == doctest::Approx(std::log(16.0 / 13.0)).epsilon(1e-14));
  REQUIRE(s.S.size() == 4);
  CHECK(s.S[0] == 0.0);
  CHECK(std::abs(s.S[1] - 0.2076) <= 1e-4);
  CHECK(std::abs(s.S[2] - 0.4953) <= 1e-4);
  CHECK(std::abs(s.S[3] - 1.1884) <= 1e-4);
}

TEST_CASE("short horizons need a single segment") {
  const double Tp = horizon_Tp(2.0, 0.2);
  const Schedule s = build_schedule(2.0, 0.2, 0.5 * Tp);
  CHECK(s.kappa == 0);
  REQUIRE(s.S.size() == 2);
  CHECK(s.S[0] == 0.0);
  CHECK(s.S[1] == doctest::Approx(Tp).epsilon(1e-14));
}

TEST_CASE("schedule bracketing property on random inputs") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::uint64_t cs = derive_seed(353, s);
    const double p = 2.0 + 4.0 * counter_uniform(cs, 0);
    const double theta = 0.95 * counter_uniform(cs, 1);
    const double T = 5.0 * counter_uniform(cs, 2) + 1e-3;
    const Schedule sch = build_schedule(p, theta, T);
    CHECK(sch.S[sch.kappa] < T);
    CHECK(T <= sch.S.back() + 1e-9 * (1.0 + T));
    for (int i = 0; i + 1 < static_cast<int>(sch.horizons.size()); ++i)
      CHECK(sch.horizons[i + 1] < sch.horizons[i]);  // T(i) decreasing with q(i)
  }
}

TEST_CASE("horizon series diverges far enough to cover long targets") {
  const Schedule s = build_schedule(2.0, 0.9, 10.0);
  CHECK(s.kappa > 10);
  CHECK(s.S.back() >= 10.0);
}

TEST_CASE("rho is continuous at the knee and phi starts at 1") {
  CHECK(rho(kE) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::log(kE) == doctest::Approx(kE / kE).epsilon(1e-14));
  CHECK(rho(0.0) == 0.0);
  CHECK_THROWS_AS(rho(-1.0), std::invalid_argument);
  CHECK(phi(0.0) == 1.0);
  CHECK(phi_prime(0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phi(e) by two independent quadratures") {
  const auto integrand = [](double x) { return 1.0 / (1.0 + x + x * rho(x)); };
  // brute-force midpoint with 1e6 panels
  const int N = 1000000;
  const double h = kE / N;
  double acc = 0.0;
  for (int i = 0; i < N; ++i) acc += h * integrand((i + 0.5) * h);
  CHECK(phi(kE) == doctest::Approx(std::exp(acc)).epsilon(1e-9));
}

TEST_CASE("phi is concave, monotone, and at least 1") {
  double prev = phi(0.0);
  CHECK(prev == 1.0);
  Vec vals;
  for (double z = 0.0; z <= 100.0; z += 0.5) vals.push_back(phi(z));
  for (std::size_t i = 1; i < vals.size(); ++i) {
    CHECK(vals[i] > vals[i - 1]);
    CHECK(vals[i] >= 1.0);
  }
  for (std::size_t i = 1; i + 1 < vals.size(); ++i)
    CHECK(vals[i + 1] - 2.0 * vals[i] + vals[i - 1] <= 1e-10);
}

TEST_CASE("uniqueness horizon t_star") {
  CHECK(t_star(0.0) == doctest::Approx(0.46185).epsilon(1e-4));
  CHECK(t_star(1.0) == doctest::Approx(0.11546).epsilon(1e-4));
  double prev = t_star(0.0);
  for (double l2 = 0.25; l2 <= 4.0; l2 += 0.25) {
    CHECK(t_star(l2) < prev);
    prev = t_star(l2);
  }
}

TEST_CASE("adaptive quadrature hits a known integral") {
  CHECK(integrate_adaptive([](double x) { return std::sin(x); }, 0.0, kPi) ==
        doctest::Approx(2.0).epsilon(1e-12));
}
