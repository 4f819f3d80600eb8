#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <random>

#include "schiffer/sphere_branch.hpp"
#include "schiffer/sphere_spectral.hpp"

using namespace schiffer;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using std::numbers::pi;

namespace {

struct Fixture {
  SphereModel model;
  SphereBranch branch;
  Fixture() : model(build_sphere_model()), branch(sphere_trace(model, 0.02, 0.005)) {}
  const SphereBranchPoint& at(double s) const {
    for (const auto& p : branch.points)
      if (std::abs(p.s - s) < 1e-9) return p;
    throw std::runtime_error("missing s");
  }
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

MatrixXd values(const FieldGrid& g, const Field2D& u) { return g.angular.E * u.coeffs; }

// Linear interpolation of a finite-difference sample at t.
double fd_at(const EigenCurveSample& s, double t) {
  const int n = static_cast<int>(s.t.size()) - 1;
  const int i = std::min(static_cast<int>(t * n), n - 1);
  const double a = t * n - i;
  return (1 - a) * s.f(i) + a * s.f(i + 1);
}

// Deterministic white noise in [-1, 1] keyed on the bit patterns of (t, x).
double hash_noise(double t, double x) {
  std::uint64_t a, b;
  std::memcpy(&a, &t, 8);
  std::memcpy(&b, &x, 8);
  std::uint64_t z = a * 0x9E3779B97F4A7C15ull ^ (b + 0x632BE59BD9B4E019ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return 2.0 * static_cast<double>(z >> 11) / static_cast<double>(1ull << 53) - 1.0;
}

}  // namespace

TEST_CASE("collocation eigencurves agree with the finite-difference solver") {
  const FieldGrid g = make_sphere_grid(0.45, 6);
  for (double lam : {0.0, 0.3, 0.5, 0.9}) {
    const auto cm = chebyshev_mu(g.radial, lam);
    const auto fm = solve_mu(lam);
    INFO("lambda=" << lam);
    CHECK(std::abs(cm.value - fm.value) <= 1e-9 * fm.value);
    CHECK(cm.f(g.K()) == doctest::Approx(1.0).epsilon(1e-14));
    for (double t : {0.0, 0.3, 0.7, 1.0}) CHECK(std::abs(g.radial.interpolate(cm.f, t) - fd_at(fm, t)) <= 1e-5);
    for (int ell : {0, 3, 7}) {
      const auto cs = chebyshev_sigma(g.radial, ell, lam, cm.value);
      const auto fs = solve_sigma(ell, lam);
      CHECK(std::abs(cs.value - fs.value) <= 1e-9 * std::max(1.0, std::abs(fs.value)));
      CHECK(cs.f(0) == 1.0);
      CHECK(cs.f(g.K()) == 0.0);
      for (double t : {0.2, 0.5, 0.8}) CHECK(std::abs(g.radial.interpolate(cs.f, t) - fd_at(fs, t)) <= 1e-5);
    }
  }
  CHECK_THROWS_AS(chebyshev_mu(g.radial, 1.0), std::domain_error);
  CHECK_THROWS_AS(chebyshev_sigma(g.radial, -1, 0.3, 10.0), std::invalid_argument);
}

TEST_CASE("sphere model invariants") {
  const auto& m = fx().model;
  CHECK(m.ell == ell_zero(0.5));
  CHECK(m.lambda_star > 0.0);
  CHECK(m.lambda_star < m.lambda0);
  CHECK(std::abs(m.sigma_at_star) <= 1e-10);
  CHECK(std::abs(m.sigma_cheb) <= 1e-10);
  CHECK(m.sigma_prime_star > 0.0);
  CHECK(std::abs(m.d2U1) >= 1e-6);
  CHECK(std::abs(m.dV1) >= 1e-6);
  // U'(1) = 0 leaves U''(1) = -mu from the equation; the second route differentiates the nodes twice.
  CHECK(std::abs(m.d2U1 + m.mu_star) <= 1e-8 * m.mu_star);
  const double d2 = m.grid.radial.D2.row(m.grid.K()).dot(m.U_star);
  CHECK(std::abs(d2 - m.d2U1) <= 1e-6 * std::abs(m.d2U1));
  CHECK(m.dV1 < 0.0);
  CHECK(std::abs(m.mu_star - solve_mu(m.lambda_star).value) <= 1e-9 * m.mu_star);
  CHECK(sphere_r_of_s(m, 0.01) == doctest::Approx(-0.01 * m.d2U1 / (m.lambda_star * m.dV1)));
}

TEST_CASE("pull-back operator: separable solutions and the zero field") {
  const auto& m = fx().model;
  const FieldGrid& g = m.grid;
  for (double lam : {0.2, m.lambda_star, 0.8}) {
    const auto p = chebyshev_mu(g.radial, lam);
    Field2D u = Field2D::zero(g);
    u.coeffs.row(0) = p.f.transpose();
    const auto zero = DomainProfile::constant(g, 0.0);
    INFO("lambda=" << lam);
    CHECK(interior_max(values(g, apply_sphere_pullback(g, lam, zero, u, p.value))) <= 1e-8);
    for (double c : {0.1, 0.4}) {
      Field2D v = Field2D::zero(g);
      for (int i = 0; i <= g.K(); ++i) v.coeffs(0, i) = g.radial.interpolate(p.f, g.radial.r(i) / (1 + c));
      CHECK(interior_max(values(g, apply_sphere_pullback(g, lam, DomainProfile::constant(g, c), v, p.value))) <=
            1e-8);
    }
    CHECK(values(g, apply_sphere_pullback(g, lam, zero, Field2D::zero(g), p.value)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("pull-back operator against the spherical Laplacian of a known function") {
  // w(tau, x) = cos(2 tau) cos(ell x) + tau^2 transported to u(t, x) = w(lambda t / (1 + h(x)), x).
  const auto& m = fx().model;
  const FieldGrid& g = m.grid;
  const int ell = m.ell;
  const double lam = 0.45, mu = 7.3;
  DomainProfile h = DomainProfile::constant(g, 0.02);
  h.coeffs(1) = 0.05;
  h.coeffs(2) = -0.01;
  const int nx = g.M() + 1, nt = g.K() + 1;
  MatrixXd uv(nx, nt), expect(nx, nt);
  for (int j = 0; j < nx; ++j) {
    const double x = g.angular.x(j), H = 1 + h.at(g.angular, x);
    for (int i = 0; i < nt; ++i) {
      const double tau = lam * g.radial.r(i) / H, cx = std::cos(ell * x);
      const double w = std::cos(2 * tau) * cx + tau * tau;
      const double wt = -2 * std::sin(2 * tau) * cx + 2 * tau;
      const double wtt = -4 * std::cos(2 * tau) * cx + 2;
      const double wxx = -ell * ell * std::cos(2 * tau) * cx;
      uv(j, i) = w;
      expect(j, i) = lam * lam * (wtt - std::tan(tau) * wt + wxx / std::pow(std::cos(tau), 2)) + mu * w;
    }
  }
  Field2D u = Field2D::zero(g);
  u.coeffs = g.angular.P * uv;
  const MatrixXd got = values(g, apply_sphere_pullback(g, lam, h, u, mu));
  CHECK((got - expect).cwiseAbs().maxCoeff() <= 1e-8 * expect.cwiseAbs().maxCoeff());
}

TEST_CASE("admissibility") {
  const auto& m = fx().model;
  const FieldGrid& g = m.grid;
  const Field2D u = Field2D::zero(g);
  // 1 + h = 0.2 < 2 lambda / pi.
  CHECK_THROWS_AS(apply_sphere_pullback(g, 0.5, DomainProfile::constant(g, -0.8), u, 10.0), std::domain_error);
  CHECK_NOTHROW(apply_sphere_pullback(g, 0.5, DomainProfile::constant(g, -0.6), u, 10.0));
  DomainProfile h = DomainProfile::constant(g, 0.0);
  h.coeffs(1) = -0.75;
  CHECK_THROWS_AS(check_sphere_admissible(g, 0.5, h), std::domain_error);
}

TEST_CASE("reduced map: trivial branch, derivative, kernel") {
  const auto& m = fx().model;
  const FieldGrid& g = m.grid;
  for (double lam : {0.2, 0.4, m.lambda_star, 0.7})
    CHECK(interior_max(values(g, sphere_G(m, lam, Field2D::zero(g)))) <= 1e-12);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field2D v = Field2D::zero(g);
  for (int k = 0; k <= 3; ++k)
    for (int j = 0; j <= 3; ++j) {
      const double a = U(rng);
      for (int i = 0; i <= g.K(); ++i) {
        const double t = g.radial.r(i);
        v.coeffs(k, i) += a * (1 - t * t) * std::pow(t, 2 * j);
      }
    }
  v.dirichlet = true;
  for (double lam : {0.3, m.lambda_star}) {
    const double eps = 1e-4;
    Field2D vp = v, vm = v;
    vp.coeffs *= eps;
    vm.coeffs *= -eps;
    const MatrixXd fd = (values(g, sphere_G(m, lam, vp)) - values(g, sphere_G(m, lam, vm))) / (2 * eps);
    const MatrixXd lin = values(g, apply_sphere_L0(m, lam, v));
    INFO("lambda=" << lam);
    CHECK(interior_max(fd - lin) <= 1e-5 * interior_max(lin));
  }

  const Field2D vs = sphere_kernel_field(m);
  CHECK(interior_max(values(g, apply_sphere_L0(m, m.lambda_star, vs))) <= 1e-8);
  // Away from lambda* the same field is not annihilated.
  CHECK(interior_max(values(g, apply_sphere_L0(m, m.lambda_star + 0.05, vs))) >= 1e-2);
}

TEST_CASE("kernel scan and transversality") {
  const auto& m = fx().model;
  const auto sc = sphere_kernel_scan(m, m.ell + 3);
  CHECK(sc.kernel_count == 1);
  CHECK(sc.kernel_mode == m.ell);
  CHECK(sc.min_singular[m.ell] < 1e-7);
  CHECK(sc.gap >= 1e-4);

  const auto tr = sphere_transversality(m);
  MESSAGE("transversality: derivative route " << tr.derivative_route << ", sigma' |v*|^2 " << tr.spectral_route);
  CHECK(tr.spectral_route > 0.0);
  CHECK(tr.norm > 0.0);
  // L^0 V = -sigma V on the mode, so the derivative route carries the opposite sign.
  CHECK(std::abs(tr.derivative_route + tr.spectral_route) <= 1e-5 * tr.spectral_route);
  // Third route: differencing the collocation eigenvalue.
  const double d = 1e-5, l = m.lambda_star;
  const auto& rg = m.grid.radial;
  auto sig = [&](double lam) { return chebyshev_sigma(rg, m.ell, lam, chebyshev_mu(rg, lam).value).value; };
  const double fd = (sig(l + d) - sig(l - d)) / (2 * d);
  CHECK(std::abs(fd - m.sigma_prime_star) <= 1e-6 * m.sigma_prime_star);
}

TEST_CASE("traced branch") {
  const auto& f = fx();
  const auto& m = f.model;
  REQUIRE_FALSE(f.branch.truncated);
  REQUIRE(f.branch.points.size() == 9);
  const double kappa = sphere_r_of_s(m, 1.0);
  for (const auto& p : f.branch.points) {
    INFO("s=" << p.s);
    CHECK(p.residual_G <= 1e-10);
    CHECK(p.constraint_error <= 1e-12);
    CHECK(p.boundary_error <= 1e-8);
    CHECK(p.r == doctest::Approx(kappa * p.s).epsilon(1e-12));
    CHECK(p.h_min > 0.0);
    CHECK(p.h_max < pi / 2);
    CHECK(p.xi > 0.0);
    CHECK(p.xi < m.lambda0);
    CHECK(p.mu * p.lambda * p.lambda == doctest::Approx(p.mu_lambda).epsilon(1e-14));
    CHECK(std::abs(p.mu_lambda - solve_mu(p.lambda).value) <= 1e-9 * p.mu_lambda);
    // h~ at every collocation point.
    const VectorXd H = 1.0 + (m.grid.angular.E * p.h_u.coeffs).array();
    for (int j = 0; j < H.size(); ++j) {
      CHECK(p.lambda / H(j) > 0.0);
      CHECK(p.lambda / H(j) < pi / 2);
    }
  }
  const auto& p0 = f.at(0.0);
  CHECK(p0.lambda == m.lambda_star);
  CHECK(p0.xi == m.lambda_star);
  CHECK(std::abs(p0.h_min - m.lambda_star) <= 1e-14);
  CHECK(std::abs(p0.h_max - m.lambda_star) <= 1e-14);
  CHECK(p0.mu == doctest::Approx(m.mu_star / (m.lambda_star * m.lambda_star)).epsilon(1e-14));
  CHECK(p0.E <= 1e-14);

  for (double sg : {1.0, -1.0}) {
    const double r1 = f.at(0.02 * sg).E / 0.02, r2 = f.at(0.01 * sg).E / 0.01, r3 = f.at(0.005 * sg).E / 0.005;
    MESSAGE("E(s)/|s| at s=" << 0.02 * sg << ", " << 0.01 * sg << ", " << 0.005 * sg << ": " << r1 << " " << r2
                             << " " << r3);
    CHECK(r2 < r1);
    CHECK(r3 < r2);
    // O(s^2) remainder: the ratio halves with s.
    CHECK(r2 / r1 == doctest::Approx(0.5).epsilon(0.1));
    CHECK(r3 / r2 == doctest::Approx(0.5).epsilon(0.1));
    CHECK(r2 <= 0.1);
  }
  // Symmetry x -> x + pi / ell maps s to -s.
  CHECK(std::abs(f.at(0.02).lambda - f.at(-0.02).lambda) <= 1e-10);
  CHECK(f.at(0.02).lambda != m.lambda_star);
}

TEST_CASE("metric oracle") {
  const auto& f = fx();
  for (double s : {0.0, 0.02, -0.01}) {
    const SphereSolution sol(f.model, f.at(s));
    const auto a = sphere_residual_oracle(sol, 0.02), b = sphere_residual_oracle(sol, 0.01),
               c = sphere_residual_oracle(sol, 0.005);
    INFO("s=" << s << " residuals " << a.interior << " " << b.interior << " " << c.interior);
    CHECK(a.interior / b.interior == doctest::Approx(4.0).epsilon(0.15));
    CHECK(b.interior / c.interior == doctest::Approx(4.0).epsilon(0.15));
    CHECK(b.boundary <= 1e-8);
    CHECK(sol.boundary_error() <= 1e-8);
    CHECK(b.interior == doctest::Approx(f.at(s).oracle_interior).epsilon(1e-12));
    const auto noisy = sphere_residual_oracle(sol, 0.01, [](double t, double x) { return 1e-3 * hash_noise(t, x); });
    CHECK(noisy.interior >= 10.0 * b.interior);
  }
  const SphereSolution sol(f.model, f.at(0.0));
  const double l = f.model.lambda_star;
  CHECK(sol.h_tilde(0.3) == doctest::Approx(l).epsilon(1e-14));
  CHECK(std::abs(sol.h_tilde(0.3, 1)) <= 1e-14);
  CHECK(sol.mu() == doctest::Approx(f.model.mu_star / (l * l)).epsilon(1e-14));
  CHECK(sol.w(0.5, 1.0) == doctest::Approx(sol.w(-0.5, 1.0)).epsilon(1e-14));
  CHECK(sol.w(0.5, 1.0, 1, 0) == doctest::Approx(-sol.w(-0.5, 1.0, 1, 0)).epsilon(1e-14));
  CHECK_THROWS_AS(sol.w(1.1, 0.0), std::domain_error);
}

TEST_CASE("trace argument errors") {
  const auto& m = fx().model;
  CHECK_THROWS_AS(sphere_trace(m, 0.02, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sphere_trace(m, 0.001, 0.005), std::invalid_argument);
  CHECK_THROWS_AS(make_sphere_grid(0.4, 0), std::invalid_argument);
}
