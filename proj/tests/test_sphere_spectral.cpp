#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "schiffer/sphere_spectral.hpp"

using namespace schiffer;
using Eigen::VectorXd;
using std::numbers::pi;

namespace {

double sample_at(const EigenCurveSample& s, double t) {
  const int n = static_cast<int>(s.t.size()) - 1;
  const int i = static_cast<int>(std::lround(t * n));
  REQUIRE(std::abs(s.t(i) - t) < 1e-14);
  return s.f(i);
}

// Fourth-order derivative of nodal samples on a uniform grid.
VectorXd derivative4(const VectorXd& u, double h) {
  const int n = static_cast<int>(u.size()) - 1;
  VectorXd d(n + 1);
  for (int i = 2; i <= n - 2; ++i) d(i) = (u(i - 2) - 8 * u(i - 1) + 8 * u(i + 1) - u(i + 2)) / (12 * h);
  auto fwd = [&](int i, int dir) {
    return dir * (-25 * u(i) + 48 * u(i + dir) - 36 * u(i + 2 * dir) + 16 * u(i + 3 * dir) - 3 * u(i + 4 * dir)) /
           (12 * h);
  };
  d(0) = fwd(0, 1);
  d(1) = fwd(1, 1);
  d(n) = fwd(n, -1);
  d(n - 1) = fwd(n - 1, -1);
  return d;
}

double simpson(const VectorXd& g, double h) {
  const int n = static_cast<int>(g.size()) - 1;
  REQUIRE(n % 2 == 0);
  double s = g(0) + g(n);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * g(i);
  return s * h / 3;
}

}  // namespace

TEST_CASE("lambda = 0 closed forms") {
  const auto m = solve_mu(0.0);
  CHECK(std::abs(m.value - pi * pi) <= 1e-8);
  // cos(pi t) rescaled to U(1) = 1.
  for (double t : {0.0, 0.25, 0.5, 1.0}) CHECK(std::abs(sample_at(m, t) + std::cos(pi * t)) < 1e-6);
  for (int ell : {0, 1, 5}) {
    const auto s = solve_sigma(ell, 0.0);
    CHECK(std::abs(s.value + 0.75 * pi * pi) <= 1e-8);
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) CHECK(std::abs(sample_at(s, t) - std::cos(pi * t / 2)) < 1e-6);
  }
}

TEST_CASE("Richardson removes the h^2 term") {
  const double ref = solve_mu(0.4, 1000).value;
  const double e1 = std::abs(solve_mu(0.4, 50).value - ref), e2 = std::abs(solve_mu(0.4, 100).value - ref);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
  const auto s = solve_mu(0.4, 100);
  CHECK(std::abs(s.fine - ref) > 1e3 * std::abs(s.value - ref));
}

TEST_CASE("U_lambda: normalization, constraint, Rayleigh quotient") {
  for (double lam : {0.2, 0.5, 0.9}) {
    const auto s = solve_mu(lam);
    const int n = static_cast<int>(s.t.size()) - 1;
    const double h = 1.0 / n;
    CHECK(s.f(n) == 1.0);
    VectorXd w(n + 1), num(n + 1), den(n + 1);
    const VectorXd du = derivative4(s.f, h);
    for (int i = 0; i <= n; ++i) {
      const double c = std::cos(lam * s.t(i));
      w(i) = c * s.f(i) * ((i == 0 || i == n) ? 0.5 : 1.0) * h;
      num(i) = c * du(i) * du(i);
      den(i) = c * s.f(i) * s.f(i);
    }
    // Discrete form of the constraint int U cos(lambda t) dt = 0.
    CHECK(std::abs(w.sum()) <= 1e-8);
    // Rayleigh quotient with high-order differences and Simpson's rule.
    const double rq = simpson(num, h) / simpson(den, h);
    INFO("lambda=" << lam << " rq=" << rq << " mu=" << s.value);
    CHECK(std::abs(rq - s.value) <= 1e-8 * s.value);
  }
}

TEST_CASE("mu(0.5) compared with pi^2") {
  // The eigensolver gives mu(0.5) above pi^2: mu increases, see the derivative test below.
  const double m = solve_mu(0.5).value;
  CHECK(m > pi * pi);
  CHECK(m == doctest::Approx(10.0088099).epsilon(1e-7));
}

TEST_CASE("mu' sign on 0.1..0.9") {
  for (int k = 1; k <= 9; ++k) {
    const double lam = 0.1 * k;
    const double hf = mu_derivative(lam);
    const double fd = (solve_mu(lam + 1e-4).value - solve_mu(lam - 1e-4).value) / 2e-4;
    INFO("lambda=" << lam << " hf=" << hf << " fd=" << fd);
    CHECK(std::abs(hf - fd) <= 1e-5 * std::abs(fd));
    // The bound mu' <= -2 lambda fails by a wide margin; mu is increasing.
    CHECK(hf > 0.0);
    CHECK_FALSE(hf <= -2 * lam + 1e-6);
  }
}

TEST_CASE("V_lambda: positivity and boundary values") {
  for (int ell : {0, 1, 4, 9}) {
    for (double lam : {0.1, 0.5, 0.95}) {
      const auto s = solve_sigma(ell, lam);
      const int n = static_cast<int>(s.t.size()) - 1;
      CHECK(s.f(0) == 1.0);
      CHECK(s.f(n) == 0.0);
      CHECK(s.f.segment(1, n - 1).minCoeff() > 0.0);
    }
  }
}

TEST_CASE("sigma_ell against sigma_0 + (ell lambda)^2") {
  for (double lam : {0.2, 0.5, 0.8}) {
    for (int ell = 1; ell <= 3; ++ell) {
      const auto e = first_estimates(ell, lam);
      INFO("ell=" << ell << " lambda=" << lam << " displayed=" << e.displayed_margin << " chain=" << e.chain_margin);
      CHECK(e.chain_margin >= -1e-12);
      // Direct comparison from independent solves.
      CHECK(solve_sigma(ell, lam).value >= solve_sigma(0, lam).value + ell * ell * lam * lam - 1e-12);
      CHECK(std::isfinite(e.displayed_margin));
      MESSAGE("first estimates ell=" << ell << " lambda=" << lam << ": displayed margin " << e.displayed_margin
                                     << ", chain margin " << e.chain_margin);
    }
  }
}

TEST_CASE("Hellmann-Feynman against central differences") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> ell_d(0, 10);
  std::uniform_real_distribution<double> lam_d(0.05, 0.95);
  for (int k = 0; k < 10; ++k) {
    const int ell = ell_d(rng);
    const double lam = lam_d(rng);
    const double hf = sigma_derivative(ell, lam);
    const double fd = (solve_sigma(ell, lam + 1e-4).value - solve_sigma(ell, lam - 1e-4).value) / 2e-4;
    INFO("ell=" << ell << " lambda=" << lam << " hf=" << hf << " fd=" << fd);
    CHECK(std::abs(hf - fd) <= 1e-5 * std::abs(fd));
  }
  // The slowest curve (ell = 1, sigma_1' ~ lambda^3 near 0) at the low end.
  const double hf = sigma_derivative(1, 0.05);
  const double fd = (solve_sigma(1, 0.05 + 1e-4).value - solve_sigma(1, 0.05 - 1e-4).value) / 2e-4;
  CHECK(std::abs(hf - fd) <= 1e-5 * std::abs(fd));
}

TEST_CASE("derivative lower bound with the estimated constant") {
  std::vector<int> ells;
  for (int l = 0; l <= 10; ++l) ells.push_back(l);
  std::vector<double> lams, offset;
  for (int k = 1; k <= 9; ++k) lams.push_back(0.1 * k);
  for (int k = 1; k <= 8; ++k) offset.push_back(0.1 * k + 0.05);
  const double C = estimate_C_hat(ells, lams);
  MESSAGE("C_hat = " << C);
  CHECK(std::isfinite(C));
  for (int ell : ells)
    for (double lam : lams) CHECK(sigma_derivative(ell, lam) >= (2.0 * ell * ell - C) * lam - 1e-12);
  // Off the estimation mesh.
  for (int ell : ells)
    for (double lam : offset) {
      INFO("ell=" << ell << " lambda=" << lam);
      CHECK(sigma_derivative(ell, lam) >= (2.0 * ell * ell - C) * lam);
    }
}

TEST_CASE("rho checks") {
  const auto r = rho_checks();
  CHECK(r.rho0_over_cos0 == -2.0);
  CHECK(rho(0.0) == -2.0);
  CHECK(r.decreasing);
  CHECK(r.max_slope < 0.0);
  CHECK(r.bounds_hold);
  CHECK(r.lower == doctest::Approx(rho(1.0) / std::cos(1.0)).epsilon(1e-15));
  CHECK(std::abs(r.spot_value - r.spot_fd) < 1e-8);
  CHECK(r.spot_value == doctest::Approx(-(std::cos(0.5) + (1 + 0.5 * std::tan(0.5)) / std::cos(0.5))));
}

TEST_CASE("ell_zero") {
  const int l0 = ell_zero(0.5);
  CHECK(l0 >= 1);
  CHECK(solve_sigma(l0, 0.5).value > 0.0);
  // The previous ell fails one of the two conditions.
  bool prev_ok = solve_sigma(l0 - 1, 0.5).value > 0.0;
  for (int k = 1; k <= 20 && prev_ok; ++k) prev_ok = sigma_derivative(l0 - 1, 0.5 * k / 20.0) > 0.0;
  CHECK_FALSE(prev_ok);
  CHECK(ell_zero(0.3) >= ell_zero(0.6));
  for (double bad : {0.0, 1.0, -0.2, 1.5}) CHECK_THROWS_AS(ell_zero(bad), std::domain_error);
}

TEST_CASE("lambda_star for ell_0 .. ell_0 + 2") {
  const int l0 = ell_zero(0.5);
  for (int ell = l0; ell <= l0 + 2; ++ell) {
    const auto r = find_lambda_star(ell, 0.5);
    INFO("ell=" << ell << " lambda*=" << r.lambda_star);
    CHECK(r.lambda_star > 0.0);
    CHECK(r.lambda_star < 0.5);
    CHECK(std::abs(r.sigma_at_star) <= 1e-10);
    CHECK(std::abs(solve_sigma(ell, r.lambda_star).value) <= 1e-10);
    CHECK(r.sigma_prime > 0.0);
    CHECK(r.scan_sign_changes == 1);
    for (int k = 0; k <= ell + 3; ++k) {
      if (k == ell) continue;
      CHECK(std::abs(solve_sigma(k, r.lambda_star).value) >= 1e-4);
    }
  }
}

TEST_CASE("error paths") {
  try {
    find_lambda_star(1, 0.5);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("no sign change") != std::string::npos);
  }
  CHECK_THROWS_AS(find_lambda_star(6, 0.0), std::domain_error);
  CHECK_THROWS_AS(solve_mu(1.0), std::domain_error);
  CHECK_THROWS_AS(solve_mu(-0.1), std::domain_error);
  CHECK_THROWS_AS(solve_sigma(-1, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(solve_sigma(2, 1.2), std::domain_error);
}
