#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "schiffer/linear_analysis.hpp"

using namespace schiffer;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Field2D random_dirichlet(const FieldGrid& g, std::mt19937& rng, int modes = 4) {
  std::normal_distribution<double> nd;
  Field2D u = Field2D::zero(g);
  for (int l = 0; l <= modes; ++l)
    for (int k = 0; k <= 6; ++k) {
      const double a = nd(rng) / (1.0 + l * l);
      for (int i = 0; i <= g.K(); ++i) {
        const double r = g.radial.r(i);
        u.coeffs(l, i) += a * (1 - r * r) * std::pow(r, 2 * k);
      }
    }
  u.coeffs.col(g.K()).setZero();
  u.neumann = false;
  return u;
}

}  // namespace

TEST_CASE("mode blocks") {
  const auto g = make_cylinder_grid(2);
  const auto model = build_cylinder_model(2, 1);
  const auto a = assemble_mode(g, model, 1.0, 0), b = assemble_mode(g, model, 7.0, 0);
  CHECK((a.op - b.op).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.matrix(g.K(), g.K()) == 1.0);
  CHECK(a.matrix.row(g.K()).cwiseAbs().sum() == 1.0);
  CHECK_THROWS_AS(assemble_linearized(g, model, 0.0), std::invalid_argument);
  CHECK(assemble_linearized(g, model, 1.0).size() == size_t(g.L() + 1));

  const auto k1 = assemble_mode(g, model, model.lambda_m, 1);
  VectorXd phi(g.K() + 1);
  for (int i = 0; i <= g.K(); ++i) phi(i) = model.kernel_profile(g.radial.r(i));
  CHECK((k1.op * phi).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("kernel scan at and around lambda_m") {
  for (int N = 1; N <= 3; ++N) {
    for (int m = 1; m <= 2; ++m) {
      const auto g = make_cylinder_grid(N);
      const auto model = build_cylinder_model(N, m);
      const auto rep = kernel_scan(g, model, model.lambda_m);
      INFO("N=" << N << " m=" << m);
      CHECK(rep.kernel_count == 1);
      REQUIRE(rep.kernel_mode.has_value());
      CHECK(*rep.kernel_mode == 1);
      CHECK(rep.kernel_profile_error <= 1e-6);
      CHECK(rep.gap > 1e-2);
      CHECK(kernel_scan(g, model, model.lambda_m + 0.1).kernel_count == 0);
      CHECK(kernel_scan(g, model, model.lambda_m - 0.1).kernel_count == 0);
    }
  }
}

TEST_CASE("N=1, m=1 kernel vector is cos(pi r / 2)") {
  const auto g = make_cylinder_grid(1);
  const auto model = build_cylinder_model(1, 1);
  const auto rep = kernel_scan(g, model, model.lambda_m);
  REQUIRE(rep.kernel_count == 1);
  const double c = std::sqrt(2.0 / std::numbers::pi);
  for (int i = 0; i <= g.K(); ++i)
    CHECK(std::abs(rep.kernel_vector(i) - c * std::cos(std::numbers::pi * g.radial.r(i) / 2)) < 1e-8);
}

TEST_CASE("absurd tolerance finds no kernel") {
  const auto g = make_cylinder_grid(1);
  const auto model = build_cylinder_model(1, 1);
  CHECK(kernel_scan(g, model, model.lambda_m, 1e-16).kernel_count == 0);
}

TEST_CASE("transversality") {
  for (int N = 1; N <= 3; ++N) {
    const auto g = make_cylinder_grid(N);
    const auto model = build_cylinder_model(N, 1);
    const auto t = transversality(g, model);
    CHECK(t.analytic < 0);
    // Direct route: -<v, v> from an independently built kernel field.
    const auto v = cylinder_kernel_field(g, model);
    CHECK(std::abs(t.analytic + inner(g, v, v)) < 1e-10);
    CHECK(std::abs(t.finite_difference - t.analytic) <= 1e-6 * std::abs(t.analytic));
  }
  const auto g = make_cylinder_grid(1);
  const auto model = build_cylinder_model(1, 1);
  // Off the crossing there is no kernel to take the derivative along.
  auto shifted = model;
  shifted.lambda_m += 0.5;
  CHECK_THROWS_AS(transversality(g, shifted), std::logic_error);
}

TEST_CASE("crossings match Bessel zeros") {
  const int N = 2;
  const auto g = make_cylinder_grid(N);
  const auto model = build_cylinder_model(N, 2);
  const BesselOrder nu(0.5 * N - 1);
  for (int ell = 1; ell <= 2; ++ell) {
    std::vector<double> expect;
    for (int k = 1; k <= 6; ++k) {
      const double jk = bessel_zero(nu, k);
      const double lam = (model.j_m * model.j_m - jk * jk) / (ell * ell);
      if (lam > 0.5 && lam < 60.0) expect.push_back(lam);
    }
    std::sort(expect.begin(), expect.end());
    const auto found = crossing_scan(g, model, ell, 0.5, 60.0, 400);
    REQUIRE(found.size() == expect.size());
    for (size_t k = 0; k < found.size(); ++k) CHECK(std::abs(found[k] - expect[k]) < 1e-4);
  }
}

TEST_CASE("weighted symmetry of mode blocks") {
  std::mt19937 rng(29);
  for (int N = 1; N <= 3; ++N) {
    const auto g = make_cylinder_grid(N);
    const auto model = build_cylinder_model(N, 1);
    for (int ell : {0, 1, 3}) {
      const auto op = assemble_mode(g, model, model.lambda_m, ell);
      const auto u = random_dirichlet(g, rng, 0), v = random_dirichlet(g, rng, 0);
      CHECK(weighted_asymmetry(g, op, u.coeffs.row(0).transpose(), v.coeffs.row(0).transpose()) <= 1e-8);
    }
  }
}

TEST_CASE("range characterization") {
  std::mt19937 rng(31);
  for (int N = 1; N <= 2; ++N) {
    const auto g = make_cylinder_grid(N);
    const auto model = build_cylinder_model(N, 1);
    const auto v = cylinder_kernel_field(g, model);
    for (int k = 0; k < 5; ++k) {
      auto w = random_dirichlet(g, rng);
      w.coeffs -= (inner(g, w, v) / inner(g, v, v)) * v.coeffs;
      CHECK(range_residual(g, model, model.lambda_m, w) <= 1e-6);
    }
    const double r = range_residual(g, model, model.lambda_m, v);
    CHECK(r > 0.5);
  }
}

TEST_CASE("linearization of G matches the mode blocks") {
  std::mt19937 rng(37);
  const auto g = make_cylinder_grid(2);
  const auto model = build_cylinder_model(2, 1);
  const double lam = 0.8 * model.lambda_m;
  const auto ops = assemble_linearized(g, model, lam);
  for (int k = 0; k < 5; ++k) {
    const auto v = random_dirichlet(g, rng);
    const MatrixXd Lv = g.angular.E * apply_linearized(ops, v).coeffs;
    std::vector<double> err;
    for (double eps : {1e-3, 5e-4}) {
      Field2D up = v, um = v;
      up.coeffs *= eps;
      um.coeffs *= -eps;
      const MatrixXd d = (G_values(g, model, lam, up) - G_values(g, model, lam, um)) / (2 * eps);
      err.push_back(interior_max(d - Lv));
    }
    CHECK(err[0] < 1e-4 * interior_max(Lv));
    // O(eps^2): halving eps quarters the error (allow rounding floor).
    CHECK((err[1] < 0.35 * err[0] || err[1] < 1e-9));
  }
}
