#include "schiffer/sphere_spectral.hpp"

#include <lapacke.h>

#include <boost/math/tools/roots.hpp>
#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <string>

namespace schiffer {

using Eigen::VectorXd;

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw std::domain_error("lambda must lie in [0,1)");
}

// F(tau) = sin tau + tau / cos tau, so that rho = -F'.
double F(double tau) { return std::sin(tau) + tau / std::cos(tau); }

// Selected eigenpair (0-based index k) of the symmetric tridiagonal (d, e).
double tridiag_eig(VectorXd d, VectorXd e, int k, VectorXd& vec) {
  const lapack_int n = static_cast<lapack_int>(d.size());
  e.conservativeResize(n);
  e(n - 1) = 0.0;
  lapack_int found = 0;
  double w[1];
  vec.resize(n);
  lapack_int isuppz[2];
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, k + 1,
                                         k + 1, 2 * DBL_MIN, &found, w, vec.data(), n, isuppz);
  if (info != 0 || found != 1) throw std::runtime_error("dstevr failed (info " + std::to_string(info) + ")");
  return w[0];
}

struct GridSolve {
  double value = 0.0;
  double hf = 0.0;  // Hellmann-Feynman derivative on this grid
  VectorXd t, f;
};

// Lumped finite-element / ghost-node discretization of -(p u')' = mu p u, p = cos(lambda t).
struct Discretization {
  int n;
  double h;
  VectorXd t, w, p_half, mass;
  Discretization(double lambda, int n_) : n(n_), h(1.0 / n_) {
    t.resize(n + 1);
    w.resize(n + 1);
    mass.resize(n + 1);
    p_half.resize(n);
    for (int i = 0; i <= n; ++i) {
      t(i) = i * h;
      w(i) = (i == 0 || i == n) ? 0.5 * h : h;
      mass(i) = w(i) * std::cos(lambda * t(i));
    }
    for (int i = 0; i < n; ++i) p_half(i) = std::cos(lambda * (t(i) + 0.5 * h));
  }
  // Symmetrized operator on nodes 0..last.
  void assemble(int last, VectorXd& d, VectorXd& e) const {
    d.resize(last + 1);
    e.resize(last);
    for (int i = 0; i <= last; ++i) {
      const double left = i > 0 ? p_half(i - 1) : 0.0;
      const double right = i < n ? p_half(i) : 0.0;
      d(i) = (left + right) / h / mass(i);
      if (i < last) e(i) = -p_half(i) / h / std::sqrt(mass(i) * mass(i + 1));
    }
  }
  double quad(const VectorXd& g) const { return w.dot(g); }
};

// Rayleigh quotient written with differences, sum c_i (u_{i+1} - u_i)^2 + sum q_i m_i u_i^2 over sum m_i u_i^2.
// The assembled tridiagonal has entries of size n^2 and loses that much absolute accuracy; this form does not.
double difference_rq(const Discretization& z, const VectorXd& u, const VectorXd& qm) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < z.n; ++i) {
    const double du = u(i + 1) - u(i);
    num += z.p_half(i) / z.h * du * du;
  }
  for (int i = 0; i <= z.n; ++i) {
    num += qm(i) * u(i) * u(i);
    den += z.mass(i) * u(i) * u(i);
  }
  return num / den;
}

GridSolve mu_on_grid(double lambda, int n) {
  const Discretization z(lambda, n);
  VectorXd d, e, y;
  z.assemble(n, d, e);
  GridSolve s;
  // The lowest mode must be the constant one (mass-scaled); only then is index 1 the first positive eigenvalue.
  VectorXd y0;
  tridiag_eig(d, e, 0, y0);
  const VectorXd c0 = y0.array() / z.mass.array().sqrt();
  const double var = (c0.array() - c0.mean()).square().mean() / c0.array().square().mean();
  if (!(var < 1e-12)) throw std::runtime_error("solve_mu: lowest mode is not constant");
  tridiag_eig(d, e, 1, y);
  s.t = z.t;
  s.f = y.array() / z.mass.array().sqrt();
  s.f /= s.f(n);
  s.value = difference_rq(z, s.f, VectorXd::Zero(n + 1));
  VectorXd cosw(n + 1), rw(n + 1);
  for (int i = 0; i <= n; ++i) {
    cosw(i) = std::cos(lambda * z.t(i)) * s.f(i) * s.f(i);
    rw(i) = rho(lambda * z.t(i)) * s.f(i) * s.f(i);
  }
  // The boundary term F(lambda) U(1)^2 / 2 survives the integration by parts since U(1) = 1.
  s.hf = (0.5 * F(lambda) * s.f(n) * s.f(n) + 0.5 * lambda * z.quad(rw)) / z.quad(cosw);
  return s;
}

GridSolve sigma_on_grid(int ell, double lambda, int n, const GridSolve& mu) {
  const Discretization z(lambda, n);
  VectorXd d, e, y;
  z.assemble(n - 1, d, e);
  const double l2 = double(ell) * ell * lambda * lambda;
  VectorXd q(n);
  for (int i = 0; i < n; ++i) {
    q(i) = l2 / std::pow(std::cos(lambda * z.t(i)), 2);
    d(i) += q(i);
  }
  GridSolve s;
  tridiag_eig(d, e, 0, y);
  s.t = z.t;
  s.f = VectorXd::Zero(n + 1);
  s.f.head(n) = y.array() / z.mass.head(n).array().sqrt();
  s.f /= s.f(0);
  VectorXd qm = VectorXd::Zero(n + 1);
  for (int i = 0; i < n; ++i) qm(i) = q(i) * z.mass(i);
  s.value = difference_rq(z, s.f, qm) - mu.value;
  VectorXd a(n + 1), b(n + 1), c(n + 1);
  const double L2 = double(ell) * ell;
  for (int i = 0; i <= n; ++i) {
    const double tt = z.t(i), co = std::cos(lambda * tt), si = std::sin(lambda * tt), v2 = s.f(i) * s.f(i);
    a(i) = co * v2;
    b(i) = rho(lambda * tt) * v2;
    c(i) = L2 * (2 * lambda / co + 2 * lambda * lambda * tt * si / (co * co)) * v2;
  }
  const double nrm = z.quad(a);
  s.hf = 0.5 * lambda * z.quad(b) / nrm - mu.hf + z.quad(c) / nrm;
  return s;
}

double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

EigenCurveSample combine(double lambda, int ell, const GridSolve& c, const GridSolve& f) {
  EigenCurveSample s;
  s.lambda = lambda;
  s.ell = ell;
  s.coarse = c.value;
  s.fine = f.value;
  s.value = richardson(c.value, f.value);
  s.derivative = richardson(c.hf, f.hf);
  s.t = f.t;
  s.f = f.f;
  return s;
}

}  // namespace

double rho(double tau) { return -(std::cos(tau) + (1.0 + tau * std::tan(tau)) / std::cos(tau)); }

EigenCurveSample solve_mu(double lambda, int n) {
  check_lambda(lambda);
  if (n < 8) throw std::invalid_argument("solve_mu: grid too small");
  return combine(lambda, -1, mu_on_grid(lambda, n), mu_on_grid(lambda, 2 * n));
}

EigenCurveSample solve_sigma(int ell, double lambda, int n) {
  check_lambda(lambda);
  if (ell < 0) throw std::invalid_argument("solve_sigma: ell must be >= 0");
  if (n < 8) throw std::invalid_argument("solve_sigma: grid too small");
  const GridSolve mc = mu_on_grid(lambda, n), mf = mu_on_grid(lambda, 2 * n);
  return combine(lambda, ell, sigma_on_grid(ell, lambda, n, mc), sigma_on_grid(ell, lambda, 2 * n, mf));
}

double mu_derivative(double lambda, int n) { return solve_mu(lambda, n).derivative; }

double sigma_derivative(int ell, double lambda, int n) { return solve_sigma(ell, lambda, n).derivative; }

RhoReport rho_checks(int mesh) {
  RhoReport r;
  auto q = [](double tau) { return rho(tau) / std::cos(tau); };
  auto dq = [](double tau) {
    const double c = std::cos(tau), tn = std::tan(tau);
    return -(3 * tn + 2 * tau * tn * tn + tau / (c * c)) / (c * c);
  };
  r.rho0_over_cos0 = q(0.0);
  r.lower = q(1.0);
  r.decreasing = true;
  r.max_slope = -1e300;
  for (int k = 1; k <= mesh; ++k) {
    const double tau = double(k) / mesh;
    const double s = dq(tau);
    r.max_slope = std::max(r.max_slope, s);
    if (!(s < 0.0) || !(q(tau) < q(tau - 1.0 / mesh))) r.decreasing = false;
  }
  r.bounds_hold = true;
  const int pm = 100;
  for (int a = 0; a <= pm; ++a) {
    for (int b = 0; b <= pm; ++b) {
      const double v = q(double(a) / pm * double(b) / pm);
      if (v > -2.0 + 1e-15 || v < r.lower - 1e-15) r.bounds_hold = false;
    }
  }
  r.spot_value = rho(0.5);
  const double h = 1e-5;
  r.spot_fd = -(F(0.5 + h) - F(0.5 - h)) / (2 * h);
  return r;
}

LambdaStar find_lambda_star(int ell, double lambda0, int n) {
  if (!(lambda0 > 0.0 && lambda0 < 1.0)) throw std::domain_error("lambda0 must lie in (0,1)");
  LambdaStar out;
  out.ell = ell;
  out.lambda0 = lambda0;
  auto sigma = [&](double lam) { return solve_sigma(ell, lam, n).value; };
  double prev = solve_sigma(ell, 0.0, n).value;
  for (int k = 1; k <= 50; ++k) {
    const double v = sigma(lambda0 * k / 50.0);
    if ((v > 0) != (prev > 0)) ++out.scan_sign_changes;
    prev = v;
  }
  const double top = sigma(lambda0);
  if (!(top > 0.0))
    throw std::runtime_error("no sign change of sigma_" + std::to_string(ell) + " on (0, lambda0)");
  boost::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15; };
  const auto br = boost::math::tools::toms748_solve(sigma, 1e-6, lambda0, sigma(1e-6), top, tol, iters);
  const double a = sigma(br.first), b = sigma(br.second);
  out.lambda_star = std::abs(a) <= std::abs(b) ? br.first : br.second;
  const auto s = solve_sigma(ell, out.lambda_star, n);
  out.sigma_at_star = s.value;
  out.sigma_prime = s.derivative;
  return out;
}

int ell_zero(double lambda0, int n, int cap) {
  if (!(lambda0 > 0.0 && lambda0 < 1.0)) throw std::domain_error("lambda0 must lie in (0,1)");
  for (int ell = 1; ell <= cap; ++ell) {
    if (!(solve_sigma(ell, lambda0, n).value > 0.0)) continue;
    bool ok = true;
    for (int k = 1; k <= 20 && ok; ++k) ok = sigma_derivative(ell, lambda0 * k / 20.0, n) > 0.0;
    if (ok) return ell;
  }
  throw std::runtime_error("ell_zero: no admissible ell up to the cap");
}

double estimate_C_hat(const std::vector<int>& ells, const std::vector<double>& lambdas, int n) {
  double c = -1e300;
  for (int ell : ells)
    for (double lam : lambdas) c = std::max(c, 2.0 * ell * ell - sigma_derivative(ell, lam, n) / lam);
  return c;
}

FirstEstimate first_estimates(int ell, double lambda, int n) {
  const double s = solve_sigma(ell, lambda, n).value;
  const double s0 = solve_sigma(0, lambda, n).value;
  const double mu = solve_mu(lambda, n).value;
  const double l2 = double(ell) * ell * lambda * lambda;
  return {s - (s0 - mu + l2), s - (s0 + l2)};
}

}  // namespace schiffer
