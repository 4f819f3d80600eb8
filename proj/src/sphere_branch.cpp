#include "schiffer/sphere_branch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "schiffer/sphere_spectral.hpp"

namespace schiffer {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Eigenvalues of a reduced collocation matrix sorted by real part, with eigenvectors.
struct RealEigen {
  VectorXd values;
  MatrixXd vectors;
};

RealEigen sorted_eigen(const MatrixXd& A) {
  Eigen::EigenSolver<MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw std::runtime_error("collocation eigensolver failed");
  const int n = static_cast<int>(A.rows());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return es.eigenvalues()(a).real() < es.eigenvalues()(b).real(); });
  RealEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(idx[i]).real();
    out.vectors.col(i) = es.eigenvectors().col(idx[i]).real();
  }
  return out;
}

// Newton on (A - mu) u = 0, c.u = c.c for one eigenpair; the dense eigensolver leaves residuals near 1e-10.
void polish(const MatrixXd& A, double& mu, VectorXd& u) {
  const int n = static_cast<int>(A.rows());
  const VectorXd c = u;
  for (int it = 0; it < 2; ++it) {
    MatrixXd J = MatrixXd::Zero(n + 1, n + 1);
    J.topLeftCorner(n, n) = A - mu * MatrixXd::Identity(n, n);
    J.col(n).head(n) = -u;
    J.row(n).head(n) = c.transpose();
    VectorXd F(n + 1);
    F.head(n) = A * u - mu * u;
    F(n) = c.dot(u) - c.dot(c);
    const VectorXd d = J.partialPivLu().solve(-F);
    u += d.head(n);
    mu += d(n);
  }
}

// -D2 + lambda tan(lambda t) D + diag(q).
MatrixXd radial_operator(const RadialGrid& rg, double lambda, const VectorXd& q) {
  const int K1 = rg.K() + 1;
  MatrixXd A = -rg.D2;
  for (int i = 0; i < K1; ++i) {
    A.row(i) += lambda * std::tan(lambda * rg.r(i)) * rg.D.row(i);
    A(i, i) += q(i);
  }
  return A;
}

// U'' from the equation itself, U'' = lambda tan(lambda t) U' - mu U; differentiating twice on the nodes
// costs about 1e-10 in rounding, which would sit above the Newton tolerance at the trivial branch.
VectorXd second_from_ode(const RadialGrid& rg, double lambda, double mu, const VectorXd& U, const VectorXd& dU) {
  VectorXd out(U.size());
  for (int i = 0; i < U.size(); ++i) out(i) = lambda * std::tan(lambda * rg.r(i)) * dU(i) - mu * U(i);
  return out;
}

}  // namespace

SphereProfile chebyshev_mu(const RadialGrid& rg, double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw std::domain_error("lambda must lie in [0,1)");
  const int K = rg.K();
  const MatrixXd A = radial_operator(rg, lambda, VectorXd::Zero(K + 1));
  // Neumann rows at both ends give u_0, u_K from the interior values.
  Eigen::Matrix2d Bb;
  Bb << rg.D(0, 0), rg.D(0, K), rg.D(K, 0), rg.D(K, K);
  MatrixXd Bi(2, K - 1);
  Bi.row(0) = rg.D.row(0).segment(1, K - 1);
  Bi.row(1) = rg.D.row(K).segment(1, K - 1);
  const MatrixXd T = -Bb.inverse() * Bi;
  MatrixXd Ab(K - 1, 2);
  Ab.col(0) = A.col(0).segment(1, K - 1);
  Ab.col(1) = A.col(K).segment(1, K - 1);
  const MatrixXd Ar = A.block(1, 1, K - 1, K - 1) + Ab * T;
  const RealEigen e = sorted_eigen(Ar);
  // The lowest eigenvalue belongs to the constants.
  if (std::abs(e.values(0)) > 1e-8) throw std::runtime_error("chebyshev_mu: no zero eigenvalue");
  SphereProfile p;
  p.value = e.values(1);
  p.f.resize(K + 1);
  VectorXd ui = e.vectors.col(1);
  polish(Ar, p.value, ui);
  const VectorXd ub = T * ui;
  p.f(0) = ub(0);
  p.f.segment(1, K - 1) = ui;
  p.f(K) = ub(1);
  p.f /= p.f(K);
  return p;
}

SphereProfile chebyshev_sigma(const RadialGrid& rg, int ell, double lambda, double mu) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw std::domain_error("lambda must lie in [0,1)");
  if (ell < 0) throw std::invalid_argument("chebyshev_sigma: ell must be >= 0");
  const int K = rg.K();
  VectorXd q(K + 1);
  for (int i = 0; i <= K; ++i) q(i) = std::pow(ell * lambda / std::cos(lambda * rg.r(i)), 2) - mu;
  const MatrixXd A = radial_operator(rg, lambda, q);
  // u_K = 0; the Neumann row at t = 0 gives u_0.
  const VectorXd t0 = -rg.D.row(0).segment(1, K - 1).transpose() / rg.D(0, 0);
  const MatrixXd Ar = A.block(1, 1, K - 1, K - 1) + A.col(0).segment(1, K - 1) * t0.transpose();
  const RealEigen e = sorted_eigen(Ar);
  SphereProfile p;
  p.value = e.values(0);
  VectorXd ui = e.vectors.col(0);
  polish(Ar, p.value, ui);
  p.f = VectorXd::Zero(K + 1);
  p.f(0) = t0.dot(ui);
  p.f.segment(1, K - 1) = ui;
  p.f /= p.f(0);
  return p;
}

FieldGrid make_sphere_grid(double lambda_star, int ell, int K, int L, int M) {
  if (ell < 1) throw std::invalid_argument("make_sphere_grid: ell must be >= 1");
  return FieldGrid{RadialGrid::chebyshev(K, [lambda_star](double t) { return std::cos(lambda_star * t); }),
                   CosineGrid::make(L, M, ell), 1};
}

SphereModel build_sphere_model(double lambda0, int ell, int K, int L, int M) {
  SphereModel m;
  m.lambda0 = lambda0;
  m.ell = ell > 0 ? ell : ell_zero(lambda0);
  const LambdaStar ls = find_lambda_star(m.ell, lambda0);
  m.lambda_star = ls.lambda_star;
  m.sigma_at_star = ls.sigma_at_star;
  m.sigma_prime_star = ls.sigma_prime;
  m.grid = make_sphere_grid(m.lambda_star, m.ell, K, L, M);
  const auto& rg = m.grid.radial;
  const SphereProfile mu = chebyshev_mu(rg, m.lambda_star);
  m.mu_star = mu.value;
  m.U_star = mu.f;
  m.d2U1 = second_from_ode(rg, m.lambda_star, mu.value, mu.f, rg.D * mu.f)(K);
  const SphereProfile v = chebyshev_sigma(rg, m.ell, m.lambda_star, mu.value);
  m.sigma_cheb = v.value;
  m.V_star = v.f;
  m.dV1 = rg.D.row(K).dot(v.f);
  if (std::abs(m.d2U1) < 1e-6 || std::abs(m.dV1) < 1e-6)
    throw std::runtime_error("build_sphere_model: U''(1) or V'(1) vanishes");
  return m;
}

void check_sphere_admissible(const FieldGrid& g, double lambda, const DomainProfile& h) {
  const double floor = 2.0 * lambda / std::numbers::pi;
  double lo = (1.0 + (g.angular.E * h.coeffs).array()).minCoeff();
  const int n = 8 * (g.M() + 1);
  const double period = 2.0 * std::numbers::pi / g.angular.stride;
  for (int j = 0; j < n; ++j) lo = std::min(lo, 1.0 + h.at(g.angular, period * j / n));
  if (!(lo > floor)) throw std::domain_error("inadmissible h: 1 + h must exceed 2 lambda / pi");
}

LinearCoefficients sphere_coefficients(const FieldGrid& g, double lambda, double mu, const DomainProfile& h) {
  check_sphere_admissible(g, lambda, h);
  const int nx = g.M() + 1, nt = g.K() + 1;
  const VectorXd H = 1.0 + (g.angular.E * h.coeffs).array();
  const VectorXd a = (g.angular.Ex * h.coeffs).array() / H.array();
  const VectorXd b = (g.angular.Exx * h.coeffs).array() / H.array();
  const VectorXd& t = g.radial.r;
  LinearCoefficients c;
  c.c0 = MatrixXd::Constant(nx, nt, mu);
  c.cr.resize(nx, nt);
  c.crr.resize(nx, nt);
  c.cxx.resize(nx, nt);
  c.cxr.resize(nx, nt);
  for (int j = 0; j < nx; ++j) {
    for (int i = 0; i < nt; ++i) {
      const double arg = lambda * t(i) / H(j);
      const double C = std::pow(lambda / std::cos(arg), 2);
      c.crr(j, i) = H(j) * H(j) + C * a(j) * a(j) * t(i) * t(i);
      c.cr(j, i) = -lambda * H(j) * std::tan(arg) + C * b(j) * t(i);
      c.cxx(j, i) = C;
      c.cxr(j, i) = 2.0 * C * a(j) * t(i);
    }
  }
  return c;
}

Field2D apply_sphere_pullback(const FieldGrid& g, double lambda, const DomainProfile& h, const Field2D& u,
                              double mu) {
  Field2D out;
  out.coeffs = g.angular.P * sphere_coefficients(g, lambda, mu, h).apply(FieldValues::of(g, u));
  return out;
}

Field2D sphere_kernel_field(const SphereModel& model) {
  Field2D v = Field2D::zero(model.grid);
  v.coeffs.row(1) = model.V_star.transpose();
  v.neumann = false;
  return v;
}

SphereMap::SphereMap(SphereModel model) : model_(std::move(model)) { kernel_ = sphere_kernel_field(model_); }

Frame SphereMap::frame(double lambda) const {
  const FieldGrid& g = model_.grid;
  const SphereProfile p = chebyshev_mu(g.radial, lambda);
  Field2D base = Field2D::zero(g);
  base.coeffs.row(0) = p.f.transpose();
  Frame f;
  f.lambda = lambda;
  f.mu = p.value;
  f.base = FieldValues::of(g, base);
  const VectorXd dU = g.radial.D * p.f;
  f.base.Wrr = VectorXd::Ones(g.M() + 1) * second_from_ode(g.radial, lambda, p.value, p.f, dU).transpose();
  f.elim.g = g.radial.r.array() * (g.radial.D * p.f).array();
  f.elim.c = 1.0 / g.radial.D.row(g.K()).dot(f.elim.g);
  return f;
}

LinearCoefficients SphereMap::coefficients(const Frame& f, const DomainProfile& h) const {
  return sphere_coefficients(model_.grid, f.lambda, f.mu, h);
}

Field2D sphere_G(const SphereModel& model, double lambda, const Field2D& u) {
  const SphereMap map(model);
  Field2D out;
  out.coeffs = model.grid.angular.P * reduced_values(map, map.frame(lambda), u);
  return out;
}

Field2D apply_sphere_L0(const SphereModel& model, double lambda, const Field2D& v) {
  const double mu = chebyshev_mu(model.grid.radial, lambda).value;
  return apply_sphere_pullback(model.grid, lambda, DomainProfile::constant(model.grid, 0.0), v, mu);
}

double sphere_r_of_s(const SphereModel& model, double s) {
  return -s * model.d2U1 / (model.lambda_star * model.dV1);
}

SphereSolution::SphereSolution(const SphereModel& model, const SphereBranchPoint& p)
    : model_(model), lambda_(p.lambda) {
  const SphereMap map(model_);
  frame_ = map.frame(lambda_);
  mu_ = frame_.mu / (lambda_ * lambda_);
  Field2D u = p.u;
  u.dirichlet = true;
  hu_ = compute_h(model_.grid, frame_.elim, u);
  m1u_.coeffs = u.coeffs - hu_.coeffs * frame_.elim.g.transpose();
}

double SphereSolution::h_tilde(double x, int derivative) const {
  const auto& a = model_.grid.angular;
  const double H = 1.0 + hu_.at(a, x), H1 = hu_.at(a, x, 1), H2 = hu_.at(a, x, 2);
  switch (derivative) {
    case 0: return lambda_ / H;
    case 1: return -lambda_ * H1 / (H * H);
    case 2: return -lambda_ * (H2 / (H * H) - 2.0 * H1 * H1 / (H * H * H));
    default: throw std::invalid_argument("h_tilde: derivative order 0..2");
  }
}

double SphereSolution::w(double t, double x, int dt, int dx) const {
  const FieldGrid& g = model_.grid;
  if (std::abs(t) > 1.0 + 1e-12) throw std::domain_error("w evaluated outside |t| <= 1");
  const double r = std::min(std::abs(t), 1.0);
  const double sign = (t < 0 && dt % 2 == 1) ? -1.0 : 1.0;
  double base = 0.0;
  if (dx == 0) {
    if (dt > 2) throw std::invalid_argument("w: t-derivative order 0..2");
    const MatrixXd& src = dt == 0 ? frame_.base.P : dt == 1 ? frame_.base.Wr : frame_.base.Wrr;
    base = g.radial.interpolate(src.row(0).transpose(), r);
  }
  return sign * (base + evaluate(g, m1u_, r, x, dt, dx));
}

double SphereSolution::boundary_error() const {
  double err = 0.0;
  const double period = 2.0 * std::numbers::pi / model_.ell;
  for (int k = 0; k < 64; ++k) {
    const double x = period * k / 64.0;
    for (double t : {1.0, -1.0}) {
      err = std::max(err, std::abs(w(t, x) - 1.0));
      err = std::max(err, std::abs(w(t, x, 1, 0)));
    }
  }
  return err;
}

SphereOracle sphere_residual_oracle(const SphereSolution& sol, double delta,
                                    const std::function<double(double, double)>& perturb) {
  auto W = [&](double t, double x) { return sol.w(t, x) + (perturb ? perturb(t, x) : 0.0); };
  // sqrt(g) g^{ij} for g_tt = h^2, g_tx = t h h', g_xx = cos^2(h t) + t^2 h'^2.
  auto coef = [&](double t, double x, double& A, double& B, double& C, double& sg) {
    const double h = sol.h_tilde(x), hp = sol.h_tilde(x, 1), c = std::cos(h * t);
    A = (c * c + t * t * hp * hp) / (h * c);
    B = -t * hp / c;
    C = h / c;
    sg = h * c;
  };
  const double d = delta, e = 0.5 * delta;
  auto flux_t = [&](double t, double x) {
    double A, B, C, sg;
    coef(t, x, A, B, C, sg);
    return A * (W(t + e, x) - W(t - e, x)) / d + B * (W(t, x + e) - W(t, x - e)) / d;
  };
  auto flux_x = [&](double t, double x) {
    double A, B, C, sg;
    coef(t, x, A, B, C, sg);
    return B * (W(t + e, x) - W(t - e, x)) / d + C * (W(t, x + e) - W(t, x - e)) / d;
  };
  SphereOracle out;
  const double period = 2.0 * std::numbers::pi / sol.model().ell;
  for (int b = 0; b < 12; ++b) {
    const double x = (b + 0.3) * period / 12.0;
    for (int a = 0; a < 9; ++a) {
      const double t = 0.05 + 0.1 * a;
      double A, B, C, sg;
      coef(t, x, A, B, C, sg);
      const double lap = ((flux_t(t + e, x) - flux_t(t - e, x)) / d + (flux_x(t, x + e) - flux_x(t, x - e)) / d) / sg;
      out.interior = std::max(out.interior, std::abs(lap + sol.mu() * W(t, x)));
    }
    for (double t : {1.0, -1.0}) {
      out.boundary = std::max(out.boundary, std::abs(sol.w(t, x) - 1.0));
      out.boundary = std::max(out.boundary, std::abs(sol.w(t, x, 1, 0)));
    }
  }
  return out;
}

namespace {

SphereBranchPoint to_sphere_point(const SphereMap& map, const NewtonResult& r, double kappa) {
  const SphereModel& m = map.model();
  SphereBranchPoint p;
  p.r = r.amplitude;
  p.s = r.amplitude / kappa;
  p.lambda = p.xi = r.lambda;
  p.u = r.u;
  p.u.dirichlet = true;
  const Frame f = map.frame(r.lambda);
  p.mu_lambda = f.mu;
  p.mu = f.mu / (r.lambda * r.lambda);
  p.h_u = compute_h(m.grid, f.elim, p.u);
  p.residual_G = r.residual;
  p.constraint_error = r.constraint_error;
  p.newton_iters = r.iterations;
  p.h_min = 1e300;
  p.h_max = -1e300;
  for (int k = 0; k < 512; ++k) {
    const double x = 2.0 * std::numbers::pi * k / 512.0;
    const double ht = r.lambda / (1.0 + p.h_u.at(m.grid.angular, x));
    p.h_min = std::min(p.h_min, ht);
    p.h_max = std::max(p.h_max, ht);
    p.E = std::max(p.E, std::abs(ht - p.xi - p.s * std::cos(m.ell * x)));
  }
  const SphereSolution sol(m, p);
  p.boundary_error = sol.boundary_error();
  p.oracle_interior = sphere_residual_oracle(sol).interior;
  return p;
}

}  // namespace

SphereBranch sphere_trace(const SphereModel& model, double s_max, double ds, double tol) {
  if (!(ds > 0.0) || s_max < ds) throw std::invalid_argument("sphere_trace: need ds > 0 and s_max >= ds");
  const SphereMap map(model);
  const double kappa = sphere_r_of_s(model, 1.0);
  NewtonOptions opt;
  opt.tol = tol;
  const TraceResult t = trace_amplitudes(map, s_max * std::abs(kappa), ds * std::abs(kappa), opt);
  SphereBranch b{{}, model, t.truncated, t.message};
  for (const auto& r : t.points) b.points.push_back(to_sphere_point(map, r, kappa));
  std::sort(b.points.begin(), b.points.end(), [](const auto& a, const auto& c) { return a.s < c.s; });
  return b;
}

SphereKernelScan sphere_kernel_scan(const SphereModel& model, int kmax, double tol) {
  const RadialGrid& rg = model.grid.radial;
  const int K = rg.K();
  const double lam = model.lambda_star;
  const double mu = chebyshev_mu(rg, lam).value;
  const VectorXd t0 = -rg.D.row(0).segment(1, K - 1).transpose() / rg.D(0, 0);
  SphereKernelScan out;
  for (int k = 0; k <= kmax; ++k) {
    VectorXd q(K + 1);
    for (int i = 0; i <= K; ++i) q(i) = std::pow(k * lam / std::cos(lam * rg.r(i)), 2) - mu;
    const MatrixXd A = radial_operator(rg, lam, q);
    const MatrixXd Ar = A.block(1, 1, K - 1, K - 1) + A.col(0).segment(1, K - 1) * t0.transpose();
    const VectorXd sv = Eigen::JacobiSVD<MatrixXd>(Ar).singularValues();
    out.min_singular.push_back(sv(sv.size() - 1));
  }
  out.gap = 1e300;
  for (int k = 0; k <= kmax; ++k) {
    if (out.min_singular[k] < tol) {
      ++out.kernel_count;
      out.kernel_mode = k;
    }
  }
  for (int k = 0; k <= kmax; ++k)
    if (k != out.kernel_mode) out.gap = std::min(out.gap, out.min_singular[k]);
  return out;
}

SphereTransversality sphere_transversality(const SphereModel& model) {
  const FieldGrid& g = model.grid;
  const Field2D v = sphere_kernel_field(model);
  const double d = 1e-5;
  Field2D dL = apply_sphere_L0(model, model.lambda_star + d, v);
  dL.coeffs = (dL.coeffs - apply_sphere_L0(model, model.lambda_star - d, v).coeffs) / (2.0 * d);
  SphereTransversality out;
  out.norm = inner(g, v, v);
  out.derivative_route = inner(g, v, dL);
  out.spectral_route = model.sigma_prime_star * out.norm;
  return out;
}

}  // namespace schiffer
