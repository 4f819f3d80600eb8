#include "schiffer/branch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace schiffer {

using Eigen::MatrixXd;
using Eigen::VectorXd;

CylinderMap::CylinderMap(FieldGrid grid, CylinderModel model) : grid_(std::move(grid)), model_(model) {
  kernel_ = cylinder_kernel_field(grid_, model_);
  base_ = cylinder_base_values(grid_, model_);
  elim_ = cylinder_elimination(grid_, model_);
}

Frame CylinderMap::frame(double lambda) const {
  return Frame{lambda, model_.j_m * model_.j_m, base_, elim_};
}

LinearCoefficients CylinderMap::coefficients(const Frame& f, const DomainProfile& h) const {
  return cylinder_coefficients(grid_, f.lambda, f.mu, h);
}

namespace {

DomainProfile h_of(const FieldGrid& g, const Elimination& e, const Field2D& u) {
  DomainProfile h;
  h.coeffs = e.c * (u.coeffs * g.radial.D.row(g.K()).transpose());
  return h;
}

Field2D eliminate(const Elimination& e, const Field2D& u, const DomainProfile& h) {
  Field2D w;
  w.coeffs = u.coeffs - h.coeffs * e.g.transpose();
  return w;
}

MatrixXd coefficient_residual(const ReducedMap& map, const Frame& f, const Field2D& u) {
  return map.grid().angular.P * reduced_values(map, f, u);
}

}  // namespace

MatrixXd reduced_values(const ReducedMap& map, const Frame& f, const Field2D& u) {
  const FieldGrid& g = map.grid();
  check_grid(g, u);
  const DomainProfile h = h_of(g, f.elim, u);
  FieldValues vals = FieldValues::of(g, eliminate(f.elim, u, h));
  vals += f.base;
  return map.coefficients(f, h).apply(vals);
}

VectorXd pack(const Field2D& u, double lambda) {
  const int L1 = u.L() + 1, K = u.K();
  VectorXd z(L1 * K + 1);
  for (int k = 0; k < L1; ++k) z.segment(k * K, K) = u.coeffs.row(k).head(K).transpose();
  z(L1 * K) = lambda;
  return z;
}

void unpack(const FieldGrid& g, const VectorXd& z, Field2D& u, double& lambda) {
  const int L1 = g.L() + 1, K = g.K();
  u = Field2D::zero(g);
  for (int k = 0; k < L1; ++k) u.coeffs.row(k).head(K) = z.segment(k * K, K).transpose();
  u.dirichlet = true;
  u.neumann = false;
  lambda = z(L1 * K);
}

namespace {

// Residual vector plus the interior max norm of G.
VectorXd residual_and_norm(const ReducedMap& map, double amp, double lambda, const Field2D& u, double* gnorm) {
  const FieldGrid& g = map.grid();
  const int L1 = g.L() + 1, K = g.K();
  const Frame f = map.frame(lambda);
  const MatrixXd Fc = coefficient_residual(map, f, u);
  VectorXd F(L1 * K + 1);
  for (int k = 0; k < L1; ++k) {
    F(k * K) = g.radial.D.row(0).dot(u.coeffs.row(k));
    for (int i = 1; i < K; ++i) F(k * K + i) = Fc(k, i);
  }
  const Field2D& v = map.kernel();
  const double vv = inner(g, v, v);
  F(L1 * K) = inner(g, u, v) / vv - amp;
  if (gnorm) *gnorm = interior_max(g.angular.E * Fc);
  return F;
}

}  // namespace

VectorXd newton_residual(const ReducedMap& map, double amp, double lambda, const Field2D& u) {
  return residual_and_norm(map, amp, lambda, u, nullptr);
}

MatrixXd newton_jacobian(const ReducedMap& map, double /*amp*/, double lambda, const Field2D& u,
                         const NewtonOptions& opt) {
  const FieldGrid& g = map.grid();
  const int L1 = g.L() + 1, K = g.K(), K1 = K + 1;
  const int nf = L1 * K1, n = L1 * K + 1;
  const auto& A = g.angular;
  const auto& D = g.radial.D;
  const auto& D2 = g.radial.D2;

  const Frame f = map.frame(lambda);
  const DomainProfile h = h_of(g, f.elim, u);
  FieldValues vals = FieldValues::of(g, eliminate(f.elim, u, h));
  vals += f.base;
  const LinearCoefficients c = map.coefficients(f, h);

  // d(P R)/dw in full (mode, node) indexing.
  MatrixXd Jw = MatrixXd::Zero(nf, nf);
  for (int i = 0; i < K1; ++i) {
    const MatrixXd Qd = A.P * (c.c0.col(i).asDiagonal() * A.E + c.cxx.col(i).asDiagonal() * A.Exx);
    const MatrixXd Qr = A.P * (c.cr.col(i).asDiagonal() * A.E + c.cxr.col(i).asDiagonal() * A.Ex);
    const MatrixXd Qrr = A.P * (c.crr.col(i).asDiagonal() * A.E);
    for (int m = 0; m < K1; ++m) {
      MatrixXd blk = D(i, m) * Qr + D2(i, m) * Qrr;
      if (m == i) blk += Qd;
      for (int kp = 0; kp < L1; ++kp)
        for (int k = 0; k < L1; ++k) Jw(kp * K1 + i, k * K1 + m) = blk(kp, k);
    }
  }

  // d(P R)/dh by central differences, w frozen.
  MatrixXd Jh(nf, L1);
  for (int l = 0; l < L1; ++l) {
    DomainProfile hp = h, hm = h;
    hp.coeffs(l) += opt.h_step;
    hm.coeffs(l) -= opt.h_step;
    const MatrixXd Fp = A.P * map.coefficients(f, hp).apply(vals);
    const MatrixXd Fm = A.P * map.coefficients(f, hm).apply(vals);
    const MatrixXd d = (Fp - Fm) / (2.0 * opt.h_step);
    for (int kp = 0; kp < L1; ++kp) Jh.col(l).segment(kp * K1, K1) = d.row(kp).transpose();
  }

  // Chain through w = u - g h_u, h_u = c D_K u.
  MatrixXd q = Jh;
  for (int k = 0; k < L1; ++k)
    for (int i = 0; i < K1; ++i) q.col(k) -= f.elim.g(i) * Jw.col(k * K1 + i);

  const double dl = opt.lambda_step * std::max(1.0, std::abs(lambda));
  const MatrixXd dFl = (coefficient_residual(map, map.frame(lambda + dl), u) -
                        coefficient_residual(map, map.frame(lambda - dl), u)) /
                       (2.0 * dl);

  MatrixXd J = MatrixXd::Zero(n, n);
  for (int kp = 0; kp < L1; ++kp) {
    for (int m = 0; m < K; ++m) J(kp * K, kp * K + m) = D(0, m);
    for (int i = 1; i < K; ++i) {
      const int row = kp * K1 + i;
      for (int k = 0; k < L1; ++k)
        for (int m = 0; m < K; ++m)
          J(kp * K + i, k * K + m) = Jw(row, k * K1 + m) + f.elim.c * D(K, m) * q(row, k);
      J(kp * K + i, n - 1) = dFl(kp, i);
    }
  }
  const Field2D& v = map.kernel();
  const double vv = inner(g, v, v);
  for (int k = 0; k < L1; ++k)
    for (int m = 0; m < K; ++m) J(n - 1, k * K + m) = A.norm(k) * g.radial.w(m) * v.coeffs(k, m) / vv;
  return J;
}

NewtonResult newton_solve(const ReducedMap& map, double amp, double lambda0, const Field2D& u0,
                          const NewtonOptions& opt) {
  const FieldGrid& g = map.grid();
  NewtonResult res;
  res.amplitude = amp;
  Field2D u = u0;
  u.coeffs.col(g.K()).setZero();
  u.dirichlet = true;
  double lambda = lambda0;
  double first = -1.0;
  try {
    for (int it = 1; it <= opt.maxit; ++it) {
      double gn = 0.0;
      const VectorXd F = residual_and_norm(map, amp, lambda, u, &gn);
      res.iterations = it;
      res.residual = gn;
      res.constraint_error = std::abs(F(F.size() - 1));
      if (!std::isfinite(gn)) throw std::runtime_error("non-finite residual");
      if (first < 0.0) first = gn;
      if (gn <= opt.tol && res.constraint_error <= 1e-12) {
        res.converged = true;
        break;
      }
      if (gn > 1e4 * std::max(first, 1e-8)) throw std::runtime_error("Newton diverging");
      const MatrixXd J = newton_jacobian(map, amp, lambda, u, opt);
      const VectorXd dz = J.partialPivLu().solve(-F);
      VectorXd z = pack(u, lambda) + dz;
      unpack(g, z, u, lambda);
    }
    if (!res.converged) res.message = "no convergence in " + std::to_string(opt.maxit) + " iterations";
  } catch (const std::exception& e) {
    res.converged = false;
    res.message = e.what();
  }
  res.lambda = lambda;
  res.u = u;
  return res;
}

TraceResult trace_amplitudes(const ReducedMap& map, double amax, double ds, const NewtonOptions& opt) {
  if (!(ds > 0.0) || amax < ds) throw std::invalid_argument("trace: need ds > 0 and s_max >= ds");
  const FieldGrid& g = map.grid();
  const Field2D& v = map.kernel();
  TraceResult out;
  const NewtonResult origin = newton_solve(map, 0.0, map.bifurcation_lambda(), Field2D::zero(g), opt);
  if (!origin.converged) {
    out.truncated = true;
    out.message = "trivial point failed: " + origin.message;
    return out;
  }
  const int steps = static_cast<int>(std::floor(amax / ds + 1e-9));
  std::vector<NewtonResult> neg, pos;
  for (int dir : {1, -1}) {
    auto& side = dir > 0 ? pos : neg;
    NewtonResult cur = origin;
    for (int k = 1; k <= steps; ++k) {
      const double target = dir * k * ds;
      int halvings = 0, guard = 0;
      bool ok = true;
      while (std::abs(cur.amplitude - target) > 1e-14 && ok) {
        const double next = cur.amplitude + (target - cur.amplitude) / std::pow(2.0, halvings);
        Field2D u0;
        u0.coeffs = cur.u.coeffs + (next - cur.amplitude) * v.coeffs;
        NewtonResult r = newton_solve(map, next, cur.lambda, u0, opt);
        if (r.converged) {
          cur = r;
          halvings = 0;
        } else if (++halvings > 5 || ++guard > 64) {
          ok = false;
          out.truncated = true;
          out.message = "Newton failed near s=" + std::to_string(next) + ": " + r.message;
        }
      }
      if (!ok) break;
      side.push_back(cur);
    }
  }
  for (auto it = neg.rbegin(); it != neg.rend(); ++it) out.points.push_back(*it);
  out.points.push_back(origin);
  for (const auto& p : pos) out.points.push_back(p);
  return out;
}

Prediction predict(const CylinderModel& model, const FieldGrid& g, double s) {
  Field2D u = cylinder_kernel_field(g, model);
  u.coeffs *= s;
  u.dirichlet = true;
  return {model.lambda_m, u};
}

namespace {

BranchPoint to_point(const CylinderMap& map, const NewtonResult& r) {
  const FieldGrid& g = map.grid();
  const CylinderModel& model = map.model();
  BranchPoint p;
  p.s = r.amplitude;
  p.lambda = r.lambda;
  p.u = r.u;
  p.u.dirichlet = true;
  p.mu = model.j_m * model.j_m / r.lambda;
  DomainProfile h = compute_h_u(g, model, p.u);
  h.coeffs(0) += 1.0;
  h.coeffs /= std::sqrt(r.lambda);
  p.h_phys = h;
  p.residual_G = r.residual;
  p.constraint_error = r.constraint_error;
  p.newton_iters = r.iterations;
  const CylinderSolution sol(g, model, p);
  p.boundary_error = sol.boundary_error();
  p.residual_oracle = cylinder_oracle_residual(sol, g.N);
  return p;
}

}  // namespace

BranchPoint correct(const CylinderModel& model, const FieldGrid& g, double s, double lambda0, const Field2D& u0,
                    double tol, int maxit) {
  const CylinderMap map(g, model);
  NewtonOptions opt;
  opt.tol = tol;
  opt.maxit = maxit;
  const NewtonResult r = newton_solve(map, s, lambda0, u0, opt);
  if (!r.converged) throw std::runtime_error("correct: Newton failed at s=" + std::to_string(s) + ": " + r.message);
  return to_point(map, r);
}

Branch trace(const CylinderModel& model, const FieldGrid& g, double s_max, double ds, double tol) {
  const CylinderMap map(g, model);
  NewtonOptions opt;
  opt.tol = tol;
  const TraceResult t = trace_amplitudes(map, s_max, ds, opt);
  Branch b{{}, model, g, t.truncated, t.message};
  for (const auto& r : t.points) b.points.push_back(to_point(map, r));
  return b;
}

CylinderSolution::CylinderSolution(const FieldGrid& g, const CylinderModel& model, const BranchPoint& p)
    : g_(g), model_(model), lambda_(p.lambda), mu_(p.mu) {
  const Elimination e = cylinder_elimination(g, model);
  Field2D u = p.u;
  u.dirichlet = true;
  hphi_ = compute_h(g, e, u);
  w_ = eliminate(e, u, hphi_);
}

double CylinderSolution::h(double x, int derivative) const {
  const double v = hphi_.at(g_.angular, x, derivative);
  return (derivative == 0 ? 1.0 + v : v) / std::sqrt(lambda_);
}

double CylinderSolution::u_tilde(double r, double x, int dr, int dx) const {
  double base = 0.0;
  if (dx == 0) base = dr == 0 ? model_.U(r) : dr == 1 ? model_.dU(r) : model_.d2U(r);
  return base + evaluate(g_, w_, r, x, dr, dx);
}

double CylinderSolution::w(double tau, double x) const {
  const double r = tau * h(x);
  if (tau < 0.0 || r > 1.0 + 1e-12) throw std::domain_error("w_s evaluated outside the domain");
  return u_tilde(std::min(r, 1.0), x);
}

double CylinderSolution::boundary_error() const {
  double err = 0.0;
  for (int k = 0; k < 64; ++k) {
    const double x = std::numbers::pi * k / 32.0;
    err = std::max(err, std::abs(u_tilde(1.0, x) - 1.0));
    err = std::max(err, std::abs(u_tilde(1.0, x, 1, 0)));
  }
  return err;
}

MatrixXd CylinderSolution::sample(const VectorXd& xs, const VectorXd& rs) const {
  MatrixXd Ax(xs.size(), g_.L() + 1), Ar(rs.size(), g_.K() + 1);
  for (int j = 0; j < xs.size(); ++j) Ax.row(j) = g_.angular.row(xs(j));
  for (int i = 0; i < rs.size(); ++i) Ar.row(i) = g_.radial.interpolation_row(rs(i));
  MatrixXd out = Ax * w_.coeffs * Ar.transpose();
  for (int i = 0; i < rs.size(); ++i) out.col(i).array() += model_.U(rs(i));
  return out;
}

double cylinder_oracle_residual(const CylinderSolution& sol, int N) {
  const double d = 2e-3;
  auto d1 = [&](auto f, double z) { return (-f(z + 2 * d) + 8 * f(z + d) - 8 * f(z - d) + f(z - 2 * d)) / (12 * d); };
  auto d2 = [&](auto f, double z) {
    return (-f(z + 2 * d) + 16 * f(z + d) - 30 * f(z) + 16 * f(z - d) - f(z - 2 * d)) / (12 * d * d);
  };
  double worst = 0.0;
  for (int b = 0; b < 12; ++b) {
    const double x = 0.1 + b * std::numbers::pi / 12.0;
    for (int a = 0; a < 8; ++a) {
      const double f = 0.1 + a * 0.1;
      const double tau = f / sol.h(x);
      auto along_t = [&](double t) { return sol.w(t, x); };
      auto along_x = [&](double y) { return sol.w(tau, y); };
      double lap = d2(along_t, tau) + d2(along_x, x);
      if (N > 1) lap += (N - 1) / tau * d1(along_t, tau);
      worst = std::max(worst, std::abs(lap + sol.mu() * sol.w(tau, x)));
    }
  }
  return worst;
}

NodalCount count_nodal_domains(const CylinderSolution& sol, int N, int nr, int nx) {
  const bool full_line = (N == 1);
  VectorXd rho(nr), rabs(nr), xs(nx);
  for (int a = 0; a < nr; ++a) {
    rho(a) = full_line ? -1.0 + (a + 0.5) * 2.0 / nr : (a + 0.5) / nr;
    rabs(a) = std::abs(rho(a));
  }
  for (int b = 0; b < nx; ++b) xs(b) = 2.0 * std::numbers::pi * b / nx;
  const MatrixXd vals = sol.sample(xs, rabs);

  std::vector<int> label(nr * nx, -1);
  auto sgn = [&](int b, int a) { return vals(b, a) >= 0.0; };
  NodalCount out;
  for (int b0 = 0; b0 < nx; ++b0) {
    for (int a0 = 0; a0 < nr; ++a0) {
      if (label[b0 * nr + a0] >= 0) continue;
      const bool s0 = sgn(b0, a0);
      std::queue<std::pair<int, int>> q;
      q.push({b0, a0});
      label[b0 * nr + a0] = out.domains;
      while (!q.empty()) {
        auto [b, a] = q.front();
        q.pop();
        const int nb[4][2] = {{(b + 1) % nx, a}, {(b + nx - 1) % nx, a}, {b, a + 1}, {b, a - 1}};
        for (auto& e : nb) {
          if (e[1] < 0 || e[1] >= nr) continue;
          int& l = label[e[0] * nr + e[1]];
          if (l < 0 && sgn(e[0], e[1]) == s0) {
            l = out.domains;
            q.push({e[0], e[1]});
          }
        }
      }
      ++out.domains;
    }
  }

  VectorXd rr(nr), x0(1);
  for (int a = 0; a < nr; ++a) rr(a) = (a + 0.5) / nr;
  x0(0) = 0.0;
  const MatrixXd slice = sol.sample(x0, rr);
  for (int a = 1; a < nr; ++a)
    if ((slice(0, a) >= 0.0) != (slice(0, a - 1) >= 0.0)) ++out.slice_sign_changes;
  return out;
}

std::vector<ExpansionRow> expansion_report(const Branch& branch) {
  const CylinderModel& m = branch.model;
  const FieldGrid& g = branch.grid;
  double w_scale = 0.0;
  for (int i = 0; i <= g.K(); ++i) {
    const double r = g.radial.r(i);
    w_scale = std::max(w_scale, std::abs(m.phi1(r) - m.gamma * m.g(r)));
  }
  std::vector<ExpansionRow> rows;
  for (const auto& p : branch.points) {
    ExpansionRow row;
    row.s = p.s;
    row.lambda = p.lambda;
    row.w_scale = w_scale;
    const double base = 1.0 / std::sqrt(p.lambda);  // kappa sqrt(mu_s)
    for (int k = 0; k < 512; ++k) {
      const double x = 2.0 * std::numbers::pi * k / 512.0;
      row.E_h = std::max(row.E_h, std::abs(p.h_phys.at(g.angular, x) - base - p.s * m.beta * std::cos(x)));
    }
    const CylinderSolution sol(g, m, p);
    const MatrixXd ut = sol.sample(g.angular.x, g.radial.r);
    for (int j = 0; j <= g.M(); ++j) {
      const double cx = std::cos(g.angular.x(j));
      for (int i = 0; i <= g.K(); ++i) {
        const double r = g.radial.r(i);
        const double rest = ut(j, i) - m.U(r);
        row.E_w = std::max(row.E_w, std::abs(rest - p.s * (m.phi1(r) - m.gamma * m.g(r)) * cx));
        row.E_w_plus = std::max(row.E_w_plus, std::abs(rest - p.s * (m.phi1(r) + m.gamma * m.g(r)) * cx));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace schiffer
