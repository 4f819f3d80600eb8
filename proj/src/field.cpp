#include "schiffer/field.hpp"

#include <cmath>
#include <stdexcept>

namespace schiffer {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Field2D Field2D::zero(const FieldGrid& g) {
  Field2D f;
  f.coeffs = MatrixXd::Zero(g.L() + 1, g.K() + 1);
  f.dirichlet = f.neumann = true;
  return f;
}

DomainProfile DomainProfile::constant(const FieldGrid& g, double c) {
  DomainProfile h;
  h.coeffs = VectorXd::Zero(g.L() + 1);
  h.coeffs(0) = c;
  return h;
}

void check_grid(const FieldGrid& g, const Field2D& u) {
  if (u.coeffs.rows() != g.L() + 1 || u.coeffs.cols() != g.K() + 1)
    throw std::invalid_argument("field does not match grid");
}

MatrixXd radial_derivative(const FieldGrid& g, const MatrixXd& c) { return c * g.radial.D.transpose(); }

FieldValues FieldValues::of(const FieldGrid& g, const Field2D& u) {
  check_grid(g, u);
  const auto& a = g.angular;
  const MatrixXd ur = u.coeffs * g.radial.D.transpose();
  const MatrixXd urr = u.coeffs * g.radial.D2.transpose();
  FieldValues v;
  v.P = a.E * u.coeffs;
  v.Wr = a.E * ur;
  v.Wrr = a.E * urr;
  v.Wx = a.Ex * u.coeffs;
  v.Wxx = a.Exx * u.coeffs;
  v.Wxr = a.Ex * ur;
  return v;
}

FieldValues& FieldValues::operator+=(const FieldValues& o) {
  P += o.P;
  Wr += o.Wr;
  Wrr += o.Wrr;
  Wx += o.Wx;
  Wxx += o.Wxx;
  Wxr += o.Wxr;
  return *this;
}

MatrixXd LinearCoefficients::apply(const FieldValues& v) const {
  return (c0.array() * v.P.array() + cr.array() * v.Wr.array() + crr.array() * v.Wrr.array() +
          cxx.array() * v.Wxx.array() + cxr.array() * v.Wxr.array())
      .matrix();
}

bool dirichlet_holds(const Field2D& u, double tol) {
  return u.coeffs.col(u.K()).cwiseAbs().maxCoeff() <= tol;
}

bool neumann_holds(const FieldGrid& g, const Field2D& u, double tol) {
  const VectorXd d = u.coeffs * g.radial.D.row(g.K()).transpose();
  return d.cwiseAbs().maxCoeff() <= tol;
}

Field2D with_flags(const FieldGrid& g, Field2D u, double tol) {
  u.dirichlet = dirichlet_holds(u, tol);
  u.neumann = neumann_holds(g, u, tol);
  return u;
}

Field2D apply_Dt(const FieldGrid& g, const Field2D& u) {
  check_grid(g, u);
  Field2D out;
  out.coeffs = radial_derivative(g, u.coeffs) * g.radial.r.asDiagonal();
  return out;
}

Field2D apply_laplace_t(const FieldGrid& g, const Field2D& u) {
  check_grid(g, u);
  const MatrixXd ur = radial_derivative(g, u.coeffs);
  const MatrixXd urr = u.coeffs * g.radial.D2.transpose();
  Field2D out;
  out.coeffs = urr;
  for (int i = 1; i <= g.K(); ++i) out.coeffs.col(i) += (g.N - 1) / g.radial.r(i) * ur.col(i);
  out.coeffs.col(0) = g.N * urr.col(0);
  return out;
}

Field2D apply_dx(const FieldGrid& g, const Field2D& u) {
  check_grid(g, u);
  Field2D out;
  out.coeffs = u.coeffs;
  for (int k = 0; k <= g.L(); ++k) out.coeffs.row(k) *= -double(k) * g.angular.stride;
  return out;
}

namespace {

struct Hsamples {
  VectorXd H, a, b;  // H = 1+h, a = H'/H, b = H''/H
};

Hsamples h_samples(const FieldGrid& g, const DomainProfile& h) {
  Hsamples s;
  s.H = h.values(g.angular).array() + 1.0;
  s.a = h.d1(g.angular).array() / s.H.array();
  s.b = h.d2(g.angular).array() / s.H.array();
  return s;
}

}  // namespace

void check_cylinder_admissible(const FieldGrid& g, const DomainProfile& h) {
  const VectorXd H = h.values(g.angular).array() + 1.0;
  if (H.minCoeff() <= 0.0) throw std::domain_error("profile not admissible: 1+h <= 0 at a collocation point");
}

LinearCoefficients cylinder_coefficients(const FieldGrid& g, double lambda, double jm2, const DomainProfile& h) {
  check_cylinder_admissible(g, h);
  const int nx = g.M() + 1, nr = g.K() + 1;
  const auto s = h_samples(g, h);
  const VectorXd& r = g.radial.r;
  LinearCoefficients c;
  c.c0 = MatrixXd::Constant(nx, nr, jm2);
  c.cxx = MatrixXd::Constant(nx, nr, lambda);
  c.cr.resize(nx, nr);
  c.crr.resize(nx, nr);
  c.cxr.resize(nx, nr);
  for (int j = 0; j < nx; ++j) {
    const double H2 = s.H(j) * s.H(j);
    for (int i = 0; i < nr; ++i) {
      if (i == 0) {
        c.crr(j, i) = g.N * H2;
        c.cr(j, i) = 0.0;
        c.cxr(j, i) = 0.0;
        continue;
      }
      c.crr(j, i) = H2 + lambda * s.a(j) * s.a(j) * r(i) * r(i);
      c.cr(j, i) = H2 * (g.N - 1) / r(i) + lambda * s.b(j) * r(i);
      c.cxr(j, i) = 2.0 * lambda * s.a(j) * r(i);
    }
  }
  return c;
}

FieldValues cylinder_base_values(const FieldGrid& g, const CylinderModel& model) {
  const int nx = g.M() + 1, nr = g.K() + 1;
  FieldValues v;
  v.P.resize(nx, nr);
  v.Wr.resize(nx, nr);
  v.Wrr.resize(nx, nr);
  v.Wx = MatrixXd::Zero(nx, nr);
  v.Wxx = MatrixXd::Zero(nx, nr);
  v.Wxr = MatrixXd::Zero(nx, nr);
  for (int i = 0; i < nr; ++i) {
    const double r = g.radial.r(i);
    v.P.col(i).setConstant(model.U(r));
    v.Wr.col(i).setConstant(model.dU(r));
    v.Wrr.col(i).setConstant(model.d2U(r));
  }
  return v;
}

Elimination cylinder_elimination(const FieldGrid& g, const CylinderModel& model) {
  Elimination e;
  e.g.resize(g.K() + 1);
  for (int i = 0; i <= g.K(); ++i) e.g(i) = model.g(g.radial.r(i));
  e.c = model.c_m;
  return e;
}

Field2D apply_pullback(const FieldGrid& g, double lambda, const DomainProfile& h, const Field2D& u,
                       const CylinderModel& model) {
  const auto coefs = cylinder_coefficients(g, lambda, model.j_m * model.j_m, h);
  Field2D out;
  out.coeffs = g.angular.P * coefs.apply(FieldValues::of(g, u));
  return out;
}

DomainProfile compute_h(const FieldGrid& g, const Elimination& e, const Field2D& u) {
  check_grid(g, u);
  if (!u.dirichlet) throw std::invalid_argument("compute_h_u: field lacks the Dirichlet flag");
  DomainProfile h;
  h.coeffs = e.c * (u.coeffs * g.radial.D.row(g.K()).transpose());
  return h;
}

Field2D apply_N(const FieldGrid& g, const Elimination& e, const Field2D& w, const DomainProfile& h) {
  check_grid(g, w);
  Field2D out;
  out.coeffs = w.coeffs + h.coeffs * e.g.transpose();
  out.dirichlet = w.dirichlet;
  return out;
}

Field2D apply_M1(const FieldGrid& g, const Elimination& e, const Field2D& u) {
  const DomainProfile h = compute_h(g, e, u);
  Field2D out;
  out.coeffs = u.coeffs - h.coeffs * e.g.transpose();
  const double scale = std::max(1.0, u.coeffs.cwiseAbs().maxCoeff());
  if (!dirichlet_holds(out, 1e-8 * scale) || !neumann_holds(g, out, 1e-8 * scale))
    throw std::logic_error("apply_M1: result violates the boundary conditions");
  out.dirichlet = out.neumann = true;
  return out;
}

DomainProfile compute_h_u(const FieldGrid& g, const CylinderModel& model, const Field2D& u) {
  return compute_h(g, cylinder_elimination(g, model), u);
}

Field2D apply_M1(const FieldGrid& g, const CylinderModel& model, const Field2D& u) {
  return apply_M1(g, cylinder_elimination(g, model), u);
}

MatrixXd G_values(const FieldGrid& g, const CylinderModel& model, double lambda, const Field2D& u) {
  const Elimination e = cylinder_elimination(g, model);
  const DomainProfile h = compute_h(g, e, u);
  const Field2D w = apply_M1(g, e, u);
  FieldValues vals = FieldValues::of(g, w);
  vals += cylinder_base_values(g, model);
  return cylinder_coefficients(g, lambda, model.j_m * model.j_m, h).apply(vals);
}

Field2D G_of(const FieldGrid& g, const CylinderModel& model, double lambda, const Field2D& u) {
  Field2D out;
  out.coeffs = g.angular.P * G_values(g, model, lambda, u);
  return out;
}

double interior_max(const MatrixXd& values) {
  const int nr = static_cast<int>(values.cols());
  return values.middleCols(1, nr - 2).cwiseAbs().maxCoeff();
}

double inner(const FieldGrid& g, const Field2D& u, const Field2D& v) {
  check_grid(g, u);
  check_grid(g, v);
  double s = 0.0;
  for (int k = 0; k <= g.L(); ++k)
    s += g.angular.norm(k) * (u.coeffs.row(k).array() * v.coeffs.row(k).array() * g.radial.w.transpose().array()).sum();
  return s;
}

Field2D cylinder_kernel_field(const FieldGrid& g, const CylinderModel& model) {
  Field2D v = Field2D::zero(g);
  for (int i = 0; i <= g.K(); ++i) v.coeffs(1, i) = model.phi1(g.radial.r(i));
  v.coeffs(1, g.K()) = 0.0;
  return v;
}

double evaluate(const FieldGrid& g, const Field2D& u, double r, double x, int dr, int dx) {
  check_grid(g, u);
  MatrixXd c = u.coeffs;
  for (int k = 0; k < dr; ++k) c = radial_derivative(g, c);
  const VectorXd radial = c * g.radial.interpolation_row(r).transpose();
  return g.angular.row(x, dx).dot(radial);
}

}  // namespace schiffer
