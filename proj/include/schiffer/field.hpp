#pragma once

#include <Eigen/Dense>

#include "schiffer/cylinder_model.hpp"
#include "schiffer/grid.hpp"

namespace schiffer {

// u(t,x) = sum_l u_l(|t|) cos(l x); coeffs(l, i) = u_l(r_i).
struct Field2D {
  Eigen::MatrixXd coeffs;
  bool dirichlet = false;
  bool neumann = false;

  static Field2D zero(const FieldGrid& g);
  int L() const { return static_cast<int>(coeffs.rows()) - 1; }
  int K() const { return static_cast<int>(coeffs.cols()) - 1; }
};

// h(x) = sum_l h_l cos(l x).
struct DomainProfile {
  Eigen::VectorXd coeffs;

  static DomainProfile constant(const FieldGrid& g, double c);
  Eigen::VectorXd values(const CosineGrid& c) const { return c.E * coeffs; }
  Eigen::VectorXd d1(const CosineGrid& c) const { return c.Ex * coeffs; }
  Eigen::VectorXd d2(const CosineGrid& c) const { return c.Exx * coeffs; }
  double at(const CosineGrid& c, double x, int derivative = 0) const { return c.row(x, derivative).dot(coeffs); }
};

// Pointwise samples on the (x_j, r_i) collocation grid, shape (M+1) x (K+1).
struct FieldValues {
  Eigen::MatrixXd P, Wr, Wrr, Wx, Wxx, Wxr;

  static FieldValues of(const FieldGrid& g, const Field2D& u);
  FieldValues& operator+=(const FieldValues& o);
};

// R = c0 P + cr Wr + crr Wrr + cxx Wxx + cxr Wxr, all pointwise.
struct LinearCoefficients {
  Eigen::MatrixXd c0, cr, crr, cxx, cxr;

  Eigen::MatrixXd apply(const FieldValues& v) const;
};

// M u = (u - g h_u, h_u) with h_u = c dr u(1, .).
struct Elimination {
  Eigen::VectorXd g;  // samples at the radial nodes
  double c = 0.0;
};

void check_grid(const FieldGrid& g, const Field2D& u);
bool dirichlet_holds(const Field2D& u, double tol = 1e-10);
bool neumann_holds(const FieldGrid& g, const Field2D& u, double tol = 1e-10);
Field2D with_flags(const FieldGrid& g, Field2D u, double tol = 1e-10);

// Per-mode radial derivative.
Eigen::MatrixXd radial_derivative(const FieldGrid& g, const Eigen::MatrixXd& c);

Field2D apply_Dt(const FieldGrid& g, const Field2D& u);
Field2D apply_laplace_t(const FieldGrid& g, const Field2D& u);
// d/dx; the result holds sine-series coefficients in the same layout.
Field2D apply_dx(const FieldGrid& g, const Field2D& u);

// Cylinder pull-back operator coefficients for H = 1 + h.
LinearCoefficients cylinder_coefficients(const FieldGrid& g, double lambda, double jm2, const DomainProfile& h);
// Exact samples of u_m(t,x) = U_m(|t|).
FieldValues cylinder_base_values(const FieldGrid& g, const CylinderModel& model);
Elimination cylinder_elimination(const FieldGrid& g, const CylinderModel& model);
void check_cylinder_admissible(const FieldGrid& g, const DomainProfile& h);

Field2D apply_pullback(const FieldGrid& g, double lambda, const DomainProfile& h, const Field2D& u,
                       const CylinderModel& model);

DomainProfile compute_h(const FieldGrid& g, const Elimination& e, const Field2D& u);
Field2D apply_M1(const FieldGrid& g, const Elimination& e, const Field2D& u);
Field2D apply_N(const FieldGrid& g, const Elimination& e, const Field2D& w, const DomainProfile& h);

DomainProfile compute_h_u(const FieldGrid& g, const CylinderModel& model, const Field2D& u);
Field2D apply_M1(const FieldGrid& g, const CylinderModel& model, const Field2D& u);

// Collocation values of G_lambda(u).
Eigen::MatrixXd G_values(const FieldGrid& g, const CylinderModel& model, double lambda, const Field2D& u);
Field2D G_of(const FieldGrid& g, const CylinderModel& model, double lambda, const Field2D& u);

// Max norm over all x nodes and interior radial nodes 1..K-1.
double interior_max(const Eigen::MatrixXd& values);

// sum_l c_l int_0^1 u_l v_l w(r) dr.
double inner(const FieldGrid& g, const Field2D& u, const Field2D& v);

// Kernel field v*(t,x) = phi_1(|t|) cos x.
Field2D cylinder_kernel_field(const FieldGrid& g, const CylinderModel& model);

// Point evaluation of the series; derivatives in r (dr) and x (dx).
double evaluate(const FieldGrid& g, const Field2D& u, double r, double x, int dr = 0, int dx = 0);

}  // namespace schiffer
