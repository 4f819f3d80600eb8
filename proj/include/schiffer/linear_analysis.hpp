#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "schiffer/field.hpp"

namespace schiffer {

// Mode-l block of L_lambda = j_m^2 + lambda d_xx + Delta_t.
struct ModeOperator {
  int mode = 0;
  double lambda = 0.0;
  Eigen::MatrixXd op;       // pointwise action at every radial node (r=0 row uses N u'')
  Eigen::MatrixXd matrix;   // op with row 0 -> u'(0) = 0 and row K -> u(1) = 0
  Eigen::MatrixXd reduced;  // interior rows on interior unknowns, u_K = 0 and u_0 from parity

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return op * v; }
  // Interior unknowns -> full radial vector (parity and Dirichlet restored).
  Eigen::VectorXd expand(const Eigen::VectorXd& interior) const;

  Eigen::RowVectorXd parity_row;
};

struct SpectralReport {
  double lambda = 0.0;
  double tol = 0.0;
  std::vector<double> smallest;  // per mode
  std::vector<double> second;
  int kernel_count = 0;
  std::optional<int> kernel_mode;
  Eigen::VectorXd kernel_vector;     // radial samples, scaled so v(0) = phi_1(0)
  double kernel_profile_error = 0.0; // max |v - phi_1| when the kernel sits in mode 1
  double gap = 0.0;                  // next singular value over all modes
  std::optional<double> transversality;
};

struct TransversalityResult {
  double analytic = 0.0;          // -||v*||^2
  double finite_difference = 0.0; // <v*, (L(lambda+d) - L(lambda-d)) v* / 2d>
  double norm_sq = 0.0;
};

std::vector<ModeOperator> assemble_linearized(const FieldGrid& g, const CylinderModel& model, double lambda);
ModeOperator assemble_mode(const FieldGrid& g, const CylinderModel& model, double lambda, int ell);

SpectralReport kernel_scan(const FieldGrid& g, const CylinderModel& model, double lambda, double tol = 1e-7);
TransversalityResult transversality(const FieldGrid& g, const CylinderModel& model, double delta = 1e-4);

// L_lambda applied to a field through the mode blocks.
Field2D apply_linearized(const std::vector<ModeOperator>& ops, const Field2D& v);

// <A u, v>_w - <u, A v>_w relative to |A u| |v|, for Dirichlet/parity vectors.
double weighted_asymmetry(const FieldGrid& g, const ModeOperator& op, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& v);

// Relative residual of the least-squares solve of L_lambda u = w on interior rows.
double range_residual(const FieldGrid& g, const CylinderModel& model, double lambda, const Field2D& w,
                      double tol = 1e-7);

// Values of lambda in (lo, hi) where the mode-l block is singular (sign changes of det).
std::vector<double> crossing_scan(const FieldGrid& g, const CylinderModel& model, int ell, double lo, double hi,
                                  int samples);

}  // namespace schiffer
