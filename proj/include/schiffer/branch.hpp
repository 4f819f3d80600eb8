#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "schiffer/field.hpp"

namespace schiffer {

// Everything G_lambda needs that depends on lambda only.
struct Frame {
  double lambda = 0.0;
  double mu = 0.0;  // zeroth-order coefficient of the pulled-back operator
  FieldValues base; // samples of the trivial solution
  Elimination elim;
};

// G_lambda(u) = L^{1+h_u}_lambda (M_1 u + base), abstracted over cylinder and sphere.
class ReducedMap {
public:
  virtual ~ReducedMap() = default;
  virtual const FieldGrid& grid() const = 0;
  virtual Frame frame(double lambda) const = 0;
  // Throws std::domain_error when h leaves the admissible set.
  virtual LinearCoefficients coefficients(const Frame& f, const DomainProfile& h) const = 0;
  virtual const Field2D& kernel() const = 0;
  virtual double bifurcation_lambda() const = 0;
};

class CylinderMap : public ReducedMap {
public:
  CylinderMap(FieldGrid grid, CylinderModel model);
  const FieldGrid& grid() const override { return grid_; }
  Frame frame(double lambda) const override;
  LinearCoefficients coefficients(const Frame& f, const DomainProfile& h) const override;
  const Field2D& kernel() const override { return kernel_; }
  double bifurcation_lambda() const override { return model_.lambda_m; }
  const CylinderModel& model() const { return model_; }

private:
  FieldGrid grid_;
  CylinderModel model_;
  Field2D kernel_;
  FieldValues base_;
  Elimination elim_;
};

// Collocation values of G_lambda(u) for a reduced map.
Eigen::MatrixXd reduced_values(const ReducedMap& map, const Frame& f, const Field2D& u);

struct NewtonOptions {
  double tol = 1e-10;
  int maxit = 25;
  double h_step = 1e-6;       // finite-difference step for the h columns
  double lambda_step = 1e-6;  // relative finite-difference step for the lambda column
};

struct NewtonResult {
  double amplitude = 0.0;
  double lambda = 0.0;
  Field2D u;
  double residual = 0.0;          // interior max norm of G
  double constraint_error = 0.0;  // |<u,v*>/<v*,v*> - amplitude|
  int iterations = 0;             // passes through the loop, the converged check included
  bool converged = false;
  std::string message;
};

// Newton on {G_lambda(u) = 0 at interior nodes, u'(0) = 0, <u,v*> = a <v*,v*>} for (u, lambda).
NewtonResult newton_solve(const ReducedMap& map, double amplitude, double lambda0, const Field2D& u0,
                          const NewtonOptions& opt = {});

// Assembled Jacobian of the Newton system at (u, lambda); exposed for tests.
Eigen::MatrixXd newton_jacobian(const ReducedMap& map, double amplitude, double lambda, const Field2D& u,
                                const NewtonOptions& opt = {});
Eigen::VectorXd newton_residual(const ReducedMap& map, double amplitude, double lambda, const Field2D& u);
Eigen::VectorXd pack(const Field2D& u, double lambda);
void unpack(const FieldGrid& g, const Eigen::VectorXd& z, Field2D& u, double& lambda);

struct TraceResult {
  std::vector<NewtonResult> points;  // ordered by amplitude
  bool truncated = false;
  std::string message;
};

// Continue from amplitude 0 through +-ds, +-2ds, ..., +-amax, halving failed steps up to 5 times.
TraceResult trace_amplitudes(const ReducedMap& map, double amax, double ds, const NewtonOptions& opt = {});

// Cylinder-facing API.
struct BranchPoint {
  double s = 0.0;
  double lambda = 0.0;
  Field2D u;
  double mu = 0.0;
  DomainProfile h_phys;  // (1 + h_u) / sqrt(lambda)
  double residual_G = 0.0;
  double residual_oracle = 0.0;
  double constraint_error = 0.0;
  double boundary_error = 0.0;  // max of |u~ - 1| and |dr u~| at r = 1
  int newton_iters = 0;
};

struct Branch {
  std::vector<BranchPoint> points;
  CylinderModel model;
  FieldGrid grid;
  bool truncated = false;
  std::string message;
};

struct Prediction {
  double lambda;
  Field2D u;
};

Prediction predict(const CylinderModel& model, const FieldGrid& g, double s);
BranchPoint correct(const CylinderModel& model, const FieldGrid& g, double s, double lambda0, const Field2D& u0,
                    double tol = 1e-10, int maxit = 25);
Branch trace(const CylinderModel& model, const FieldGrid& g, double s_max, double ds, double tol = 1e-10);

// w_s on the physical domain {|t| < 1/h_s(x)} via u~_s = u_m + M_1 phi_s.
class CylinderSolution {
public:
  CylinderSolution(const FieldGrid& g, const CylinderModel& model, const BranchPoint& p);

  double h(double x, int derivative = 0) const;
  double mu() const { return mu_; }
  // Pulled-back u~_s(r, x), 0 <= r <= 1.
  double u_tilde(double r, double x, int dr = 0, int dx = 0) const;
  // Physical w_s at radial distance tau and angle x; throws outside the domain.
  double w(double tau, double x) const;
  double boundary_error() const;
  // Samples of u~_s on an (x, r) lattice; rows follow xs, columns follow rs.
  Eigen::MatrixXd sample(const Eigen::VectorXd& xs, const Eigen::VectorXd& rs) const;

private:
  FieldGrid g_;
  CylinderModel model_;
  Field2D w_;  // M_1 phi_s
  DomainProfile hphi_;
  double lambda_, mu_;
};

// Fourth-order finite-difference residual of Delta w + mu w in physical coordinates.
double cylinder_oracle_residual(const CylinderSolution& sol, int N);

struct NodalCount {
  int domains = 0;              // connected components of {w != 0}
  int slice_sign_changes = 0;   // along r in [0,1) at x = 0
};
NodalCount count_nodal_domains(const CylinderSolution& sol, int N, int nr = 400, int nx = 256);

struct ExpansionRow {
  double s = 0.0;
  double lambda = 0.0;
  double E_h = 0.0;
  double E_w = 0.0;       // with -gamma (first-order term phi_1 - gamma g)
  double E_w_plus = 0.0;  // with +gamma in place of -gamma
  double w_scale = 0.0;   // max |phi_1 - gamma g|
};
std::vector<ExpansionRow> expansion_report(const Branch& branch);

}  // namespace schiffer
