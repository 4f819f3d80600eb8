#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "schiffer/branch.hpp"

namespace schiffer {

// Collocation eigenpair on the Chebyshev nodes of a radial grid.
struct SphereProfile {
  double value = 0.0;
  Eigen::VectorXd f;  // U with U(1) = 1, or V with V(0) = 1
};

// mu(lambda) and U_lambda: -U'' + lambda tan(lambda t) U' = mu U, U'(0) = U'(1) = 0.
SphereProfile chebyshev_mu(const RadialGrid& rg, double lambda);
// sigma_ell(lambda) and V_lambda for the given mu: V'(0) = 0, V(1) = 0.
SphereProfile chebyshev_sigma(const RadialGrid& rg, int ell, double lambda, double mu);

// Radial variable t in [0,1], inner-product weight cos(lambda_star t), cosine modes cos(k ell x).
FieldGrid make_sphere_grid(double lambda_star, int ell, int K = 32, int L = 12, int M = 12);

struct SphereModel {
  int ell = 0;
  double lambda0 = 0.0;
  double lambda_star = 0.0;   // root of the finite-difference sigma_ell
  double sigma_at_star = 0.0; // finite-difference value there
  double sigma_cheb = 0.0;    // collocation sigma_ell at lambda_star
  double sigma_prime_star = 0.0;
  double mu_star = 0.0;
  double d2U1 = 0.0;          // U''(1) at lambda_star
  double dV1 = 0.0;           // V'(1) at lambda_star
  Eigen::VectorXd U_star, V_star;  // on the grid nodes
  FieldGrid grid;
};

// ell = 0 picks ell_zero(lambda0).
SphereModel build_sphere_model(double lambda0 = 0.5, int ell = 0, int K = 32, int L = 12, int M = 12);

// lambda^2 (Delta + mu/lambda^2) pulled back through tau = lambda t / (1 + h(x)); 0 <= t <= 1.
LinearCoefficients sphere_coefficients(const FieldGrid& g, double lambda, double mu, const DomainProfile& h);
void check_sphere_admissible(const FieldGrid& g, double lambda, const DomainProfile& h);
Field2D apply_sphere_pullback(const FieldGrid& g, double lambda, const DomainProfile& h, const Field2D& u,
                              double mu);

class SphereMap : public ReducedMap {
public:
  explicit SphereMap(SphereModel model);
  const FieldGrid& grid() const override { return model_.grid; }
  Frame frame(double lambda) const override;
  LinearCoefficients coefficients(const Frame& f, const DomainProfile& h) const override;
  const Field2D& kernel() const override { return kernel_; }
  double bifurcation_lambda() const override { return model_.lambda_star; }
  const SphereModel& model() const { return model_; }

private:
  SphereModel model_;
  Field2D kernel_;
};

// Kernel field v*(t,x) = V_star(|t|) cos(ell x).
Field2D sphere_kernel_field(const SphereModel& model);
Field2D sphere_G(const SphereModel& model, double lambda, const Field2D& u);
// L^0_lambda v = mu(lambda) v + v_tt - lambda tan(lambda t) v_t + lambda^2 / cos^2(lambda t) v_xx.
Field2D apply_sphere_L0(const SphereModel& model, double lambda, const Field2D& v);

// Amplitude along v* in the Newton constraint; r(s) = -s U''(1) / (lambda_star V'(1)).
double sphere_r_of_s(const SphereModel& model, double s);

struct SphereBranchPoint {
  double s = 0.0;
  double r = 0.0;
  double lambda = 0.0;   // xi_s
  double xi = 0.0;
  double mu = 0.0;       // mu(lambda) / lambda^2
  double mu_lambda = 0.0;  // mu(lambda) from the collocation solve
  Field2D u;
  DomainProfile h_u;
  double h_min = 0.0, h_max = 0.0;  // range of h~ = lambda / (1 + h_u)
  double E = 0.0;                  // max_x |h~ - xi - s cos(ell x)|
  double residual_G = 0.0;
  double constraint_error = 0.0;
  double boundary_error = 0.0;
  double oracle_interior = 0.0;
  int newton_iters = 0;
};

struct SphereBranch {
  std::vector<SphereBranchPoint> points;  // ordered by s
  SphereModel model;
  bool truncated = false;
  std::string message;
};

SphereBranch sphere_trace(const SphereModel& model, double s_max, double ds, double tol = 1e-10);

// w(t,x) = U_lambda(|t|) + (M_1 u)(t,x) on the pulled-back strip, boundary curve h~(x).
class SphereSolution {
public:
  SphereSolution(const SphereModel& model, const SphereBranchPoint& p);

  double h_tilde(double x, int derivative = 0) const;
  double mu() const { return mu_; }
  double w(double t, double x, int dt = 0, int dx = 0) const;
  double boundary_error() const;
  const SphereModel& model() const { return model_; }

private:
  SphereModel model_;
  Frame frame_;
  Field2D m1u_;
  DomainProfile hu_;
  double lambda_, mu_;
};

struct SphereOracle {
  double interior = 0.0;  // max |Delta_g w + mu w| on the sample lattice
  double boundary = 0.0;  // max of |w - 1| and |dt w| at t = +-1
};
// Laplace-Beltrami from the metric g_h in (t,x), nested central differences with step delta.
// perturb(t,x) is added to w before differencing.
SphereOracle sphere_residual_oracle(const SphereSolution& sol, double delta = 0.01,
                                    const std::function<double(double, double)>& perturb = {});

struct SphereKernelScan {
  std::vector<double> min_singular;  // modes k = 0..kmax of cos(k x)
  int kernel_count = 0;
  int kernel_mode = -1;
  double gap = 0.0;  // smallest min_singular away from the kernel mode
};
SphereKernelScan sphere_kernel_scan(const SphereModel& model, int kmax, double tol = 1e-7);

struct SphereTransversality {
  double derivative_route = 0.0;  // <v*, dL/dlambda v*> by differencing the collocated operator
  double spectral_route = 0.0;    // sigma_ell'(lambda_star) <v*, v*> from the Hellmann-Feynman formula
  double norm = 0.0;              // <v*, v*>
};
SphereTransversality sphere_transversality(const SphereModel& model);

}  // namespace schiffer
