#pragma once

#include <Eigen/Dense>
#include <vector>

namespace schiffer {

// One point on an eigencurve of the weighted Sturm-Liouville problems on (0,1).
struct EigenCurveSample {
  double lambda = 0.0;
  int ell = -1;             // -1 for mu(lambda)
  double value = 0.0;       // mu(lambda) or sigma_ell(lambda), Richardson-extrapolated
  double derivative = 0.0;  // Hellmann-Feynman d/dlambda, Richardson-extrapolated
  Eigen::VectorXd t;        // fine-grid nodes
  Eigen::VectorXd f;        // U_lambda (U(1) = 1) or V_lambda (V(0) = 1) on t
  double coarse = 0.0, fine = 0.0;  // the two grid values before extrapolation
};

// Second-order finite differences on 0 = t_0 < ... < t_n = 1 and on 2n, then Richardson.
EigenCurveSample solve_mu(double lambda, int n = 1000);
EigenCurveSample solve_sigma(int ell, double lambda, int n = 1000);
double mu_derivative(double lambda, int n = 1000);
double sigma_derivative(int ell, double lambda, int n = 1000);

// rho(tau) = -d/dtau [sin tau + tau / cos tau].
double rho(double tau);

struct RhoReport {
  double rho0_over_cos0 = 0.0;
  bool decreasing = false;       // d/dtau (rho / cos) < 0 on the mesh
  double max_slope = 0.0;
  double lower = 0.0;            // rho(1) / cos 1
  bool bounds_hold = false;      // rho(1)/cos 1 <= rho(lambda t)/cos(lambda t) <= -2 on the product mesh
  double spot_value = 0.0;       // rho(0.5) from the closed form
  double spot_fd = 0.0;          // rho(0.5) by differencing the defining expression
};
RhoReport rho_checks(int mesh = 1000);

struct LambdaStar {
  int ell = 0;
  double lambda0 = 0.0;
  double lambda_star = 0.0;
  double sigma_at_star = 0.0;
  double sigma_prime = 0.0;
  int scan_sign_changes = 0;  // on 50 equispaced points of (0, lambda0]
};
// Throws std::runtime_error("no sign change ...") when sigma_ell stays negative on (0, lambda0].
LambdaStar find_lambda_star(int ell, double lambda0, int n = 1000);

// Least ell with sigma_ell(lambda0) > 0 and sigma_ell' > 0 on a 20-point mesh of (0, lambda0].
int ell_zero(double lambda0, int n = 1000, int cap = 200);

// max over the mesh of 2 ell^2 - sigma_ell'(lambda) / lambda.
double estimate_C_hat(const std::vector<int>& ells, const std::vector<double>& lambdas, int n = 1000);

// Margins of the two lower bounds for sigma_ell(lambda):
// displayed: sigma_ell - (sigma_0 - mu + (ell lambda)^2); chain: sigma_ell - (sigma_0 + (ell lambda)^2).
struct FirstEstimate {
  double displayed_margin = 0.0;
  double chain_margin = 0.0;
};
FirstEstimate first_estimates(int ell, double lambda, int n = 1000);

}  // namespace schiffer
