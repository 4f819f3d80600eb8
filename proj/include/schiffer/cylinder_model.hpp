#pragma once

#include "schiffer/specfun.hpp"

namespace schiffer {

struct Profiles {
  double U;
  double dU;
  double g;
  double phi1;
};

// Closed-form data of the straight cylinder B_1 x R/2piZ in dimension N + 1,
// bifurcating from the m-th radial Neumann eigenvalue.
class CylinderModel {
public:
  int N = 1;
  int m = 1;
  double j_m = 0;       // j_{N/2,m}
  double j_dir = 0;     // j_{N/2-1,1}
  double lambda_m = 0;  // j_m^2 - j_dir^2
  double mu0 = 0;
  double kappa = 0;
  double beta = 0;
  double gamma = 0;
  double c_m = 0;       // I(j_m) / (j_m^2 I''(j_m)) = 1 / g'(1)

  double nu() const { return 0.5 * N - 1.0; }

  // Profile evaluators. The unchecked ones accept any r >= 0.
  double U(double r) const;
  double dU(double r) const;
  double d2U(double r) const;
  double g(double r) const;
  double g_alt(double r) const;
  double dg(double r) const;
  double phi1(double r) const;
  double dphi1(double r) const;
  double d2phi1(double r) const;

  Profiles eval_profiles(double r) const;
  double kernel_profile(double r) const;

private:
  double I_jm_ = 1.0;  // I_{N/2-1}(j_m)
  friend CylinderModel build_cylinder_model(int N, int m);
};

CylinderModel build_cylinder_model(int N, int m);

}  // namespace schiffer
