#include "schiffer/cylinder_model.hpp"

#include <cmath>
#include <stdexcept>

namespace schiffer {

CylinderModel build_cylinder_model(int N, int m) {
  if (N < 1 || m < 1) throw std::invalid_argument("build_cylinder_model: N and m must be positive");
  CylinderModel c;
  c.N = N;
  c.m = m;
  const BesselOrder nu(0.5 * N - 1.0);
  const BesselOrder half(0.5 * N);
  c.j_m = bessel_zero(half, m);
  c.j_dir = bessel_zero(nu, 1);
  c.lambda_m = c.j_m * c.j_m - c.j_dir * c.j_dir;
  c.mu0 = c.j_m * c.j_m / c.lambda_m;
  c.kappa = 1.0 / c.j_m;
  c.I_jm_ = cap_i(nu, c.j_m);
  const double d2I = cap_i_deriv(nu, c.j_m, 2);
  const double jd2 = c.j_dir * c.j_dir, jm2 = c.j_m * c.j_m;
  c.beta = -(jd2 * c.I_jm_ * cap_i(half, c.j_dir)) / (jm2 * d2I * std::sqrt(c.lambda_m));
  c.gamma = c.beta * std::sqrt(c.lambda_m);
  c.c_m = c.I_jm_ / (jm2 * d2I);
  return c;
}

double CylinderModel::U(double r) const { return cap_i(BesselOrder(nu()), j_m * r) / I_jm_; }

double CylinderModel::dU(double r) const {
  return j_m * cap_i_deriv(BesselOrder(nu()), j_m * r, 1) / I_jm_;
}

double CylinderModel::d2U(double r) const {
  return j_m * j_m * cap_i_deriv(BesselOrder(nu()), j_m * r, 2) / I_jm_;
}

double CylinderModel::g(double r) const { return r * dU(r); }

double CylinderModel::g_alt(double r) const {
  return -j_m * j_m * r * r * cap_i(BesselOrder(0.5 * N), j_m * r) / I_jm_;
}

double CylinderModel::dg(double r) const { return dU(r) + r * d2U(r); }

double CylinderModel::phi1(double r) const { return cap_i(BesselOrder(nu()), j_dir * r); }

double CylinderModel::dphi1(double r) const {
  return j_dir * cap_i_deriv(BesselOrder(nu()), j_dir * r, 1);
}

double CylinderModel::d2phi1(double r) const {
  return j_dir * j_dir * cap_i_deriv(BesselOrder(nu()), j_dir * r, 2);
}

Profiles CylinderModel::eval_profiles(double r) const {
  if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("eval_profiles: r outside [0,1]");
  return {U(r), dU(r), g(r), phi1(r)};
}

double CylinderModel::kernel_profile(double r) const {
  if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("kernel_profile: r outside [0,1]");
  return phi1(r);
}

}  // namespace schiffer
