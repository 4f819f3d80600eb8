#pragma once

#include <map>
#include <vector>

namespace schiffer {

// Order nu > -1 of a Bessel function of the first kind.
class BesselOrder {
public:
  explicit BesselOrder(double nu);
  double value() const { return nu_; }
  BesselOrder shifted(double k) const { return BesselOrder(nu_ + k); }

private:
  double nu_;
};

double bessel_j(BesselOrder nu, double r);

// I_nu(r) = r^{-nu} J_nu(r), with the limit 2^{-nu}/Gamma(nu+1) at r = 0.
double cap_i(BesselOrder nu, double r);

// k = 1: -r I_{nu+1}(r); k = 2: -I_{nu+1}(r) + r^2 I_{nu+2}(r).
double cap_i_deriv(BesselOrder nu, double r, int k);

struct ZeroSearchOptions {
  double radius_cap = 5000.0;
};

// n-th positive zero j_{nu,n} of J_nu.
double bessel_zero(BesselOrder nu, int n, const ZeroSearchOptions& opt = {});

// First `count` zeros of J_nu plus I_nu values at caller-chosen radii.
// Immutable after construction.
class BesselTable {
public:
  BesselTable(BesselOrder nu, int count, const std::vector<double>& radii = {});

  BesselOrder order() const { return nu_; }
  const std::vector<double>& zeros() const { return zeros_; }
  double zero(int n) const;
  double cap_i(double r) const;

private:
  BesselOrder nu_;
  std::vector<double> zeros_;
  std::map<double, double> cache_;
};

}  // namespace schiffer
