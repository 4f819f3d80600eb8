#include "schiffer/specfun.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace schiffer {

namespace {

constexpr double kSeriesRadius = 2.0;

bool near(double a, double b) { return std::abs(a - b) < 1e-14; }

double series_cap_i(double nu, double r) {
  double term = std::pow(2.0, -nu) / std::tgamma(nu + 1.0);
  double sum = term;
  const double q = -0.25 * r * r;
  for (int k = 1; k < 60; ++k) {
    term *= q / (k * (nu + k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Closed forms for half-integer orders; false when nu has none.
bool half_integer_cap_i(double nu, double r, double& out) {
  const double c = std::sqrt(2.0 / std::numbers::pi);
  const double s = std::sin(r), co = std::cos(r);
  if (near(nu, -0.5)) {
    out = c * co;
    return true;
  }
  if (near(nu, 0.5)) {
    out = c * s / r;
    return true;
  }
  if (near(nu, 1.5)) {
    out = c * (s - r * co) / (r * r * r);
    return true;
  }
  if (near(nu, 2.5)) {
    out = c * ((3.0 - r * r) * s - 3.0 * r * co) / std::pow(r, 5);
    return true;
  }
  return false;
}

double dj(double nu, double r) {
  return (nu / r) * boost::math::cyl_bessel_j(nu, r) - boost::math::cyl_bessel_j(nu + 1.0, r);
}

}  // namespace

BesselOrder::BesselOrder(double nu) : nu_(nu) {
  if (!(nu > -1.0)) throw std::domain_error("Bessel order must exceed -1, got " + std::to_string(nu));
}

double cap_i(BesselOrder order, double r) {
  const double nu = order.value();
  if (r < 0.0 || std::isnan(r)) throw std::domain_error("cap_i: negative radius");
  if (r <= kSeriesRadius) return series_cap_i(nu, r);
  double v;
  if (half_integer_cap_i(nu, r, v)) return v;
  return boost::math::cyl_bessel_j(nu, r) * std::pow(r, -nu);
}

double bessel_j(BesselOrder order, double r) {
  const double nu = order.value();
  if (r < 0.0 || std::isnan(r)) throw std::domain_error("bessel_j: negative radius");
  if (r == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0) return 0.0;
    throw std::domain_error("bessel_j: J_nu(0) is unbounded for nu < 0");
  }
  if (r <= kSeriesRadius) return std::pow(r, nu) * series_cap_i(nu, r);
  if (near(nu, 0.5)) return std::sqrt(2.0 / (std::numbers::pi * r)) * std::sin(r);
  if (near(nu, -0.5)) return std::sqrt(2.0 / (std::numbers::pi * r)) * std::cos(r);
  return boost::math::cyl_bessel_j(nu, r);
}

double cap_i_deriv(BesselOrder nu, double r, int k) {
  if (k == 1) return -r * cap_i(nu.shifted(1.0), r);
  if (k == 2) return -cap_i(nu.shifted(1.0), r) + r * r * cap_i(nu.shifted(2.0), r);
  throw std::invalid_argument("cap_i_deriv: derivative order must be 1 or 2");
}

double bessel_zero(BesselOrder order, int n, const ZeroSearchOptions& opt) {
  if (n < 1) throw std::invalid_argument("bessel_zero: index must be >= 1");
  const double nu = order.value();
  const double step = std::numbers::pi / 8.0;
  // I_nu has the same positive zeros as J_nu and no singularity at small r.
  auto f = [&](double r) { return cap_i(order, r); };

  double a = std::max(nu, 1.0);
  double fa = f(a);
  int found = 0;
  while (true) {
    const double b = a + step;
    if (b > opt.radius_cap)
      throw std::runtime_error("bessel_zero: radius cap reached before zero " + std::to_string(n) +
                               " of order " + std::to_string(nu));
    const double fb = f(b);
    if (fb == 0.0 || fa * fb < 0.0) {
      if (++found == n) {
        if (fb == 0.0) return b;
        auto J = [&](double r) { return boost::math::cyl_bessel_j(nu, r); };
        double lo = a, hi = b;
        const bool lo_neg = J(lo) < 0.0;
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
          const double fx = J(x);
          if (fx == 0.0) return x;
          if ((fx < 0.0) == lo_neg)
            lo = x;
          else
            hi = x;
          double xn = x - fx / dj(nu, x);
          if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
          if (std::abs(xn - x) <= 2e-16 * x) {
            x = xn;
            break;
          }
          x = xn;
        }
        return x;
      }
    }
    a = b;
    fa = fb;
  }
}

BesselTable::BesselTable(BesselOrder nu, int count, const std::vector<double>& radii) : nu_(nu) {
  for (int n = 1; n <= count; ++n) zeros_.push_back(bessel_zero(nu, n));
  for (double r : radii) cache_.emplace(r, schiffer::cap_i(nu, r));
}

double BesselTable::zero(int n) const {
  if (n < 1 || n > static_cast<int>(zeros_.size())) throw std::out_of_range("BesselTable::zero");
  return zeros_[n - 1];
}

double BesselTable::cap_i(double r) const {
  auto it = cache_.find(r);
  if (it != cache_.end()) return it->second;
  return schiffer::cap_i(nu_, r);
}

}  // namespace schiffer
