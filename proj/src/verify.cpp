#include "schiffer/verify.hpp"

#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "schiffer/branch.hpp"
#include "schiffer/linear_analysis.hpp"
#include "schiffer/sphere_branch.hpp"
#include "schiffer/sphere_spectral.hpp"

namespace schiffer {

namespace {

using std::numbers::pi;
using json = nlohmann::json;

std::string fmt(const char* key, double v) {
  std::ostringstream o;
  o.precision(12);
  o << key << "=" << v;
  return o.str();
}

std::string tag(int N, int m) { return "N=" + std::to_string(N) + " m=" + std::to_string(m); }

void closed_forms(const RunConfig&, Report& r) {
  const auto c = build_cylinder_model(1, 1);
  r.checks.push_back(check_le("mu0 = 4/3", 1, std::abs(c.mu0 - 4.0 / 3.0), 1e-12, fmt("mu0", c.mu0)));
  r.checks.push_back(check_le("kappa = 1/pi", 1, std::abs(c.kappa - 1.0 / pi), 1e-12, fmt("kappa", c.kappa)));
  r.checks.push_back(
      check_le("lambda_m = 3 pi^2 / 4", 1, std::abs(c.lambda_m - 0.75 * pi * pi), 1e-12, fmt("lambda_m", c.lambda_m)));
  const auto c2 = build_cylinder_model(1, 2);
  double err = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double x = k / 200.0;
    err = std::max(err, std::abs(c2.U(x) - std::cos(2 * pi * x)));
  }
  r.checks.push_back(check_le("U_2(r) = cos(2 pi r) on 201 points", 1, err, 1e-12));
  r.summaries["constants"] = {{"mu0", c.mu0}, {"kappa", c.kappa}, {"lambda_m", c.lambda_m},
                              {"beta", c.beta}, {"gamma", c.gamma}};
}

void bessel(const RunConfig&, Report& r) {
  double e = 0.0;
  for (int n = 1; n <= 5; ++n) e = std::max(e, std::abs(bessel_zero(BesselOrder(0.5), n) - n * pi));
  r.checks.push_back(check_le("j_{1/2,n} = n pi, n <= 5", 2, e, 1e-10));
  r.checks.push_back(
      check_le("j_{-1/2,1} = pi/2", 2, std::abs(bessel_zero(BesselOrder(-0.5), 1) - pi / 2), 1e-10));
  int bad = 0;
  for (double nu : {0.0, 0.5, 1.0, 1.5}) {
    const BesselOrder a(nu), b(nu + 1);
    for (int n = 1; n <= 5; ++n) {
      const double z = bessel_zero(a, n), z1 = bessel_zero(b, n), zn = bessel_zero(a, n + 1);
      if (!(z < z1 && z1 < zn)) ++bad;
    }
  }
  r.checks.push_back(check_eq("interlacing j_{nu,n} < j_{nu+1,n} < j_{nu,n+1}", 2, bad, 0));
  // I_nu' from Boost's J_nu and J_nu' against -r I_{nu+1} from our evaluator.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> nud(-0.5, 3.0), rd(0.0, 30.0);
  double rec = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double nu = nud(rng), x = rd(rng) + 1e-3;
    const double ref = std::pow(x, -nu) * (boost::math::cyl_bessel_j_prime(nu, x) -
                                           nu / x * boost::math::cyl_bessel_j(nu, x));
    rec = std::max(rec, std::abs(ref + x * cap_i(BesselOrder(nu + 1), x)));
  }
  r.checks.push_back(check_le("I_nu' = -r I_{nu+1} on 100 samples", 2, rec, 1e-12));
}

void trivial_branch(const RunConfig& cfg, Report& r) {
  double worst = 0.0;
  std::string where;
  for (int N = 1; N <= 3; ++N) {
    const auto g = make_cylinder_grid(N, cfg.K, cfg.L, cfg.M);
    for (int m = 1; m <= 2; ++m) {
      const auto model = build_cylinder_model(N, m);
      for (double f : {0.5, 1.0, 2.0}) {
        const double v = interior_max(G_values(g, model, f * model.lambda_m, Field2D::zero(g)));
        if (v >= worst) {
          worst = v;
          where = tag(N, m) + " lambda=" + std::to_string(f) + " lambda_m";
        }
      }
    }
  }
  r.checks.push_back(check_le("max |G_lambda(0)|", 3, worst, cfg.zero_tol, where));
}

void kernel(const RunConfig& cfg, Report& r) {
  const auto g = make_cylinder_grid(cfg.N, cfg.K, cfg.L, cfg.M);
  const auto model = build_cylinder_model(cfg.N, cfg.m);
  const auto at = kernel_scan(g, model, model.lambda_m, cfg.kernel_tol);
  const std::string t = tag(cfg.N, cfg.m);
  r.checks.push_back(check_eq("kernel count at lambda_m", 4, at.kernel_count, 1, t));
  r.checks.push_back(check_eq("kernel mode at lambda_m", 4, at.kernel_mode.value_or(-1), 1, t));
  r.checks.push_back(check_le("kernel vector vs I_{N/2-1}(j r)", 4, at.kernel_profile_error, 1e-6, t));
  for (double d : {-0.1, 0.1}) {
    const auto off = kernel_scan(g, model, model.lambda_m + d, cfg.kernel_tol);
    r.checks.push_back(check_eq(std::string("kernel count at lambda_m ") + (d < 0 ? "- 0.1" : "+ 0.1"), 4,
                                off.kernel_count, 0, t));
  }
  const auto tr = transversality(g, model);
  const auto v = cylinder_kernel_field(g, model);
  const double nv = inner(g, v, v);
  r.checks.push_back(check_le("transversality = -|v*|^2", 4, std::abs(tr.analytic + nv), 1e-10));
  r.checks.push_back(check_le("transversality FD cross-check (relative)", 4,
                              std::abs(tr.finite_difference - tr.analytic) / std::abs(tr.analytic), 1e-6));
  json sm = json::array();
  for (std::size_t k = 0; k < at.smallest.size(); ++k) sm.push_back(at.smallest[k]);
  r.summaries["kernel"] = {{"N", cfg.N}, {"m", cfg.m}, {"lambda_m", model.lambda_m}, {"smallest_singular", sm},
                           {"gap", at.gap}, {"transversality", tr.analytic}, {"transversality_fd", tr.finite_difference}};
}

// Violations of a strictly decreasing sequence.
int not_decreasing(const std::vector<double>& v) {
  int bad = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) ++bad;
  return bad;
}

void expansion(const RunConfig& cfg, Report& r) {
  json rows_out = json::array();
  for (int N = 1; N <= 2; ++N) {
    const auto g = make_cylinder_grid(N, cfg.K, cfg.L, cfg.M);
    for (int m = 1; m <= 2; ++m) {
      const std::string t = tag(N, m);
      const auto model = build_cylinder_model(N, m);
      const Branch b = trace(model, g, 0.02, 0.005, cfg.newton_tol);
      r.checks.push_back(check_eq("branch complete to |s| = 0.02", 5, b.truncated ? 1 : 0, 0, t + " " + b.message));
      const auto rows = expansion_report(b);
      auto row = [&](double s) {
        for (const auto& x : rows)
          if (std::abs(x.s - s) < 1e-12) return x;
        throw std::runtime_error("missing branch point s=" + std::to_string(s));
      };
      double res = 0.0;
      for (const auto& p : b.points) res = std::max(res, p.residual_G);
      r.checks.push_back(check_le("max |G| on the branch", 5, res, cfg.newton_tol, t));
      for (double sg : {1.0, -1.0}) {
        const std::string ts = t + (sg > 0 ? " s>0" : " s<0");
        std::vector<double> eh, ew;
        for (double s : {0.02, 0.01, 0.005}) {
          eh.push_back(row(sg * s).E_h / s);
          ew.push_back(row(sg * s).E_w / s);
        }
        r.checks.push_back(check_le("E_h(0.01)/0.01 <= 0.1 |beta|", 5, eh[1], 0.1 * std::abs(model.beta), ts));
        r.checks.push_back(check_eq("E_h(s)/|s| decreasing over halvings", 5, not_decreasing(eh), 0, ts));
        r.checks.push_back(check_le("E_w(0.01)/0.01 <= 0.1 max|phi_1 - gamma g|", 5, ew[1],
                                    0.1 * row(sg * 0.01).w_scale, ts));
        r.checks.push_back(check_eq("E_w(s)/|s| decreasing over halvings", 5, not_decreasing(ew), 0, ts));
      }
      for (const auto& x : rows)
        rows_out.push_back({{"N", N}, {"m", m}, {"s", x.s}, {"lambda", x.lambda}, {"E_h", x.E_h}, {"E_w", x.E_w},
                            {"E_w_plus_gamma", x.E_w_plus}});
    }
  }
  r.summaries["cylinder_expansion"] = rows_out;
}

void nodal(const RunConfig& cfg, Report& r) {
  const auto g = make_cylinder_grid(1, cfg.K, cfg.L, cfg.M);
  json out = json::array();
  for (int m = 1; m <= 3; ++m) {
    const auto model = build_cylinder_model(1, m);
    for (double s : {0.01, -0.01}) {
      const auto pr = predict(model, g, s);
      const auto p = correct(model, g, s, pr.lambda, pr.u, cfg.newton_tol);
      const auto nc = count_nodal_domains(CylinderSolution(g, model, p), 1);
      const std::string t = "m=" + std::to_string(m) + " s=" + std::to_string(s) +
                            " slice sign changes=" + std::to_string(nc.slice_sign_changes);
      r.checks.push_back(check_eq("nodal domains = m", 6, nc.domains, m, t));
      out.push_back({{"m", m}, {"s", s}, {"domains", nc.domains}, {"slice_sign_changes", nc.slice_sign_changes}});
    }
  }
  r.summaries["nodal"] = out;
}

void eigencurves(const RunConfig&, Report& r) {
  r.checks.push_back(check_le("|mu(0) - pi^2|", 7, std::abs(solve_mu(0.0).value - pi * pi), 1e-8));
  double e = 0.0;
  for (int ell : {0, 1, 5, 10}) e = std::max(e, std::abs(solve_sigma(ell, 0.0).value + 0.75 * pi * pi));
  r.checks.push_back(check_le("|sigma_ell(0) + 3 pi^2 / 4|, ell in {0,1,5,10}", 7, e, 1e-8));
  double worst = -std::numeric_limits<double>::infinity();
  std::string where;
  json mus = json::array();
  for (int k = 1; k <= 9; ++k) {
    const double lam = 0.1 * k, d = mu_derivative(lam);
    mus.push_back({{"lambda", lam}, {"mu_prime", d}});
    if (d + 2 * lam > worst) {
      worst = d + 2 * lam;
      where = fmt("lambda", lam) + " " + fmt("mu'", d);
    }
  }
  r.checks.push_back(check_le("max (mu'(lambda) + 2 lambda) on 0.1..0.9", 7, worst, 1e-6, where));
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> ell_d(0, 10);
  std::uniform_real_distribution<double> lam_d(0.05, 0.95);
  double hf = 0.0;
  for (int k = 0; k < 10; ++k) {
    const int ell = ell_d(rng);
    const double lam = lam_d(rng);
    const double a = sigma_derivative(ell, lam);
    const double fd = (solve_sigma(ell, lam + 1e-4).value - solve_sigma(ell, lam - 1e-4).value) / 2e-4;
    hf = std::max(hf, std::abs(a - fd) / std::abs(fd));
  }
  r.checks.push_back(check_le("Hellmann-Feynman vs FD, 10 random (ell, lambda)", 7, hf, 1e-5));
  const auto rc = rho_checks(1000);
  r.checks.push_back(check_eq("rho(0)/cos(0) = -2", 7, rc.rho0_over_cos0, -2.0));
  r.checks.push_back(check_eq("rho/cos decreasing on the mesh", 7, rc.decreasing ? 1 : 0, 1, fmt("max slope", rc.max_slope)));
  r.checks.push_back(check_eq("rho(1)/cos 1 <= rho/cos <= -2", 7, rc.bounds_hold ? 1 : 0, 1, fmt("lower", rc.lower)));
  r.checks.push_back(check_le("rho(0.5) closed form vs difference", 7, std::abs(rc.spot_value - rc.spot_fd), 1e-8));
  r.summaries["mu_prime"] = mus;
}

void lambda_star(const RunConfig& cfg, Report& r) {
  const int l0 = cfg.ell > 0 ? cfg.ell : ell_zero(cfg.lambda0);
  json out = json::array();
  for (int ell = l0; ell <= l0 + 2; ++ell) {
    const std::string t = "ell=" + std::to_string(ell);
    const auto ls = find_lambda_star(ell, cfg.lambda0);
    r.checks.push_back(check_gt("lambda* > 0", 8, ls.lambda_star, 0.0, t));
    r.checks.push_back(check_lt("lambda* < lambda0", 8, ls.lambda_star, cfg.lambda0, t));
    r.checks.push_back(check_le("|sigma_ell(lambda*)|", 8, std::abs(ls.sigma_at_star), cfg.zero_tol, t));
    r.checks.push_back(check_gt("sigma_ell'(lambda*)", 8, ls.sigma_prime, 0.0, t));
    r.checks.push_back(check_eq("sign changes on the 50-point scan", 8, ls.scan_sign_changes, 1, t));
    double sep = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= ell + 3; ++k)
      if (k != ell) sep = std::min(sep, std::abs(solve_sigma(k, ls.lambda_star).value));
    r.checks.push_back(check_ge("min_{k != ell} |sigma_k(lambda*)|", 8, sep, 1e-4, t));
    out.push_back({{"ell", ell}, {"lambda_star", ls.lambda_star}, {"sigma_at_star", ls.sigma_at_star},
                   {"sigma_prime", ls.sigma_prime}});
  }
  r.summaries["lambda_star"] = {{"lambda0", cfg.lambda0}, {"ell_zero", l0}, {"roots", out}};
}

void sphere(const RunConfig& cfg, Report& r) {
  const auto model = build_sphere_model(cfg.lambda0, cfg.ell, cfg.sphere_K, cfg.sphere_L, cfg.sphere_M);
  const auto b = sphere_trace(model, 0.02, 0.005, cfg.newton_tol);
  const std::string t = "ell=" + std::to_string(model.ell);
  r.checks.push_back(check_eq("sphere branch complete to |s| = 0.02", 9, b.truncated ? 1 : 0, 0, b.message));
  auto at = [&](double s) -> const SphereBranchPoint& {
    for (const auto& p : b.points)
      if (std::abs(p.s - s) < 1e-9) return p;
    throw std::runtime_error("missing sphere branch point s=" + std::to_string(s));
  };
  double res = 0.0, hmin = 1e300, hmax = -1e300, xmin = 1e300, xmax = -1e300;
  for (const auto& p : b.points) {
    res = std::max(res, p.residual_G);
    const Eigen::VectorXd H = 1.0 + (model.grid.angular.E * p.h_u.coeffs).array();
    for (int j = 0; j < H.size(); ++j) {
      hmin = std::min(hmin, p.lambda / H(j));
      hmax = std::max(hmax, p.lambda / H(j));
    }
    xmin = std::min(xmin, p.xi);
    xmax = std::max(xmax, p.xi);
  }
  r.checks.push_back(check_le("max |G| on the sphere branch", 9, res, cfg.newton_tol, t));
  r.checks.push_back(check_gt("min h~ at collocation points", 9, hmin, 0.0));
  r.checks.push_back(check_lt("max h~ at collocation points", 9, hmax, pi / 2));
  r.checks.push_back(check_gt("min xi_s", 9, xmin, 0.0));
  r.checks.push_back(check_lt("max xi_s", 9, xmax, cfg.lambda0));
  for (double sg : {1.0, -1.0}) {
    const std::string ts = sg > 0 ? "s>0" : "s<0";
    std::vector<double> q;
    for (double s : {0.02, 0.01, 0.005}) q.push_back(at(sg * s).E / s);
    r.checks.push_back(check_eq("E(s)/|s| decreasing over halvings", 9, not_decreasing(q), 0, ts));
    r.checks.push_back(check_le("(E/|s| at 0.005) / (E/|s| at 0.02)", 9, q[2] / q[0], 0.5, ts));
  }
  double lo = 1e300, hi = -1e300;
  json orc = json::array();
  for (double s : {0.0, 0.01, 0.02, -0.02}) {
    const SphereSolution sol(model, at(s));
    const double a = sphere_residual_oracle(sol, 0.02).interior, c = sphere_residual_oracle(sol, 0.01).interior,
                 d = sphere_residual_oracle(sol, 0.005).interior;
    lo = std::min({lo, a / c, c / d});
    hi = std::max({hi, a / c, c / d});
    orc.push_back({{"s", s}, {"delta_0.02", a}, {"delta_0.01", c}, {"delta_0.005", d}});
  }
  r.checks.push_back(check_ge("oracle ratio under step halving (min)", 9, lo, 3.4));
  r.checks.push_back(check_le("oracle ratio under step halving (max)", 9, hi, 4.6));
  json pts = json::array();
  for (const auto& p : b.points)
    pts.push_back({{"s", p.s}, {"xi", p.xi}, {"mu", p.mu}, {"E", p.E}, {"residual_G", p.residual_G},
                   {"boundary_error", p.boundary_error}});
  r.summaries["sphere_branch"] = {{"ell", model.ell},          {"lambda_star", model.lambda_star},
                                  {"points", pts},             {"oracle", orc}};
}

using Criterion = void (*)(const RunConfig&, Report&);

}  // namespace

Report verify_all(const RunConfig& config, const std::vector<int>& only) {
  using clock = std::chrono::steady_clock;
  const Criterion table[] = {closed_forms, bessel, trivial_branch, kernel, expansion,
                             nodal,        eigencurves, lambda_star, sphere};
  const double limits[] = {1.0, 0.0, 0.0, 30.0, 180.0, 0.0, 0.0, 0.0, 0.0};
  Report r;
  r.config = config;
  const auto t0 = clock::now();
  auto wanted = [&](int c) { return only.empty() || std::find(only.begin(), only.end(), c) != only.end(); };
  for (int c = 1; c <= 9; ++c) {
    if (!wanted(c)) continue;
    r.criteria.push_back(c);
    const auto s = clock::now();
    try {
      table[c - 1](config, r);
    } catch (const std::exception& e) {
      r.checks.push_back(Check{"exception", c, false, std::nan(""), std::nan(""), "", e.what()});
    }
    const double secs = std::chrono::duration<double>(clock::now() - s).count();
    r.seconds[c] = secs;
    if (limits[c - 1] > 0) r.budgets.push_back({c, limits[c - 1], secs});
  }
  r.total_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  if (wanted(10)) {
    r.criteria.push_back(10);
    int failing = 0;
    for (int c : r.criteria)
      if (c != 10 && !r.criterion_ok(c)) ++failing;
    r.checks.push_back(check_eq("criteria failing among those run", 10, failing, 0));
    r.budgets.push_back({10, 300.0, r.total_seconds});
  }
  return r;
}

}  // namespace schiffer
