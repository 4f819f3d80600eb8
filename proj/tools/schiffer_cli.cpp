#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>

#include "schiffer/branch.hpp"
#include "schiffer/linear_analysis.hpp"
#include "schiffer/sphere_branch.hpp"
#include "schiffer/sphere_spectral.hpp"
#include "schiffer/verify.hpp"

using namespace schiffer;
using json = nlohmann::json;
using std::numbers::pi;

namespace {

struct Output {
  json doc;
  std::vector<Check> checks;
};

std::ofstream open_csv(const RunConfig& c, const std::string& name) {
  const std::string path = output_path(c, name);
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.precision(17);
  return f;
}

bool all_pass(const std::vector<Check>& v) {
  for (const auto& c : v)
    if (!c.pass) return false;
  return true;
}

int finish(const RunConfig& c, const std::string& file, Output out) {
  out.doc["checks"] = checks_json(out.checks);
  out.doc["status"] = all_pass(out.checks) ? "pass" : "fail";
  write_json(output_path(c, file), out.doc);
  std::cout << out.doc.dump(2) << "\n";
  for (const auto& k : out.checks)
    if (!k.pass) std::cerr << "check failed: " << k.name << " (" << k.measured << " " << k.relation << " " << k.tolerance << ")\n";
  return all_pass(out.checks) ? 0 : 1;
}

int cmd_constants(const RunConfig& c) {
  const auto m = build_cylinder_model(c.N, c.m);
  Output o;
  o.doc = {{"kind", "constants"}, {"N", c.N}, {"m", c.m}, {"j_m", m.j_m}, {"j_dir", m.j_dir},
           {"lambda_m", m.lambda_m}, {"mu0", m.mu0}, {"kappa", m.kappa}, {"beta", m.beta},
           {"gamma", m.gamma}, {"c_m", m.c_m}};
  return finish(c, "constants.json", o);
}

int cmd_bessel_zero(const RunConfig& c, double nu, int count) {
  if (count < 1) throw ConfigError("--count must be >= 1");
  const BesselTable t(BesselOrder(nu), count);
  Output o;
  o.doc = {{"kind", "bessel-zero"}, {"nu", nu}, {"zeros", t.zeros()}};
  return finish(c, "bessel_zero.json", o);
}

int cmd_kernel(const RunConfig& c) {
  const auto g = make_cylinder_grid(c.N, c.K, c.L, c.M);
  const auto model = build_cylinder_model(c.N, c.m);
  Output o;
  json scans = json::array();
  for (double d : {0.0, -0.1, 0.1}) {
    const auto s = kernel_scan(g, model, model.lambda_m + d, c.kernel_tol);
    scans.push_back({{"lambda", model.lambda_m + d}, {"offset", d}, {"kernel_count", s.kernel_count},
                     {"kernel_mode", s.kernel_mode ? json(*s.kernel_mode) : json(nullptr)},
                     {"smallest_singular", s.smallest}});
    o.checks.push_back(check_eq(d == 0 ? "kernel count at lambda_m" : "kernel count off lambda_m", 4,
                                s.kernel_count, d == 0 ? 1 : 0));
  }
  o.doc = {{"kind", "kernel"}, {"N", c.N}, {"m", c.m}, {"lambda_m", model.lambda_m},
           {"kernel_tol", c.kernel_tol}, {"scans", scans}};
  return finish(c, "kernel.json", o);
}

int cmd_branch(const RunConfig& c) {
  const auto g = make_cylinder_grid(c.N, c.K, c.L, c.M);
  const auto model = build_cylinder_model(c.N, c.m);
  const Branch b = trace(model, g, c.s_max, c.ds, c.newton_tol);
  const auto rows = expansion_report(b);
  Output o;
  json pts = json::array();
  double res = 0.0;
  for (std::size_t i = 0; i < b.points.size(); ++i) {
    const auto& p = b.points[i];
    res = std::max(res, p.residual_G);
    pts.push_back({{"s", p.s}, {"lambda", p.lambda}, {"mu", p.mu}, {"residual_G", p.residual_G},
                   {"residual_oracle", p.residual_oracle}, {"constraint_error", p.constraint_error},
                   {"boundary_error", p.boundary_error}, {"newton_iters", p.newton_iters},
                   {"E_h", rows[i].E_h}, {"E_w", rows[i].E_w}});
  }
  o.checks.push_back(check_le("max |G| on the branch", 5, res, c.newton_tol));
  o.checks.push_back(check_eq("branch complete", 5, b.truncated ? 1 : 0, 0, b.message));
  o.doc = {{"kind", "branch"}, {"config", config_json(c)}, {"lambda_m", model.lambda_m}, {"kappa", model.kappa},
           {"beta", model.beta}, {"gamma", model.gamma}, {"truncated", b.truncated}, {"message", b.message},
           {"points", pts}};
  auto f = open_csv(c, "profiles.csv");
  f << "s,x,h\n";
  for (const auto& p : b.points)
    for (int k = 0; k <= 128; ++k) {
      const double x = 2 * pi * k / 128;
      f << p.s << "," << x << "," << p.h_phys.at(g.angular, x) << "\n";
    }
  return finish(c, "branch.json", o);
}

int cmd_verify(const RunConfig& c, const std::vector<int>& only) {
  for (int k : only)
    if (k < 1 || k > 10) throw ConfigError("--only takes criteria 1..10");
  const Report r = verify_all(c, only);
  const json j = to_json(r);
  write_json(output_path(c, "report.json"), j);
  std::cout << j.dump(2) << "\n";
  for (int k : r.criteria)
    std::cerr << "criterion " << k << ": " << (r.criterion_ok(k) ? "pass" : "FAIL") << "  " << criterion_title(k)
              << "\n";
  return r.ok() ? 0 : 1;
}

int resolve_ell(const RunConfig& c) { return c.ell > 0 ? c.ell : ell_zero(c.lambda0); }

int cmd_sphere_curve(const RunConfig& c, bool sigma, double lambda, double lo, double hi, int samples) {
  const int ell = sigma ? resolve_ell(c) : -1;
  auto value = [&](double l) { return sigma ? solve_sigma(ell, l).value : solve_mu(l).value; };
  auto deriv = [&](double l) { return sigma ? sigma_derivative(ell, l) : mu_derivative(l); };
  Output o;
  o.doc = {{"kind", sigma ? "sphere-sigma" : "sphere-mu"}, {"lambda", lambda}, {"value", value(lambda)},
           {"derivative", deriv(lambda)}};
  if (sigma) o.doc["ell"] = ell;
  if (samples > 0) {
    if (!(lo >= 0 && hi < 1 && lo <= hi) || samples < 2) throw ConfigError("curve needs 0 <= lo <= hi < 1, samples >= 2");
    auto f = open_csv(c, sigma ? "sigma_curve.csv" : "mu_curve.csv");
    f << "lambda,value,derivative\n";
    for (int k = 0; k < samples; ++k) {
      const double l = lo + (hi - lo) * k / (samples - 1);
      f << l << "," << value(l) << "," << deriv(l) << "\n";
    }
    o.doc["curve_samples"] = samples;
  }
  return finish(c, sigma ? "sphere_sigma.json" : "sphere_mu.json", o);
}

int cmd_lambda_star(const RunConfig& c) {
  const int ell = resolve_ell(c);
  const auto ls = find_lambda_star(ell, c.lambda0);
  Output o;
  o.checks.push_back(check_le("|sigma_ell(lambda*)|", 8, std::abs(ls.sigma_at_star), c.zero_tol));
  o.checks.push_back(check_gt("sigma_ell'(lambda*)", 8, ls.sigma_prime, 0.0));
  o.checks.push_back(check_eq("sign changes on the scan", 8, ls.scan_sign_changes, 1));
  o.doc = {{"kind", "sphere-lambda-star"}, {"ell", ell}, {"lambda0", c.lambda0}, {"lambda_star", ls.lambda_star},
           {"sigma_at_star", ls.sigma_at_star}, {"sigma_prime", ls.sigma_prime},
           {"scan_sign_changes", ls.scan_sign_changes}};
  return finish(c, "sphere_lambda_star.json", o);
}

int cmd_sphere_branch(const RunConfig& c) {
  const auto model = build_sphere_model(c.lambda0, c.ell, c.sphere_K, c.sphere_L, c.sphere_M);
  const auto b = sphere_trace(model, c.s_max, c.ds, c.newton_tol);
  Output o;
  json pts = json::array();
  double res = 0.0, hmin = 1e300, hmax = -1e300, xmin = 1e300, xmax = -1e300;
  auto f = open_csv(c, "sphere_boundary.csv");
  f << "s,x,h,X,Y,Z_upper,Z_lower\n";
  for (const auto& p : b.points) {
    res = std::max(res, p.residual_G);
    hmin = std::min(hmin, p.h_min);
    hmax = std::max(hmax, p.h_max);
    xmin = std::min(xmin, p.xi);
    xmax = std::max(xmax, p.xi);
    pts.push_back({{"s", p.s}, {"r", p.r}, {"xi", p.xi}, {"mu", p.mu}, {"mu_lambda", p.mu_lambda}, {"E", p.E},
                   {"h_min", p.h_min}, {"h_max", p.h_max}, {"residual_G", p.residual_G},
                   {"constraint_error", p.constraint_error}, {"boundary_error", p.boundary_error},
                   {"oracle_interior", p.oracle_interior}, {"newton_iters", p.newton_iters}});
    const SphereSolution sol(model, p);
    for (int k = 0; k <= 256; ++k) {
      const double x = 2 * pi * k / 256, h = sol.h_tilde(x);
      f << p.s << "," << x << "," << h << "," << std::cos(x) * std::cos(h) << "," << std::sin(x) * std::cos(h)
        << "," << std::sin(h) << "," << -std::sin(h) << "\n";
    }
  }
  o.checks.push_back(check_le("max |G| on the sphere branch", 9, res, c.newton_tol));
  o.checks.push_back(check_gt("min h~", 9, hmin, 0.0));
  o.checks.push_back(check_lt("max h~", 9, hmax, pi / 2));
  o.checks.push_back(check_gt("min xi_s", 9, xmin, 0.0));
  o.checks.push_back(check_lt("max xi_s", 9, xmax, c.lambda0));
  o.checks.push_back(check_eq("branch complete", 9, b.truncated ? 1 : 0, 0, b.message));
  o.doc = {{"kind", "sphere-branch"}, {"config", config_json(c)}, {"ell", model.ell},
           {"lambda_star", model.lambda_star}, {"mu_star", model.mu_star},
           {"sigma_prime_star", model.sigma_prime_star}, {"U2_at_1", model.d2U1}, {"V1_at_1", model.dV1},
           {"kappa", sphere_r_of_s(model, 1.0)}, {"truncated", b.truncated}, {"message", b.message},
           {"points", pts}};
  return finish(c, "sphere_branch.json", o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical companion for Schiffer-type overdetermined problems on cylinders and spheres"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  app.add_option("--config", config_file, "key=value config file");
  // Flags mirror the config keys and are applied last.
  const std::vector<std::pair<std::string, std::string>> keys = {
      {"--N", "N"},           {"--m", "m"},
      {"--K", "K"},           {"--L", "L"},
      {"--M", "M"},           {"--lambda0", "lambda0"},
      {"--ell", "ell"},       {"--sphere-K", "sphere_K"},
      {"--sphere-L", "sphere_L"}, {"--sphere-M", "sphere_M"},
      {"--newton-tol", "newton_tol"}, {"--kernel-tol", "kernel_tol"},
      {"--zero-tol", "zero_tol"}, {"--s-max", "s_max"},
      {"--ds", "ds"},         {"--out", "out_dir"}};
  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<CLI::Option*, std::string>> flag_opts;
  for (const auto& [flag, key] : keys) flag_opts.emplace_back(app.add_option(flag, flag_values[key]), key);

  auto* constants = app.add_subcommand("constants", "cylinder model constants");
  auto* bz = app.add_subcommand("bessel-zero", "zeros of J_nu");
  double nu = 0.0;
  int count = 5;
  bz->add_option("--nu", nu, "order > -1")->required();
  bz->add_option("--count", count, "number of zeros");
  auto* kernel = app.add_subcommand("kernel", "kernel scan at lambda_m and lambda_m +- 0.1");
  auto* branch = app.add_subcommand("branch", "cylinder branch: branch.json and profiles.csv");
  auto* verify = app.add_subcommand("verify", "acceptance suite: report.json");
  std::vector<int> only;
  verify->add_option("--only", only, "criteria to run")->delimiter(',');
  auto* sphere = app.add_subcommand("sphere", "sphere eigencurves and branch");
  sphere->require_subcommand(1);
  double lambda = 0.5, lo = 0.0, hi = 0.95;
  int samples = 0;
  auto* smu = sphere->add_subcommand("mu", "mu(lambda)");
  auto* ssig = sphere->add_subcommand("sigma", "sigma_ell(lambda)");
  for (auto* s : {smu, ssig}) {
    s->add_option("--lambda", lambda, "evaluation point");
    s->add_option("--lo", lo, "curve start");
    s->add_option("--hi", hi, "curve end");
    s->add_option("--samples", samples, "curve samples written to CSV (0: none)");
  }
  auto* sls = sphere->add_subcommand("lambda-star", "root of sigma_ell on (0, lambda0)");
  auto* sbr = sphere->add_subcommand("branch", "sphere branch: sphere_branch.json and sphere_boundary.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunConfig cfg;
  try {
    if (!config_file.empty()) load_config_file(cfg, config_file);
    apply_environment(cfg);
    for (const auto& [opt, key] : flag_opts)
      if (opt->count() > 0) set_config_value(cfg, key, flag_values[key]);
    cfg.validate();
    if (*constants) return cmd_constants(cfg);
    if (*bz) return cmd_bessel_zero(cfg, nu, count);
    if (*kernel) return cmd_kernel(cfg);
    if (*branch) return cmd_branch(cfg);
    if (*verify) return cmd_verify(cfg, only);
    if (*smu) return cmd_sphere_curve(cfg, false, lambda, lo, hi, samples);
    if (*ssig) return cmd_sphere_curve(cfg, true, lambda, lo, hi, samples);
    if (*sls) return cmd_lambda_star(cfg);
    if (*sbr) return cmd_sphere_branch(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
