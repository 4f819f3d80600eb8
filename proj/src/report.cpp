#include "schiffer/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace schiffer {

namespace {

Check make(std::string name, int criterion, double measured, double tol, const char* rel, bool pass,
           std::string detail) {
  return Check{std::move(name), criterion, pass, measured, tol, rel, std::move(detail)};
}

nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

Check check_le(std::string name, int criterion, double measured, double tol, std::string detail) {
  return make(std::move(name), criterion, measured, tol, "<=", measured <= tol, std::move(detail));
}
Check check_ge(std::string name, int criterion, double measured, double bound, std::string detail) {
  return make(std::move(name), criterion, measured, bound, ">=", measured >= bound, std::move(detail));
}
Check check_eq(std::string name, int criterion, double measured, double expected, std::string detail) {
  return make(std::move(name), criterion, measured, expected, "==", measured == expected, std::move(detail));
}
Check check_gt(std::string name, int criterion, double measured, double bound, std::string detail) {
  return make(std::move(name), criterion, measured, bound, ">", measured > bound, std::move(detail));
}
Check check_lt(std::string name, int criterion, double measured, double bound, std::string detail) {
  return make(std::move(name), criterion, measured, bound, "<", measured < bound, std::move(detail));
}

bool Report::criterion_ok(int c) const {
  bool any = false;
  for (const auto& k : checks) {
    if (k.criterion != c) continue;
    any = true;
    if (!k.pass) return false;
  }
  for (const auto& b : budgets)
    if (b.criterion == c && !b.pass()) return false;
  return any;
}

bool Report::ok() const {
  for (const auto& k : checks)
    if (!k.pass) return false;
  for (const auto& b : budgets)
    if (!b.pass()) return false;
  return !checks.empty();
}

const char* criterion_title(int c) {
  switch (c) {
    case 1: return "closed-form constants";
    case 2: return "Bessel infrastructure";
    case 3: return "trivial branch";
    case 4: return "kernel and transversality (cylinder)";
    case 5: return "branch expansion (cylinder)";
    case 6: return "nodal count";
    case 7: return "sphere eigencurves";
    case 8: return "lambda* pipeline";
    case 9: return "sphere branch";
    case 10: return "whole-suite runtime and exit status";
    default: return "";
  }
}

nlohmann::json config_json(const RunConfig& c) {
  return {{"N", c.N},
          {"m", c.m},
          {"K", c.K},
          {"L", c.L},
          {"M", c.M},
          {"lambda0", c.lambda0},
          {"ell", c.ell},
          {"sphere_K", c.sphere_K},
          {"sphere_L", c.sphere_L},
          {"sphere_M", c.sphere_M},
          {"newton_tol", c.newton_tol},
          {"kernel_tol", c.kernel_tol},
          {"zero_tol", c.zero_tol},
          {"s_max", c.s_max},
          {"ds", c.ds},
          {"out_dir", c.out_dir}};
}

nlohmann::json checks_json(const std::vector<Check>& checks) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& k : checks)
    a.push_back({{"name", k.name},
                 {"criterion", k.criterion},
                 {"status", k.pass ? "pass" : "fail"},
                 {"measured", number(k.measured)},
                 {"relation", k.relation},
                 {"tolerance", number(k.tolerance)},
                 {"detail", k.detail}});
  return a;
}

nlohmann::json to_json(const Report& r) {
  nlohmann::json crit = nlohmann::json::array();
  for (int c : r.criteria) crit.push_back({{"id", c}, {"title", criterion_title(c)}, {"status", r.criterion_ok(c) ? "pass" : "fail"}});
  nlohmann::json budgets = nlohmann::json::array();
  for (const auto& b : r.budgets)
    budgets.push_back({{"criterion", b.criterion},
                       {"limit_seconds", b.limit_seconds},
                       {"seconds", b.seconds},
                       {"status", b.pass() ? "pass" : "fail"}});
  nlohmann::json secs = nlohmann::json::object();
  for (const auto& [c, s] : r.seconds) secs[std::to_string(c)] = s;
  return {{"kind", "schiffer-report"},
          {"version", 1},
          {"status", r.ok() ? "pass" : "fail"},
          {"config", config_json(r.config)},
          {"criteria", crit},
          {"checks", checks_json(r.checks)},
          {"summaries", r.summaries},
          {"timing", {{"total_seconds", r.total_seconds}, {"criterion_seconds", secs}, {"budgets", budgets}}}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << "\n";
}

std::string output_path(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out_dir) / name).string();
}

}  // namespace schiffer
