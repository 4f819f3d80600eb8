#pragma once

#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "schiffer/config.hpp"

namespace schiffer {

// One row: measured `relation` tolerance.
struct Check {
  std::string name;
  int criterion = 0;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string relation;  // "<=", ">=", "==", ">", "<"
  std::string detail;
};

Check check_le(std::string name, int criterion, double measured, double tol, std::string detail = {});
Check check_ge(std::string name, int criterion, double measured, double bound, std::string detail = {});
Check check_eq(std::string name, int criterion, double measured, double expected, std::string detail = {});
Check check_gt(std::string name, int criterion, double measured, double bound, std::string detail = {});
Check check_lt(std::string name, int criterion, double measured, double bound, std::string detail = {});

struct Budget {
  int criterion = 0;
  double limit_seconds = 0.0;
  double seconds = 0.0;
  bool pass() const { return seconds <= limit_seconds; }
};

struct Report {
  RunConfig config;
  std::vector<int> criteria;  // the ones that were run
  std::vector<Check> checks;
  nlohmann::json summaries = nlohmann::json::object();
  std::vector<Budget> budgets;
  std::map<int, double> seconds;  // per criterion
  double total_seconds = 0.0;

  bool criterion_ok(int c) const;
  bool ok() const;
};

const char* criterion_title(int c);

nlohmann::json config_json(const RunConfig& c);
// Numerical content first; everything that depends on the clock sits under "timing".
nlohmann::json to_json(const Report& r);
nlohmann::json checks_json(const std::vector<Check>& checks);

// Creates parent directories; writes dump(2) plus a newline.
void write_json(const std::string& path, const nlohmann::json& j);
std::string output_path(const RunConfig& c, const std::string& name);

}  // namespace schiffer
