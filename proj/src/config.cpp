#include "schiffer/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace schiffer {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw ConfigError("");
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
}

void check_size(const char* name, int v) {
  if (v < 8) throw ConfigError(std::string(name) + " must be >= 8, got " + std::to_string(v));
}

void check_tol(const char* name, double v) {
  if (!(v > 0.0 && v < 1e-2)) throw ConfigError(std::string(name) + " must lie in (0, 1e-2)");
}

}  // namespace

void RunConfig::validate() const {
  if (N < 1 || N > 5) throw ConfigError("N must lie in [1, 5]");
  if (m < 1 || m > 6) throw ConfigError("m must lie in [1, 6]");
  check_size("K", K);
  check_size("L", L);
  check_size("M", M);
  check_size("sphere_K", sphere_K);
  check_size("sphere_L", sphere_L);
  check_size("sphere_M", sphere_M);
  if (M < L || sphere_M < sphere_L) throw ConfigError("M must be >= L");
  check_tol("newton_tol", newton_tol);
  check_tol("kernel_tol", kernel_tol);
  check_tol("zero_tol", zero_tol);
  if (!(lambda0 > 0.0 && lambda0 < 1.0)) throw ConfigError("lambda0 must lie in (0, 1)");
  if (ell < 0 || ell > 200) throw ConfigError("ell must lie in [0, 200]");
  if (!(ds > 0.0) || !(s_max >= ds) || !std::isfinite(s_max)) throw ConfigError("need ds > 0 and s_max >= ds");
  if (out_dir.empty()) throw ConfigError("empty output directory");
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "N") c.N = to_int(key, value);
  else if (key == "m") c.m = to_int(key, value);
  else if (key == "K") c.K = to_int(key, value);
  else if (key == "L") c.L = to_int(key, value);
  else if (key == "M") c.M = to_int(key, value);
  else if (key == "lambda0") c.lambda0 = to_double(key, value);
  else if (key == "ell") c.ell = to_int(key, value);
  else if (key == "sphere_K") c.sphere_K = to_int(key, value);
  else if (key == "sphere_L") c.sphere_L = to_int(key, value);
  else if (key == "sphere_M") c.sphere_M = to_int(key, value);
  else if (key == "newton_tol") c.newton_tol = to_double(key, value);
  else if (key == "kernel_tol") c.kernel_tol = to_double(key, value);
  else if (key == "zero_tol") c.zero_tol = to_double(key, value);
  else if (key == "s_max") c.s_max = to_double(key, value);
  else if (key == "ds") c.ds = to_double(key, value);
  else if (key == "out_dir") c.out_dir = value;
  else throw ConfigError("unknown key '" + key + "'");
}

void apply_config_text(RunConfig& c, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(no) + ": expected key=value");
    try {
      set_config_value(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(no) + ": " + e.what());
    }
  }
}

void load_config_file(RunConfig& c, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  apply_config_text(c, ss.str(), path);
}

void apply_environment(RunConfig& c) {
  const char* v = std::getenv("SCHIFFER_OUT");
  if (v && *v) c.out_dir = v;
}

}  // namespace schiffer
