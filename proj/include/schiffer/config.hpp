#pragma once

#include <stdexcept>
#include <string>

namespace schiffer {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // cylinder
  int N = 1;
  int m = 1;
  int K = 48, L = 16, M = 16;
  // sphere; ell = 0 picks ell_zero(lambda0)
  double lambda0 = 0.5;
  int ell = 0;
  int sphere_K = 32, sphere_L = 12, sphere_M = 12;

  double newton_tol = 1e-10;
  double kernel_tol = 1e-7;
  double zero_tol = 1e-10;
  double s_max = 0.02;
  double ds = 0.005;
  std::string out_dir = ".";

  // Throws ConfigError.
  void validate() const;
};

// Flat key=value lines; '#' starts a comment. Keys match the field names.
void apply_config_text(RunConfig& c, const std::string& text, const std::string& origin = "config");
void load_config_file(RunConfig& c, const std::string& path);
void set_config_value(RunConfig& c, const std::string& key, const std::string& value);

// SCHIFFER_OUT, when set and non-empty, replaces out_dir.
void apply_environment(RunConfig& c);

}  // namespace schiffer
