#include <cstdio>
#include <iostream>

#include "schiffer/verify.hpp"

using namespace schiffer;

int main() {
  RunConfig cfg;
  apply_environment(cfg);
  const Report r = verify_all(cfg);
  for (int c : r.criteria) {
    double secs = c == 10 ? r.total_seconds : 0.0;
    if (auto it = r.seconds.find(c); it != r.seconds.end()) secs = it->second;
    std::printf("criterion %2d: %s  %-40s (%.1f s)\n", c, r.criterion_ok(c) ? "PASS" : "FAIL", criterion_title(c), secs);
  }
  for (const auto& k : r.checks) {
    if (k.pass) continue;
    std::printf("  failed [%d] %s: measured %.6g, required %s %.6g%s%s\n", k.criterion, k.name.c_str(), k.measured,
                k.relation.c_str(), k.tolerance, k.detail.empty() ? "" : "; ", k.detail.c_str());
  }
  for (const auto& b : r.budgets)
    if (!b.pass()) std::printf("  over budget [%d]: %.1f s > %.1f s\n", b.criterion, b.seconds, b.limit_seconds);
  try {
    write_json(output_path(cfg, "acceptance_report.json"), to_json(r));
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
  }
  return r.ok() ? 0 : 1;
}
