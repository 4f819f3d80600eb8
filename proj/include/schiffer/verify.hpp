#pragma once

#include <vector>

#include "schiffer/report.hpp"

namespace schiffer {

// Runs the acceptance suite (criteria 1..10, or the subset in `only`). Never throws:
// an exception inside a criterion becomes a failing row.
Report verify_all(const RunConfig& config, const std::vector<int>& only = {});

}  // namespace schiffer
