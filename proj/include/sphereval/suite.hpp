#pragma once

#include <string>
#include <vector>

namespace sphereval {

struct SuiteCase {
    std::string name;
    double residual = 0.0; // worst subcheck residual, in units of its tol
    double tol = 1.0;      // normalized: pass iff residual <= tol
    bool pass = false;
    std::string detail;
};

/// The full acceptance battery (ten criteria). Heavy: builds a 10^6-node
/// Monte Carlo grid on S^3 for the sweep criteria.
std::vector<SuiteCase> run_acceptance();

} // namespace sphereval
