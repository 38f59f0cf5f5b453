#pragma once

#include <string>
#include <vector>

#include "relaxbench/config.hpp"

namespace relaxbench {

struct ExperimentOutcome {
    int exit_code = 0; // 0 all checks pass, 1 check failed, 2 solver error
    int checks_run = 0;
    int checks_failed = 0;
};

// Runs the configured experiment, writes CSV/JSON artifacts into out_dir and
// prints one PASS/FAIL line per enabled check.  Solver failures still write
// the diagnostic payload and yield exit code 2.  jobs > 1 parallelizes the
// members of an epsilon sweep.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg,
                                 const std::string& out_dir, int jobs);

// Initial profile of the slow component sampled at cell centers, plus its
// boundary value at x = 0 (used to derive compatible inflow data).
struct InitialData {
    std::vector<double> slow;  // v (2x2) or c3 (3x3) at cell centers
    double slow_at_0 = 0;      // profile evaluated at x = 0
};

InitialData build_initial(const InitialDescriptor& d, const Heterogeneity& het,
                          const Grid& grid, SystemKind system);

// Levels for the adapted-entropy checks: n equally spaced values from 0 to
// the largest flux seen in the initial data or at the inflow boundary, with
// the sample closest to the inflow flux level replaced by that exact level.
std::vector<double> make_p_samples(const std::vector<double>& rho0,
                                   double inflow_rho, const Heterogeneity& het,
                                   const Grid& grid, SystemKind system, int n);

} // namespace relaxbench
