#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaxbench/grid.hpp"
#include "relaxbench/heterogeneity.hpp"

namespace relaxbench {

// Raised for malformed or out-of-range configuration input (CLI exit code 3).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
    Relax2,
    Relax3,
    Limit2,
    Limit3,
    Steady,
    Kp,
    SweepEps,
    ValidateModel,
    Compare,
};

const char* kind_name(ExperimentKind k);

struct HetDescriptor {
    std::string family; // affine | smooth_nonlinear | piecewise_bv
    double a0 = 0;
    double a1 = 0;
    double omega = 0;
    double c = 0;
    std::vector<PiecewiseJump> jumps;
};

struct GridDescriptor {
    double length = 1.0;
    int n_cells = 400;
};

// Initial profile of the slow component (v for 2x2, c3 for 3x3) as a function
// of x; the fast components start on the equilibrium manifold.
//   constant:     v0(x) = value
//   ramp:         v0(x) linear, `from` at x = 0 to `to` at x = L
//   kp:           v0(x) = k_p(x) at level p (stationary profile)
//   flux_plateau: v0(x) = k_{P(x)}(x) with flux level P(x) = level for
//                 x <= plateau_end, smoothstep down to 0 at x = foot
struct InitialDescriptor {
    std::string type = "constant";
    double value = 0;
    double from = 0, to = 0;
    double p = 0;
    double level = 0;
    double plateau_end = 0;
    double foot = 0;
};

// NaN marks "auto": u0 / c01 / c02 derived from the initial profile at x = 0.
struct RelaxParams {
    double epsilon = 1e-3;
    double cfl = 1.0;
    double t_end = 1.0;
    double alpha = 0.5;
    double u0 = std::numeric_limits<double>::quiet_NaN();
    double c01 = std::numeric_limits<double>::quiet_NaN();
    double c02 = std::numeric_limits<double>::quiet_NaN();
};

// NaN inflow_rho = derive from the relax boundary data.
struct LimitParams {
    double cfl = 0.9;
    double t_end = 1.0;
    double inflow_rho = std::numeric_limits<double>::quiet_NaN();
};

// Enabled invariant checks and their thresholds.  NaN tolerances mean "auto"
// (entropy: 10 (dx + dt); ceiling value: stationary supersolution bound).
struct CheckSettings {
    bool positivity = true;
    double positivity_tol = 1e-14;
    bool mass = true;
    double mass_tol = 1e-12;
    bool ceiling = true;
    double ceiling_tol = 1e-8;
    double ceiling_value = std::numeric_limits<double>::quiet_NaN();
    bool tbv = false;
    double tbv_tol = 1e-8;
    bool entropy = false;
    double entropy_tol = std::numeric_limits<double>::quiet_NaN();
    bool steady_residual = true;
    double steady_residual_tol = 1e-10;
    bool kp_residual = true;
    double kp_residual_tol = 1e-10;
    bool eq_dev_order = true;
    double eq_dev_min_order = 0.4;
    bool l1_monotone = true;
    double l1_drop_factor = 4.0;
    bool bln = false;
    double bln_tol = 1e-6;
    bool model_origin = true;
    bool model_slopes = true;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Relax2;
    HetDescriptor het;
    GridDescriptor grid;
    InitialDescriptor initial;
    RelaxParams relax;
    LimitParams limit;
    CheckSettings checks;
    std::vector<double> epsilons;  // sweep-eps / compare, strictly decreasing
    std::vector<double> p_samples; // explicit override of the sampled levels
    int n_p_samples = 17;          // automatic sampling count
    double p_level = 0;            // kind == kp
    int snapshot_every = 0;        // 0 = no field snapshots
    std::string output_dir = "out";
};

// Parses and fully validates a JSON config.  Unknown keys are rejected with
// their path; all defaults are materialized in the returned struct.
ExperimentConfig parse_config(const std::string& text);

Heterogeneity make_heterogeneity(const HetDescriptor& d);
Grid make_grid(const GridDescriptor& d);

// Resolved config with explicit defaults, serialized back to JSON
// ("auto" for tolerances and boundary data still to be derived at run time).
std::string resolved_config_json(const ExperimentConfig& cfg);

} // namespace relaxbench
