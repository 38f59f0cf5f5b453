#pragma once

#include <vector>

#include "relaxbench/diagnostics.hpp"
#include "relaxbench/grid.hpp"
#include "relaxbench/heterogeneity.hpp"
#include "relaxbench/steady.hpp"

namespace relaxbench {

// Cell averages of the limit conservation law density
//   rho = h(v,x) + v (2x2)  or  rho = 2 h(c3,x) + c3 (3x3).
struct LimitState {
    std::vector<double> rho;
    double t = 0;
    SystemKind system = SystemKind::TwoByTwo;
};

struct LimitConfig {
    SystemKind system = SystemKind::TwoByTwo;
    double cfl = 0.9;      // dt = cfl * dx / char_speed_bound
    double t_end = 1.0;
    double inflow_rho = 0; // boundary density at x = 0
};

// Upper bound on the characteristic speed: (mu-1)/(mu+1) resp. (2mu-1)/(2mu+1).
double char_speed_bound(const Heterogeneity& het, SystemKind system);

// Flux of the limit law: A = h(v,x) - v resp. B = 2 h(v,x) - v with
// v recovered from rho by the monotone inversion.
double limit_flux(const Heterogeneity& het, double rho, double x,
                  SystemKind system);

// Upwind update rho_j -= (dt/dx) [F(rho_j, x_j) - F(rho_{j-1}, x_{j-1})] with
// the ghost flux F(inflow_rho, 0) at the inflow interface and free outflow.
// Throws SolverError if dt exceeds the CFL bound.
void step_limit(LimitState& s, const Heterogeneity& het, const Grid& grid,
                double dt, double inflow_rho);

struct LimitRunResult {
    LimitState state;
    std::vector<double> times;  // one entry per step
    std::vector<double> rho_0;  // first-cell trace
    std::vector<double> rho_L;  // last-cell trace
    std::vector<double> flux_min, flux_max; // interior range of F(rho_j,x_j)
    DiagnosticsReport report;   // entropy residuals, linf, min value
};

LimitRunResult run_limit(LimitState initial, const Heterogeneity& het,
                         const Grid& grid, const LimitConfig& cfg,
                         const std::vector<KpProfile>* entropy_profiles = nullptr);

// Discrete residual of the adapted Kruzkov entropy
//   eta_j = |rho_j - rho_p(x_j)|, q_j = |F(rho_j, x_j) - p|
// as [eta' - eta]/dt + [q_j - q_{j-1}]/dx with q from the pre-step state.
// Entry 0 (inflow cell) is set to 0.
std::vector<double> entropy_residual_limit(const std::vector<double>& rho_prev,
                                           const std::vector<double>& rho_next,
                                           const Heterogeneity& het,
                                           const Grid& grid, double dt,
                                           const KpProfile& kp, double p);

// Bardos-LeRoux-Nedelec boundary report.  For every sampled level p whose
// steady density at the boundary lies strictly inside the open interval
// between the numerical trace and the boundary-datum density, the sign
// condition is evaluated; positive parts are recorded as violations.
struct BlnReport {
    double worst_violation_x0 = 0;
    double worst_violation_xL = 0;
    int applicable_x0 = 0, applicable_xL = 0; // (p, time) pairs tested
    int skipped_x0 = 0, skipped_xL = 0;       // pairs outside the interval
    int n_times = 0;
};

// times / rho_0 / rho_L: limit-solver boundary traces.
// w_times / w_values: trace of the first component at x = L from a small-eps
// relaxation run (interpolated linearly in time).
// datum_rho0: inflow density at x = 0 (the boundary datum).
BlnReport bln_check(const std::vector<double>& times,
                    const std::vector<double>& rho_0,
                    const std::vector<double>& rho_L,
                    const std::vector<double>& w_times,
                    const std::vector<double>& w_values,
                    const Heterogeneity& het, const Grid& grid,
                    const std::vector<double>& p_samples, double datum_rho0,
                    SystemKind system);

} // namespace relaxbench
