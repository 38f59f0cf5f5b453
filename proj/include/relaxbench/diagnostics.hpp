#pragma once

#include <string>
#include <vector>

#include "relaxbench/grid.hpp"
#include "relaxbench/heterogeneity.hpp"
#include "relaxbench/steady.hpp"

namespace relaxbench {

// Norms and residuals measured over one evolution run.
struct DiagnosticsReport {
    // sup over the whole run of the cellwise max, per component
    double linf_u = 0, linf_v = 0;
    double linf_c1 = 0, linf_c2 = 0, linf_c3 = 0;

    // time-BV functional sum_j (|u'-u| + |v'-v|) dx/dt, one entry per step
    std::vector<double> bv_t_series;
    double bv_t_initial = 0;      // first entry
    double bv_t_max_increase = 0; // max over steps of TBV^{n+1} - TBV^n
    // x-BV of the initial data plus ghost-compatibility terms; the time-BV
    // functional of the first step is bounded by this for equilibrium data
    double bv_x_initial_bound = 0;

    // x-BV of the combined quantity u - v (resp. c1 + c2 - c3)
    double bv_x_combined_initial = 0, bv_x_combined_final = 0;
    // x-BV of the conserved density u + v (resp. c1 + c2 + c3)
    double bv_x_density_initial = 0, bv_x_density_final = 0;
    // x-BV of single components (not uniform in epsilon; negative control)
    double bv_x_u_initial = 0, bv_x_u_final = 0;
    double bv_x_v_initial = 0, bv_x_v_final = 0;

    // ||u - h(v,.)||_{L2(x,t)}; for the 3x3 system the L2(x,t) norm of the
    // pair (c2 + h(c3,.) - 2 c1, c1 + h(c3,.) - 2 c2)
    double eq_dev_l2 = 0;

    // adapted-entropy residuals: worst over cells and steps, per level p
    std::vector<double> entropy_p;
    std::vector<double> entropy_worst;

    // max over steps of |mass change - boundary flux balance|
    double mass_balance_error = 0;

    double min_value = 0;      // most negative cell value seen
    double bound_ceiling = 0;  // configured sup ceiling (0 = none)
    bool ceiling_violated = false; // any component above ceiling + 1e-8

    bool well_prepared = true;     // initial data on the equilibrium manifold
    double initial_layer_size = 0; // max |u0_j - h(v0_j, x_j)| over cells
    double corner_mismatch = 0;    // 3x3: initial data vs boundary values

    int n_steps = 0;
    double dt = 0;
    double dx = 0;
};

// Aggregation of an epsilon sweep against one limit-solver reference run.
struct SweepResult {
    std::vector<double> epsilons; // strictly decreasing
    std::vector<DiagnosticsReport> reports;
    std::vector<double> l1_distance; // ||density - rho_limit||_1 at t_end
    std::vector<double> eq_dev;      // copy of eq_dev_l2 per epsilon
    double eq_dev_order = 0;         // log-log slope of eq_dev vs epsilon
};

// sum_j |f_{j+1} - f_j|
double bv_x(const std::vector<double>& f);

// sum_j |a_j - b_j|
double l1_diff(const std::vector<double>& a, const std::vector<double>& b);

// sum_j (|u'_j-u_j| + |v'_j-v_j|) dx/dt -- discrete L1 norm of the time
// derivative over one step
double time_bv_step(const std::vector<double>& u_prev,
                    const std::vector<double>& v_prev,
                    const std::vector<double>& u_next,
                    const std::vector<double>& v_next, double dx, double dt);

// sum_j (u_j - h(v_j, x_j))^2 dx
double eq_dev_sq_profile(const std::vector<double>& u,
                         const std::vector<double>& v, const Heterogeneity& het,
                         const Grid& grid);

// L2(x,t) norm of u - h(v,.) from snapshots at uniform spacing dt
// (trapezoid rule in time)
double equilibrium_deviation(const std::vector<std::vector<double>>& us,
                             const std::vector<std::vector<double>>& vs,
                             const Heterogeneity& het, const Grid& grid,
                             double dt);

// Worst (most positive) discrete residual of the adapted entropy pair
//   phi_j = |u_j - h(k_j,x_j)| + |v_j - k_j|
//   G_{j+1/2} = |u_j - h(k_j,x_j)| - |v_{j+1} - k_j|
// i.e. [phi' - phi]/dt + [G_j - G_{j-1}]/dx maximized over interior cells,
// with the flux evaluated on the pre-step state.
double entropy_residual_relax(const std::vector<double>& u_prev,
                              const std::vector<double>& v_prev,
                              const std::vector<double>& u_next,
                              const std::vector<double>& v_next,
                              const Heterogeneity& het, const Grid& grid,
                              const KpProfile& kp, double dt);

// Same for the 3x3 system with
//   phi_j = |c1_j - h(k_j)| + |c2_j - h(k_j)| + |c3_j - k_j|
//   G_{j+1/2} = |c1_j - h(k_j)| + |c2_j - h(k_j)| - |c3_{j+1} - k_j|
double entropy_residual_relax3(const std::vector<double>& c1_prev,
                               const std::vector<double>& c2_prev,
                               const std::vector<double>& c3_prev,
                               const std::vector<double>& c1_next,
                               const std::vector<double>& c2_next,
                               const std::vector<double>& c3_next,
                               const Heterogeneity& het, const Grid& grid,
                               const KpProfile& kp, double dt);

// ||density - rho|| in L1: sum_j |u_j + v_j - rho_j| dx
double compare_with_limit(const std::vector<double>& u,
                          const std::vector<double>& v,
                          const std::vector<double>& rho, const Grid& grid);
double compare_with_limit3(const std::vector<double>& c1,
                           const std::vector<double>& c2,
                           const std::vector<double>& c3,
                           const std::vector<double>& rho, const Grid& grid);

// Least-squares slope of log(y) against log(x); xs, ys > 0, >= 3 points.
double fit_order(const std::vector<double>& xs, const std::vector<double>& ys);

// JSON text (nlohmann dump, 2-space indent) of a report / sweep result.
std::string report_to_json(const DiagnosticsReport& r);
std::string sweep_to_json(const SweepResult& s);

} // namespace relaxbench
