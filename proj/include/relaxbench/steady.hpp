#pragma once

#include <vector>

#include "relaxbench/grid.hpp"
#include "relaxbench/heterogeneity.hpp"

namespace relaxbench {

// Steady-state family of the limit conservation law at flux level p:
//   2x2:  h(k_p(x), x) -   k_p(x) = p
//   3x3:  2 h(k_p(x), x) - k_p(x) = p
// k holds one value per grid cell.
struct KpProfile {
    double p = 0;
    SystemKind system = SystemKind::TwoByTwo;
    std::vector<double> k;
};

KpProfile solve_kp(const Heterogeneity& het, const Grid& grid, double p,
                   SystemKind system);

// Pointwise version (e.g. for boundary positions x = 0 or x = L).
double kp_at(const Heterogeneity& het, double p, double x, SystemKind system);

// Density and flux of the steady state at one point.
double steady_density(const Heterogeneity& het, double k, double x,
                      SystemKind system);
double steady_flux(const Heterogeneity& het, double k, double x,
                   SystemKind system);

// Stationary solution of the 2x2 system on [0, L]:
//   U' = (h(U - K, x) - U) / eps,  U(0) = U0,  K = U - V constant,
// closed by the partial-reflection condition V(L) = alpha U(L),
// i.e. K = (1 - alpha) U(L).  Solved by shooting on K when the cellwise
// integration is stable; for stiff eps the solver switches to the reduced
// (equilibrium) profile h(U - K, x) = U with K fixed from the inflow value,
// which is the same profile up to a sub-grid boundary layer at x = L.
struct SteadyProfile {
    std::vector<double> U, V; // cell-centered values, V = U - K
    double K = 0;
    double epsilon = 0;
    double U0 = 0;
    double alpha = 0;
    double u_at_L = 0;         // boundary trace U(L) = K / (1 - alpha)
    bool reduced_mode = false; // true when the stiff (equilibrium) branch ran
    bool multiple_roots = false; // shooting residual changed sign more than once
    double shoot_residual = 0;   // |K - (1 - alpha) U(L)| achieved
};

SteadyProfile solve_stationary_2x2(const Heterogeneity& het, const Grid& grid,
                                   double epsilon, double U0, double alpha);

// Shooting residual r(K) = K - (1 - alpha) U(L; K) of the boundary-value
// problem above; r is increasing in K and its root is the profile's K.
double stationary_residual(const Heterogeneity& het, const Grid& grid,
                           double epsilon, double U0, double alpha, double K);

// L-infinity ceiling max(U0 / (1 - alpha), beta K / (beta - 1), U0)
// dominating the stationary solution and, by comparison, the evolution.
double supersolution_bound(const SteadyProfile& profile,
                           const Heterogeneity& het);

} // namespace relaxbench
