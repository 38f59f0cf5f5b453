#pragma once

#include <functional>
#include <vector>

#include "relaxbench/diagnostics.hpp"
#include "relaxbench/grid.hpp"
#include "relaxbench/heterogeneity.hpp"
#include "relaxbench/steady.hpp"

namespace relaxbench {

// Cell averages of the 2x2 system: u moves right, v moves left.
struct State2 {
    std::vector<double> u, v;
    double t = 0;
};

// Cell averages of the 3x3 system: c1, c2 move right, c3 moves left.
struct State3 {
    std::vector<double> c1, c2, c3;
    double t = 0;
};

struct RelaxConfig {
    double epsilon = 1.0;
    double cfl = 1.0;   // dt = cfl * dx (advection speeds are +-1)
    double t_end = 1.0;
    double u0 = 0.0;    // 2x2: inflow value of u at x = 0
    double alpha = 0.5; // 2x2: reflection v(L) = alpha * u(L)
    double c01 = 0.0, c02 = 0.0; // 3x3: inflow values of c1, c2 at x = 0
};

// Optional hooks and checks evaluated while a run advances.
struct RunObservers {
    // adapted-entropy levels to monitor (residual accumulated per step)
    const std::vector<KpProfile>* entropy_profiles = nullptr;
    double ceiling = 0;     // L-inf ceiling to check (0 = no check)
    int snapshot_every = 0; // invoke the snapshot hook every k-th step
    std::function<void(const State2&)> on_snapshot2;
    std::function<void(const State3&)> on_snapshot3;
};

// Boundary values recorded after every step.
struct TraceSeries {
    std::vector<double> times;
    std::vector<double> u_L, v_0;         // 2x2
    std::vector<double> c1_L, c2_L, c3_0; // 3x3
};

struct RunResult2 {
    State2 state;
    TraceSeries traces;
    DiagnosticsReport report;
};

struct RunResult3 {
    State3 state;
    TraceSeries traces;
    DiagnosticsReport report;
};

// Upwind transport over dt <= dx.  u uses the inflow ghost u0; the v ghost at
// x = L is alpha times the post-transport value of u in the last cell.
// Returns the v ghost value (needed for the mass balance).
double transport_substep_2x2(State2& s, const Grid& grid,
                             const RelaxConfig& cfg, double dt);

// Implicit relaxation, solved exactly per cell: u + v is conserved, the new u
// solves (1 + q) u' - q h(s - u', x_j) = u with q = dt/epsilon.
void relaxation_substep_2x2(State2& s, const Heterogeneity& het,
                            const Grid& grid, double dt, double epsilon);

// c1, c2 use inflow ghosts c01, c02; the c3 ghost at x = L is the
// post-transport value of c2 in the last cell.  Returns the c3 ghost.
double transport_substep_3x3(State3& s, const Grid& grid,
                             const RelaxConfig& cfg, double dt);

// Per cell: s = c1+c2+c3 is conserved, d = c1-c2 decays by exp(-dt/epsilon)
// exactly, and the new c3 solves the implicit equation
// (1 + q/3) w + (2q/3) h(w, x_j) = c3 + (q/3) s with q = dt/epsilon.
void relaxation_substep_3x3(State3& s, const Heterogeneity& het,
                            const Grid& grid, double dt, double epsilon);

// One full splitting step: transport, then relaxation; advances s.t by dt.
void step_2x2(State2& s, const Heterogeneity& het, const Grid& grid,
              const RelaxConfig& cfg, double dt);
void step_3x3(State3& s, const Heterogeneity& het, const Grid& grid,
              const RelaxConfig& cfg, double dt);

RunResult2 run_2x2(State2 initial, const Heterogeneity& het, const Grid& grid,
                   const RelaxConfig& cfg, const RunObservers& obs = {});
RunResult3 run_3x3(State3 initial, const Heterogeneity& het, const Grid& grid,
                   const RelaxConfig& cfg, const RunObservers& obs = {});

// Equilibrium initial data: u = h(v0, x) cellwise (resp. c1 = c2 = h(c30, x)).
State2 well_prepared_state2(const Heterogeneity& het, const Grid& grid,
                            const std::vector<double>& v0);
State3 well_prepared_state3(const Heterogeneity& het, const Grid& grid,
                            const std::vector<double>& c30);

} // namespace relaxbench
