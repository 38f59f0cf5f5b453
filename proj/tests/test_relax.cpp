#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "relaxbench/relax_solver.hpp"
#include "relaxbench/steady.hpp"

using namespace relaxbench;

namespace {

constexpr double kPi = 3.14159265358979323846;

Heterogeneity curved_het() {
    return Heterogeneity::smooth_nonlinear(2.0, 0.15, 2.0 * kPi, 0.5, 1.0);
}

// flux level: `level` up to `from`, smoothstep down to 0 at `to`
double plateau(double x, double level, double from, double to) {
    if (x <= from) return level;
    if (x >= to) return 0.0;
    const double xi = (x - from) / (to - from);
    return level * (1.0 - xi * xi * (3.0 - 2.0 * xi));
}

// v profile whose equilibrium flux is the plateau above (monotone in x)
std::vector<double> plateau_v(const Heterogeneity& het, const Grid& grid,
                              double level, double from, double to) {
    std::vector<double> v(grid.n_cells);
    for (int j = 0; j < grid.n_cells; ++j)
        v[j] = kp_at(het, plateau(grid.x(j), level, from, to), grid.x(j),
                     SystemKind::TwoByTwo);
    return v;
}

} // namespace

TEST_CASE("relaxation substep leaves equilibrium data unchanged") {
    const Heterogeneity het = curved_het();
    const Grid grid{1.0, 64};
    std::vector<double> v0(grid.n_cells);
    for (int j = 0; j < grid.n_cells; ++j)
        v0[j] = 0.4 + 0.3 * std::sin(3.0 * grid.x(j));
    State2 s = well_prepared_state2(het, grid, v0);
    const State2 before = s;

    relaxation_substep_2x2(s, het, grid, 0.01, 1e-3); // q = 10, stiff
    for (int j = 0; j < grid.n_cells; ++j) {
        CHECK(std::fabs(s.u[j] - before.u[j]) <= 1e-12);
        CHECK(std::fabs(s.v[j] - before.v[j]) <= 1e-12);
    }
}

TEST_CASE("uniform steady state survives a full run") {
    const Heterogeneity het = Heterogeneity::affine(2.0, 0.0, 0.0, 1.0);
    const Grid grid{1.0, 64};
    State2 s;
    s.u.assign(grid.n_cells, 1.0);
    s.v.assign(grid.n_cells, 0.5);

    RelaxConfig cfg;
    cfg.epsilon = 0.05;
    cfg.cfl = 1.0;
    cfg.t_end = 0.5;
    cfg.u0 = 1.0;     // matches u
    cfg.alpha = 0.5;  // ghost v = 0.5 * 1 matches v

    RunObservers obs;
    obs.ceiling = 2.0;
    RunResult2 res = run_2x2(s, het, grid, cfg, obs);

    double du = 0, dv = 0;
    for (int j = 0; j < grid.n_cells; ++j) {
        du = std::max(du, std::fabs(res.state.u[j] - 1.0));
        dv = std::max(dv, std::fabs(res.state.v[j] - 0.5));
    }
    CHECK(du <= 1e-10);
    CHECK(dv <= 1e-10);
    CHECK(res.report.mass_balance_error <= 1e-12);
    CHECK(res.report.well_prepared);
    CHECK_FALSE(res.report.ceiling_violated);
    CHECK(res.report.min_value >= 0.5 - 1e-12);
    CHECK(res.report.n_steps == 32); // t_end / dx exactly
    CHECK(res.traces.times.size() == 32);
    CHECK(res.traces.u_L.back() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mass balance tracks the boundary fluxes in a moving solution") {
    const Heterogeneity het = curved_het();
    const Grid grid{1.0, 100};
    std::vector<double> v0 = plateau_v(het, grid, 0.8, 0.2, 0.45);
    State2 s = well_prepared_state2(het, grid, v0);

    RelaxConfig cfg;
    cfg.epsilon = 1e-3;
    cfg.cfl = 1.0;
    cfg.t_end = 0.3;
    cfg.u0 = het.value(v0[0], grid.x(0)); // compatible inflow
    cfg.alpha = 0.5;

    RunResult2 res = run_2x2(s, het, grid, cfg);
    CHECK(res.report.mass_balance_error <= 1e-12);
    CHECK(res.report.min_value >= -1e-14);
}

TEST_CASE("relaxation substep conserves u + v per cell") {
    const Heterogeneity het = curved_het();
    const Grid grid{1.0, 32};
    State2 s;
    s.u.resize(grid.n_cells);
    s.v.resize(grid.n_cells);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    for (int j = 0; j < grid.n_cells; ++j) {
        s.u[j] = unif(rng);
        s.v[j] = unif(rng);
    }
    const State2 before = s;
    relaxation_substep_2x2(s, het, grid, 0.004, 0.01);
    for (int j = 0; j < grid.n_cells; ++j) {
        const double sum0 = before.u[j] + before.v[j];
        CHECK(std::fabs(s.u[j] + s.v[j] - sum0) <= 1e-14 * (1.0 + sum0));
    }
}

TEST_CASE("3x3 relaxation: exact exponential decay of c1 - c2") {
    const Heterogeneity het = Heterogeneity::affine(2.0, 0.0, 0.0, 1.0);
    const Grid grid{1.0, 8};
    State3 s;
    s.c1.resize(grid.n_cells);
    s.c2.resize(grid.n_cells);
    s.c3.resize(grid.n_cells);
    for (int j = 0; j < grid.n_cells; ++j) {
        s.c1[j] = 1.3 + 0.1 * std::sin(5.0 * grid.x(j));
        s.c2[j] = 0.7;
        s.c3[j] = 0.2 + 0.05 * grid.x(j);
    }
    const State3 before = s;
    const double dt = 0.01, eps = 0.04;
    relaxation_substep_3x3(s, het, grid, dt, eps);

    const double decay = std::exp(-dt / eps);
    for (int j = 0; j < grid.n_cells; ++j) {
        const double d0 = before.c1[j] - before.c2[j];
        const double d1 = s.c1[j] - s.c2[j];
        CHECK(std::fabs(d1 - d0 * decay) <= 1e-12 * std::fabs(d0));
        const double sum0 = before.c1[j] + before.c2[j] + before.c3[j];
        const double sum1 = s.c1[j] + s.c2[j] + s.c3[j];
        CHECK(std::fabs(sum1 - sum0) <= 1e-14 * (1.0 + sum0));
    }
}

TEST_CASE("nonnegative data stay nonnegative") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> unif(0.0, 2.0);

    SUBCASE("2x2") {
        const Heterogeneity het = curved_het();
        const Grid grid{1.0, 100};
        State2 s;
        s.u.resize(grid.n_cells);
        s.v.resize(grid.n_cells);
        for (int j = 0; j < grid.n_cells; ++j) {
            s.u[j] = unif(rng);
            s.v[j] = unif(rng);
        }
        RelaxConfig cfg;
        cfg.epsilon = 1e-3;
        cfg.cfl = 1.0;
        cfg.t_end = 0.25;
        cfg.u0 = 0.3;
        cfg.alpha = 0.5;
        RunResult2 res = run_2x2(s, het, grid, cfg);
        CHECK(res.report.min_value >= -1e-14);
    }

    SUBCASE("3x3") {
        const Heterogeneity het = curved_het();
        const Grid grid{1.0, 100};
        State3 s;
        s.c1.resize(grid.n_cells);
        s.c2.resize(grid.n_cells);
        s.c3.resize(grid.n_cells);
        for (int j = 0; j < grid.n_cells; ++j) {
            s.c1[j] = unif(rng);
            s.c2[j] = unif(rng);
            s.c3[j] = unif(rng);
        }
        RelaxConfig cfg;
        cfg.epsilon = 1e-3;
        cfg.cfl = 1.0;
        cfg.t_end = 0.25;
        cfg.c01 = 0.4;
        cfg.c02 = 0.4;
        RunResult3 res = run_3x3(s, het, grid, cfg);
        CHECK(res.report.min_value >= -1e-14);
    }
}

TEST_CASE("zero-duration run returns the initial state") {
    const Heterogeneity het = Heterogeneity::affine(2.0, 0.0, 0.0, 1.0);
    const Grid grid{1.0, 16};
    std::vector<double> v0(grid.n_cells, 0.3);
    State2 s = well_prepared_state2(het, grid, v0);
    RelaxConfig cfg;
    cfg.epsilon = 0.1;
    cfg.t_end = 0.0;
    cfg.u0 = s.u[0];
    RunResult2 res = run_2x2(s, het, grid, cfg);
    CHECK(res.report.n_steps == 0);
    CHECK(res.traces.times.empty());
    for (int j = 0; j < grid.n_cells; ++j) {
        CHECK(res.state.u[j] == s.u[j]);
        CHECK(res.state.v[j] == s.v[j]);
    }
}

TEST_CASE("symmetric right-movers remain bitwise identical") {
    const Heterogeneity het = curved_het();
    const Grid grid{1.0, 80};
    std::vector<double> c30(grid.n_cells);
    for (int j = 0; j < grid.n_cells; ++j)
        c30[j] = 0.4 * (1.0 - grid.x(j));
    State3 s = well_prepared_state3(het, grid, c30);
    REQUIRE(s.c1 == s.c2);

    RelaxConfig cfg;
    cfg.epsilon = 1e-2;
    cfg.cfl = 1.0;
    cfg.t_end = 0.3;
    cfg.c01 = het.value(c30[0], grid.x(0)); // = initial c1[0] up to one cell
    cfg.c02 = cfg.c01;
    RunResult3 res = run_3x3(s, het, grid, cfg);
    for (int j = 0; j < grid.n_cells; ++j)
        CHECK(res.state.c1[j] == res.state.c2[j]);
}

TEST_CASE("an out-of-equilibrium start is flagged") {
    const Heterogeneity het = Heterogeneity::affine(2.0, 0.0, 0.0, 1.0);
    const Grid grid{1.0, 32};
    State2 s;
    s.v.assign(grid.n_cells, 0.5);
    s.u.assign(grid.n_cells, 2.0 * 0.5 + 0.1); // h(v) + 0.1
    RelaxConfig cfg;
    cfg.epsilon = 0.1;
    cfg.t_end = 0.05;
    cfg.u0 = 1.1;
    RunResult2 res = run_2x2(s, het, grid, cfg);
    CHECK_FALSE(res.report.well_prepared);
    CHECK(res.report.initial_layer_size == doctest::Approx(0.1).epsilon(1e-10));
}

TEST_CASE("invalid configurations are rejected") {
    const Heterogeneity het = Heterogeneity::affine(2.0, 0.0, 0.0, 1.0);
    const Grid grid{1.0, 16};
    std::vector<double> v0(grid.n_cells, 0.3);
    State2 s = well_prepared_state2(het, grid, v0);

    State2 s_dt = s;
    RelaxConfig cfg;
    CHECK_THROWS_AS(
        transport_substep_2x2(s_dt, grid, cfg, 2.0 * grid.dx),
        std::invalid_argument);

    cfg.cfl = 1.5; // dt would exceed dx
    CHECK_THROWS_AS(run_2x2(s, het, grid, cfg), std::invalid_argument);
    cfg.cfl = 1.0;
    cfg.alpha = 0.0;
    CHECK_THROWS_AS(run_2x2(s, het, grid, cfg), std::invalid_argument);
    cfg.alpha = 0.5;
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(run_2x2(s, het, grid, cfg), std::invalid_argument);
    cfg.epsilon = 1.0;
    cfg.u0 = -0.2;
    CHECK_THROWS_AS(run_2x2(s, het, grid, cfg), std::invalid_argument);
    cfg.u0 = 0.0;
    s.v.pop_back();
    CHECK_THROWS_AS(run_2x2(s, het, grid, cfg), std::invalid_argument);
}

TEST_CASE("time variation decays on monotone equilibrium data") {
    const Heterogeneity het = curved_het();
    const Grid grid{1.0, 100};
    std::vector<double> v0 = plateau_v(het, grid, 1.0, 0.3, 0.5);
    State2 s = well_prepared_state2(het, grid, v0);

    RelaxConfig cfg;
    cfg.epsilon = 1e-3;
    cfg.cfl = 1.0;
    cfg.t_end = 0.4;
    cfg.u0 = het.value(kp_at(het, 1.0, 0.0, SystemKind::TwoByTwo), 0.0);
    cfg.alpha = 0.5;

    RunResult2 res = run_2x2(s, het, grid, cfg);
    const DiagnosticsReport& rep = res.report;
    CHECK(rep.bv_t_max_increase <= 1e-8);
    CHECK(rep.bv_t_initial <= rep.bv_x_initial_bound + 1e-8);
    CHECK(rep.bv_t_series.back() <= rep.bv_t_series.front() + 1e-8);
    // x-variation of u - v stays below its rigorous ceiling
    CHECK(rep.bv_x_combined_final <=
          rep.bv_x_combined_initial + rep.bv_x_initial_bound + 1e-6);
}

TEST_CASE("ceiling observer flags exceedance") {
    const Heterogeneity het = Heterogeneity::affine(2.0, 0.0, 0.0, 1.0);
    const Grid grid{1.0, 32};
    State2 s;
    s.u.assign(grid.n_cells, 1.0);
    s.v.assign(grid.n_cells, 0.5);
    RelaxConfig cfg;
    cfg.epsilon = 0.05;
    cfg.t_end = 0.1;
    cfg.u0 = 1.0;

    RunObservers obs;
    obs.ceiling = 0.5;
    RunResult2 res = run_2x2(s, het, grid, cfg, obs);
    CHECK(res.report.ceiling_violated);
    CHECK(res.report.bound_ceiling == 0.5);
}
