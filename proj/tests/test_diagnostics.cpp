#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "relaxbench/diagnostics.hpp"
#include "relaxbench/steady.hpp"

using namespace relaxbench;

TEST_CASE("total variation of a sampled profile") {
    CHECK(bv_x({0.0, 1.0, 1.0, 0.0}) == 2.0);
    CHECK(bv_x({2.0, -1.0, 3.0}) == 7.0);
    CHECK(bv_x({5.0}) == 0.0);
    CHECK(bv_x({}) == 0.0);
}

TEST_CASE("elementwise L1 distance") {
    CHECK(l1_diff({1.0, 2.0}, {0.0, 4.0}) == 3.0);
    CHECK(l1_diff({}, {}) == 0.0);
    CHECK_THROWS_AS(l1_diff({1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("discrete time derivative norm over one step") {
    const std::vector<double> u0 = {1.0, 1.0}, v0 = {0.0, 0.0};
    const std::vector<double> u1 = {1.0, 3.0}, v1 = {1.0, 0.0};
    // (|0| + |2| + |1| + |0|) * dx / dt = 3 * 0.1 / 0.05
    CHECK(time_bv_step(u0, v0, u1, v1, 0.1, 0.05) == doctest::Approx(6.0));
}

TEST_CASE("equilibrium deviation of a profile") {
    const Heterogeneity het =
        Heterogeneity::smooth_nonlinear(2.0, 0.15, 2.0 * 3.14159265358979323846,
                                        0.5, 1.0);
    const Grid grid{1.0, 40};
    std::vector<double> v(grid.n_cells), u(grid.n_cells);
    for (int j = 0; j < grid.n_cells; ++j) {
        v[j] = 0.3 + 0.2 * grid.x(j);
        u[j] = het.value(v[j], grid.x(j));
    }
    CHECK(eq_dev_sq_profile(u, v, het, grid) <= 1e-28);

    const double d = 0.25;
    for (double& uj : u) uj += d;
    CHECK(eq_dev_sq_profile(u, v, het, grid) ==
          doctest::Approx(d * d * grid.length).epsilon(1e-12));

    // constant deviation d over three snapshots dt apart: trapezoid rule
    // integrates to 2 dt d^2 L
    const double dt = 0.01;
    std::vector<std::vector<double>> us = {u, u, u}, vs = {v, v, v};
    CHECK(equilibrium_deviation(us, vs, het, grid, dt) ==
          doctest::Approx(d * std::sqrt(2.0 * dt * grid.length)).epsilon(1e-12));
}

TEST_CASE("log-log slope fit") {
    const std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4};
    std::vector<double> lin(eps.size()), half(eps.size()), flat(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        lin[i] = 2.0 * eps[i];
        half[i] = 0.3 * std::sqrt(eps[i]);
        flat[i] = 0.7;
    }
    CHECK(fit_order(eps, lin) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit_order(eps, half) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::fabs(fit_order(eps, flat)) <= 1e-12);

    CHECK_THROWS_AS(fit_order({1e-1, 1e-2}, {1.0, 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_order(eps, {1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_order(eps, {1.0, -1.0, 1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_order({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("adapted-entropy residual of the relaxation pair") {
    const Heterogeneity het = Heterogeneity::affine(2.0, 0.0, 0.0, 1.0);
    const Grid grid{1.0, 32};
    const KpProfile kp = solve_kp(het, grid, 0.5, SystemKind::TwoByTwo);
    // k = 0.5 constant; the matched steady state is u = 1, v = 0.5
    std::vector<double> u(grid.n_cells, 1.0), v(grid.n_cells, 0.5);
    const double dt = 0.01;

    CHECK(entropy_residual_relax(u, v, u, v, het, grid, kp, dt) <= 1e-15);

    std::vector<double> u_bad = u;
    u_bad[7] += 0.5; // distance to the steady state created from nothing
    CHECK(entropy_residual_relax(u, v, u_bad, v, het, grid, kp, dt) ==
          doctest::Approx(0.5 / dt).epsilon(1e-9));
}

TEST_CASE("adapted-entropy residual of the 3x3 relaxation triple") {
    const Heterogeneity het = Heterogeneity::affine(2.0, 0.0, 0.0, 1.0);
    const Grid grid{1.0, 32};
    const KpProfile kp = solve_kp(het, grid, 0.9, SystemKind::ThreeByThree);
    // 2 h(k) - k = 3k = 0.9: k = 0.3, c1 = c2 = h(k) = 0.6
    std::vector<double> c1(grid.n_cells, 0.6), c3(grid.n_cells, 0.3);
    std::vector<double> c2 = c1;
    const double dt = 0.01;

    CHECK(entropy_residual_relax3(c1, c2, c3, c1, c2, c3, het, grid, kp, dt) <=
          1e-15);

    std::vector<double> c1_bad = c1;
    c1_bad[9] += 0.3;
    CHECK(entropy_residual_relax3(c1, c2, c3, c1_bad, c2, c3, het, grid, kp,
                                  dt) == doctest::Approx(0.3 / dt).epsilon(1e-9));
}

TEST_CASE("distance between relaxation and limit densities") {
    const Grid grid{1.0, 10};
    std::vector<double> u(grid.n_cells, 1.2), v(grid.n_cells, 0.4);
    std::vector<double> rho(grid.n_cells, 1.6);
    CHECK(compare_with_limit(u, v, rho, grid) == 0.0);
    for (double& r : rho) r += 0.5;
    CHECK(compare_with_limit(u, v, rho, grid) ==
          doctest::Approx(0.5 * grid.length).epsilon(1e-12));

    std::vector<double> c1(grid.n_cells, 0.7), c2(grid.n_cells, 0.5),
        c3(grid.n_cells, 0.4);
    std::vector<double> rho3(grid.n_cells, 1.6);
    CHECK(compare_with_limit3(c1, c2, c3, rho3, grid) == 0.0);
}

TEST_CASE("reports serialize to parseable JSON") {
    DiagnosticsReport r;
    r.linf_u = 1.5;
    r.bv_t_initial = 2.25;
    r.bv_t_series = {2.25, 2.0};
    r.entropy_p = {0.1, 0.2};
    r.entropy_worst = {1e-12, 3e-12};
    r.mass_balance_error = 4e-13;
    r.well_prepared = true;
    r.n_steps = 17;

    const nlohmann::json j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["linf"]["u"].get<double>() == 1.5);
    CHECK(j["time_bv"]["initial"].get<double>() == 2.25);
    CHECK(j["time_bv"]["series"].size() == 2);
    CHECK(j["entropy"]["p"][1].get<double>() == 0.2);
    CHECK(j["well_prepared"].get<bool>());
    CHECK(j["n_steps"].get<int>() == 17);

    SweepResult s;
    s.epsilons = {1e-1, 1e-2, 1e-3};
    s.l1_distance = {0.4, 0.2, 0.05};
    s.eq_dev = {0.3, 0.1, 0.03};
    s.eq_dev_order = 0.52;
    s.reports = {r, r, r};
    const nlohmann::json js = nlohmann::json::parse(sweep_to_json(s));
    CHECK(js["epsilons"].size() == 3);
    CHECK(js["eq_dev_order"].get<double>() == 0.52);
    CHECK(js["reports"].size() == 3);
    CHECK(js["reports"][2]["n_steps"].get<int>() == 17);
}
