#include "relaxbench/relax_solver.hpp"

#include <algorithm>
#include <cmath>

#include "relaxbench/rootfind.hpp"

namespace relaxbench {

namespace {

void check_transport_dt(double dt, const Grid& grid) {
    if (!(dt > 0.0) || dt > grid.dx * (1.0 + 1e-12))
        throw std::invalid_argument("transport substep requires 0 < dt <= dx");
}

double max_abs(const std::vector<double>& f) {
    double m = 0;
    for (double x : f) m = std::max(m, std::fabs(x));
    return m;
}

double min_of(const std::vector<double>& f) {
    double m = f.empty() ? 0.0 : f[0];
    for (double x : f) m = std::min(m, x);
    return m;
}

// Number of full steps of size dt covering [0, t_end], plus a shorter
// remainder step when t_end is not a multiple of dt.
struct StepPlan {
    long long n_full;
    double remainder;
};

StepPlan plan_steps(double t_end, double dt) {
    StepPlan p;
    p.n_full = static_cast<long long>(std::floor(t_end / dt + 1e-9));
    p.remainder = t_end - static_cast<double>(p.n_full) * dt;
    if (p.remainder <= 1e-12 * std::max(1.0, t_end)) p.remainder = 0.0;
    return p;
}

void validate_common(const RelaxConfig& cfg) {
    if (!(cfg.epsilon > 0.0))
        throw std::invalid_argument("RelaxConfig: epsilon must be > 0");
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0))
        throw std::invalid_argument("RelaxConfig: cfl must lie in (0, 1]");
    if (!(cfg.t_end >= 0.0))
        throw std::invalid_argument("RelaxConfig: t_end must be >= 0");
}

} // namespace

double transport_substep_2x2(State2& s, const Grid& grid,
                             const RelaxConfig& cfg, double dt) {
    check_transport_dt(dt, grid);
    const int n = grid.n_cells;
    const double lam = dt / grid.dx;
    // u rightward: downward sweep keeps the old left neighbour available
    for (int j = n - 1; j >= 0; --j) {
        double left = j == 0 ? cfg.u0 : s.u[j - 1];
        s.u[j] = (1.0 - lam) * s.u[j] + lam * left;
    }
    // v leftward; ghost couples to the post-transport u at the last cell
    const double v_ghost = cfg.alpha * s.u[n - 1];
    for (int j = 0; j < n; ++j) {
        double right = j == n - 1 ? v_ghost : s.v[j + 1];
        s.v[j] = (1.0 - lam) * s.v[j] + lam * right;
    }
    return v_ghost;
}

void relaxation_substep_2x2(State2& s, const Heterogeneity& het,
                            const Grid& grid, double dt, double epsilon) {
    const double q = dt / epsilon;
    for (int j = 0; j < grid.n_cells; ++j) {
        const double x = grid.x(j);
        const double sum = s.u[j] + s.v[j];
        auto f = [&](double w) {
            return (1.0 + q) * w - q * het.value_extended(sum - w, x);
        };
        auto df = [&](double w) {
            return (1.0 + q) + q * het.slope_extended(sum - w, x);
        };
        try {
            double w = monotone_root(f, df, s.u[j], std::min(0.0, sum),
                                     std::max(0.0, sum));
            s.u[j] = w;
            s.v[j] = sum - w;
        } catch (const std::exception& e) {
            throw SolverError(std::string("relaxation_substep_2x2: ") + e.what(),
                              s.t, j);
        }
    }
}

double transport_substep_3x3(State3& s, const Grid& grid,
                             const RelaxConfig& cfg, double dt) {
    check_transport_dt(dt, grid);
    const int n = grid.n_cells;
    const double lam = dt / grid.dx;
    for (int j = n - 1; j >= 0; --j) {
        double l1 = j == 0 ? cfg.c01 : s.c1[j - 1];
        double l2 = j == 0 ? cfg.c02 : s.c2[j - 1];
        s.c1[j] = (1.0 - lam) * s.c1[j] + lam * l1;
        s.c2[j] = (1.0 - lam) * s.c2[j] + lam * l2;
    }
    // reflection c3(L) = c2(L) with the post-transport outgoing trace
    const double c3_ghost = s.c2[n - 1];
    for (int j = 0; j < n; ++j) {
        double right = j == n - 1 ? c3_ghost : s.c3[j + 1];
        s.c3[j] = (1.0 - lam) * s.c3[j] + lam * right;
    }
    return c3_ghost;
}

void relaxation_substep_3x3(State3& s, const Heterogeneity& het,
                            const Grid& grid, double dt, double epsilon) {
    const double q = dt / epsilon;
    const double decay = std::exp(-q);
    for (int j = 0; j < grid.n_cells; ++j) {
        const double x = grid.x(j);
        const double sum = s.c1[j] + s.c2[j] + s.c3[j];
        const double d_new = (s.c1[j] - s.c2[j]) * decay;
        const double target = s.c3[j] + (q / 3.0) * sum;
        auto f = [&](double w) {
            return (1.0 + q / 3.0) * w + (2.0 * q / 3.0) * het.value_extended(w, x);
        };
        auto df = [&](double w) {
            return (1.0 + q / 3.0) + (2.0 * q / 3.0) * het.slope_extended(w, x);
        };
        try {
            double w = monotone_root(f, df, target, std::min(0.0, sum),
                                     std::max(0.0, sum));
            const double m = sum - w;
            s.c3[j] = w;
            s.c1[j] = 0.5 * (m + d_new);
            s.c2[j] = 0.5 * (m - d_new);
        } catch (const std::exception& e) {
            throw SolverError(std::string("relaxation_substep_3x3: ") + e.what(),
                              s.t, j);
        }
    }
}

void step_2x2(State2& s, const Heterogeneity& het, const Grid& grid,
              const RelaxConfig& cfg, double dt) {
    transport_substep_2x2(s, grid, cfg, dt);
    relaxation_substep_2x2(s, het, grid, dt, cfg.epsilon);
    s.t += dt;
}

void step_3x3(State3& s, const Heterogeneity& het, const Grid& grid,
              const RelaxConfig& cfg, double dt) {
    transport_substep_3x3(s, grid, cfg, dt);
    relaxation_substep_3x3(s, het, grid, dt, cfg.epsilon);
    s.t += dt;
}

State2 well_prepared_state2(const Heterogeneity& het, const Grid& grid,
                            const std::vector<double>& v0) {
    if (static_cast<int>(v0.size()) != grid.n_cells)
        throw std::invalid_argument("well_prepared_state2: v0 size mismatch");
    State2 s;
    s.v = v0;
    s.u.resize(v0.size());
    for (int j = 0; j < grid.n_cells; ++j)
        s.u[j] = het.value(v0[j], grid.x(j));
    return s;
}

State3 well_prepared_state3(const Heterogeneity& het, const Grid& grid,
                            const std::vector<double>& c30) {
    if (static_cast<int>(c30.size()) != grid.n_cells)
        throw std::invalid_argument("well_prepared_state3: c30 size mismatch");
    State3 s;
    s.c3 = c30;
    s.c1.resize(c30.size());
    for (int j = 0; j < grid.n_cells; ++j)
        s.c1[j] = het.value(c30[j], grid.x(j));
    s.c2 = s.c1;
    return s;
}

RunResult2 run_2x2(State2 initial, const Heterogeneity& het, const Grid& grid,
                   const RelaxConfig& cfg, const RunObservers& obs) {
    validate_common(cfg);
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw std::invalid_argument("RelaxConfig: alpha must lie in (0, 1)");
    if (!(cfg.u0 >= 0.0))
        throw std::invalid_argument("RelaxConfig: u0 must be >= 0");
    const int n = grid.n_cells;
    if (static_cast<int>(initial.u.size()) != n ||
        static_cast<int>(initial.v.size()) != n)
        throw std::invalid_argument("run_2x2: state size mismatch");

    RunResult2 out;
    out.state = std::move(initial);
    State2& s = out.state;
    DiagnosticsReport& rep = out.report;

    const double dt = cfg.cfl * grid.dx;
    const double lam = dt / grid.dx;
    rep.dt = dt;
    rep.dx = grid.dx;
    rep.bound_ceiling = obs.ceiling;

    // initial-data measurements
    rep.initial_layer_size = 0;
    for (int j = 0; j < n; ++j)
        rep.initial_layer_size =
            std::max(rep.initial_layer_size,
                     std::fabs(s.u[j] - het.value(s.v[j], grid.x(j))));
    rep.well_prepared =
        rep.initial_layer_size <= 1e-12 * std::max(1.0, max_abs(s.u));
    {
        std::vector<double> comb(n), dens(n);
        for (int j = 0; j < n; ++j) {
            comb[j] = s.u[j] - s.v[j];
            dens[j] = s.u[j] + s.v[j];
        }
        rep.bv_x_combined_initial = bv_x(comb);
        rep.bv_x_density_initial = bv_x(dens);
        rep.bv_x_u_initial = bv_x(s.u);
        rep.bv_x_v_initial = bv_x(s.v);
        double u_star_last =
            (1.0 - lam) * s.u[n - 1] + lam * (n >= 2 ? s.u[n - 2] : cfg.u0);
        rep.bv_x_initial_bound = rep.bv_x_u_initial + rep.bv_x_v_initial +
                                 std::fabs(s.u[0] - cfg.u0) +
                                 std::fabs(s.v[n - 1] - cfg.alpha * u_star_last);
    }
    rep.linf_u = max_abs(s.u);
    rep.linf_v = max_abs(s.v);
    rep.min_value = std::min(min_of(s.u), min_of(s.v));
    if (obs.entropy_profiles) {
        rep.entropy_p.reserve(obs.entropy_profiles->size());
        for (const auto& kp : *obs.entropy_profiles) rep.entropy_p.push_back(kp.p);
        rep.entropy_worst.assign(obs.entropy_profiles->size(), 0.0);
    }

    const StepPlan plan = plan_steps(cfg.t_end, dt);
    const long long n_steps = plan.n_full + (plan.remainder > 0 ? 1 : 0);
    rep.bv_t_series.reserve(static_cast<std::size_t>(n_steps));
    out.traces.times.reserve(static_cast<std::size_t>(n_steps));

    std::vector<double> u_prev, v_prev;
    double mass_prev = 0;
    for (int j = 0; j < n; ++j) mass_prev += s.u[j] + s.v[j];
    mass_prev *= grid.dx;
    double eq_prev = eq_dev_sq_profile(s.u, s.v, het, grid);
    double eq_acc = 0;
    double tbv_prev = -1;

    for (long long step = 0; step < n_steps; ++step) {
        const double dt_step =
            (step < plan.n_full) ? dt : plan.remainder;
        u_prev = s.u;
        v_prev = s.v;
        const double v_ghost = transport_substep_2x2(s, grid, cfg, dt_step);
        relaxation_substep_2x2(s, het, grid, dt_step, cfg.epsilon);
        s.t += dt_step;

        out.traces.times.push_back(s.t);
        out.traces.u_L.push_back(s.u[n - 1]);
        out.traces.v_0.push_back(s.v[0]);

        double mass = 0;
        for (int j = 0; j < n; ++j) mass += s.u[j] + s.v[j];
        mass *= grid.dx;
        const double predicted =
            dt_step * (cfg.u0 - u_prev[n - 1] + v_ghost - v_prev[0]);
        rep.mass_balance_error = std::max(
            rep.mass_balance_error, std::fabs(mass - mass_prev - predicted));
        mass_prev = mass;

        const double tbv = time_bv_step(u_prev, v_prev, s.u, s.v, grid.dx, dt_step);
        rep.bv_t_series.push_back(tbv);
        if (tbv_prev >= 0)
            rep.bv_t_max_increase = std::max(rep.bv_t_max_increase, tbv - tbv_prev);
        tbv_prev = tbv;

        const double eq_cur = eq_dev_sq_profile(s.u, s.v, het, grid);
        eq_acc += 0.5 * (eq_prev + eq_cur) * dt_step;
        eq_prev = eq_cur;

        rep.linf_u = std::max(rep.linf_u, max_abs(s.u));
        rep.linf_v = std::max(rep.linf_v, max_abs(s.v));
        rep.min_value = std::min(rep.min_value, std::min(min_of(s.u), min_of(s.v)));

        if (obs.entropy_profiles) {
            for (std::size_t i = 0; i < obs.entropy_profiles->size(); ++i) {
                double r = entropy_residual_relax(u_prev, v_prev, s.u, s.v, het,
                                                  grid, (*obs.entropy_profiles)[i],
                                                  dt_step);
                rep.entropy_worst[i] = std::max(rep.entropy_worst[i], r);
            }
        }
        if (obs.snapshot_every > 0 && obs.on_snapshot2 &&
            (step + 1) % obs.snapshot_every == 0)
            obs.on_snapshot2(s);
    }

    rep.n_steps = static_cast<int>(n_steps);
    rep.eq_dev_l2 = std::sqrt(eq_acc);
    rep.bv_t_initial = rep.bv_t_series.empty() ? 0.0 : rep.bv_t_series.front();
    {
        std::vector<double> comb(n), dens(n);
        for (int j = 0; j < n; ++j) {
            comb[j] = s.u[j] - s.v[j];
            dens[j] = s.u[j] + s.v[j];
        }
        rep.bv_x_combined_final = bv_x(comb);
        rep.bv_x_density_final = bv_x(dens);
        rep.bv_x_u_final = bv_x(s.u);
        rep.bv_x_v_final = bv_x(s.v);
    }
    if (obs.ceiling > 0)
        rep.ceiling_violated =
            rep.linf_u > obs.ceiling + 1e-8 || rep.linf_v > obs.ceiling + 1e-8;
    return out;
}

RunResult3 run_3x3(State3 initial, const Heterogeneity& het, const Grid& grid,
                   const RelaxConfig& cfg, const RunObservers& obs) {
    validate_common(cfg);
    if (!(cfg.c01 >= 0.0) || !(cfg.c02 >= 0.0))
        throw std::invalid_argument("RelaxConfig: c01, c02 must be >= 0");
    const int n = grid.n_cells;
    if (static_cast<int>(initial.c1.size()) != n ||
        static_cast<int>(initial.c2.size()) != n ||
        static_cast<int>(initial.c3.size()) != n)
        throw std::invalid_argument("run_3x3: state size mismatch");

    RunResult3 out;
    out.state = std::move(initial);
    State3& s = out.state;
    DiagnosticsReport& rep = out.report;

    const double dt = cfg.cfl * grid.dx;
    rep.dt = dt;
    rep.dx = grid.dx;
    rep.bound_ceiling = obs.ceiling;

    rep.initial_layer_size = 0;
    for (int j = 0; j < n; ++j) {
        double h = het.value(s.c3[j], grid.x(j));
        rep.initial_layer_size =
            std::max({rep.initial_layer_size, std::fabs(s.c1[j] - h),
                      std::fabs(s.c2[j] - h)});
    }
    rep.well_prepared =
        rep.initial_layer_size <= 1e-12 * std::max(1.0, max_abs(s.c1));
    rep.corner_mismatch =
        std::max({std::fabs(s.c1[0] - cfg.c01), std::fabs(s.c2[0] - cfg.c02),
                  std::fabs(s.c3[n - 1] - s.c2[n - 1])});
    {
        std::vector<double> comb(n), dens(n);
        for (int j = 0; j < n; ++j) {
            comb[j] = s.c1[j] + s.c2[j] - s.c3[j];
            dens[j] = s.c1[j] + s.c2[j] + s.c3[j];
        }
        rep.bv_x_combined_initial = bv_x(comb);
        rep.bv_x_density_initial = bv_x(dens);
        rep.bv_x_u_initial = bv_x(s.c1);
        rep.bv_x_v_initial = bv_x(s.c3);
        rep.bv_x_initial_bound = bv_x(s.c1) + bv_x(s.c2) + bv_x(s.c3) +
                                 std::fabs(s.c1[0] - cfg.c01) +
                                 std::fabs(s.c2[0] - cfg.c02) +
                                 std::fabs(s.c3[n - 1] - s.c2[n - 1]);
    }
    rep.linf_c1 = max_abs(s.c1);
    rep.linf_c2 = max_abs(s.c2);
    rep.linf_c3 = max_abs(s.c3);
    rep.min_value = std::min({min_of(s.c1), min_of(s.c2), min_of(s.c3)});
    if (obs.entropy_profiles) {
        for (const auto& kp : *obs.entropy_profiles) rep.entropy_p.push_back(kp.p);
        rep.entropy_worst.assign(obs.entropy_profiles->size(), 0.0);
    }

    const StepPlan plan = plan_steps(cfg.t_end, dt);
    const long long n_steps = plan.n_full + (plan.remainder > 0 ? 1 : 0);

    std::vector<double> c1_prev, c2_prev, c3_prev;
    double mass_prev = 0;
    for (int j = 0; j < n; ++j) mass_prev += s.c1[j] + s.c2[j] + s.c3[j];
    mass_prev *= grid.dx;
    auto eq_sq = [&]() {
        double acc = 0;
        for (int j = 0; j < n; ++j) {
            double h = het.value(s.c3[j], grid.x(j));
            double e1 = s.c2[j] + h - 2.0 * s.c1[j];
            double e2 = s.c1[j] + h - 2.0 * s.c2[j];
            acc += e1 * e1 + e2 * e2;
        }
        return acc * grid.dx;
    };
    double eq_prev = eq_sq();
    double eq_acc = 0;
    double tbv_prev = -1;

    for (long long step = 0; step < n_steps; ++step) {
        const double dt_step = (step < plan.n_full) ? dt : plan.remainder;
        c1_prev = s.c1;
        c2_prev = s.c2;
        c3_prev = s.c3;
        const double c3_ghost = transport_substep_3x3(s, grid, cfg, dt_step);
        relaxation_substep_3x3(s, het, grid, dt_step, cfg.epsilon);
        s.t += dt_step;

        out.traces.times.push_back(s.t);
        out.traces.c1_L.push_back(s.c1[n - 1]);
        out.traces.c2_L.push_back(s.c2[n - 1]);
        out.traces.c3_0.push_back(s.c3[0]);

        double mass = 0;
        for (int j = 0; j < n; ++j) mass += s.c1[j] + s.c2[j] + s.c3[j];
        mass *= grid.dx;
        const double predicted =
            dt_step * (cfg.c01 + cfg.c02 - c1_prev[n - 1] - c2_prev[n - 1] +
                       c3_ghost - c3_prev[0]);
        rep.mass_balance_error = std::max(
            rep.mass_balance_error, std::fabs(mass - mass_prev - predicted));
        mass_prev = mass;

        const double tbv = (l1_diff(c1_prev, s.c1) + l1_diff(c2_prev, s.c2) +
                            l1_diff(c3_prev, s.c3)) *
                           grid.dx / dt_step;
        rep.bv_t_series.push_back(tbv);
        if (tbv_prev >= 0)
            rep.bv_t_max_increase = std::max(rep.bv_t_max_increase, tbv - tbv_prev);
        tbv_prev = tbv;

        const double eq_cur = eq_sq();
        eq_acc += 0.5 * (eq_prev + eq_cur) * dt_step;
        eq_prev = eq_cur;

        rep.linf_c1 = std::max(rep.linf_c1, max_abs(s.c1));
        rep.linf_c2 = std::max(rep.linf_c2, max_abs(s.c2));
        rep.linf_c3 = std::max(rep.linf_c3, max_abs(s.c3));
        rep.min_value = std::min(
            {rep.min_value, min_of(s.c1), min_of(s.c2), min_of(s.c3)});

        if (obs.entropy_profiles) {
            for (std::size_t i = 0; i < obs.entropy_profiles->size(); ++i) {
                double r = entropy_residual_relax3(
                    c1_prev, c2_prev, c3_prev, s.c1, s.c2, s.c3, het, grid,
                    (*obs.entropy_profiles)[i], dt_step);
                rep.entropy_worst[i] = std::max(rep.entropy_worst[i], r);
            }
        }
        if (obs.snapshot_every > 0 && obs.on_snapshot3 &&
            (step + 1) % obs.snapshot_every == 0)
            obs.on_snapshot3(s);
    }

    rep.n_steps = static_cast<int>(n_steps);
    rep.eq_dev_l2 = std::sqrt(eq_acc);
    rep.bv_t_initial = rep.bv_t_series.empty() ? 0.0 : rep.bv_t_series.front();
    {
        std::vector<double> comb(n), dens(n);
        for (int j = 0; j < n; ++j) {
            comb[j] = s.c1[j] + s.c2[j] - s.c3[j];
            dens[j] = s.c1[j] + s.c2[j] + s.c3[j];
        }
        rep.bv_x_combined_final = bv_x(comb);
        rep.bv_x_density_final = bv_x(dens);
        rep.bv_x_u_final = bv_x(s.c1);
        rep.bv_x_v_final = bv_x(s.c3);
    }
    if (obs.ceiling > 0)
        rep.ceiling_violated = rep.linf_c1 > obs.ceiling + 1e-8 ||
                               rep.linf_c2 > obs.ceiling + 1e-8 ||
                               rep.linf_c3 > obs.ceiling + 1e-8;
    return out;
}

} // namespace relaxbench
