#include "relaxbench/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"

#include "relaxbench/diagnostics.hpp"
#include "relaxbench/limit_solver.hpp"
#include "relaxbench/relax_solver.hpp"
#include "relaxbench/steady.hpp"

namespace relaxbench {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& cols,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < cols.size(); ++i)
        f << (i ? "," : "") << cols[i];
    f << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i)
            f << (i ? "," : "") << fmt(r[i]);
        f << "\n";
    }
}

std::string timestamp_utc() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct CheckList {
    int run = 0, failed = 0;
    json entries = json::array();

    void record(const std::string& name, bool pass, double measured,
                double threshold) {
        ++run;
        if (!pass) ++failed;
        std::printf("%s %s measured=%s threshold=%s\n", pass ? "PASS" : "FAIL",
                    name.c_str(), fmt(measured).c_str(),
                    fmt(threshold).c_str());
        entries.push_back({{"name", name},
                           {"pass", pass},
                           {"measured", measured},
                           {"threshold", threshold}});
    }

    void skip(const std::string& name, const std::string& reason) {
        std::printf("SKIP %s (%s)\n", name.c_str(), reason.c_str());
        entries.push_back(
            {{"name", name}, {"skipped", true}, {"reason", reason}});
    }
};

// boundary data derived from the config, with "auto" fields resolved
struct Boundary {
    double u0 = 0, c01 = 0, c02 = 0;
    double inflow_rho = 0;
};

Boundary resolve_boundary(const ExperimentConfig& cfg, const Heterogeneity& het,
                          const InitialData& id, SystemKind system) {
    Boundary b;
    if (system == SystemKind::TwoByTwo) {
        b.u0 = std::isnan(cfg.relax.u0) ? het.value(id.slow_at_0, 0.0)
                                        : cfg.relax.u0;
        b.inflow_rho = std::isnan(cfg.limit.inflow_rho)
                           ? b.u0 + het.invert(b.u0, 0.0)
                           : cfg.limit.inflow_rho;
    } else {
        double eq = het.value(id.slow_at_0, 0.0);
        b.c01 = std::isnan(cfg.relax.c01) ? eq : cfg.relax.c01;
        b.c02 = std::isnan(cfg.relax.c02) ? eq : cfg.relax.c02;
        double w = 0.5 * (b.c01 + b.c02);
        b.inflow_rho = std::isnan(cfg.limit.inflow_rho)
                           ? b.c01 + b.c02 + het.invert(w, 0.0)
                           : cfg.limit.inflow_rho;
    }
    return b;
}

std::vector<double> initial_rho(const Heterogeneity& het, const Grid& grid,
                                const std::vector<double>& slow,
                                SystemKind system) {
    std::vector<double> rho(slow.size());
    for (int j = 0; j < grid.n_cells; ++j)
        rho[j] = steady_density(het, slow[j], grid.x(j), system);
    return rho;
}

std::vector<KpProfile> solve_profiles(const Heterogeneity& het,
                                      const Grid& grid,
                                      const std::vector<double>& ps,
                                      SystemKind system) {
    std::vector<KpProfile> out;
    out.reserve(ps.size());
    for (double p : ps) out.push_back(solve_kp(het, grid, p, system));
    return out;
}

double entropy_tol_auto(const CheckSettings& checks, double dx, double dt) {
    return std::isnan(checks.entropy_tol) ? 10.0 * (dx + dt)
                                          : checks.entropy_tol;
}

double worst_entropy(const DiagnosticsReport& rep) {
    double w = 0.0;
    for (double e : rep.entropy_worst) w = std::max(w, e);
    return w;
}

json report_json(const DiagnosticsReport& rep) {
    return json::parse(report_to_json(rep));
}

// ---- experiment kinds ------------------------------------------------

void run_validate(const ExperimentConfig& cfg, const Heterogeneity& het,
                  const Grid& grid, const std::string& out_dir,
                  CheckList& checks, json& artifacts) {
    InitialData id = build_initial(cfg.initial, het, grid,
                                   SystemKind::TwoByTwo);
    double vmax = 1.0;
    for (double v : id.slow) vmax = std::max(vmax, v);
    ModelValidationReport rep = validate_assumptions(het, grid, vmax, 33);

    double origin_max = 0.0;
    for (int j = 0; j < grid.n_cells; ++j)
        origin_max = std::max(origin_max,
                              std::fabs(het.value(0.0, grid.x(j))));

    artifacts["model"] = {{"beta_declared", rep.beta_declared},
                          {"mu_declared", rep.mu_declared},
                          {"beta_observed", rep.beta_observed},
                          {"mu_observed", rep.mu_observed},
                          {"hx_l1", rep.hx_l1},
                          {"second_difference_max", rep.second_difference_max},
                          {"zero_at_origin_ok", rep.zero_at_origin_ok},
                          {"slope_bounds_ok", rep.slope_bounds_ok},
                          {"nonaffine_ok", rep.nonaffine_ok}};
    std::printf("INFO nonaffine second_difference_max=%s (reported only)\n",
                fmt(rep.second_difference_max).c_str());

    if (cfg.checks.model_origin)
        checks.record("model_origin", rep.zero_at_origin_ok, origin_max,
                      1e-15);
    if (cfg.checks.model_slopes) {
        double excess = std::max(rep.beta_declared - rep.beta_observed,
                                 rep.mu_observed - rep.mu_declared);
        checks.record("model_slopes", rep.slope_bounds_ok, excess, 1e-9);
    }
    (void)out_dir;
}

void run_kp(const ExperimentConfig& cfg, const Heterogeneity& het,
            const Grid& grid, const std::string& out_dir, CheckList& checks,
            json& artifacts) {
    if (!(het.beta() > 1.0) && !(2.0 * het.beta() > 1.0))
        throw ConfigError("config: kp experiment needs beta > 1/2");
    double worst = 0.0;
    bool any = false;
    json levels = json::object();
    for (SystemKind system :
         {SystemKind::TwoByTwo, SystemKind::ThreeByThree}) {
        bool ok = system == SystemKind::TwoByTwo ? het.beta() > 1.0
                                                 : 2.0 * het.beta() > 1.0;
        if (!ok) continue;
        any = true;
        KpProfile prof = solve_kp(het, grid, cfg.p_level, system);
        std::vector<std::vector<double>> rows;
        double res = 0.0;
        for (int j = 0; j < grid.n_cells; ++j) {
            double x = grid.x(j);
            double dens = steady_density(het, prof.k[j], x, system);
            double flux = steady_flux(het, prof.k[j], x, system);
            res = std::max(res, std::fabs(flux - cfg.p_level));
            rows.push_back({x, prof.k[j], dens, flux});
        }
        worst = std::max(worst, res);
        const char* name =
            system == SystemKind::TwoByTwo ? "kp2.csv" : "kp3.csv";
        write_csv(out_dir + "/" + name, {"x", "k", "density", "flux"}, rows);
        levels[system_name(system)] = {{"residual", res},
                                       {"file", name}};
    }
    artifacts["kp"] = levels;
    if (!any) return;
    if (cfg.checks.kp_residual)
        checks.record("kp_residual", worst <= cfg.checks.kp_residual_tol *
                                                  std::max(1.0, cfg.p_level),
                      worst,
                      cfg.checks.kp_residual_tol * std::max(1.0, cfg.p_level));
}

void run_steady(const ExperimentConfig& cfg, const Heterogeneity& het,
                const Grid& grid, const std::string& out_dir,
                CheckList& checks, json& artifacts) {
    SteadyProfile prof = solve_stationary_2x2(het, grid, cfg.relax.epsilon,
                                              cfg.relax.u0, cfg.relax.alpha);
    std::vector<std::vector<double>> rows;
    for (int j = 0; j < grid.n_cells; ++j)
        rows.push_back({grid.x(j), prof.U[j], prof.V[j]});
    write_csv(out_dir + "/steady.csv", {"x", "U", "V"}, rows);
    artifacts["steady"] = {{"K", prof.K},
                           {"u_at_L", prof.u_at_L},
                           {"reduced_mode", prof.reduced_mode},
                           {"multiple_roots", prof.multiple_roots},
                           {"shoot_residual", prof.shoot_residual},
                           {"supersolution_bound",
                            supersolution_bound(prof, het)}};
    if (cfg.checks.steady_residual) {
        double tol =
            cfg.checks.steady_residual_tol * std::max(1.0, cfg.relax.u0);
        checks.record("steady_residual", prof.shoot_residual <= tol,
                      prof.shoot_residual, tol);
    }
}

// one relaxation run with the requested observers; shared by the single-run
// kinds and the sweep members
RunResult2 member_run_2x2(const ExperimentConfig& cfg, const Heterogeneity& het,
                          const Grid& grid, const InitialData& id,
                          const Boundary& b, double epsilon,
                          const std::vector<KpProfile>* profiles,
                          double ceiling, const RunObservers& extra = {}) {
    State2 init = well_prepared_state2(het, grid, id.slow);
    RelaxConfig rc;
    rc.epsilon = epsilon;
    rc.cfl = cfg.relax.cfl;
    rc.t_end = cfg.relax.t_end;
    rc.alpha = cfg.relax.alpha;
    rc.u0 = b.u0;
    RunObservers obs = extra;
    obs.entropy_profiles = profiles;
    obs.ceiling = ceiling;
    return run_2x2(std::move(init), het, grid, rc, obs);
}

double auto_ceiling_2x2(const ExperimentConfig& cfg, const Heterogeneity& het,
                        const Grid& grid, double epsilon, double u0) {
    if (!std::isnan(cfg.checks.ceiling_value)) return cfg.checks.ceiling_value;
    SteadyProfile prof =
        solve_stationary_2x2(het, grid, epsilon, u0, cfg.relax.alpha);
    return supersolution_bound(prof, het);
}

void record_relax_checks(const ExperimentConfig& cfg, const Grid& grid,
                         const DiagnosticsReport& rep, double ceiling,
                         bool ceiling_active, double linf, CheckList& checks) {
    const CheckSettings& c = cfg.checks;
    if (c.positivity)
        checks.record("positivity", rep.min_value >= -c.positivity_tol,
                      rep.min_value, -c.positivity_tol);
    if (c.mass)
        checks.record("mass_balance", rep.mass_balance_error <= c.mass_tol,
                      rep.mass_balance_error, c.mass_tol);
    if (c.ceiling) {
        if (ceiling_active)
            checks.record("ceiling", linf <= ceiling + c.ceiling_tol, linf,
                          ceiling + c.ceiling_tol);
        else
            checks.skip("ceiling",
                        "no ceiling available; set checks.ceiling_value");
    }
    if (c.tbv) {
        double measured = std::max(rep.bv_t_max_increase,
                                   rep.bv_t_initial - rep.bv_x_initial_bound);
        checks.record("tbv_decay", measured <= c.tbv_tol, measured, c.tbv_tol);
    }
    if (c.entropy) {
        double tol = entropy_tol_auto(c, grid.dx, rep.dt);
        double w = worst_entropy(rep);
        checks.record("entropy_relax", w <= tol, w, tol);
    }
}

void write_relax2_artifacts(const std::string& out_dir, const Grid& grid,
                            const RunResult2& res) {
    std::vector<std::vector<double>> rows;
    for (int j = 0; j < grid.n_cells; ++j)
        rows.push_back({grid.x(j), res.state.u[j], res.state.v[j]});
    write_csv(out_dir + "/state.csv", {"x", "u", "v"}, rows);
    rows.clear();
    for (std::size_t i = 0; i < res.traces.times.size(); ++i)
        rows.push_back(
            {res.traces.times[i], res.traces.u_L[i], res.traces.v_0[i]});
    write_csv(out_dir + "/traces.csv", {"t", "u_L", "v_0"}, rows);
}

void run_relax2(const ExperimentConfig& cfg, const Heterogeneity& het,
                const Grid& grid, const std::string& out_dir,
                CheckList& checks, json& artifacts) {
    InitialData id = build_initial(cfg.initial, het, grid,
                                   SystemKind::TwoByTwo);
    Boundary b = resolve_boundary(cfg, het, id, SystemKind::TwoByTwo);

    std::vector<KpProfile> profiles;
    if (cfg.checks.entropy) {
        std::vector<double> ps =
            cfg.p_samples.empty()
                ? make_p_samples(initial_rho(het, grid, id.slow,
                                             SystemKind::TwoByTwo),
                                 b.inflow_rho, het, grid, SystemKind::TwoByTwo,
                                 cfg.n_p_samples)
                : cfg.p_samples;
        profiles = solve_profiles(het, grid, ps, SystemKind::TwoByTwo);
    }
    bool ceiling_active = cfg.checks.ceiling;
    double ceiling = 0.0;
    if (ceiling_active)
        ceiling = auto_ceiling_2x2(cfg, het, grid, cfg.relax.epsilon, b.u0);

    RunObservers extra;
    int snap_index = 0;
    if (cfg.snapshot_every > 0) {
        extra.snapshot_every = cfg.snapshot_every;
        extra.on_snapshot2 = [&](const State2& s) {
            char name[64];
            std::snprintf(name, sizeof name, "/snap_%06d.csv", snap_index++);
            std::vector<std::vector<double>> rows;
            for (int j = 0; j < grid.n_cells; ++j)
                rows.push_back({grid.x(j), s.u[j], s.v[j]});
            write_csv(out_dir + name, {"x", "u", "v"}, rows);
        };
    }

    RunResult2 res =
        member_run_2x2(cfg, het, grid, id, b, cfg.relax.epsilon,
                       profiles.empty() ? nullptr : &profiles, ceiling, extra);
    write_relax2_artifacts(out_dir, grid, res);
    artifacts["report"] = report_json(res.report);
    artifacts["boundary"] = {{"u0", b.u0}, {"inflow_rho", b.inflow_rho}};
    record_relax_checks(cfg, grid, res.report, ceiling, ceiling_active,
                        std::max(res.report.linf_u, res.report.linf_v),
                        checks);
}

void run_relax3(const ExperimentConfig& cfg, const Heterogeneity& het,
                const Grid& grid, const std::string& out_dir,
                CheckList& checks, json& artifacts) {
    InitialData id = build_initial(cfg.initial, het, grid,
                                   SystemKind::ThreeByThree);
    Boundary b = resolve_boundary(cfg, het, id, SystemKind::ThreeByThree);

    std::vector<KpProfile> profiles;
    if (cfg.checks.entropy) {
        std::vector<double> ps =
            cfg.p_samples.empty()
                ? make_p_samples(initial_rho(het, grid, id.slow,
                                             SystemKind::ThreeByThree),
                                 b.inflow_rho, het, grid,
                                 SystemKind::ThreeByThree, cfg.n_p_samples)
                : cfg.p_samples;
        profiles = solve_profiles(het, grid, ps, SystemKind::ThreeByThree);
    }

    State3 init = well_prepared_state3(het, grid, id.slow);
    RelaxConfig rc;
    rc.epsilon = cfg.relax.epsilon;
    rc.cfl = cfg.relax.cfl;
    rc.t_end = cfg.relax.t_end;
    rc.c01 = b.c01;
    rc.c02 = b.c02;

    RunObservers obs;
    obs.entropy_profiles = profiles.empty() ? nullptr : &profiles;
    bool ceiling_active = false;
    if (cfg.checks.ceiling && !std::isnan(cfg.checks.ceiling_value)) {
        obs.ceiling = cfg.checks.ceiling_value;
        ceiling_active = true;
    }
    int snap_index = 0;
    if (cfg.snapshot_every > 0) {
        obs.snapshot_every = cfg.snapshot_every;
        obs.on_snapshot3 = [&](const State3& s) {
            char name[64];
            std::snprintf(name, sizeof name, "/snap_%06d.csv", snap_index++);
            std::vector<std::vector<double>> rows;
            for (int j = 0; j < grid.n_cells; ++j)
                rows.push_back({grid.x(j), s.c1[j], s.c2[j], s.c3[j]});
            write_csv(out_dir + name, {"x", "c1", "c2", "c3"}, rows);
        };
    }

    RunResult3 res = run_3x3(std::move(init), het, grid, rc, obs);
    std::vector<std::vector<double>> rows;
    for (int j = 0; j < grid.n_cells; ++j)
        rows.push_back(
            {grid.x(j), res.state.c1[j], res.state.c2[j], res.state.c3[j]});
    write_csv(out_dir + "/state.csv", {"x", "c1", "c2", "c3"}, rows);
    rows.clear();
    for (std::size_t i = 0; i < res.traces.times.size(); ++i)
        rows.push_back({res.traces.times[i], res.traces.c1_L[i],
                        res.traces.c2_L[i], res.traces.c3_0[i]});
    write_csv(out_dir + "/traces.csv", {"t", "c1_L", "c2_L", "c3_0"}, rows);

    artifacts["report"] = report_json(res.report);
    artifacts["boundary"] = {{"c01", b.c01},
                             {"c02", b.c02},
                             {"inflow_rho", b.inflow_rho}};
    double linf = std::max({res.report.linf_c1, res.report.linf_c2,
                            res.report.linf_c3});
    record_relax_checks(cfg, grid, res.report, obs.ceiling, ceiling_active,
                        linf, checks);
}

void run_limit(const ExperimentConfig& cfg, const Heterogeneity& het,
               const Grid& grid, const std::string& out_dir, CheckList& checks,
               json& artifacts, SystemKind system) {
    InitialData id = build_initial(cfg.initial, het, grid, system);
    Boundary b = resolve_boundary(cfg, het, id, system);
    std::vector<double> rho0 = initial_rho(het, grid, id.slow, system);

    std::vector<KpProfile> profiles;
    if (cfg.checks.entropy) {
        std::vector<double> ps =
            cfg.p_samples.empty()
                ? make_p_samples(rho0, b.inflow_rho, het, grid, system,
                                 cfg.n_p_samples)
                : cfg.p_samples;
        profiles = solve_profiles(het, grid, ps, system);
    }

    LimitState init;
    init.rho = std::move(rho0);
    init.system = system;
    LimitConfig lc;
    lc.system = system;
    lc.cfl = cfg.limit.cfl;
    lc.t_end = cfg.limit.t_end;
    lc.inflow_rho = b.inflow_rho;

    LimitRunResult res = run_limit(std::move(init), het, grid, lc,
                                   profiles.empty() ? nullptr : &profiles);

    std::vector<std::vector<double>> rows;
    for (int j = 0; j < grid.n_cells; ++j) {
        double x = grid.x(j);
        double v = system == SystemKind::TwoByTwo
                       ? het.invert_rho2(res.state.rho[j], x)
                       : het.invert_rho3(res.state.rho[j], x);
        rows.push_back({x, res.state.rho[j], v});
    }
    write_csv(out_dir + "/state.csv", {"x", "rho", "v_reconstructed"}, rows);
    rows.clear();
    for (std::size_t i = 0; i < res.times.size(); ++i)
        rows.push_back({res.times[i], res.rho_0[i], res.rho_L[i]});
    write_csv(out_dir + "/traces.csv", {"t", "rho_0", "rho_L"}, rows);

    artifacts["report"] = report_json(res.report);
    artifacts["boundary"] = {{"inflow_rho", b.inflow_rho}};

    const CheckSettings& c = cfg.checks;
    if (c.positivity)
        checks.record("positivity", res.report.min_value >= -c.positivity_tol,
                      res.report.min_value, -c.positivity_tol);
    if (c.entropy) {
        double tol = entropy_tol_auto(c, grid.dx, res.report.dt);
        double w = worst_entropy(res.report);
        checks.record("entropy_limit", w <= tol, w, tol);
    }
}

void run_sweep(const ExperimentConfig& cfg, const Heterogeneity& het,
               const Grid& grid, const std::string& out_dir, CheckList& checks,
               json& artifacts, int jobs, bool compare_mode) {
    InitialData id = build_initial(cfg.initial, het, grid,
                                   SystemKind::TwoByTwo);
    Boundary b = resolve_boundary(cfg, het, id, SystemKind::TwoByTwo);
    std::vector<double> rho0 =
        initial_rho(het, grid, id.slow, SystemKind::TwoByTwo);

    std::vector<KpProfile> profiles;
    std::vector<double> ps;
    if (cfg.checks.entropy || cfg.checks.bln) {
        ps = cfg.p_samples.empty()
                 ? make_p_samples(rho0, b.inflow_rho, het, grid,
                                  SystemKind::TwoByTwo, cfg.n_p_samples)
                 : cfg.p_samples;
        profiles = solve_profiles(het, grid, ps, SystemKind::TwoByTwo);
    }
    const std::vector<KpProfile>* prof_ptr =
        cfg.checks.entropy ? &profiles : nullptr;

    // reference run of the limit law
    LimitState linit;
    linit.rho = rho0;
    linit.system = SystemKind::TwoByTwo;
    LimitConfig lc;
    lc.system = SystemKind::TwoByTwo;
    lc.cfl = cfg.limit.cfl;
    lc.t_end = cfg.relax.t_end; // compare at the same final time
    lc.inflow_rho = b.inflow_rho;
    LimitRunResult limit_res = run_limit(std::move(linit), het, grid, lc,
                                         prof_ptr);

    // epsilon-sweep members, optionally in parallel
    const std::size_t m = cfg.epsilons.size();
    std::vector<RunResult2> member(m);
    std::vector<double> ceilings(m, 0.0);
    std::vector<std::exception_ptr> errors(m);
    auto work = [&](std::size_t i) {
        try {
            double ceiling =
                cfg.checks.ceiling
                    ? auto_ceiling_2x2(cfg, het, grid, cfg.epsilons[i], b.u0)
                    : 0.0;
            ceilings[i] = ceiling;
            member[i] = member_run_2x2(cfg, het, grid, id, b, cfg.epsilons[i],
                                       prof_ptr, ceiling);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(m)));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < m; ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = static_cast<std::size_t>(t); i < m;
                     i += static_cast<std::size_t>(n_threads))
                    work(i);
            });
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    SweepResult sw;
    sw.epsilons = cfg.epsilons;
    for (std::size_t i = 0; i < m; ++i) {
        sw.reports.push_back(member[i].report);
        sw.eq_dev.push_back(member[i].report.eq_dev_l2);
        sw.l1_distance.push_back(compare_with_limit(
            member[i].state.u, member[i].state.v, limit_res.state.rho, grid));
    }
    bool order_ok = true;
    for (double d : sw.eq_dev)
        if (!(d > 0.0)) order_ok = false;
    if (order_ok) sw.eq_dev_order = fit_order(sw.epsilons, sw.eq_dev);

    // artifacts
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < m; ++i)
        rows.push_back({sw.epsilons[i], sw.eq_dev[i], sw.l1_distance[i],
                        sw.reports[i].bv_x_combined_final,
                        sw.reports[i].bv_x_u_final, sw.eq_dev_order});
    write_csv(out_dir + "/sweep.csv",
              {"eps", "eq_dev", "l1_dist", "bvx_combined", "bvx_u", "order"},
              rows);
    {
        std::ofstream f(out_dir + "/sweep.json");
        f << sweep_to_json(sw) << "\n";
    }
    for (std::size_t i = 0; i < m; ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "/state_eps_%02d.csv",
                      static_cast<int>(i));
        std::vector<std::vector<double>> srows;
        for (int j = 0; j < grid.n_cells; ++j)
            srows.push_back({grid.x(j), member[i].state.u[j],
                             member[i].state.v[j]});
        write_csv(out_dir + name, {"x", "u", "v"}, srows);
    }
    {
        std::vector<std::vector<double>> srows;
        for (int j = 0; j < grid.n_cells; ++j)
            srows.push_back({grid.x(j), limit_res.state.rho[j]});
        write_csv(out_dir + "/limit_state.csv", {"x", "rho"}, srows);
    }
    artifacts["sweep"] = json::parse(sweep_to_json(sw));
    artifacts["limit_report"] = report_json(limit_res.report);
    artifacts["boundary"] = {{"u0", b.u0}, {"inflow_rho", b.inflow_rho}};

    // aggregated member checks
    const CheckSettings& c = cfg.checks;
    if (c.positivity) {
        double worst = 0.0;
        for (const auto& r : sw.reports)
            worst = std::min(worst, r.min_value);
        worst = std::min(worst, limit_res.report.min_value);
        checks.record("positivity", worst >= -c.positivity_tol, worst,
                      -c.positivity_tol);
    }
    if (c.mass) {
        double worst = 0.0;
        for (const auto& r : sw.reports)
            worst = std::max(worst, r.mass_balance_error);
        checks.record("mass_balance", worst <= c.mass_tol, worst, c.mass_tol);
    }
    if (c.ceiling) {
        double margin = -1e300;
        for (std::size_t i = 0; i < m; ++i)
            margin = std::max(margin,
                              std::max(sw.reports[i].linf_u,
                                       sw.reports[i].linf_v) -
                                  ceilings[i]);
        checks.record("ceiling", margin <= c.ceiling_tol, margin,
                      c.ceiling_tol);
    }
    if (c.tbv) {
        double worst = -1e300;
        for (const auto& r : sw.reports)
            worst = std::max(worst,
                             std::max(r.bv_t_max_increase,
                                      r.bv_t_initial - r.bv_x_initial_bound));
        checks.record("tbv_decay", worst <= c.tbv_tol, worst, c.tbv_tol);
    }
    if (c.entropy) {
        double worst = 0.0;
        double tol = 0.0;
        for (const auto& r : sw.reports) {
            worst = std::max(worst, worst_entropy(r));
            tol = std::max(tol, entropy_tol_auto(c, grid.dx, r.dt));
        }
        checks.record("entropy_relax", worst <= tol, worst, tol);
        double wl = worst_entropy(limit_res.report);
        double tl = entropy_tol_auto(c, grid.dx, limit_res.report.dt);
        checks.record("entropy_limit", wl <= tl, wl, tl);
    }
    if (c.eq_dev_order) {
        if (order_ok)
            checks.record("eq_dev_order",
                          sw.eq_dev_order >= c.eq_dev_min_order,
                          sw.eq_dev_order, c.eq_dev_min_order);
        else
            checks.skip("eq_dev_order",
                        "equilibrium deviation vanished for some epsilon");
    }
    if (compare_mode && c.l1_monotone) {
        double worst_step = -1e300;
        for (std::size_t i = 1; i < m; ++i)
            worst_step = std::max(worst_step,
                                  sw.l1_distance[i] - sw.l1_distance[i - 1]);
        checks.record("l1_monotone", worst_step <= 1e-12, worst_step, 1e-12);
        double ratio = sw.l1_distance.back() > 0.0
                           ? sw.l1_distance.front() / sw.l1_distance.back()
                           : std::numeric_limits<double>::infinity();
        checks.record("l1_drop", ratio >= c.l1_drop_factor, ratio,
                      c.l1_drop_factor);
    }
    if (compare_mode && c.bln) {
        const auto& tr = member.back().traces; // smallest epsilon
        BlnReport bln =
            bln_check(limit_res.times, limit_res.rho_0, limit_res.rho_L,
                      tr.times, tr.u_L, het, grid, ps, b.inflow_rho,
                      SystemKind::TwoByTwo);
        artifacts["bln"] = {{"worst_violation_x0", bln.worst_violation_x0},
                            {"worst_violation_xL", bln.worst_violation_xL},
                            {"applicable_x0", bln.applicable_x0},
                            {"applicable_xL", bln.applicable_xL},
                            {"skipped_x0", bln.skipped_x0},
                            {"skipped_xL", bln.skipped_xL},
                            {"n_times", bln.n_times}};
        double worst =
            std::max(bln.worst_violation_x0, bln.worst_violation_xL);
        checks.record("bln", worst <= c.bln_tol, worst, c.bln_tol);
    }
}

} // namespace

InitialData build_initial(const InitialDescriptor& d, const Heterogeneity& het,
                          const Grid& grid, SystemKind system) {
    InitialData out;
    out.slow.resize(grid.n_cells);
    auto profile = [&](double x) -> double {
        if (d.type == "constant") return d.value;
        if (d.type == "ramp")
            return d.from + (d.to - d.from) * (x / grid.length);
        if (d.type == "kp") return kp_at(het, d.p, x, system);
        // flux_plateau: flux level P(x) dropping smoothly from `level` to 0
        double pl;
        if (x <= d.plateau_end) {
            pl = d.level;
        } else if (x >= d.foot) {
            pl = 0.0;
        } else {
            double xi = (x - d.plateau_end) / (d.foot - d.plateau_end);
            pl = d.level * (1.0 - xi * xi * (3.0 - 2.0 * xi));
        }
        return kp_at(het, pl, x, system);
    };
    for (int j = 0; j < grid.n_cells; ++j) out.slow[j] = profile(grid.x(j));
    out.slow_at_0 = profile(0.0);
    return out;
}

std::vector<double> make_p_samples(const std::vector<double>& rho0,
                                   double inflow_rho, const Heterogeneity& het,
                                   const Grid& grid, SystemKind system,
                                   int n) {
    if (n < 2)
        throw std::invalid_argument("make_p_samples: need n >= 2");
    double p_boundary = limit_flux(het, inflow_rho, 0.0, system);
    double p_max = p_boundary;
    for (std::size_t j = 0; j < rho0.size(); ++j)
        p_max = std::max(p_max, limit_flux(het, rho0[j],
                                           grid.x(static_cast<int>(j)),
                                           system));
    if (p_max <= 0.0) return {0.0};
    std::vector<double> ps(n);
    for (int i = 0; i < n; ++i) ps[i] = p_max * i / (n - 1);
    std::size_t best = 0;
    for (std::size_t i = 1; i < ps.size(); ++i)
        if (std::fabs(ps[i] - p_boundary) < std::fabs(ps[best] - p_boundary))
            best = i;
    ps[best] = p_boundary;
    return ps;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg,
                                 const std::string& out_dir, int jobs) {
    std::filesystem::create_directories(out_dir);
    Heterogeneity het = make_heterogeneity(cfg.het);
    Grid grid = make_grid(cfg.grid);

    CheckList checks;
    json artifacts = json::object();
    int exit_code = 0;
    try {
        switch (cfg.kind) {
        case ExperimentKind::ValidateModel:
            run_validate(cfg, het, grid, out_dir, checks, artifacts);
            break;
        case ExperimentKind::Kp:
            run_kp(cfg, het, grid, out_dir, checks, artifacts);
            break;
        case ExperimentKind::Steady:
            run_steady(cfg, het, grid, out_dir, checks, artifacts);
            break;
        case ExperimentKind::Relax2:
            run_relax2(cfg, het, grid, out_dir, checks, artifacts);
            break;
        case ExperimentKind::Relax3:
            run_relax3(cfg, het, grid, out_dir, checks, artifacts);
            break;
        case ExperimentKind::Limit2:
            run_limit(cfg, het, grid, out_dir, checks, artifacts,
                      SystemKind::TwoByTwo);
            break;
        case ExperimentKind::Limit3:
            run_limit(cfg, het, grid, out_dir, checks, artifacts,
                      SystemKind::ThreeByThree);
            break;
        case ExperimentKind::SweepEps:
            run_sweep(cfg, het, grid, out_dir, checks, artifacts, jobs, false);
            break;
        case ExperimentKind::Compare:
            run_sweep(cfg, het, grid, out_dir, checks, artifacts, jobs, true);
            break;
        }
    } catch (const SolverError& e) {
        artifacts["error"] = {{"message", e.what()},
                              {"time", e.time},
                              {"cell", e.cell}};
        std::printf("ERROR %s\n", e.what());
        exit_code = 2;
    }

    json out{{"metadata",
              {{"timestamp", timestamp_utc()}, {"tool", "relaxbench"}}},
             {"config", json::parse(resolved_config_json(cfg))},
             {"checks", checks.entries},
             {"result", artifacts}};
    std::ofstream f(out_dir + "/report.json");
    if (!f) throw std::runtime_error("cannot write " + out_dir +
                                     "/report.json");
    f << out.dump(2) << "\n";

    ExperimentOutcome o;
    o.checks_run = checks.run;
    o.checks_failed = checks.failed;
    o.exit_code = exit_code != 0 ? exit_code : (checks.failed > 0 ? 1 : 0);
    return o;
}

} // namespace relaxbench
