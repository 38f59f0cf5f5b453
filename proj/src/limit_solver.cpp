#include "relaxbench/limit_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relaxbench {

namespace {

std::vector<double> flux_table(const std::vector<double>& rho,
                               const Heterogeneity& het, const Grid& grid,
                               SystemKind system) {
    std::vector<double> F(rho.size());
    for (std::size_t j = 0; j < rho.size(); ++j)
        F[j] = limit_flux(het, rho[j], grid.x(static_cast<int>(j)), system);
    return F;
}

void apply_upwind(std::vector<double>& rho, const std::vector<double>& F,
                  double ghost_flux, double lam) {
    double prev = ghost_flux;
    for (std::size_t j = 0; j < rho.size(); ++j) {
        rho[j] -= lam * (F[j] - prev);
        prev = F[j];
    }
}

double interp_at(const std::vector<double>& xs, const std::vector<double>& ys,
                 double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

double sign_of(double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); }

} // namespace

double char_speed_bound(const Heterogeneity& het, SystemKind system) {
    double mu = het.mu();
    return system == SystemKind::TwoByTwo
               ? (mu - 1.0) / (mu + 1.0)
               : (2.0 * mu - 1.0) / (2.0 * mu + 1.0);
}

double limit_flux(const Heterogeneity& het, double rho, double x,
                  SystemKind system) {
    if (system == SystemKind::TwoByTwo) {
        double v = het.invert_rho2(rho, x);
        double h = het.value_extended(v, x);
        return h - v;
    }
    double v = het.invert_rho3(rho, x);
    double h = het.value_extended(v, x);
    return 2.0 * h - v;
}

void step_limit(LimitState& s, const Heterogeneity& het, const Grid& grid,
                double dt, double inflow_rho) {
    if (!(dt > 0.0))
        throw SolverError("step_limit: dt must be positive", s.t, -1);
    double sbar = char_speed_bound(het, s.system);
    if (dt * sbar > grid.dx * (1.0 + 1e-12))
        throw SolverError("step_limit: CFL bound exceeded", s.t, -1);
    if (static_cast<int>(s.rho.size()) != grid.n_cells)
        throw SolverError("step_limit: state size != n_cells", s.t, -1);
    if (!(inflow_rho >= 0.0))
        throw SolverError("step_limit: inflow density must be >= 0", s.t, -1);
    auto F = flux_table(s.rho, het, grid, s.system);
    apply_upwind(s.rho, F, limit_flux(het, inflow_rho, 0.0, s.system),
                 dt / grid.dx);
    s.t += dt;
}

LimitRunResult run_limit(LimitState initial, const Heterogeneity& het,
                         const Grid& grid, const LimitConfig& cfg,
                         const std::vector<KpProfile>* entropy_profiles) {
    if (static_cast<int>(initial.rho.size()) != grid.n_cells)
        throw std::invalid_argument("run_limit: state size != n_cells");
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0))
        throw std::invalid_argument("run_limit: cfl must lie in (0, 1]");
    if (!(cfg.t_end >= 0.0))
        throw std::invalid_argument("run_limit: t_end must be >= 0");
    if (!(cfg.inflow_rho >= 0.0))
        throw std::invalid_argument("run_limit: inflow density must be >= 0");
    if (cfg.system == SystemKind::TwoByTwo && !(het.beta() > 1.0))
        throw std::invalid_argument(
            "run_limit: upwind flux needs beta > 1 for the 2x2 limit");
    if (cfg.system == SystemKind::ThreeByThree && !(2.0 * het.beta() > 1.0))
        throw std::invalid_argument(
            "run_limit: upwind flux needs 2 beta > 1 for the 3x3 limit");
    const int n = grid.n_cells;
    if (entropy_profiles) {
        for (const auto& kp : *entropy_profiles) {
            if (static_cast<int>(kp.k.size()) != n ||
                kp.system != cfg.system)
                throw std::invalid_argument(
                    "run_limit: entropy profile does not match grid/system");
        }
    }

    initial.system = cfg.system;
    LimitRunResult out;
    out.state = std::move(initial);
    LimitState& s = out.state;

    const double sbar = char_speed_bound(het, cfg.system);
    const double dt = cfg.cfl * grid.dx / sbar;
    long long n_full = static_cast<long long>(std::floor(cfg.t_end / dt + 1e-9));
    double remainder = cfg.t_end - static_cast<double>(n_full) * dt;
    if (remainder <= 1e-12 * std::max(1.0, cfg.t_end)) remainder = 0.0;
    const long long n_steps = n_full + (remainder > 0.0 ? 1 : 0);

    DiagnosticsReport& rep = out.report;
    rep.dt = dt;
    rep.dx = grid.dx;
    rep.bound_ceiling = 0.0;
    rep.min_value = 0.0;
    for (double r : s.rho) {
        rep.linf_u = std::max(rep.linf_u, std::fabs(r));
        rep.min_value = std::min(rep.min_value, r);
    }
    rep.bv_x_density_initial = bv_x(s.rho);

    std::vector<std::vector<double>> rho_p_tab;
    if (entropy_profiles) {
        rep.entropy_p.resize(entropy_profiles->size());
        rep.entropy_worst.assign(entropy_profiles->size(), 0.0);
        rho_p_tab.resize(entropy_profiles->size());
        for (std::size_t i = 0; i < entropy_profiles->size(); ++i) {
            const auto& kp = (*entropy_profiles)[i];
            rep.entropy_p[i] = kp.p;
            rho_p_tab[i].resize(n);
            for (int j = 0; j < n; ++j)
                rho_p_tab[i][j] =
                    steady_density(het, kp.k[j], grid.x(j), cfg.system);
        }
    }

    const double ghost_flux = limit_flux(het, cfg.inflow_rho, 0.0, cfg.system);
    auto F = flux_table(s.rho, het, grid, cfg.system);
    std::vector<double> rho_prev(n);

    for (long long step = 0; step < n_steps; ++step) {
        const double dt_step = step < n_full ? dt : remainder;
        rho_prev = s.rho;
        std::vector<double> F_pre = std::move(F);
        apply_upwind(s.rho, F_pre, ghost_flux, dt_step / grid.dx);
        s.t += dt_step;

        F = flux_table(s.rho, het, grid, cfg.system);
        out.times.push_back(s.t);
        out.rho_0.push_back(s.rho[0]);
        out.rho_L.push_back(s.rho[n - 1]);
        out.flux_min.push_back(*std::min_element(F.begin(), F.end()));
        out.flux_max.push_back(*std::max_element(F.begin(), F.end()));

        for (double r : s.rho) {
            rep.linf_u = std::max(rep.linf_u, std::fabs(r));
            rep.min_value = std::min(rep.min_value, r);
        }

        if (entropy_profiles) {
            for (std::size_t i = 0; i < entropy_profiles->size(); ++i) {
                const double p = (*entropy_profiles)[i].p;
                double worst = rep.entropy_worst[i];
                double q_prev = 0.0;
                for (int j = 0; j < n; ++j) {
                    double q_j = std::fabs(F_pre[j] - p);
                    if (j > 0) {
                        double rp = rho_p_tab[i][j];
                        double r = (std::fabs(s.rho[j] - rp) -
                                    std::fabs(rho_prev[j] - rp)) /
                                       dt_step +
                                   (q_j - q_prev) / grid.dx;
                        worst = std::max(worst, r);
                    }
                    q_prev = q_j;
                }
                rep.entropy_worst[i] = worst;
            }
        }
    }

    rep.n_steps = static_cast<int>(n_steps);
    rep.bv_x_density_final = bv_x(s.rho);
    return out;
}

std::vector<double> entropy_residual_limit(const std::vector<double>& rho_prev,
                                           const std::vector<double>& rho_next,
                                           const Heterogeneity& het,
                                           const Grid& grid, double dt,
                                           const KpProfile& kp, double p) {
    const int n = grid.n_cells;
    if (static_cast<int>(rho_prev.size()) != n ||
        static_cast<int>(rho_next.size()) != n ||
        static_cast<int>(kp.k.size()) != n)
        throw std::invalid_argument("entropy_residual_limit: size mismatch");
    if (!(dt > 0.0))
        throw std::invalid_argument("entropy_residual_limit: dt must be > 0");
    std::vector<double> r(n, 0.0);
    double q_prev = 0.0;
    for (int j = 0; j < n; ++j) {
        double x = grid.x(j);
        double rho_p = steady_density(het, kp.k[j], x, kp.system);
        double q_j = std::fabs(limit_flux(het, rho_prev[j], x, kp.system) - p);
        if (j > 0)
            r[j] = (std::fabs(rho_next[j] - rho_p) -
                    std::fabs(rho_prev[j] - rho_p)) /
                       dt +
                   (q_j - q_prev) / grid.dx;
        q_prev = q_j;
    }
    return r;
}

BlnReport bln_check(const std::vector<double>& times,
                    const std::vector<double>& rho_0,
                    const std::vector<double>& rho_L,
                    const std::vector<double>& w_times,
                    const std::vector<double>& w_values,
                    const Heterogeneity& het, const Grid& grid,
                    const std::vector<double>& p_samples, double datum_rho0,
                    SystemKind system) {
    if (times.size() != rho_0.size() || times.size() != rho_L.size())
        throw std::invalid_argument("bln_check: trace length mismatch");
    if (w_times.size() != w_values.size() || w_times.empty())
        throw std::invalid_argument("bln_check: bad boundary-component trace");
    const double L = grid.length;

    BlnReport rep;
    rep.n_times = static_cast<int>(times.size());
    std::vector<double> rp0(p_samples.size()), rpL(p_samples.size());
    for (std::size_t i = 0; i < p_samples.size(); ++i) {
        rp0[i] = steady_density(het, kp_at(het, p_samples[i], 0.0, system),
                                0.0, system);
        rpL[i] = steady_density(het, kp_at(het, p_samples[i], L, system), L,
                                system);
    }

    for (std::size_t m = 0; m < times.size(); ++m) {
        double w = interp_at(w_times, w_values, times[m]);
        double vb = het.invert(std::max(w, 0.0), L);
        double rho_bL =
            system == SystemKind::TwoByTwo ? w + vb : 2.0 * w + vb;
        double f0 = limit_flux(het, rho_0[m], 0.0, system);
        double fL = limit_flux(het, rho_L[m], L, system);
        for (std::size_t i = 0; i < p_samples.size(); ++i) {
            double p = p_samples[i];
            double lo = std::min(rho_0[m], datum_rho0);
            double hi = std::max(rho_0[m], datum_rho0);
            if (rp0[i] > lo && rp0[i] < hi) {
                ++rep.applicable_x0;
                double viol = sign_of(rho_0[m] - datum_rho0) * (f0 - p);
                rep.worst_violation_x0 =
                    std::max(rep.worst_violation_x0, viol);
            } else {
                ++rep.skipped_x0;
            }
            lo = std::min(rho_L[m], rho_bL);
            hi = std::max(rho_L[m], rho_bL);
            if (rpL[i] > lo && rpL[i] < hi) {
                ++rep.applicable_xL;
                double viol = -sign_of(rho_L[m] - rho_bL) * (fL - p);
                rep.worst_violation_xL =
                    std::max(rep.worst_violation_xL, viol);
            } else {
                ++rep.skipped_xL;
            }
        }
    }
    return rep;
}

} // namespace relaxbench
