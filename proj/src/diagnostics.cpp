#include "relaxbench/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace relaxbench {

double bv_x(const std::vector<double>& f) {
    double tv = 0;
    for (std::size_t j = 1; j < f.size(); ++j) tv += std::fabs(f[j] - f[j - 1]);
    return tv;
}

double l1_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("l1_diff: size mismatch");
    double s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::fabs(a[j] - b[j]);
    return s;
}

double time_bv_step(const std::vector<double>& u_prev,
                    const std::vector<double>& v_prev,
                    const std::vector<double>& u_next,
                    const std::vector<double>& v_next, double dx, double dt) {
    return (l1_diff(u_prev, u_next) + l1_diff(v_prev, v_next)) * dx / dt;
}

double eq_dev_sq_profile(const std::vector<double>& u,
                         const std::vector<double>& v, const Heterogeneity& het,
                         const Grid& grid) {
    double s = 0;
    for (int j = 0; j < grid.n_cells; ++j) {
        double e = u[j] - het.value(v[j], grid.x(j));
        s += e * e;
    }
    return s * grid.dx;
}

double equilibrium_deviation(const std::vector<std::vector<double>>& us,
                             const std::vector<std::vector<double>>& vs,
                             const Heterogeneity& het, const Grid& grid,
                             double dt) {
    if (us.size() != vs.size() || us.size() < 2)
        throw std::invalid_argument("equilibrium_deviation: need >= 2 snapshots");
    double acc = 0;
    double prev = eq_dev_sq_profile(us[0], vs[0], het, grid);
    for (std::size_t m = 1; m < us.size(); ++m) {
        double cur = eq_dev_sq_profile(us[m], vs[m], het, grid);
        acc += 0.5 * (prev + cur) * dt;
        prev = cur;
    }
    return std::sqrt(acc);
}

double entropy_residual_relax(const std::vector<double>& u_prev,
                              const std::vector<double>& v_prev,
                              const std::vector<double>& u_next,
                              const std::vector<double>& v_next,
                              const Heterogeneity& het, const Grid& grid,
                              const KpProfile& kp, double dt) {
    const int n = grid.n_cells;
    double worst = 0;
    // equilibrium values h(k_j, x_j) of the sampled steady state
    std::vector<double> H(n);
    for (int j = 0; j < n; ++j) H[j] = het.value(kp.k[j], grid.x(j));

    auto phi = [&](const std::vector<double>& u, const std::vector<double>& v,
                   int j) {
        return std::fabs(u[j] - H[j]) + std::fabs(v[j] - kp.k[j]);
    };
    // interface j+1/2, steady state taken from the donor cell j
    auto flux = [&](int j) {
        return std::fabs(u_prev[j] - H[j]) - std::fabs(v_prev[j + 1] - kp.k[j]);
    };
    for (int j = 1; j + 1 < n; ++j) {
        double r = (phi(u_next, v_next, j) - phi(u_prev, v_prev, j)) / dt +
                   (flux(j) - flux(j - 1)) / grid.dx;
        if (r > worst) worst = r;
    }
    return worst;
}

double entropy_residual_relax3(const std::vector<double>& c1_prev,
                               const std::vector<double>& c2_prev,
                               const std::vector<double>& c3_prev,
                               const std::vector<double>& c1_next,
                               const std::vector<double>& c2_next,
                               const std::vector<double>& c3_next,
                               const Heterogeneity& het, const Grid& grid,
                               const KpProfile& kp, double dt) {
    const int n = grid.n_cells;
    double worst = 0;
    std::vector<double> H(n);
    for (int j = 0; j < n; ++j) H[j] = het.value(kp.k[j], grid.x(j));

    auto phi = [&](const std::vector<double>& c1, const std::vector<double>& c2,
                   const std::vector<double>& c3, int j) {
        return std::fabs(c1[j] - H[j]) + std::fabs(c2[j] - H[j]) +
               std::fabs(c3[j] - kp.k[j]);
    };
    auto flux = [&](int j) {
        return std::fabs(c1_prev[j] - H[j]) + std::fabs(c2_prev[j] - H[j]) -
               std::fabs(c3_prev[j + 1] - kp.k[j]);
    };
    for (int j = 1; j + 1 < n; ++j) {
        double r = (phi(c1_next, c2_next, c3_next, j) -
                    phi(c1_prev, c2_prev, c3_prev, j)) / dt +
                   (flux(j) - flux(j - 1)) / grid.dx;
        if (r > worst) worst = r;
    }
    return worst;
}

double compare_with_limit(const std::vector<double>& u,
                          const std::vector<double>& v,
                          const std::vector<double>& rho, const Grid& grid) {
    if (u.size() != rho.size())
        throw std::invalid_argument("compare_with_limit: grid mismatch");
    double s = 0;
    for (int j = 0; j < grid.n_cells; ++j) s += std::fabs(u[j] + v[j] - rho[j]);
    return s * grid.dx;
}

double compare_with_limit3(const std::vector<double>& c1,
                           const std::vector<double>& c2,
                           const std::vector<double>& c3,
                           const std::vector<double>& rho, const Grid& grid) {
    if (c1.size() != rho.size())
        throw std::invalid_argument("compare_with_limit3: grid mismatch");
    double s = 0;
    for (int j = 0; j < grid.n_cells; ++j)
        s += std::fabs(c1[j] + c2[j] + c3[j] - rho[j]);
    return s * grid.dx;
}

double fit_order(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw std::invalid_argument("fit_order: need >= 3 matched points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("fit_order: points must be positive");
        double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double denom = n * sxx - sx * sx;
    if (!(denom > 1e-12 * n * n))
        throw std::invalid_argument("fit_order: degenerate x spread");
    return (n * sxy - sx * sy) / denom;
}

namespace {

nlohmann::json report_json(const DiagnosticsReport& r) {
    nlohmann::json j;
    j["linf"] = {{"u", r.linf_u},   {"v", r.linf_v},  {"c1", r.linf_c1},
                 {"c2", r.linf_c2}, {"c3", r.linf_c3}};
    j["time_bv"] = {{"initial", r.bv_t_initial},
                    {"max_increase", r.bv_t_max_increase},
                    {"initial_data_bound", r.bv_x_initial_bound},
                    {"series", r.bv_t_series}};
    j["x_bv"] = {{"combined_initial", r.bv_x_combined_initial},
                 {"combined_final", r.bv_x_combined_final},
                 {"density_initial", r.bv_x_density_initial},
                 {"density_final", r.bv_x_density_final},
                 {"u_initial", r.bv_x_u_initial},
                 {"u_final", r.bv_x_u_final},
                 {"v_initial", r.bv_x_v_initial},
                 {"v_final", r.bv_x_v_final}};
    j["eq_dev_l2"] = r.eq_dev_l2;
    j["entropy"] = {{"p", r.entropy_p}, {"worst_residual", r.entropy_worst}};
    j["mass_balance_error"] = r.mass_balance_error;
    j["min_value"] = r.min_value;
    j["ceiling"] = {{"bound", r.bound_ceiling}, {"violated", r.ceiling_violated}};
    j["well_prepared"] = r.well_prepared;
    j["initial_layer_size"] = r.initial_layer_size;
    j["corner_mismatch"] = r.corner_mismatch;
    j["n_steps"] = r.n_steps;
    j["dt"] = r.dt;
    j["dx"] = r.dx;
    return j;
}

} // namespace

std::string report_to_json(const DiagnosticsReport& r) {
    return report_json(r).dump(2);
}

std::string sweep_to_json(const SweepResult& s) {
    nlohmann::json j;
    j["epsilons"] = s.epsilons;
    j["l1_distance"] = s.l1_distance;
    j["eq_dev"] = s.eq_dev;
    j["eq_dev_order"] = s.eq_dev_order;
    j["reports"] = nlohmann::json::array();
    for (const auto& r : s.reports) j["reports"].push_back(report_json(r));
    return j.dump(2);
}

} // namespace relaxbench
