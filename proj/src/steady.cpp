#include "relaxbench/steady.hpp"

#include <cmath>

#include "relaxbench/rootfind.hpp"

namespace relaxbench {

namespace {

// Switch to the reduced (equilibrium) stationary profile once either the
// per-cell amplification of the implicit sweep becomes unsafe or the total
// growth factor e^{(mu-1) L / eps} makes the shooting residual unresolvable
// in double precision (d r / d K ~ e^exponent, so the best achievable
// residual is about e^exponent * 1 ulp).
constexpr double kMaxCellRatio = 0.5;  // (mu - 1) dx / eps
constexpr double kMaxExponent = 12.0;  // (mu - 1) L / eps

double kp_root(const Heterogeneity& het, double p, double x,
               SystemKind system) {
    if (system == SystemKind::TwoByTwo) {
        auto f = [&](double k) { return het.value_extended(k, x) - k; };
        auto df = [&](double k) { return het.slope_extended(k, x) - 1.0; };
        return monotone_root(f, df, p, 0.0, p / (het.beta() - 1.0) + 1.0);
    }
    auto f = [&](double k) { return 2.0 * het.value_extended(k, x) - k; };
    auto df = [&](double k) { return 2.0 * het.slope_extended(k, x) - 1.0; };
    return monotone_root(f, df, p, 0.0, p / (2.0 * het.beta() - 1.0) + 1.0);
}

} // namespace

double kp_at(const Heterogeneity& het, double p, double x, SystemKind system) {
    if (p < 0.0)
        throw std::range_error("kp: level p must be >= 0");
    if (system == SystemKind::TwoByTwo && !(het.beta() > 1.0))
        throw std::invalid_argument("kp: 2x2 steady states need beta > 1");
    if (p == 0.0) return 0.0;
    return kp_root(het, p, x, system);
}

KpProfile solve_kp(const Heterogeneity& het, const Grid& grid, double p,
                   SystemKind system) {
    KpProfile kp;
    kp.p = p;
    kp.system = system;
    kp.k.resize(grid.n_cells);
    for (int j = 0; j < grid.n_cells; ++j)
        kp.k[j] = kp_at(het, p, grid.x(j), system);
    return kp;
}

double steady_density(const Heterogeneity& het, double k, double x,
                      SystemKind system) {
    double h = het.value(k, x);
    return system == SystemKind::TwoByTwo ? h + k : 2.0 * h + k;
}

double steady_flux(const Heterogeneity& het, double k, double x,
                   SystemKind system) {
    double h = het.value(k, x);
    return system == SystemKind::TwoByTwo ? h - k : 2.0 * h - k;
}

namespace {

// One implicit Euler cell of U' = (h(U - K, x) - U) / eps:
// solve (1 + q) W - q h(W - K, x_next) = U_prev with q = step / eps.
double implicit_cell(const Heterogeneity& het, double U_prev, double K,
                     double x_next, double q) {
    auto f = [&](double W) {
        return (1.0 + q) * W - q * het.value_extended(W - K, x_next);
    };
    auto df = [&](double W) {
        return (1.0 + q) - q * het.slope_extended(W - K, x_next);
    };
    double span = std::fabs(U_prev) + std::fabs(K) + 1.0;
    return monotone_root(f, df, U_prev, -span, span);
}

// Integrates the stationary ODE from x = 0 (value U0) through the cell
// centers; returns cell values plus the trace at x = L.
struct Sweep {
    std::vector<double> U;
    double u_at_L;
};

Sweep integrate(const Heterogeneity& het, const Grid& grid, double epsilon,
                double U0, double K) {
    Sweep s;
    s.U.resize(grid.n_cells);
    double U_prev = U0;
    double x_prev = 0.0;
    for (int j = 0; j < grid.n_cells; ++j) {
        double x = grid.x(j);
        U_prev = implicit_cell(het, U_prev, K, x, (x - x_prev) / epsilon);
        s.U[j] = U_prev;
        x_prev = x;
    }
    s.u_at_L = implicit_cell(het, U_prev, K, grid.length,
                             (grid.length - x_prev) / epsilon);
    return s;
}

} // namespace

SteadyProfile solve_stationary_2x2(const Heterogeneity& het, const Grid& grid,
                                   double epsilon, double U0, double alpha) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("solve_stationary_2x2: epsilon must be > 0");
    if (!(U0 >= 0.0))
        throw std::invalid_argument("solve_stationary_2x2: U0 must be >= 0");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("solve_stationary_2x2: alpha must lie in (0, 1)");
    if (!(het.beta() > 1.0))
        throw std::invalid_argument("solve_stationary_2x2: requires beta > 1");

    SteadyProfile prof;
    prof.epsilon = epsilon;
    prof.U0 = U0;
    prof.alpha = alpha;
    prof.U.resize(grid.n_cells);
    prof.V.resize(grid.n_cells);

    const double stiffness = (het.mu() - 1.0) * grid.dx / epsilon;
    const double exponent = (het.mu() - 1.0) * grid.length / epsilon;
    prof.reduced_mode = stiffness > kMaxCellRatio || exponent > kMaxExponent;

    if (U0 == 0.0) {
        prof.K = 0.0;
        prof.u_at_L = 0.0;
        return prof; // zero data give the zero profile
    }

    if (prof.reduced_mode) {
        // Equilibrium branch: K solves h(U0 - K, 0) = U0, then the profile
        // follows the steady family at level K.  The trace at x = L is the
        // layer value forced by the reflection condition.
        auto f = [&](double K) { return U0 - het.value_extended(U0 - K, 0.0); };
        auto df = [&](double K) { return het.slope_extended(U0 - K, 0.0); };
        prof.K = monotone_root(f, df, 0.0, 0.0, U0);
        for (int j = 0; j < grid.n_cells; ++j) {
            prof.V[j] = kp_at(het, prof.K, grid.x(j), SystemKind::TwoByTwo);
            prof.U[j] = prof.V[j] + prof.K;
        }
        prof.u_at_L = prof.K / (1.0 - alpha);
        prof.shoot_residual = 0.0;
        return prof;
    }

    auto residual = [&](double K) {
        return K - (1.0 - alpha) * integrate(het, grid, epsilon, U0, K).u_at_L;
    };

    // Scan for extra sign changes; the boundary-value problem should have a
    // single root in [0, U0] and any non-monotone residual is reported.
    int sign_changes = 0;
    double prev = residual(0.0);
    double lo = 0.0, hi = U0;
    bool bracketed = false;
    const int n_scan = 32;
    for (int i = 1; i <= n_scan; ++i) {
        double K = U0 * i / n_scan;
        double r = residual(K);
        if ((prev < 0.0 && r >= 0.0) || (prev > 0.0 && r <= 0.0)) {
            ++sign_changes;
            if (!bracketed) {
                lo = U0 * (i - 1) / n_scan;
                hi = K;
                bracketed = true;
            }
        }
        prev = r;
    }
    prof.multiple_roots = sign_changes > 1;
    if (!bracketed)
        throw SolverError("solve_stationary_2x2: no shooting bracket in [0, U0]",
                          0.0, -1);

    double rlo = residual(lo);
    double K = lo, r = rlo;
    for (int it = 0; it < 200; ++it) {
        K = 0.5 * (lo + hi);
        r = residual(K);
        if (std::fabs(r) <= 1e-12 * U0) break;
        if ((r < 0.0) == (rlo < 0.0)) {
            lo = K;
            rlo = r;
        } else {
            hi = K;
        }
        if (std::nextafter(lo, hi) >= hi) break;
    }

    prof.K = K;
    prof.shoot_residual = std::fabs(r);
    Sweep sweep = integrate(het, grid, epsilon, U0, K);
    prof.U = std::move(sweep.U);
    prof.u_at_L = sweep.u_at_L;
    for (int j = 0; j < grid.n_cells; ++j) prof.V[j] = prof.U[j] - K;
    return prof;
}

double stationary_residual(const Heterogeneity& het, const Grid& grid,
                           double epsilon, double U0, double alpha, double K) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("stationary_residual: epsilon must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument(
            "stationary_residual: alpha must lie in (0, 1)");
    return K - (1.0 - alpha) * integrate(het, grid, epsilon, U0, K).u_at_L;
}

double supersolution_bound(const SteadyProfile& profile,
                           const Heterogeneity& het) {
    double beta = het.beta();
    double ceiling = std::max(profile.U0 / (1.0 - profile.alpha), profile.U0);
    if (beta > 1.0)
        ceiling = std::max(ceiling, beta * profile.K / (beta - 1.0));
    return ceiling;
}

} // namespace relaxbench
