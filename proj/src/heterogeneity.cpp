#include "relaxbench/heterogeneity.hpp"

#include <algorithm>
#include <cmath>

#include "relaxbench/rootfind.hpp"

namespace relaxbench {

Heterogeneity Heterogeneity::affine(double a0, double a1, double omega,
                                    double domain_length) {
    Heterogeneity h;
    h.family_ = Family::Affine;
    h.a0_ = a0;
    h.a1_ = a1;
    h.omega_ = omega;
    h.c_ = 0.0;
    h.domain_length_ = domain_length;
    h.beta_ = a0 - std::fabs(a1);
    h.mu_ = a0 + std::fabs(a1);
    if (!(domain_length > 0.0))
        throw std::invalid_argument("Heterogeneity: domain length must be positive");
    if (!(h.beta_ > 0.0))
        throw std::invalid_argument("Heterogeneity: a0 - |a1| must be positive");
    return h;
}

Heterogeneity Heterogeneity::smooth_nonlinear(double a0, double a1,
                                              double omega, double c,
                                              double domain_length) {
    Heterogeneity h = affine(a0, a1, omega, domain_length);
    h.family_ = Family::SmoothNonlinear;
    if (c < 0.0)
        throw std::invalid_argument("Heterogeneity: curvature c must be >= 0");
    h.c_ = c;
    h.mu_ += c;
    return h;
}

Heterogeneity Heterogeneity::piecewise_bv(double a0, double c,
                                          std::vector<PiecewiseJump> jumps,
                                          double domain_length) {
    Heterogeneity h;
    h.family_ = Family::PiecewiseBV;
    h.a0_ = a0;
    h.c_ = c;
    h.domain_length_ = domain_length;
    if (!(domain_length > 0.0))
        throw std::invalid_argument("Heterogeneity: domain length must be positive");
    if (c < 0.0)
        throw std::invalid_argument("Heterogeneity: curvature c must be >= 0");
    std::sort(jumps.begin(), jumps.end(),
              [](const PiecewiseJump& a, const PiecewiseJump& b) {
                  return a.position < b.position;
              });
    double level = a0, lo = a0, hi = a0;
    for (const auto& j : jumps) {
        if (!(j.position > 0.0 && j.position < domain_length))
            throw std::invalid_argument(
                "Heterogeneity: jump positions must lie inside (0, L)");
        level += j.delta;
        lo = std::min(lo, level);
        hi = std::max(hi, level);
    }
    h.jumps_ = std::move(jumps);
    h.beta_ = lo;
    h.mu_ = hi + c;
    if (!(h.beta_ > 0.0))
        throw std::invalid_argument("Heterogeneity: a(x) must stay positive");
    return h;
}

double Heterogeneity::coeff(double x) const {
    if (family_ == Family::PiecewiseBV) {
        double a = a0_;
        for (const auto& j : jumps_)
            if (x > j.position) a += j.delta;
        return a;
    }
    return a1_ == 0.0 ? a0_ : a0_ + a1_ * std::sin(omega_ * x);
}

void Heterogeneity::check_point(double v, double x) const {
    if (!(v >= 0.0))
        throw std::domain_error("Heterogeneity: v must be >= 0");
    if (!(x >= 0.0 && x <= domain_length_))
        throw std::domain_error("Heterogeneity: x outside [0, L]");
}

double Heterogeneity::value(double v, double x) const {
    check_point(v, x);
    double hv = coeff(x) * v;
    if (c_ != 0.0) hv += c_ * v * v / (1.0 + v);
    return hv;
}

double Heterogeneity::slope(double v, double x) const {
    check_point(v, x);
    double s = coeff(x);
    if (c_ != 0.0) {
        double w = 1.0 + v;
        s += c_ * (v * v + 2.0 * v) / (w * w);
    }
    return s;
}

double Heterogeneity::x_deriv(double v, double x) const {
    check_point(v, x);
    if (family_ == Family::PiecewiseBV) return 0.0;
    return a1_ * omega_ * std::cos(omega_ * x) * v;
}

double Heterogeneity::value_extended(double v, double x) const {
    if (v >= 0.0) return value(v, x);
    if (!(x >= 0.0 && x <= domain_length_))
        throw std::domain_error("Heterogeneity: x outside [0, L]");
    return coeff(x) * v;
}

double Heterogeneity::slope_extended(double v, double x) const {
    if (v >= 0.0) return slope(v, x);
    if (!(x >= 0.0 && x <= domain_length_))
        throw std::domain_error("Heterogeneity: x outside [0, L]");
    return coeff(x);
}

double Heterogeneity::invert(double u, double x) const {
    if (!(u >= 0.0))
        throw std::domain_error("Heterogeneity: invert requires u >= 0");
    if (u == 0.0) return 0.0;
    auto f = [&](double v) { return value_extended(v, x); };
    auto df = [&](double v) { return slope_extended(v, x); };
    return monotone_root(f, df, u, 0.0, u / beta_ + 1.0);
}

double Heterogeneity::invert_rho2(double rho, double x) const {
    if (!(rho >= 0.0))
        throw std::domain_error("Heterogeneity: invert_rho2 requires rho >= 0");
    if (rho == 0.0) return 0.0;
    auto f = [&](double v) { return value_extended(v, x) + v; };
    auto df = [&](double v) { return slope_extended(v, x) + 1.0; };
    return monotone_root(f, df, rho, 0.0, rho / (beta_ + 1.0) + 1.0);
}

double Heterogeneity::invert_rho3(double rho, double x) const {
    if (!(rho >= 0.0))
        throw std::domain_error("Heterogeneity: invert_rho3 requires rho >= 0");
    if (rho == 0.0) return 0.0;
    auto f = [&](double v) { return 2.0 * value_extended(v, x) + v; };
    auto df = [&](double v) { return 2.0 * slope_extended(v, x) + 1.0; };
    return monotone_root(f, df, rho, 0.0, rho / (2.0 * beta_ + 1.0) + 1.0);
}

ModelValidationReport validate_assumptions(const Heterogeneity& het,
                                           const Grid& grid, double v_max,
                                           int n_v_samples) {
    if (!(v_max > 0.0) || n_v_samples < 3)
        throw std::invalid_argument(
            "validate_assumptions: need v_max > 0 and n_v_samples >= 3");

    ModelValidationReport rep;
    rep.beta_declared = het.beta();
    rep.mu_declared = het.mu();

    std::vector<double> vs(n_v_samples);
    for (int i = 0; i < n_v_samples; ++i)
        vs[i] = v_max * i / (n_v_samples - 1);

    double slope_min = std::numeric_limits<double>::infinity();
    double slope_max = -slope_min;
    double origin_max = 0.0;
    double hx_l1 = 0.0;
    double dd_max = 0.0;

    for (int j = 0; j < grid.n_cells; ++j)
        origin_max = std::max(origin_max, std::fabs(het.value(0.0, grid.x(j))));

    for (double v : vs) {
        double tv = 0.0;
        for (int j = 0; j < grid.n_cells; ++j) {
            double x = grid.x(j);
            double s = het.slope(v, x);
            slope_min = std::min(slope_min, s);
            slope_max = std::max(slope_max, s);
            if (j > 0)
                tv += std::fabs(het.value(v, x) - het.value(v, grid.x(j - 1)));
        }
        hx_l1 = std::max(hx_l1, tv);
    }

    // second differences in v expose affine-in-v behaviour
    for (int i = 1; i + 1 < n_v_samples; ++i) {
        for (int j = 0; j < grid.n_cells; ++j) {
            double x = grid.x(j);
            double dd = het.value(vs[i + 1], x) - 2.0 * het.value(vs[i], x) +
                        het.value(vs[i - 1], x);
            dd_max = std::max(dd_max, std::fabs(dd));
        }
    }

    rep.beta_observed = slope_min;
    rep.mu_observed = slope_max;
    rep.hx_l1 = hx_l1;
    rep.second_difference_max = dd_max;
    rep.zero_at_origin_ok = origin_max <= 1e-15;
    rep.slope_bounds_ok = slope_min >= het.beta() - 1e-9 &&
                          slope_max <= het.mu() + 1e-9;
    rep.nonaffine_ok = dd_max > 1e-10;
    return rep;
}

} // namespace relaxbench
