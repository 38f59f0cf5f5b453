#pragma once

#include <vector>

#include "relaxbench/grid.hpp"

namespace relaxbench {

struct PiecewiseJump {
    double position; // jump location in (0, domain_length)
    double delta;    // increment added to a(x) for x > position
};

// Equilibrium nonlinearity h(v, x) with h(0, x) = 0 and
// beta <= dh/dv <= mu on v >= 0.  Three built-in families:
//
//   Affine          h = a(x) v,                 a(x) = a0 + a1 sin(omega x)
//   SmoothNonlinear h = a(x) v + c v^2/(1+v)    (dh/dv in [a(x), a(x)+c))
//   PiecewiseBV     h = a(x) v + c v^2/(1+v),   a(x) = a0 + sum of jumps
//
// The x-dependence is smooth for the first two families and of bounded
// variation (finitely many jumps) for the third.  Instances are immutable;
// all operations are pure.
class Heterogeneity {
  public:
    enum class Family { Affine, SmoothNonlinear, PiecewiseBV };

    static Heterogeneity affine(double a0, double a1, double omega,
                                double domain_length);
    static Heterogeneity smooth_nonlinear(double a0, double a1, double omega,
                                          double c, double domain_length);
    static Heterogeneity piecewise_bv(double a0, double c,
                                      std::vector<PiecewiseJump> jumps,
                                      double domain_length);

    Family family() const { return family_; }
    double beta() const { return beta_; }   // lower bound on dh/dv
    double mu() const { return mu_; }       // upper bound on dh/dv
    double curvature() const { return c_; } // coefficient of v^2/(1+v)
    double domain_length() const { return domain_length_; }
    const std::vector<PiecewiseJump>& jumps() const { return jumps_; }

    // a(x), the affine-in-v coefficient
    double coeff(double x) const;

    // h(v, x); domain error for v < 0 or x outside [0, L]
    double value(double v, double x) const;
    // dh/dv(v, x)
    double slope(double v, double x) const;
    // dh/dx(v, x); for PiecewiseBV this is the a.e. derivative (0 between jumps)
    double x_deriv(double v, double x) const;

    // Monotone linear continuation h(v, x) = a(x) v for v < 0.  Implicit
    // solvers may probe negative arguments transiently; the continuation
    // keeps their scalar equations strictly monotone.
    double value_extended(double v, double x) const;
    double slope_extended(double v, double x) const;

    // v >= 0 with h(v, x) = u (u >= 0); residual ~ round-off
    double invert(double u, double x) const;
    // v >= 0 with h(v, x) + v = rho (slope >= beta + 1)
    double invert_rho2(double rho, double x) const;
    // v >= 0 with 2 h(v, x) + v = rho (slope >= 2 beta + 1)
    double invert_rho3(double rho, double x) const;

  private:
    Heterogeneity() = default;
    void check_point(double v, double x) const;

    Family family_ = Family::Affine;
    double a0_ = 0, a1_ = 0, omega_ = 0, c_ = 0;
    std::vector<PiecewiseJump> jumps_;
    double domain_length_ = 1.0;
    double beta_ = 0, mu_ = 0;
};

// Sampled verification of the structural assumptions on h.
struct ModelValidationReport {
    double beta_declared = 0;
    double mu_declared = 0;
    double beta_observed = 0;  // min sampled dh/dv
    double mu_observed = 0;    // max sampled dh/dv
    double hx_l1 = 0;          // sup over sampled v of the x-variation of h(v, .)
    double second_difference_max = 0;
    bool zero_at_origin_ok = false;
    bool slope_bounds_ok = false;
    // true when some sampled second difference in v exceeds 1e-10, i.e. the
    // family is not affine in v on the sampled range (reported, not enforced)
    bool nonaffine_ok = false;
};

ModelValidationReport validate_assumptions(const Heterogeneity& het,
                                           const Grid& grid, double v_max,
                                           int n_v_samples);

} // namespace relaxbench
