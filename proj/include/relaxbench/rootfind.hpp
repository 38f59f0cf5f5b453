#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace relaxbench {

// Solves f(x) = target for a strictly increasing f.
//
// Safeguarded Newton with a bisection fallback, run until the bracket
// collapses to adjacent doubles, then a small ulp walk picks the candidate
// with the least |f(x) - target|.  The extra polish matters for the
// well-balanced steady-state checks, which need flux evaluations on steady
// data to reproduce the target level at round-off accuracy.
//
// The initial bracket [lo, hi] is expanded geometrically in either
// direction if it does not straddle the target.
template <class F, class DF>
double monotone_root(F&& f, DF&& df, double target, double lo, double hi) {
    if (!(lo <= hi))
        throw std::invalid_argument("monotone_root: bad initial bracket");

    double flo = f(lo);
    double fhi = f(hi);

    for (int guard = 0; flo > target; ++guard) {
        if (guard > 200)
            throw std::runtime_error("monotone_root: bracket expansion failed (down)");
        hi = lo;
        fhi = flo;
        lo -= std::max(1.0, std::fabs(lo)) * (1 << std::min(guard, 20));
        flo = f(lo);
    }
    for (int guard = 0; fhi < target; ++guard) {
        if (guard > 200)
            throw std::runtime_error("monotone_root: bracket expansion failed (up)");
        lo = hi;
        flo = fhi;
        hi += std::max(1.0, std::fabs(hi)) * (1 << std::min(guard, 20));
        fhi = f(hi);
    }

    if (flo == target) hi = lo;
    if (fhi == target) lo = hi;

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 300 && lo < hi; ++it) {
        if (std::nextafter(lo, hi) >= hi) break; // adjacent doubles
        double fx = f(x);
        if (fx == target) { lo = hi = x; break; }
        if (fx > target) hi = x; else lo = x;

        double d = df(x);
        double xn = d > 0.0 ? x - (fx - target) / d
                            : std::numeric_limits<double>::quiet_NaN();
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (xn == x) xn = 0.5 * (lo + hi);
        if (xn == x) break;
        x = xn;
    }

    // ulp walk: pick the best of the collapsed bracket's neighbourhood
    double best = x;
    double best_err = std::fabs(f(x) - target);
    auto consider = [&](double c) {
        double e = std::fabs(f(c) - target);
        if (e < best_err) { best_err = e; best = c; }
    };
    consider(lo);
    consider(hi);
    double down = best, up = best;
    for (int k = 0; k < 3; ++k) {
        down = std::nextafter(down, -std::numeric_limits<double>::infinity());
        up = std::nextafter(up, std::numeric_limits<double>::infinity());
        consider(down);
        consider(up);
    }
    return best;
}

} // namespace relaxbench
