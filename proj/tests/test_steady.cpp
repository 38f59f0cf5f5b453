#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "relaxbench/grid.hpp"
#include "relaxbench/heterogeneity.hpp"
#include "relaxbench/steady.hpp"

using namespace relaxbench;

namespace {
const double kPi = 3.14159265358979323846;

Heterogeneity ref_het() {
    return Heterogeneity::smooth_nonlinear(2.0, 0.15, 2.0 * kPi, 0.5, 1.0);
}
} // namespace

TEST_CASE("kp: closed forms for the affine family") {
    auto aff = Heterogeneity::affine(2.0, 0.0, 0.0, 1.0);
    // 2x2: (a-1) k = p; 3x3: (2a-1) k = p
    CHECK(kp_at(aff, 0.5, 0.3, SystemKind::TwoByTwo) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(kp_at(aff, 3.0, 0.3, SystemKind::ThreeByThree) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(kp_at(aff, 0.0, 0.9, SystemKind::TwoByTwo) == 0.0);
}

TEST_CASE("kp: residual below 1e-10 across the grid") {
    auto het = ref_het();
    Grid grid(1.0, 257);
    for (double p : {0.05, 0.4, 1.0}) {
        for (SystemKind system :
             {SystemKind::TwoByTwo, SystemKind::ThreeByThree}) {
            KpProfile kp = solve_kp(het, grid, p, system);
            for (int j = 0; j < grid.n_cells; ++j) {
                double res =
                    std::fabs(steady_flux(het, kp.k[j], grid.x(j), system) - p);
                CHECK(res <= 1e-10 * std::max(1.0, p));
            }
        }
    }
}

TEST_CASE("kp: rejects negative levels and flat 2x2 equilibria") {
    auto het = ref_het();
    CHECK_THROWS_AS(kp_at(het, -0.5, 0.3, SystemKind::TwoByTwo),
                    std::range_error);
    auto flat = Heterogeneity::affine(1.0, 0.0, 0.0, 1.0); // beta = 1
    CHECK_THROWS_AS(kp_at(flat, 0.5, 0.3, SystemKind::TwoByTwo),
                    std::invalid_argument);
    // the 3x3 family only needs 2 beta > 1
    CHECK(kp_at(flat, 0.5, 0.3, SystemKind::ThreeByThree) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("stationary 2x2: affine closed form K = 0.5, U = 1, V = 0.5") {
    auto aff = Heterogeneity::affine(2.0, 0.0, 0.0, 1.0);
    Grid grid(1.0, 100);
    SteadyProfile prof = solve_stationary_2x2(aff, grid, 0.1, 1.0, 0.5);
    CHECK_FALSE(prof.reduced_mode);
    CHECK_FALSE(prof.multiple_roots);
    CHECK(std::fabs(prof.K - 0.5) <= 1e-8);
    for (int j = 0; j < grid.n_cells; ++j) {
        CHECK(std::fabs(prof.U[j] - 1.0) <= 1e-8);
        CHECK(std::fabs(prof.V[j] - 0.5) <= 1e-8);
    }
    CHECK(std::fabs(prof.u_at_L - 1.0) <= 1e-8);
}

TEST_CASE("stationary 2x2: consistency U - V = K, K within [0, U0]") {
    auto het = ref_het();
    Grid grid(1.0, 128);
    for (double eps : {0.5, 0.05}) {
        SteadyProfile prof = solve_stationary_2x2(het, grid, eps, 1.8, 0.5);
        CHECK(prof.K >= 0.0);
        CHECK(prof.K <= 1.8);
        CHECK(prof.shoot_residual <= 1e-10 * 1.8);
        for (int j = 0; j < grid.n_cells; ++j)
            CHECK(std::fabs(prof.U[j] - prof.V[j] - prof.K) <= 1e-9);
    }
}

TEST_CASE("stationary 2x2: shooting residual is increasing in K") {
    auto het = ref_het();
    Grid grid(1.0, 64);
    double prev = stationary_residual(het, grid, 0.2, 1.5, 0.5, 0.0);
    for (int i = 1; i <= 10; ++i) {
        double K = 1.5 * i / 10.0;
        double r = stationary_residual(het, grid, 0.2, 1.5, 0.5, K);
        CHECK(r > prev - 1e-12);
        prev = r;
    }
}

TEST_CASE("stationary 2x2: stiff runs switch to the equilibrium branch") {
    auto aff = Heterogeneity::affine(2.0, 0.0, 0.0, 1.0);
    Grid grid(1.0, 100);
    SteadyProfile stiff = solve_stationary_2x2(aff, grid, 1e-8, 1.0, 0.5);
    CHECK(stiff.reduced_mode);
    // same closed form as the resolved branch: h(U0 - K, 0) = U0 gives K = 0.5
    CHECK(std::fabs(stiff.K - 0.5) <= 1e-10);
    for (int j = 0; j < grid.n_cells; ++j) {
        CHECK(std::fabs(stiff.U[j] - 1.0) <= 1e-10);
        CHECK(std::fabs(stiff.V[j] - 0.5) <= 1e-10);
    }
    CHECK(std::fabs(stiff.u_at_L - 1.0) <= 1e-10);
}

TEST_CASE("stationary 2x2: zero inflow gives the zero profile") {
    auto het = ref_het();
    Grid grid(1.0, 32);
    SteadyProfile prof = solve_stationary_2x2(het, grid, 0.1, 0.0, 0.5);
    CHECK(prof.K == 0.0);
    for (double u : prof.U) CHECK(u == 0.0);
}

TEST_CASE("stationary 2x2: argument validation") {
    auto het = ref_het();
    Grid grid(1.0, 32);
    CHECK_THROWS_AS(solve_stationary_2x2(het, grid, -0.1, 1.0, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_stationary_2x2(het, grid, 0.1, 1.0, 1.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_stationary_2x2(het, grid, 0.1, -1.0, 0.5),
                    std::invalid_argument);
    auto flat = Heterogeneity::affine(1.0, 0.0, 0.0, 1.0);
    CHECK_THROWS_AS(solve_stationary_2x2(flat, grid, 0.1, 1.0, 0.5),
                    std::invalid_argument);
}

TEST_CASE("supersolution bound dominates the profile") {
    auto aff = Heterogeneity::affine(2.0, 0.0, 0.0, 1.0);
    Grid grid(1.0, 100);
    SteadyProfile prof = solve_stationary_2x2(aff, grid, 0.1, 1.0, 0.5);
    // max(U0/(1-alpha), beta K/(beta-1), U0) = max(2, 1, 1)
    CHECK(supersolution_bound(prof, aff) == doctest::Approx(2.0).epsilon(1e-9));

    auto het = ref_het();
    SteadyProfile prof2 = solve_stationary_2x2(het, grid, 0.05, 1.8, 0.5);
    double bound = supersolution_bound(prof2, het);
    for (int j = 0; j < grid.n_cells; ++j) {
        CHECK(prof2.U[j] <= bound + 1e-8);
        CHECK(prof2.V[j] <= bound + 1e-8);
    }
    CHECK(prof2.u_at_L <= bound + 1e-8);
}
