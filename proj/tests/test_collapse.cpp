#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "snbohm/collapse.hpp"
#include "snbohm/criticality.hpp"
#include "snbohm/quantum.hpp"

using namespace snbohm;
using collapse::CollapseParams;
using collapse::PoissonConvention;

namespace {

RealField radial_gaussian_rho(const Grid& g, double sigma) {
    return quantum::gaussian_amplitude(quantum::GaussianPacketSpec(sigma, 1.0), g).pf.rho;
}

}  // namespace

TEST_CASE("a generic Gaussian does not satisfy the Poisson-like relation") {
    const Grid g = make_grid(Geometry::radial3d, 0.0, 14.0, 1401);
    const RealField rho = radial_gaussian_rho(g, 1.0);
    const RealField res = poisson_q_residual(rho, Particle(1.0), 1.0,
                                             PoissonConvention::mass_consistent);
    double max_res = 0.0, max_src = 0.0;
    for (std::size_t i = 0; i < g.n(); ++i) {
        max_res = std::max(max_res, std::abs(res[i]));
        max_src = std::max(max_src, 4.0 * std::numbers::pi * rho[i]);
    }
    CHECK(max_res > 0.1 * max_src);
}

TEST_CASE("residual is linear in G at fixed rho") {
    const Grid g = make_grid(Geometry::radial3d, 0.0, 12.0, 801);
    const RealField rho = radial_gaussian_rho(g, 1.0);
    const Particle p(1.5);
    for (const auto conv : {PoissonConvention::paper_literal, PoissonConvention::mass_consistent}) {
        const int k = collapse::mass_power(conv);
        const RealField r1 = poisson_q_residual(rho, p, 1.0, conv);
        const RealField r2 = poisson_q_residual(rho, p, 2.5, conv);
        const double mk = std::pow(p.mass, k);
        for (std::size_t i = 0; i < g.n(); ++i) {
            const double expected = -4.0 * std::numbers::pi * 1.5 * mk * rho[i];
            const double scale = std::max(1.0, std::abs(expected));
            CHECK(std::abs((r2[i] - r1[i]) - expected) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("lap(Q) of the Gaussian matches the analytic value at second order") {
    auto err_at = [](std::size_t n) {
        const Grid g = make_grid(Geometry::radial3d, 0.0, 12.0, n);
        const RealField rho = radial_gaussian_rho(g, 1.0);
        // lap Q for the 3D Gaussian is the constant -3 hbar^2 / (4 m sigma^4)
        const RealField res =
            poisson_q_residual(rho, Particle(1.0), 0.0, PoissonConvention::mass_consistent);
        double err = 0.0;
        // skip the origin row: re-applying the laplacian there differences the
        // kink between the origin-stencil and interior-stencil truncation
        // terms of Q, which does not vanish with h.  (The solver's converged
        // profiles satisfy the discrete identity exactly, origin included.)
        for (std::size_t i = 1; i < g.n(); ++i) {
            if (g.x(i) > 3.0) continue;  // amplitude floor region has carried values
            err = std::max(err, std::abs(res[i] + 0.75));
        }
        return err;
    };
    // coarse pair: the doubly composed stencil has an eps/h^4 rounding floor
    const double e1 = err_at(301), e2 = err_at(601);
    CHECK(e1 / e2 > 2.5);
    CHECK(e1 / e2 < 6.0);
}

TEST_CASE("relaxation converges to a localized profile near the Diosi width") {
    CollapseParams params;
    params.grid_n = 1201;
    const Particle p(1.0);
    const auto prof =
        collapse::solve_collapse_profile(p, PoissonConvention::mass_consistent, 0.0, params);

    CHECK(prof.residual_norm < prof.residual_tol);
    CHECK(prof.energy < 0.0);
    CHECK(std::abs(integrate(prof.rho) - 1.0) <= 1e-8);
    for (std::size_t i = 0; i < prof.rho.size(); ++i) CHECK(prof.rho[i] >= 0.0);

    const double diosi = crit::diosi_width(p.mass);
    CHECK(prof.width < 3.0 * diosi);
    CHECK(prof.width > diosi / 3.0);
}

TEST_CASE("G -> 0 reports no localized solution") {
    CollapseParams params;
    params.grid_n = 301;
    params.G = 0.0;
    CHECK_THROWS_AS(
        collapse::solve_collapse_profile(Particle(1.0), PoissonConvention::mass_consistent,
                                         0.0, params),
        NumericalError);

    // a box far smaller than the soliton cannot hold a bound state either
    CollapseParams tiny;
    tiny.grid_n = 301;
    tiny.r_max_factor = 1.5;
    CHECK_THROWS_AS(
        collapse::solve_collapse_profile(Particle(1.0), PoissonConvention::mass_consistent,
                                         0.0, tiny),
        NumericalError);
}

TEST_CASE("mass rescaling maps solutions to solutions (mass_consistent)") {
    CollapseParams p1;
    p1.grid_n = 1201;
    const auto prof1 =
        collapse::solve_collapse_profile(Particle(1.0), PoissonConvention::mass_consistent,
                                         0.0, p1);
    const double m2 = std::cbrt(2.0);  // lambda = m^3 = 2
    CollapseParams p2;
    p2.grid_n = 1301;  // different resolution so the match is not by construction
    const auto prof2 =
        collapse::solve_collapse_profile(Particle(m2), PoissonConvention::mass_consistent,
                                         0.0, p2);
    CHECK(prof2.width * 2.0 == doctest::Approx(prof1.width).epsilon(1e-3));
}

TEST_CASE("width scaling exponents expose the two conventions") {
    auto slope_for = [](PoissonConvention conv) {
        std::vector<double> masses, widths;
        for (int i = 0; i <= 4; ++i) {
            const double m = std::pow(10.0, 0.125 * static_cast<double>(i));  // half decade
            CollapseParams params;
            params.grid_n = 901 + 60 * static_cast<std::size_t>(i);
            const auto prof =
                collapse::solve_collapse_profile(Particle(m), conv, 0.0, params);
            masses.push_back(m);
            widths.push_back(prof.width);
        }
        return oracles::loglog_slope(masses, widths);
    };
    CHECK(slope_for(PoissonConvention::mass_consistent) ==
          doctest::Approx(-3.0).epsilon(0.05 / 3.0));
    CHECK(slope_for(PoissonConvention::paper_literal) ==
          doctest::Approx(-2.0).epsilon(0.05 / 2.0));
}

TEST_CASE("second-order consistency of the converged width under grid refinement") {
    auto width_at = [](std::size_t n) {
        CollapseParams params;
        params.grid_n = n;
        return collapse::solve_collapse_profile(Particle(1.0),
                                                PoissonConvention::mass_consistent, 0.0,
                                                params)
            .width;
    };
    const double w1 = width_at(401), w2 = width_at(801), w3 = width_at(1601);
    const double ratio = std::abs(w1 - w2) / std::abs(w2 - w3);
    CHECK(ratio > 2.5);
    CHECK(ratio < 6.0);
}

TEST_CASE("negative density is rejected") {
    const Grid g = make_grid(Geometry::radial3d, 0.0, 10.0, 301);
    RealField rho(g, 1e-3);
    rho[10] = -1.0;
    CHECK_THROWS_AS(
        poisson_q_residual(rho, Particle(1.0), 1.0, PoissonConvention::mass_consistent),
        ContractError);
}
