#include "doctest.h"

#include <cmath>

#include "bsrlab/errors.hpp"
#include "bsrlab/numeric.hpp"
#include "bsrlab/radial.hpp"
#include "support/oracles.hpp"

using namespace bsrlab;
using doctest::Approx;

TEST_CASE("potential class checks its norm budget and grid") {
    CHECK_NOTHROW(RadialPotential::constant(1.0, 10.0));
    // ||q||_{L^2(ball)} = |c| sqrt(4 pi / 3) ~ 2.05 |c|
    CHECK_THROWS_AS(RadialPotential::constant(3.0, 1.0), ConfigError);
    CHECK_THROWS_AS(RadialPotential::from_samples({0.0, 0.5}, {0.0, 1.0 / 0.0}, 1.0), ConfigError);
    CHECK_THROWS_AS(RadialPotential::from_samples({0.1, 1.0}, {0.0, 0.0}, 1.0), ConfigError);

    auto g = RadialPotential::gaussian_bump(0.5, 0.35, 2.0);
    CHECK(g.value_at(0.0) == Approx(0.5).epsilon(1e-12));
    CHECK(g.value_at(0.35) == Approx(0.5 * std::exp(-1.0)).epsilon(1e-8));
    CHECK(g.min_value() >= 0.0);

    CHECK_THROWS_AS(RobinCoefficient(-0.5), ConfigError);
}

TEST_CASE("free ball, alpha = 1, l = 0: cos(sqrt(lambda)) = 0") {
    auto q = RadialPotential::zero(1.0);
    RobinCoefficient alpha(1.0);
    auto modes = solve_radial_modes(q, alpha, 0, 2);
    REQUIRE(modes.size() == 2);
    CHECK(modes[0].lambda == Approx(M_PI * M_PI / 4.0).epsilon(1e-10));
    CHECK(modes[1].lambda == Approx(9.0 * M_PI * M_PI / 4.0).epsilon(1e-10));
    CHECK(modes[0].interior_zeros == 0);
    CHECK(modes[1].interior_zeros == 1);
}

TEST_CASE("constant shift exactness") {
    RobinCoefficient alpha(1.0);
    auto base = solve_radial_modes(RadialPotential::zero(10.0), alpha, 0, 3);
    for (double c : {0.5, 1.0, 2.0}) {
        auto shifted = solve_radial_modes(RadialPotential::constant(c, 10.0), alpha, 0, 3);
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(shifted[k].lambda - base[k].lambda - c) < 1e-10);
    }
}

TEST_CASE("q = 1, alpha = 0: constant eigenfunction then tan k = k") {
    auto q = RadialPotential::constant(1.0, 10.0);
    RobinCoefficient alpha(0.0);
    auto modes = solve_radial_modes(q, alpha, 0, 2);
    REQUIRE(modes.size() == 2);
    CHECK(modes[0].lambda == Approx(1.0).epsilon(1e-10));
    // constant-in-r eigenfunction
    double spread = 0.0;
    for (double v : modes[0].radial_values)
        spread = std::max(spread, std::abs(v - modes[0].radial_values.front()));
    CHECK(spread < 1e-7);
    const double k = 4.493409457909064; // root of tan k = k
    CHECK(modes[1].lambda == Approx(1.0 + k * k).epsilon(1e-9));
}

TEST_CASE("oracle equivalence across degrees and Robin constants") {
    auto q = RadialPotential::zero(1.0);
    for (double a : {0.0, 1.0, 2.5}) {
        RobinCoefficient alpha(a);
        for (int l : {0, 1, 3, 6}) {
            auto modes = solve_radial_modes_below(q, alpha, l, 120.0);
            auto roots = oracles::robin_eigenvalues_free(l, a, 120.0);
            REQUIRE(modes.size() == roots.size());
            for (std::size_t i = 0; i < modes.size(); ++i)
                CHECK(std::abs(modes[i].lambda - roots[i]) <=
                      1e-8 * std::max(1.0, std::abs(roots[i])));
        }
    }
}

TEST_CASE("mode invariants: normalization, Robin residual, orthogonality, ordering") {
    auto q = RadialPotential::gaussian_bump(0.8, 0.4, 5.0);
    RobinCoefficient alpha(1.5);
    auto modes = solve_radial_modes(q, alpha, 2, 4);
    REQUIRE(modes.size() == 4);

    const auto& r = modes[0].radial_r;
    const double h = r[1] - r[0];
    for (const auto& mode : modes) {
        // L^2(ball radial measure) normalization, recomputed from the samples
        std::vector<double> integ(mode.radial_values.size());
        for (std::size_t i = 0; i < integ.size(); ++i)
            integ[i] = mode.radial_values[i] * mode.radial_values[i] * r[i] * r[i];
        CHECK(composite_simpson(integ, h) == Approx(1.0).epsilon(1e-10));
        // discrete Robin residual
        CHECK(std::abs(mode.boundary_derivative + alpha.value * mode.boundary_value) < 1e-8);
    }
    for (std::size_t a = 0; a < modes.size(); ++a) {
        for (std::size_t b = a + 1; b < modes.size(); ++b) {
            CHECK(modes[a].lambda < modes[b].lambda);
            std::vector<double> integ(modes[a].radial_values.size());
            for (std::size_t i = 0; i < integ.size(); ++i)
                integ[i] = modes[a].radial_values[i] * modes[b].radial_values[i] * r[i] * r[i];
            CHECK(std::abs(composite_simpson(integ, h)) < 1e-8);
        }
        CHECK(modes[a].interior_zeros == static_cast<int>(a));
    }
}

TEST_CASE("eigenvalue monotonicity in the potential") {
    RobinCoefficient alpha(1.0);
    auto q1 = RadialPotential::gaussian_bump(0.3, 0.5, 5.0);
    auto q2 = RadialPotential::gaussian_bump(0.9, 0.5, 5.0); // pointwise >= q1
    for (int l : {0, 2}) {
        auto m1 = solve_radial_modes(q1, alpha, l, 3);
        auto m2 = solve_radial_modes(q2, alpha, l, 3);
        for (int k = 0; k < 3; ++k) CHECK(m1[k].lambda <= m2[k].lambda + 1e-12);
    }
}

TEST_CASE("finite-difference estimates converge at second order") {
    auto q = RadialPotential::zero(1.0);
    RobinCoefficient alpha(1.0);
    RadialSolveOptions coarse;
    coarse.refine = false;
    coarse.mesh = 200;
    RadialSolveOptions fine = coarse;
    fine.mesh = 400;
    const double exact = M_PI * M_PI / 4.0;
    const double e1 = std::abs(solve_radial_modes(q, alpha, 0, 1, coarse)[0].lambda - exact);
    const double e2 = std::abs(solve_radial_modes(q, alpha, 0, 1, fine)[0].lambda - exact);
    CHECK(e1 / e2 == Approx(4.0).epsilon(0.35));
}

TEST_CASE("assemble_bsd merges degrees with multiplicities") {
    auto q = RadialPotential::zero(1.0);
    RobinCoefficient alpha(1.0);
    auto bsd = assemble_bsd(q, alpha, 8, 30.0);
    bsd.validate();

    // non-decreasing, first eigenvalue at pi^2/4 with multiplicity 1 (l = 0)
    CHECK(bsd.entries.front().lambda == Approx(M_PI * M_PI / 4.0).epsilon(1e-9));
    CHECK(bsd.entries.front().l == 0);
    for (std::size_t i = 1; i < bsd.size(); ++i)
        CHECK(bsd.entries[i - 1].lambda <= bsd.entries[i].lambda);

    // multiplicity bookkeeping: entries = sum over retained (l,k) of (2l+1)
    std::size_t expect = 0;
    for (int l = 0; l <= 8; ++l)
        expect += (2 * l + 1) * solve_radial_modes_below(q, alpha, l, 30.0).size();
    CHECK(bsd.size() == expect);

    // oracle merge comparison
    std::vector<double> merged;
    for (int l = 0; l <= 8; ++l)
        for (double lam : oracles::robin_eigenvalues_free(l, 1.0, 30.0))
            for (int m = -l; m <= l; ++m) merged.push_back(lam);
    std::sort(merged.begin(), merged.end());
    REQUIRE(bsd.size() == merged.size());
    for (std::size_t i = 0; i < merged.size(); ++i)
        CHECK(bsd.entries[i].lambda == Approx(merged[i]).epsilon(1e-8));
}

TEST_CASE("assemble_bsd raises a cap error naming the offending degree") {
    auto q = RadialPotential::zero(1.0);
    RobinCoefficient alpha(1.0);
    try {
        assemble_bsd(q, alpha, 2, 100.0);
        FAIL("expected CapError");
    } catch (const CapError& e) {
        CHECK(e.degree == 2);
    }
    CHECK_THROWS_AS(assemble_bsd(q, alpha, 8, 1.0), ConfigError); // below first eigenvalue
}

TEST_CASE("eigenvalue count follows Weyl growth") {
    auto q = RadialPotential::zero(1.0);
    RobinCoefficient alpha(1.0);
    auto bsd = assemble_bsd(q, alpha, 26, 520.0, {{600, true, 129}, 2});
    std::vector<double> logl, logn;
    for (double cap : {130.0, 260.0, 390.0, 520.0}) {
        std::size_t n = 0;
        while (n < bsd.size() && bsd.entries[n].lambda <= cap) ++n;
        logl.push_back(std::log(cap));
        logn.push_back(std::log(static_cast<double>(n)));
    }
    const double slope = fit_line(logl, logn).slope;
    CHECK(slope == Approx(1.5).epsilon(0.1)); // within +-0.15 absolute
}
