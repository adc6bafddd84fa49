#include "doctest.h"

#include <cmath>
#include <random>

#include "bsrlab/errors.hpp"
#include "bsrlab/oscillatory.hpp"
#include "bsrlab/radial.hpp"

using namespace bsrlab;
using doctest::Approx;

namespace {

BoundaryFunction random_bandlimited(int degree, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<Complex> coeffs(harmonic_table_size(degree));
    for (int l = 0; l <= degree; ++l) {
        for (int m = 0; m <= l; ++m) {
            const Complex c(n(rng), m == 0 ? 0.0 : n(rng));
            coeffs[harmonic_flat_index(l, m)] = c;
            if (m > 0)
                coeffs[harmonic_flat_index(l, -m)] = std::pow(-1.0, m) * std::conj(c);
        }
    }
    return BoundaryFunction::from_coefficients(degree, std::move(coeffs));
}

Vec3 random_direction(std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 v(n(rng), n(rng), n(rng));
    return v.normalized();
}

const BoundarySpectralData& free_bsd40() {
    static BoundarySpectralData bsd =
        assemble_bsd(RadialPotential::zero(1.0), RobinCoefficient(1.0), 8, 40.0);
    return bsd;
}

} // namespace

TEST_CASE("closed form for the constant density") {
    auto one = BoundaryFunction::constant(1.0);
    const Vec3 theta(0, 0, 1);
    CHECK(std::abs(boundary_oscillatory_integral(one, theta, M_PI)) < 1e-8);
    CHECK(boundary_oscillatory_integral(one, theta, M_PI / 2.0).real() == Approx(8.0).epsilon(1e-9));

    std::mt19937 rng(5);
    for (double tau : {1.0, 7.0, 33.0, 64.0, 100.0}) {
        const double closed = 4.0 * M_PI * std::sin(tau) / tau;
        for (int trial = 0; trial < 3; ++trial) {
            const Complex v = boundary_oscillatory_integral(one, random_direction(rng), tau);
            CHECK(std::abs(v - closed) < 1e-6 * 4.0 * M_PI);
        }
    }

    auto zero = BoundaryFunction::constant(0.0);
    CHECK(std::abs(boundary_oscillatory_integral(zero, theta, 10.0)) == 0.0);
}

TEST_CASE("resolution cap raises a numeric error") {
    auto one = BoundaryFunction::constant(1.0);
    OscQuadOptions opts;
    opts.max_polar = 128;
    CHECK_THROWS_AS(boundary_oscillatory_integral(one, Vec3(0, 0, 1), 500.0, opts), NumericError);
}

TEST_CASE("constant density decays with exponent one and bounded tau |I|") {
    auto one = BoundaryFunction::constant(1.0);
    auto report = vdc_decay_report(one, Vec3(0, 0, 1), linspace(1.0, 100.0, 397), 2.0);
    CHECK(report.fitted_exponent == Approx(1.0).epsilon(0.1));
    // tau |I(tau)| = 4 pi |sin tau|: bounded by 4 pi, so C <= 4 pi/||1||_{H^s}
    CHECK(report.bound_constant <= 4.0 * M_PI / report.phi_hs_norm + 0.01);
    for (std::size_t i = 0; i < report.tau_values.size(); ++i) {
        const double expect = 4.0 * M_PI * std::abs(std::sin(report.tau_values[i]));
        CHECK(report.tau_values[i] * report.magnitudes[i] == Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("vdc inequality holds across a random band-limited family") {
    std::mt19937 rng(99);
    for (unsigned trial = 0; trial < 6; ++trial) {
        auto phi = random_bandlimited(8, 1000 + trial);
        const Vec3 theta = random_direction(rng);
        auto report = vdc_decay_report(phi, theta, linspace(1.0, 100.0, 397), 2.0);
        CHECK(report.bound_constant > 0.0);
        CHECK(report.bound_constant < 50.0); // finite, no runaway
        // no growth trend: envelope of tau |I| is flat
        std::vector<double> tau_i(report.tau_values.size());
        for (std::size_t i = 0; i < tau_i.size(); ++i)
            tau_i[i] = report.tau_values[i] * report.magnitudes[i];
        const double slope = envelope_loglog_slope(report.tau_values, tau_i);
        CHECK(slope >= -0.1);
        CHECK(slope <= 0.1);
    }
}

TEST_CASE("stationary-phase exponent for a generic smooth density") {
    // smooth, nonvanishing at the poles of theta
    auto phi = BoundaryFunction::from_coefficients(
        2, [] {
            std::vector<Complex> c(harmonic_table_size(2), Complex(0.0));
            c[harmonic_flat_index(0, 0)] = 2.0;
            c[harmonic_flat_index(1, 0)] = 0.4;
            c[harmonic_flat_index(2, 1)] = Complex(0.2, 0.1);
            c[harmonic_flat_index(2, -1)] = Complex(-0.2, 0.1);
            return c;
        }());
    auto report = vdc_decay_report(phi, Vec3(0, 0, 1), linspace(2.0, 120.0, 472), 2.0);
    CHECK(report.fitted_exponent >= 0.85);
    CHECK(report.fitted_exponent <= 1.15);
}

TEST_CASE("ladder validation") {
    auto one = BoundaryFunction::constant(1.0);
    CHECK_THROWS_AS(vdc_decay_report(one, Vec3(0, 0, 1), {0.5, 2.0}, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(vdc_decay_report(one, Vec3(0, 0, 1), {2.0, 1.5}, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(vdc_decay_report(one, Vec3(0, 0, 1), {1.0, 2.0}, 0.5), std::invalid_argument);
}

TEST_CASE("trace pairings stay bounded along the tau ladder") {
    const auto& bsd = free_bsd40();
    const auto taus = logspace(4.0, 64.0, 21);

    auto rep = pairing_uniform_bound(bsd.entries.front(), 1.0, Vec3(1, 0, 0), taus);
    CHECK(rep.max_abs > 0.0);
    CHECK(rep.fitted_slope <= 0.05);
    CHECK(rep.c_fit > 0.0);

    // alpha = 0 kills the Robin part identically
    auto rep0 = pairing_uniform_bound(bsd.entries.front(), 0.0, Vec3(1, 0, 0), taus);
    for (double v : rep0.robin_part) CHECK(v == 0.0);

    // doubling xi moves the constant but keeps uniformity
    auto rep2 = pairing_uniform_bound(bsd.entries.front(), 1.0, Vec3(2, 0, 0), taus);
    CHECK(rep2.fitted_slope <= 0.05);
}

TEST_CASE("finite head sums: exact zeros and decay") {
    const auto& bsd = free_bsd40();
    const auto taus = logspace(8.0, 64.0, 17);

    auto empty = finite_sum_decay(bsd, bsd, 1, Vec3(1, 0, 0), taus);
    CHECK(empty.exact_zero);
    for (double v : empty.magnitudes) CHECK(v == 0.0);

    auto same = finite_sum_decay(bsd, bsd, 5, Vec3(1, 0, 0), taus);
    CHECK(same.exact_zero);

    // scale the first four traces by 1.1
    auto scaled = bsd;
    for (int i = 0; i < 4; ++i) scaled.entries[i].boundary_value *= 1.1;
    auto decay = finite_sum_decay(bsd, scaled, 5, Vec3(1, 0, 0), taus);
    CHECK_FALSE(decay.exact_zero);
    CHECK(decay.fitted_slope <= -1.5);

    auto dropped = drop_traces(scaled, 3);
    CHECK_THROWS_AS(finite_sum_decay(bsd, dropped, 5, Vec3(1, 0, 0), taus), MissingTraceError);
    CHECK_THROWS_AS(finite_sum_decay(bsd, scaled, 9999, Vec3(1, 0, 0), taus), std::out_of_range);
}
