#include "doctest.h"

#include <cmath>
#include <memory>
#include <random>

#include "bsrlab/errors.hpp"
#include "bsrlab/probe.hpp"
#include "bsrlab/radial.hpp"
#include "support/oracles.hpp"

using namespace bsrlab;
using doctest::Approx;

namespace {

std::shared_ptr<const SphereQuadrature> probe_quad() {
    static auto q = std::make_shared<SphereQuadrature>(build_quadrature(64, 128));
    return q;
}

BoundarySpectralData free_bsd() {
    static BoundarySpectralData bsd =
        assemble_bsd(RadialPotential::zero(1.0), RobinCoefficient(1.0), 8, 40.0);
    return bsd;
}

} // namespace

TEST_CASE("probe construction reproduces the frequency algebra") {
    auto p = make_probe(Vec3(2, 0, 0), 10.0);
    CHECK(p.lambda.real() == Approx(99.0));
    CHECK(p.lambda.imag() == Approx(20.0));
    CHECK((p.omega - p.theta - Vec3(0.2, 0, 0)).norm() < 1e-14);
    CHECK(p.omega.norm() == Approx(1.0).epsilon(1e-14));
    CHECK(p.theta.norm() == Approx(1.0).epsilon(1e-14));
    CHECK(p.zeta.norm() <= 2.0 * std::sqrt(2.0) + 1e-12);
    // sqrt(lambda)(omega - theta) = (1 + i/tau) xi
    const Complex factor = p.sqrt_lambda / p.tau;
    CHECK(std::abs(factor - Complex(1.0, 0.1)) < 1e-14);
}

TEST_CASE("degenerate frequency probe") {
    auto p = make_probe(Vec3(0, 0, 0), 5.0);
    CHECK((p.omega - p.eta).norm() == 0.0);
    CHECK((p.theta - p.eta).norm() == 0.0);
    CHECK((p.eta - Vec3(1, 0, 0)).norm() == 0.0);
    CHECK(p.zeta.norm() == 0.0);
}

TEST_CASE("probe admissibility") {
    CHECK_THROWS_AS(make_probe(Vec3(4, 0, 0), 2.0), std::domain_error);
    CHECK_THROWS_AS(make_probe(Vec3(4, 0, 0), 1.0), std::domain_error);
    CHECK_NOTHROW(make_probe(Vec3(4, 0, 0), 2.0 + 1e-9));
}

TEST_CASE("probe invariants hold over the admissible region") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0), r(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const Vec3 xi = 8.0 * Vec3(u(rng), u(rng), u(rng));
        const double tau = 0.5 * xi.norm() + 1e-3 + 60.0 * r(rng);
        auto p = make_probe(xi, tau);
        CHECK(std::abs(p.eta.norm() - 1.0) < 1e-14);
        CHECK(std::abs(p.eta.dot(xi)) < 1e-14 * std::max(1.0, xi.norm()));
        CHECK(std::abs(p.omega.norm() - 1.0) < 1e-12);
        CHECK(std::abs(p.theta.norm() - 1.0) < 1e-12);
        CHECK(((p.omega - p.theta) - xi / tau).norm() < 1e-13 * std::max(1.0, xi.norm() / tau));
        CHECK(p.zeta.norm() <= std::sqrt(2.0) * xi.norm() * (1.0 + 1e-12) + 1e-15);
        CHECK(p.omega.norm() <= 1.0 + std::sqrt(2.0));
        CHECK((p.omega - (p.eta - p.zeta / (2.0 * tau))).norm() < 1e-13);
    }
}

TEST_CASE("go_trace values match the closed form") {
    auto p = make_probe(Vec3(1.0, -0.5, 0.25), 10.0);
    auto quad = probe_quad();
    auto g = go_trace(p, 1.0, quad, TraceKind::g);
    auto h = go_trace(p, 1.0, quad, TraceKind::h);

    const Complex z(10.0, 1.0);
    double worst_g = 0.0, worst_h = 0.0, amp_max = 0.0;
    for (std::size_t i = 0; i < quad->size(); ++i) {
        const Vec3& x = quad->nodes[i];
        const Complex eg = (Complex(0, 1) * z * p.omega.dot(x) + 1.0) *
                           std::exp(Complex(0, 1) * z * p.omega.dot(x));
        const Complex eh = (Complex(0, 1) * std::conj(z) * p.theta.dot(x) + 1.0) *
                           std::exp(Complex(0, 1) * std::conj(z) * p.theta.dot(x));
        worst_g = std::max(worst_g, std::abs(g.values[i] - eg));
        worst_h = std::max(worst_h, std::abs(h.values[i] - eh));
        amp_max = std::max({amp_max, std::abs(g.values[i]), std::abs(h.values[i])});
    }
    CHECK(worst_g < 1e-12);
    CHECK(worst_h < 1e-12);
    // |values| <= (sqrt(tau^2+1) + alpha) e on the unit sphere
    CHECK(amp_max <= (std::sqrt(101.0) + 1.0) * std::exp(1.0) + 1e-9);

    // evaluated at x = omega the g-trace is (i z + 1) e^{i z}
    const Complex at_omega = (Complex(0, 1) * z + 1.0) * std::exp(Complex(0, 1) * z);
    CHECK(std::abs(at_omega - Complex(0, 10.0) * std::exp(Complex(0, 10.0)) * std::exp(-1.0)) <
          1e-12);
}

TEST_CASE("pairing_dn: sign invariance and conjugate symmetry") {
    auto bsd = free_bsd();
    auto p = make_probe(Vec3(1.2, 0.3, -0.4), 6.0);
    auto quad = probe_quad();
    auto g = go_trace(p, 1.0, quad, TraceKind::g);
    auto h = go_trace(p, 1.0, quad, TraceKind::h);

    auto entry = bsd.entries[3];
    const Complex d = pairing_dn(g, h, entry, *quad);

    SpectralEntry flipped = entry;
    flipped.boundary_value = -entry.boundary_value;
    CHECK(std::abs(pairing_dn(g, h, flipped, *quad) - d) < 1e-12 * std::max(1.0, std::abs(d)));

    const Complex swapped = pairing_dn(h, g, entry, *quad);
    CHECK(std::abs(swapped - std::conj(d)) < 1e-10 * std::max(1.0, std::abs(d)));

    SpectralEntry unknown = entry;
    unknown.trace_known = false;
    CHECK_THROWS_AS(pairing_dn(g, h, unknown, *quad), MissingTraceError);
}

TEST_CASE("pairing_dn matches the spherical-Bessel closed form") {
    auto bsd = free_bsd();
    const auto& e1 = bsd.entries.front(); // l = 0 ground trace
    REQUIRE(e1.l == 0);

    auto p = make_probe(Vec3(1.3, 0.4, 0.2), 6.0);
    auto quad = probe_quad();
    auto g = go_trace(p, 1.0, quad, TraceKind::g);
    auto h = go_trace(p, 1.0, quad, TraceKind::h);
    const Complex d_quad = pairing_dn(g, h, e1, *quad);

    // analytic path: c_l(w) = 4 pi i^l (w j_l'(w) + alpha j_l(w)),
    // d_1 = b^2 c_0(z) c_0(-z) |Y_00|^2
    const Complex z = p.sqrt_lambda;
    auto c0 = [&](Complex w) {
        return 4.0 * M_PI * (w * oracles::sph_jl_prime_complex(0, w) +
                             oracles::sph_jl_complex(0, w));
    };
    const Complex d_analytic =
        e1.boundary_value * e1.boundary_value * c0(z) * c0(-z) / (4.0 * M_PI);
    CHECK(std::abs(d_quad - d_analytic) <= 1e-8 * std::max(1.0, std::abs(d_analytic)));
}

TEST_CASE("engine pairings agree with surface quadrature") {
    auto bsd = free_bsd();
    auto p = make_probe(Vec3(0.9, -0.2, 0.5), 5.0);
    auto quad = probe_quad();
    auto g = go_trace(p, 1.0, quad, TraceKind::g);
    auto h = go_trace(p, 1.0, quad, TraceKind::h);
    PairingEngine engine(p, 1.0, bsd.max_degree());

    for (std::size_t i : {std::size_t(0), std::size_t(2), std::size_t(5), std::size_t(9)}) {
        const auto& e = bsd.entries[i];
        Complex gq = 0.0, hq = 0.0;
        for (std::size_t n = 0; n < quad->size(); ++n) {
            const Complex ylm = eval_harmonic({e.l, e.m}, quad->nodes[n]) * e.boundary_value;
            gq += quad->weights[n] * g.values[n] * std::conj(ylm);
            hq += quad->weights[n] * ylm * std::conj(h.values[n]);
        }
        CHECK(std::abs(engine.pair_g(e) - gq) < 1e-10 * std::max(1.0, std::abs(gq)));
        CHECK(std::abs(engine.pair_h(e) - hq) < 1e-10 * std::max(1.0, std::abs(hq)));
    }
}

TEST_CASE("group sum equals the direct m-sum") {
    auto bsd = free_bsd();
    auto p = make_probe(Vec3(0.8, 0.1, -0.3), 4.5);
    auto quad = probe_quad();
    auto g = go_trace(p, 1.0, quad, TraceKind::g);
    auto h = go_trace(p, 1.0, quad, TraceKind::h);

    for (auto [l, k] : {std::pair{0, 1}, {2, 1}, {3, 1}}) {
        auto idx = group_indices(bsd, l, k);
        Complex direct = 0.0;
        for (auto i : idx) direct += pairing_dn(g, h, bsd.entries[i], *quad);
        const Complex collapsed = pairing_group_sum(g, h, bsd, l, k);
        CHECK(std::abs(collapsed - direct) < 1e-10 * std::max(1.0, std::abs(direct)));
        if (l == 0) {
            const Complex single = pairing_dn(g, h, bsd.entries[idx.front()], *quad);
            CHECK(std::abs(collapsed - single) < 1e-10 * std::max(1.0, std::abs(single)));
        }
    }
}

TEST_CASE("degenerate probe gives a perfect-square group sum") {
    // at xi = 0 each d_n collapses to (4 pi b F_l(z))^2-type squares; check
    // the group magnitude against the Bessel oracle
    auto bsd = free_bsd();
    auto p = make_probe(Vec3(0, 0, 0), 5.0);
    PairingEngine engine(p, 1.0, 0);
    const auto& e1 = bsd.entries.front();
    const Complex z = p.sqrt_lambda;
    const Complex f0 = z * oracles::sph_jl_prime_complex(0, z) + oracles::sph_jl_complex(0, z);
    const Complex expect = e1.boundary_value * e1.boundary_value * 4.0 * M_PI * f0 * f0;
    CHECK(std::abs(engine.group_sum(0, e1.boundary_value) - expect) <
          1e-9 * std::max(1.0, std::abs(expect)));
}
