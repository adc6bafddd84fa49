#include "bsrlab/probe.hpp"

#include <cmath>
#include <stdexcept>

#include "bsrlab/errors.hpp"

namespace bsrlab {

FrequencyProbe make_probe(const Vec3& xi, double tau) {
    const double xin = xi.norm();
    if (!(tau > 0.5 * xin))
        throw std::domain_error("make_probe: tau must exceed |xi|/2");

    FrequencyProbe p;
    p.xi = xi;
    p.tau = tau;
    p.sqrt_lambda = Complex(tau, 1.0);
    p.lambda = p.sqrt_lambda * p.sqrt_lambda;

    if (xin == 0.0) {
        p.eta = Vec3(1, 0, 0);
    } else {
        int least = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(xi[i]) < std::abs(xi[least])) least = i;
        Vec3 e = Vec3::Zero();
        e[least] = 1.0;
        p.eta = (e - (xi.dot(e) / (xin * xin)) * xi).normalized();
    }

    const double s2 = 1.0 - xin * xin / (4.0 * tau * tau);
    const double s = std::sqrt(std::max(0.0, s2));
    const Vec3 half = xi / (2.0 * tau);
    p.theta = s * p.eta - half;
    p.omega = s * p.eta + half;
    // omega = eta - zeta / (2 tau) exactly
    p.zeta = (xin * xin / (2.0 * tau * (1.0 + s))) * p.eta - xi;

    const double tol = 1e-12 * std::max(1.0, xin);
    if (std::abs(p.eta.dot(xi)) > 1e-14 * std::max(1.0, xin) ||
        std::abs(p.omega.norm() - 1.0) > 1e-12 || std::abs(p.theta.norm() - 1.0) > 1e-12 ||
        ((p.omega - p.theta) * tau - xi).norm() > tol ||
        p.zeta.norm() > std::sqrt(2.0) * xin * (1.0 + 1e-12) + 1e-15)
        throw NumericError("make_probe: construction invariants violated");
    return p;
}

GoTrace go_trace(const FrequencyProbe& probe, double alpha,
                 std::shared_ptr<const SphereQuadrature> quad, TraceKind kind) {
    if (!quad) throw std::invalid_argument("go_trace: null quadrature");
    GoTrace t;
    t.kind = kind;
    t.probe = probe;
    t.alpha = alpha;
    t.quad = quad;
    const Vec3 dir = t.direction();
    const Complex w = t.frequency();
    t.values.resize(quad->size());
    for (std::size_t i = 0; i < quad->size(); ++i) {
        const double proj = dir.dot(quad->nodes[i]);
        t.values[i] = (Complex(0, 1) * w * proj + alpha) * std::exp(Complex(0, 1) * w * proj);
    }
    return t;
}

Complex pairing_dn(const GoTrace& g, const GoTrace& h, const SpectralEntry& entry,
                   const SphereQuadrature& quad) {
    if (!entry.trace_known)
        throw MissingTraceError("pairing_dn: trace unknown for entry n=" + std::to_string(entry.n));
    if (g.values.size() != quad.size() || h.values.size() != quad.size())
        throw std::invalid_argument("pairing_dn: traces not sampled on the given quadrature");

    Complex g_psi = 0.0, psi_h = 0.0;
    for (std::size_t i = 0; i < quad.size(); ++i) {
        const Complex ylm =
            eval_harmonic({entry.l, entry.m}, quad.nodes[i]) * entry.boundary_value;
        g_psi += quad.weights[i] * g.values[i] * std::conj(ylm);
        psi_h += quad.weights[i] * ylm * std::conj(h.values[i]);
    }
    return g_psi * psi_h;
}

std::vector<Complex> zonal_pair_coefficients(Complex w, double alpha, int lmax, int n1d) {
    if (n1d <= 0)
        n1d = static_cast<int>(std::ceil(0.5 * (std::abs(w) + lmax))) + 32;
    Quadrature1D gl = gauss_legendre(n1d);

    std::vector<Complex> out(lmax + 1, Complex(0.0));
    std::vector<double> pl(lmax + 1);
    for (int i = 0; i < n1d; ++i) {
        const double t = gl.nodes[i];
        const Complex phi = (Complex(0, 1) * w * t + alpha) * std::exp(Complex(0, 1) * w * t);
        const Complex fw = gl.weights[i] * phi;
        legendre_row(lmax, t, pl.data());
        for (int l = 0; l <= lmax; ++l) out[l] += fw * pl[l];
    }
    for (auto& c : out) c *= 2.0 * M_PI;
    return out;
}

PairingEngine::PairingEngine(const FrequencyProbe& probe, double alpha, int lmax)
    : probe_(probe), alpha_(alpha), lmax_(lmax) {
    const Complex w = probe.sqrt_lambda;
    cg_ = zonal_pair_coefficients(w, alpha, lmax);
    cg_osc_ = zonal_pair_coefficients(w, 0.0, lmax);
    // (psi_n, h) = int psi conj(h) ds with h built on conj(w); the conjugated
    // profile is the zonal function with frequency -w.
    ch_ = zonal_pair_coefficients(-w, alpha, lmax);
    y_omega_ = harmonic_table(lmax, probe.omega);
    y_theta_ = harmonic_table(lmax, probe.theta);
    p_omth_.resize(lmax + 1);
    legendre_row(lmax, std::clamp(probe.omega.dot(probe.theta), -1.0, 1.0), p_omth_.data());
}

Complex PairingEngine::pair_g(const SpectralEntry& e) const {
    if (e.l > lmax_) throw std::invalid_argument("PairingEngine: degree beyond table");
    return e.boundary_value * cg_[e.l] * std::conj(y_omega_[harmonic_flat_index(e.l, e.m)]);
}

Complex PairingEngine::pair_h(const SpectralEntry& e) const {
    if (e.l > lmax_) throw std::invalid_argument("PairingEngine: degree beyond table");
    return e.boundary_value * ch_[e.l] * y_theta_[harmonic_flat_index(e.l, e.m)];
}

Complex PairingEngine::dn(const SpectralEntry& e) const {
    return pair_g(e) * pair_h(e);
}

Complex PairingEngine::group_kernel(int l) const {
    if (l > lmax_) throw std::invalid_argument("PairingEngine: degree beyond table");
    return cg_[l] * ch_[l] * (2.0 * l + 1.0) / (4.0 * M_PI) * p_omth_[l];
}

Complex PairingEngine::group_sum(int l, double b) const {
    return b * b * group_kernel(l);
}

std::pair<Complex, Complex> PairingEngine::pair_g_parts(const SpectralEntry& e) const {
    if (e.l > lmax_) throw std::invalid_argument("PairingEngine: degree beyond table");
    const Complex yw = std::conj(y_omega_[harmonic_flat_index(e.l, e.m)]);
    const Complex osc = e.boundary_value * cg_osc_[e.l] * yw;
    const Complex alpha_part = e.boundary_value * (cg_[e.l] - cg_osc_[e.l]) * yw;
    return {osc, alpha_part};
}

Complex pairing_group_sum(const GoTrace& g, const GoTrace& h, const BoundarySpectralData& bsd,
                          int l, int k) {
    auto idx = group_indices(bsd, l, k);
    for (auto i : idx)
        if (!bsd.entries[i].trace_known)
            throw MissingTraceError("pairing_group_sum: trace unknown in group l=" +
                                    std::to_string(l) + " k=" + std::to_string(k));
    if (g.probe.tau != h.probe.tau || (g.probe.xi - h.probe.xi).norm() != 0.0)
        throw std::invalid_argument("pairing_group_sum: traces from different probes");
    PairingEngine engine(g.probe, g.alpha, l);
    return engine.group_sum(l, bsd.entries[idx.front()].boundary_value);
}

} // namespace bsrlab
