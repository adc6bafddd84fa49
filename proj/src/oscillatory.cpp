#include "bsrlab/oscillatory.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "bsrlab/errors.hpp"

namespace bsrlab {

namespace {

// Azimuth-summed slices of phi on a theta-aligned rule: with the pole on
// theta the phase tau theta.x is constant on each ring, so
// I(tau) = sum_i e^{i tau c_i} S_i with c_i the ring cosines.
struct RingReduction {
    std::vector<double> cosines;
    std::vector<Complex> sums;
};

RingReduction build_rings(const BoundaryFunction& phi, const Vec3& theta, int polar, int azimuth) {
    BoundaryFunction f = phi;
    f.ensure_coefficients();
    SphereQuadrature quad = build_quadrature_aligned(polar, azimuth, theta);
    auto values = f.synthesize(quad);

    RingReduction rings;
    rings.cosines = quad.polar_cos;
    rings.sums.assign(quad.polar_count, Complex(0.0));
    for (int i = 0; i < quad.polar_count; ++i) {
        Complex acc = 0.0;
        for (int j = 0; j < quad.azimuth_count; ++j) {
            const std::size_t id = static_cast<std::size_t>(i) * quad.azimuth_count + j;
            acc += quad.weights[id] * values[id];
        }
        rings.sums[i] = acc;
    }
    return rings;
}

Complex integral_from_rings(const RingReduction& rings, double tau) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < rings.cosines.size(); ++i)
        acc += std::polar(1.0, tau * rings.cosines[i]) * rings.sums[i];
    return acc;
}

int polar_nodes_for(double tau, const OscQuadOptions& opts) {
    // ten nodes per wavelength 2 pi / tau along the polar arc of length pi
    const int needed = static_cast<int>(std::ceil(5.0 * std::abs(tau)));
    const int n = std::max(opts.min_polar, needed);
    if (n > opts.max_polar)
        throw NumericError("oscillatory integral: resolution cap exceeded at tau=" +
                           std::to_string(tau));
    return n;
}

int azimuth_nodes_for(const BoundaryFunction& phi, const OscQuadOptions& opts) {
    const int degree = phi.has_coefficients() ? phi.coefficient_degree()
                                              : phi.quadrature().l_exact;
    return std::max(opts.min_azimuth, 2 * degree + 8);
}

} // namespace

Complex boundary_oscillatory_integral(const BoundaryFunction& phi, const Vec3& theta, double tau,
                                      const OscQuadOptions& quad) {
    auto rings = build_rings(phi, theta, polar_nodes_for(tau, quad), azimuth_nodes_for(phi, quad));
    return integral_from_rings(rings, tau);
}

OscillatoryReport vdc_decay_report(const BoundaryFunction& phi, const Vec3& theta,
                                   const std::vector<double>& tau_ladder, double s,
                                   const OscQuadOptions& quad) {
    if (tau_ladder.empty()) throw std::invalid_argument("vdc_decay_report: empty tau ladder");
    if (!(s > 1.0)) throw std::invalid_argument("vdc_decay_report: need s > (d-1)/2 = 1");
    for (std::size_t i = 0; i < tau_ladder.size(); ++i) {
        if (tau_ladder[i] < 1.0)
            throw std::invalid_argument("vdc_decay_report: ladder must stay in [1, inf)");
        if (i > 0 && tau_ladder[i] <= tau_ladder[i - 1])
            throw std::invalid_argument("vdc_decay_report: ladder must be increasing");
    }

    OscillatoryReport rep;
    rep.theta = theta;
    rep.tau_values = tau_ladder;
    rep.s = s;
    rep.phi_hs_norm = hs_norm(phi, s);

    // one rule at the top resolution serves the whole ladder
    auto rings = build_rings(phi, theta, polar_nodes_for(tau_ladder.back(), quad),
                             azimuth_nodes_for(phi, quad));
    rep.magnitudes.reserve(tau_ladder.size());
    for (double tau : tau_ladder)
        rep.magnitudes.push_back(std::abs(integral_from_rings(rings, tau)));

    bool all_zero = false;
    const double floor = 1e-14 * (rep.phi_hs_norm + 1.0);
    const double slope = envelope_loglog_slope(tau_ladder, rep.magnitudes, floor, &all_zero);
    rep.fitted_exponent = all_zero ? 0.0 : -slope;
    double c = 0.0;
    if (rep.phi_hs_norm > 0.0)
        for (std::size_t i = 0; i < tau_ladder.size(); ++i)
            c = std::max(c, tau_ladder[i] * rep.magnitudes[i] / rep.phi_hs_norm);
    rep.bound_constant = c;
    return rep;
}

void write_oscillatory_csv(const OscillatoryReport& report, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("write_oscillatory_csv: cannot open " + tmp);
        out << "tau,magnitude,bound\n";
        for (std::size_t i = 0; i < report.tau_values.size(); ++i) {
            const double bound =
                report.bound_constant * report.phi_hs_norm / report.tau_values[i];
            out << format_float(report.tau_values[i]) << ',' << format_float(report.magnitudes[i])
                << ',' << format_float(bound) << '\n';
        }
    }
    std::filesystem::rename(tmp, path);
}

void write_oscillatory_summary_json(const OscillatoryReport& report, const std::string& path) {
    nlohmann::json doc;
    doc["exponent"] = report.fitted_exponent;
    doc["constant"] = report.bound_constant;
    doc["s"] = report.s;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("write_oscillatory_summary_json: cannot open " + tmp);
        out << doc.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

PairingBoundReport pairing_uniform_bound(const SpectralEntry& entry, double alpha, const Vec3& xi,
                                         const std::vector<double>& tau_ladder, double s) {
    if (tau_ladder.empty()) throw std::invalid_argument("pairing_uniform_bound: empty ladder");
    PairingBoundReport rep;
    rep.entry = entry;
    rep.taus = tau_ladder;
    rep.s = s;
    rep.m_order = static_cast<int>(std::ceil(s)) + 1;

    for (double tau : tau_ladder) {
        if (tau <= 0.5 * xi.norm())
            throw std::invalid_argument("pairing_uniform_bound: tau must exceed |xi|/2");
        PairingEngine engine(make_probe(xi, tau), alpha, entry.l);
        const auto [osc, robin] = engine.pair_g_parts(entry);
        rep.magnitudes.push_back(std::abs(osc + robin));
        rep.osc_part.push_back(std::abs(osc));
        rep.robin_part.push_back(std::abs(robin));
        rep.max_abs = std::max(rep.max_abs, rep.magnitudes.back());
    }

    bool all_zero = false;
    rep.fitted_slope = envelope_loglog_slope(tau_ladder, rep.magnitudes, 0.0, &all_zero);
    if (all_zero) rep.fitted_slope = 0.0;
    const double nrm =
        hs_norm_single(entry.boundary_value, entry.l, static_cast<double>(rep.m_order));
    if (nrm > 0.0) rep.c_fit = rep.max_abs / ((1.0 + std::abs(alpha)) * nrm);
    return rep;
}

FiniteSumDecay finite_sum_decay(const BoundarySpectralData& bsd,
                                const BoundarySpectralData& bsd_tilde, int n0, const Vec3& xi,
                                const std::vector<double>& tau_ladder) {
    FiniteSumDecay res;
    res.taus = tau_ladder;
    if (n0 == 1) { // empty sum
        res.exact_zero = true;
        res.magnitudes.assign(tau_ladder.size(), 0.0);
        return res;
    }
    if (n0 < 1 || n0 > static_cast<int>(std::min(bsd.size(), bsd_tilde.size())))
        throw std::out_of_range("finite_sum_decay: n0 out of range");
    if (std::abs(bsd.alpha - bsd_tilde.alpha) > 1e-12)
        throw PairingError("finite_sum_decay: Robin coefficients differ");

    int lmax = 0;
    for (int i = 0; i + 1 < n0; ++i) {
        if (!bsd.entries[i].trace_known || !bsd_tilde.entries[i].trace_known)
            throw MissingTraceError("finite_sum_decay: head traces must be available");
        lmax = std::max({lmax, bsd.entries[i].l, bsd_tilde.entries[i].l});
    }

    for (double tau : tau_ladder) {
        if (tau <= 0.5 * xi.norm())
            throw std::invalid_argument("finite_sum_decay: tau must exceed |xi|/2");
        PairingEngine engine(make_probe(xi, tau), bsd.alpha, lmax);
        Complex acc = 0.0;
        for (int i = 0; i + 1 < n0; ++i) {
            const Complex d = engine.dn(bsd.entries[i]);
            const Complex dt = engine.dn(bsd_tilde.entries[i]);
            acc += (d - dt) / (bsd.entries[i].lambda - engine.probe().lambda);
        }
        res.magnitudes.push_back(std::abs(acc));
    }

    res.exact_zero = true;
    for (double v : res.magnitudes)
        if (v != 0.0) res.exact_zero = false;
    if (!res.exact_zero)
        res.fitted_slope = envelope_loglog_slope(tau_ladder, res.magnitudes);
    return res;
}

} // namespace bsrlab
