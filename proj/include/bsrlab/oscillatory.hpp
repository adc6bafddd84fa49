#pragma once

#include <string>
#include <vector>

#include "bsrlab/probe.hpp"

namespace bsrlab {

// ============================================================================
// Boundary oscillatory integrals int_{S^2} e^{i tau theta.x} phi(x) ds
// ============================================================================

struct OscQuadOptions {
    int min_polar = 64;
    int min_azimuth = 64;
    int max_polar = 8192; // refinement cap; beyond it -> NumericError
};

/// Evaluated on a quadrature aligned with theta and refined to at least ten
/// polar nodes per oscillation wavelength 2 pi / tau. phi must carry (or be
/// projectable to) a coefficient representation.
Complex boundary_oscillatory_integral(const BoundaryFunction& phi, const Vec3& theta, double tau,
                                      const OscQuadOptions& quad = {});

/// tau ladder of magnitudes with the fitted envelope decay exponent and the
/// smallest constant C with |I(tau)| <= C ||phi||_{H^s} / tau over the ladder.
struct OscillatoryReport {
    Vec3 theta = Vec3(0, 0, 1);
    std::vector<double> tau_values;
    std::vector<double> magnitudes;
    double fitted_exponent = 0.0; // |I| ~ tau^(-exponent) on the upper envelope
    double bound_constant = 0.0;  // max tau |I| / ||phi||_{H^s}
    double s = 2.0;
    double phi_hs_norm = 0.0;
};

OscillatoryReport vdc_decay_report(const BoundaryFunction& phi, const Vec3& theta,
                                   const std::vector<double>& tau_ladder, double s,
                                   const OscQuadOptions& quad = {});

void write_oscillatory_csv(const OscillatoryReport& report, const std::string& path);
void write_oscillatory_summary_json(const OscillatoryReport& report, const std::string& path);

// ============================================================================
// Uniform-in-tau bounds on the trace pairings (g, psi_n)
// ============================================================================

struct PairingBoundReport {
    SpectralEntry entry;
    std::vector<double> taus;
    std::vector<double> magnitudes; // |(g, psi_n)|
    std::vector<double> osc_part;   // the i sqrt(lambda) omega.nu term
    std::vector<double> robin_part; // the alpha term (identically 0 for alpha = 0)
    double max_abs = 0.0;
    double fitted_slope = 0.0; // log-log envelope slope; ~0 means uniform in tau
    double c_fit = 0.0;        // max |(g,psi_n)| / ((1+alpha) ||psi_n||_{H^m})
    double s = 2.0;
    int m_order = 3; // ceil(s) + 1
};

PairingBoundReport pairing_uniform_bound(const SpectralEntry& entry, double alpha, const Vec3& xi,
                                         const std::vector<double>& tau_ladder, double s = 2.0);

// ============================================================================
// Decay of the finite head sum sum_{n < n0} (d_n - d~_n)/(lambda_n - lambda_tau)
// ============================================================================

struct FiniteSumDecay {
    bool exact_zero = false; // empty sum (n0 = 1) or identical head traces
    std::vector<double> taus;
    std::vector<double> magnitudes;
    double fitted_slope = 0.0;
};

FiniteSumDecay finite_sum_decay(const BoundarySpectralData& bsd,
                                const BoundarySpectralData& bsd_tilde, int n0, const Vec3& xi,
                                const std::vector<double>& tau_ladder);

} // namespace bsrlab
