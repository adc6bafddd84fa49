#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsrlab/oscillatory.hpp"
#include "bsrlab/reconstruction.hpp"

namespace bsrlab {

// ============================================================================
// Sweep results
// ============================================================================

struct SweepResult {
    std::string kind; // "stability" | "incomplete"
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    double fitted_slope = 0.0;
    double slope_ci_width = 0.0;   // leave-one-out spread of the slope
    double bound_constant = 0.0;   // smallest C with error <= C delta^(2/5)
    bool all_within_bars = true;   // incomplete sweep: n0-independence check
    bool decay_ok = true;          // incomplete sweep: head-sum decay <= -1.5
    std::uint64_t fingerprint = 0; // hash of the full configuration
};

// ============================================================================
// Stability sweep (eigenvalue noise response at the Hoelder cutoff)
// ============================================================================

struct StabilitySweepOptions {
    GridSpec grid;
    std::vector<double> tau_ladder = {8.0, 16.0};
    double lambda_cap = 0.0; // 0: derive from the tau ladder
    int threads = 1;
};

/// For each delta: shift every eigenvalue by delta (traces shared), run the
/// truncated inversion with r_cut = delta^(-2/5), and record the H^-1 proxy
/// of the response. The true difference is zero, so the recorded error is
/// the pure data-noise response; the fitted slope probes the Hoelder
/// exponent 2/5.
SweepResult stability_sweep(const BoundarySpectralData& bsd, const std::vector<double>& delta_ladder,
                            const StabilitySweepOptions& opts = {});

// ============================================================================
// Incomplete-data sweep (missing leading traces)
// ============================================================================

struct IncompleteSweepOptions {
    std::vector<double> tau_ladder = {8.0, 16.0};
    std::vector<double> decay_taus; // defaults to logspace(8, 64, 17)
    double lambda_cap = 0.0;
    SeriesOptions series;
    int threads = 1;
};

/// Requires the sign conditions of the incomplete-data theorem: either
/// q, q~ >= 0 with alpha > 0, or q, q~ > 0 with alpha >= 0. Throws
/// ConfigError naming the violated inequality otherwise.
void check_incomplete_conditions(double alpha, double q_min, double q_tilde_min);

SweepResult incomplete_sweep(const BoundarySpectralData& bsd,
                             const BoundarySpectralData& bsd_tilde,
                             const std::vector<int>& n0_ladder, const std::vector<Vec3>& xi_probes,
                             const IncompleteSweepOptions& opts = {});

// ============================================================================
// Reference configuration
// ============================================================================

/// The documented desk-scale pair: q = 0 against a radial Gaussian bump
/// with L^2(ball) norm 0.1 (width 0.35), alpha = 1.
struct ReferenceConfig {
    RadialPotential q;
    RadialPotential q_tilde;
    RobinCoefficient alpha;
    double lambda_max = 0.0;
    int l_max = 0;
    BoundarySpectralData bsd;
    BoundarySpectralData bsd_tilde;
};

ReferenceConfig make_reference_configuration(double lambda_max, int l_max, int threads = 1,
                                             int mesh = 600);

/// Balance check of the truncation rule: with E(r) = r^3 (C delta)^2 +
/// r^-2 rho_norm^2, the minimizer should sit within a factor two of
/// delta^(-2/5).
struct CutoffBalance {
    double r_rule = 0.0;
    double r_star = 0.0;
    double location_ratio = 0.0; // max(r*/rule, rule/r*)
    double energy_ratio = 0.0;   // E(rule) / E(r*)
};
CutoffBalance cutoff_tradeoff(double c_fitted, double rho_norm, double delta);

// ============================================================================
// Output
// ============================================================================

void write_sweep_csv(const SweepResult& sweep, const std::string& path);
void write_run_manifest(const nlohmann::json& config, std::uint64_t fingerprint,
                        const std::vector<std::string>& outputs, const std::string& path);

} // namespace bsrlab
