#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bsrlab/probe.hpp"
#include "bsrlab/radial.hpp"

namespace bsrlab {

// ============================================================================
// Series evaluation at a fixed probe
// ============================================================================

struct SeriesOptions {
    double cap_factor = 4.0;    // warn when lambda_cap < cap_factor * tau^2
    double vdc_constant = 8.0;  // fitted uniform bound constant for |(g, psi_n)|
    double sobolev_s = 2.0;     // m = ceil(s) + 1 in the missing-trace bound
    int threads = 1;
};

/// The two sums of the spectral representation of the boundary functional
/// difference at lambda_tau:
///   sum1 = sum (d_n - d~_n) / (lambda_n - lambda_tau)
///   sum2 = sum (lambda~_n - lambda_n) d~_n /
///              ((lambda_n - lambda_tau)(lambda~_n - lambda_tau))
/// plus bookkeeping for everything that was not summed: the spectral tail
/// beyond the cap and entries with unknown traces (excluded and bounded,
/// never guessed).
struct SeriesEvaluation {
    FrequencyProbe probe;
    Complex sum1 = 0.0;
    Complex sum2 = 0.0;
    int n_used = 0;
    double tail_bound = 0.0;
    double excluded_bound = 0.0;
    bool cap_warning = false;

    Complex total() const { return sum1 + sum2; }
};

SeriesEvaluation s_star_series(const BoundarySpectralData& bsd,
                               const BoundarySpectralData& bsd_tilde,
                               const FrequencyProbe& probe, double lambda_cap,
                               const SeriesOptions& opts = {});

/// ( sum_n |(trace, psi_n)|^2 / |lambda_n - lambda|^2 )^(1/2) over the
/// available entries - the L^2 norm of the resolvent solution driven by the
/// trace, used inside tail and missing-trace bounds.
double u_series_norm(const BoundarySpectralData& bsd, const GoTrace& trace, Complex lambda);

/// Cauchy-Schwarz tail bound (1 + Lambda_1/(2 tau)) |u(g)| |u(h)| Lambda_N
/// over the retained spectrum beyond lambda_cap, plus a crude remainder for
/// modes beyond the data, extrapolated with Weyl growth of the pairing
/// energy.
double tail_bound(const BoundarySpectralData& bsd, const BoundarySpectralData& bsd_tilde,
                  const FrequencyProbe& probe, double lambda_cap, const SeriesOptions& opts = {});

// ============================================================================
// tau -> infinity extrapolation
// ============================================================================

struct RhoHatResult {
    Complex value = 0.0;       // extrapolated rho_hat(xi)
    double error_estimate = 0.0;
    double extrapolation_term = 0.0;
    double tail_term = 0.0;
    double excluded_term = 0.0;
    std::vector<double> taus;
    std::vector<Complex> series_values;    // sum1 + sum2 per ladder point
    std::vector<double> excluded_bounds;   // per ladder point; decays ~ tau^-2
};

/// Evaluates the series along the tau ladder and removes the leading 1/tau
/// error with a two-point fit on the last two points.
RhoHatResult rho_hat_at(const BoundarySpectralData& bsd, const BoundarySpectralData& bsd_tilde,
                        const Vec3& xi, const std::vector<double>& tau_ladder,
                        double lambda_cap, const SeriesOptions& opts = {});

/// Independent oracle: rho_hat(xi) = 4 pi int_0^1 rho(r) sinc(|xi| r) r^2 dr
/// for a radial density on the unit ball (exact and real-valued).
Complex fourier_oracle_radial(const std::function<double(double)>& rho, const Vec3& xi);
Complex fourier_oracle_radial(const RadialPotential& q, const RadialPotential& q_tilde,
                              const Vec3& xi);

// ============================================================================
// Truncated Fourier inversion
// ============================================================================

struct GridSpec {
    double dxi = M_PI / 2.0; // grid spacing; must resolve the unit-ball support
    std::optional<double> r_cut_override; // default r_cut = delta^(-2/5)
};

/// Cartesian samples of rho_hat inside the ball |xi| <= r_cut, Hermitian
/// symmetrized, plus per-point error estimates.
struct FourierField {
    double dxi = 0.0;
    int half_extent = 0; // indices run in [-K, K]^3
    double r_cut = 0.0;
    double delta = 0.0;
    std::vector<Complex> rho_hat;        // flattened, zero outside the ball
    std::vector<double> error_estimate;  // same layout
    double max_tail = 0.0;
    double max_excluded = 0.0;
    double max_extrapolation = 0.0;
    std::vector<double> real_field;      // optional synthesis, see below
    std::vector<Vec3> real_points;

    std::size_t index(int i, int j, int k) const;
    Vec3 xi_at(int i, int j, int k) const;
    std::size_t size() const { return rho_hat.size(); }
};

struct ReconstructOptions {
    SeriesOptions series;
    std::vector<double> tau_ladder = {16.0, 32.0};
    double lambda_cap = 0.0; // 0: min(4 tau_max^2, data limit)
    int threads = 1;
};

FourierField reconstruct_field(const BoundarySpectralData& bsd,
                               const BoundarySpectralData& bsd_tilde, double delta,
                               const GridSpec& grid, const ReconstructOptions& opts = {});

/// Frequency-weighted energy ((2 pi)^-3 sum (1+|xi|^2)^-1 |rho_hat|^2
/// dxi^3)^(1/2) - the H^-1(ball) upper-bound proxy.
double h_minus1_norm(const FourierField& field);

/// real_field(x) = (2 pi)^-3 sum rho_hat(xi) e^{i xi.x} dxi^3 on a cubic
/// lattice of side points_per_axis covering [-1, 1]^3.
void synthesize_real_field(FourierField& field, int points_per_axis);

// CSV / report export (17 significant digits).
void write_field_csv(const FourierField& field, const std::string& path);
void write_field_report_json(const FourierField& field, const std::string& path);

} // namespace bsrlab
