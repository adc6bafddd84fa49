#pragma once

#include <memory>
#include <vector>

#include "bsrlab/geometry.hpp"
#include "bsrlab/spectral_data.hpp"

namespace bsrlab {

// ============================================================================
// Frequency probes
// ============================================================================

/// The frequency package for probing rho_hat(xi): lambda = (tau + i)^2 and a
/// pair of unit directions omega, theta with omega - theta = xi / tau, built
/// on an auxiliary unit vector eta orthogonal to xi. zeta collects the
/// deviation of omega from eta: omega = eta - zeta / (2 tau).
struct FrequencyProbe {
    Vec3 xi = Vec3::Zero();
    Vec3 eta = Vec3(1, 0, 0);
    double tau = 0.0;
    Complex lambda;      // (tau + i)^2
    Complex sqrt_lambda; // tau + i (principal branch, exact by construction)
    Vec3 omega = Vec3::Zero();
    Vec3 theta = Vec3::Zero();
    Vec3 zeta = Vec3::Zero();
};

/// Requires tau > |xi| / 2. The auxiliary direction is chosen
/// deterministically: the coordinate axis least aligned with xi,
/// orthogonalized against xi and normalized (e1 when xi = 0).
FrequencyProbe make_probe(const Vec3& xi, double tau);

// ============================================================================
// Geometric-optics boundary traces
// ============================================================================

enum class TraceKind { g, h };

/// Robin data of the complex plane wave on the unit sphere (nu(x) = x):
///   kind g:  (i w omega.x + alpha) e^{i w omega.x},   w = tau + i,
///   kind h:  (i w' theta.x + alpha) e^{i w' theta.x}, w' = tau - i.
/// The receiving side carries the conjugate frequency so that the pairing
/// sum_n d_n / (lambda_n - lambda) reproduces the boundary functional of the
/// resolvent; see pairing_dn.
struct GoTrace {
    TraceKind kind = TraceKind::g;
    FrequencyProbe probe;
    double alpha = 0.0;
    std::shared_ptr<const SphereQuadrature> quad;
    std::vector<Complex> values;

    const Vec3& direction() const { return kind == TraceKind::g ? probe.omega : probe.theta; }
    Complex frequency() const {
        return kind == TraceKind::g ? probe.sqrt_lambda : std::conj(probe.sqrt_lambda);
    }
};

GoTrace go_trace(const FrequencyProbe& probe, double alpha,
                 std::shared_ptr<const SphereQuadrature> quad, TraceKind kind);

// ============================================================================
// Pairings with boundary spectral data
// ============================================================================

/// d_n = (g, psi_n)_{L^2(Gamma)} (psi_n, h)_{L^2(Gamma)} by surface
/// quadrature, with psi_n = boundary_value * Y_lm. Throws MissingTraceError
/// when the entry's trace is flagged unknown.
Complex pairing_dn(const GoTrace& g, const GoTrace& h, const SpectralEntry& entry,
                   const SphereQuadrature& quad);

/// Zonal pairing coefficients c_l = 2 pi int_{-1}^{1} (i w t + alpha) e^{iwt}
/// P_l(t) dt for l = 0..lmax, by 1D Gauss-Legendre sized to resolve the
/// oscillation. The traces are zonal around their directions, so these plus
/// the values Y_lm(direction) give every pairing:
///   (g, psi_n) = b c_l[w]  conj(Y_lm(omega)),
///   (psi_n, h) = b c_l[-w'] Y_lm(theta),  w' = conj(sqrt_lambda).
std::vector<Complex> zonal_pair_coefficients(Complex w, double alpha, int lmax, int n1d = 0);

/// Precomputed pairing state for one probe: evaluates (g, psi_n), (psi_n, h),
/// d_n, and degree-collapsed group sums at O(1) cost per entry.
class PairingEngine {
public:
    PairingEngine(const FrequencyProbe& probe, double alpha, int lmax);

    const FrequencyProbe& probe() const { return probe_; }
    double alpha() const { return alpha_; }
    int lmax() const { return lmax_; }

    Complex pair_g(const SpectralEntry& e) const; // (g, psi_n)
    Complex pair_h(const SpectralEntry& e) const; // (psi_n, h)
    Complex dn(const SpectralEntry& e) const;     // product of the two

    /// sum over m of d_n across a degenerate (l, k) group with trace
    /// coefficient b, collapsed through the addition theorem:
    /// b^2 c_l^g c_l^h (2l+1)/(4pi) P_l(omega . theta).
    Complex group_sum(int l, double b) const;
    Complex group_kernel(int l) const; // group_sum / b^2

    /// Split of (g, psi_n) into the oscillatory part (the i sqrt(lambda)
    /// omega.nu term) and the alpha part.
    std::pair<Complex, Complex> pair_g_parts(const SpectralEntry& e) const;

private:
    FrequencyProbe probe_;
    double alpha_;
    int lmax_;
    std::vector<Complex> cg_;        // c_l[w], w = tau + i
    std::vector<Complex> cg_osc_;    // oscillatory sub-coefficient of cg_
    std::vector<Complex> ch_;        // c_l[-conj(w)]
    std::vector<Complex> y_omega_;   // Y_lm(omega)
    std::vector<Complex> y_theta_;   // Y_lm(theta)
    std::vector<double> p_omth_;     // P_l(omega . theta)
};

/// Group-collapsed pairing sum for the (l, k) degenerate block of `bsd`,
/// matching the direct m-sum of pairing_dn at m-independent cost.
Complex pairing_group_sum(const GoTrace& g, const GoTrace& h, const BoundarySpectralData& bsd,
                          int l, int k);

} // namespace bsrlab
