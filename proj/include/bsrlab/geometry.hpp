#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "bsrlab/numeric.hpp"

namespace bsrlab {

using Vec3 = Eigen::Vector3d;

// ============================================================================
// Quadrature on the unit sphere
// ============================================================================

/// Gauss-Legendre (polar) x uniform (azimuth) product rule on S^2.
/// Nodes are laid out ring-major: node(i, j) = nodes[i * azimuth_count + j],
/// ring i sharing the polar cosine polar_cos[i].
struct SphereQuadrature {
    std::vector<Vec3> nodes;
    std::vector<double> weights;   // surface-measure units, sum = 4*pi
    std::vector<double> polar_cos; // per-ring cos(theta), in the rule's own frame
    std::vector<double> polar_weight;
    int polar_count = 0;
    int azimuth_count = 0;
    int l_exact = 0;               // harmonic products integrated exactly up to this degree
    Vec3 pole = Vec3(0, 0, 1);     // axis the polar rings are stacked along

    std::size_t size() const { return nodes.size(); }
};

SphereQuadrature build_quadrature(int polar_count, int azimuth_count);

/// Same rule, rotated so the polar axis coincides with `pole`.
SphereQuadrature build_quadrature_aligned(int polar_count, int azimuth_count, const Vec3& pole);

// ============================================================================
// Spherical harmonics
// ============================================================================

struct HarmonicIndex {
    int l = 0;
    int m = 0;
};

/// Flat index of (l, m) in a degree-major table: l^2 + l + m.
inline std::size_t harmonic_flat_index(int l, int m) {
    return static_cast<std::size_t>(l) * l + l + m;
}
inline std::size_t harmonic_table_size(int lmax) {
    return static_cast<std::size_t>(lmax + 1) * (lmax + 1);
}

/// Orthonormal complex spherical harmonic with Condon-Shortley phase.
Complex eval_harmonic(const HarmonicIndex& idx, const Vec3& point);

/// All Y_lm(point) for l <= lmax, in flat-index order.
std::vector<Complex> harmonic_table(int lmax, const Vec3& point);

// ============================================================================
// Boundary functions
// ============================================================================

/// A function on the sphere held as nodal samples, a harmonic coefficient
/// vector, or both. When both are present they agree under projection within
/// quadrature tolerance.
class BoundaryFunction {
public:
    BoundaryFunction() = default;

    static BoundaryFunction from_coefficients(int lmax, std::vector<Complex> coeffs);
    static BoundaryFunction from_nodal(std::shared_ptr<const SphereQuadrature> quad,
                                       std::vector<Complex> values);
    static BoundaryFunction from_function(std::shared_ptr<const SphereQuadrature> quad,
                                          const std::function<Complex(const Vec3&)>& f);
    /// Single harmonic, scaled: amp * Y_lm.
    static BoundaryFunction harmonic(int l, int m, Complex amp = 1.0);
    static BoundaryFunction constant(Complex value);

    bool has_coefficients() const { return coeff_lmax_ >= 0; }
    bool has_nodal() const { return quad_ != nullptr; }

    int coefficient_degree() const { return coeff_lmax_; }
    const std::vector<Complex>& coefficients() const;
    Complex coefficient(int l, int m) const;

    const std::vector<Complex>& nodal_values() const;
    const SphereQuadrature& quadrature() const;

    /// Projects nodal data onto harmonics up to lmax (capped at the rule's
    /// exact degree) and caches the result.
    void ensure_coefficients(int lmax = -1);

    /// Synthesizes nodal values on `quad` from coefficients.
    std::vector<Complex> synthesize(const SphereQuadrature& quad) const;

    /// Pointwise evaluation from the coefficient representation.
    Complex value_at(const Vec3& point) const;

private:
    std::shared_ptr<const SphereQuadrature> quad_;
    std::vector<Complex> values_;
    int coeff_lmax_ = -1;
    std::vector<Complex> coeffs_;
};

/// Sobolev norm on the sphere through the Laplace-Beltrami weight:
/// ( sum (1 + l(l+1))^s |c_lm|^2 )^(1/2). Equals the L^2 norm at s = 0.
double hs_norm(const BoundaryFunction& f, double s);

/// Same norm for a single harmonic amp * Y_lm.
double hs_norm_single(double amp, int l, double s);

// ============================================================================
// Stationary points of the boundary phase x -> theta . x
// ============================================================================

struct StationaryPointSet {
    Vec3 direction;
    std::vector<Vec3> points;           // {+theta, -theta}
    std::vector<int> hessian_indices;   // Morse index per point: {2, 0}
    std::vector<double> hessian_dets;   // |det| of the phase Hessian, nonzero
};

StationaryPointSet stationary_points(const Vec3& theta);

// ============================================================================
// Sobolev embedding constant
// ============================================================================

/// Integral of (1 + |x|^2)^(-s) over R^dim, by adaptive quadrature.
/// Diverges for s <= dim/2.
double c_s_constant(double s, int dim);

} // namespace bsrlab
