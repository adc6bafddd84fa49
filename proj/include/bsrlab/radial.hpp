#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bsrlab/spectral_data.hpp"

namespace bsrlab {

// ============================================================================
// Potentials in the class Q_M
// ============================================================================

/// Radial profile q(r) on [0, 1] with an L^sigma(ball) budget, sigma = 2 in
/// dimension 3. Construction rejects profiles whose computed norm
/// (4 pi int |q|^sigma r^2 dr)^(1/sigma) exceeds the budget.
class RadialPotential {
public:
    static RadialPotential zero(double budget);
    static RadialPotential constant(double value, double budget);
    /// amplitude * exp(-(r/width)^2)
    static RadialPotential gaussian_bump(double amplitude, double width, double budget,
                                         int samples = 1025);
    static RadialPotential from_samples(std::vector<double> radii, std::vector<double> values,
                                        double budget);
    static RadialPotential from_function(const std::function<double(double)>& f, int samples,
                                         double budget);

    double value_at(double r) const;
    double l_sigma_norm() const { return norm_; }
    double budget() const { return budget_; }
    double sigma() const { return 2.0; }
    double min_value() const { return min_value_; }

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }

    /// Metadata for provenance records.
    std::string kind() const { return kind_; }
    const std::map<std::string, double>& params() const { return params_; }

private:
    RadialPotential(std::vector<double> grid, std::vector<double> values, double budget,
                    std::string kind, std::map<std::string, double> params);

    std::vector<double> grid_;
    std::vector<double> values_;
    double budget_ = 0.0;
    double norm_ = 0.0;
    double min_value_ = 0.0;
    bool uniform_ = true;
    std::string kind_;
    std::map<std::string, double> params_;
};

/// Constant Robin coefficient alpha >= 0 (the separable case).
struct RobinCoefficient {
    explicit RobinCoefficient(double alpha, std::string regularity = "constant");
    double value = 0.0;
    std::string regularity_class;
};

// ============================================================================
// Separated radial modes
// ============================================================================

/// One eigenpair of the degree-l radial problem
///   -u'' - (2/r) u' + [l(l+1)/r^2 + q] u = lambda u,  u'(1) + alpha u(1) = 0,
/// L^2-normalized as int_0^1 u^2 r^2 dr = 1.
struct RadialMode {
    int l = 0;
    int k = 0; // 1-based radial index; the mode has k-1 interior zeros
    double lambda = 0.0;
    double boundary_value = 0.0;      // u(1)
    double boundary_derivative = 0.0; // u'(1)
    int interior_zeros = 0;
    std::vector<double> radial_r;
    std::vector<double> radial_values; // u samples on radial_r
};

struct RadialSolveOptions {
    int mesh = 600;           // finite-difference estimation mesh (>= 200)
    bool refine = true;       // polish eigenvalues by Numerov shooting
    int profile_points = 513; // samples kept in RadialMode::radial_values
};

std::vector<RadialMode> solve_radial_modes(const RadialPotential& q, const RobinCoefficient& alpha,
                                           int l, int count,
                                           const RadialSolveOptions& opts = {});

/// All modes with lambda <= lambda_max (possibly none).
std::vector<RadialMode> solve_radial_modes_below(const RadialPotential& q,
                                                 const RobinCoefficient& alpha, int l,
                                                 double lambda_max,
                                                 const RadialSolveOptions& opts = {});

// ============================================================================
// Boundary spectral data assembly
// ============================================================================

struct AssembleOptions {
    RadialSolveOptions solver;
    int threads = 1;
};

/// Merges every mode with lambda <= lambda_max across degrees 0..l_max into a
/// single non-decreasing list, expanding each (l, k) pair into its 2l+1
/// azimuthal entries with trace coefficient u(1). Raises CapError when the
/// top degree still reaches below the cutoff.
BoundarySpectralData assemble_bsd(const RadialPotential& q, const RobinCoefficient& alpha,
                                  int l_max, double lambda_max,
                                  const AssembleOptions& opts = {});

} // namespace bsrlab
