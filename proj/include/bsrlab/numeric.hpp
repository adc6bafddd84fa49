#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bsrlab {

using Complex = std::complex<double>;

// Gauss-Legendre rule on [-1, 1].
struct Quadrature1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

Quadrature1D gauss_legendre(int n);

/// Legendre polynomials P_0..P_lmax at x, written into out (size lmax+1).
void legendre_row(int lmax, double x, double* out);
double legendre_p(int l, double x);

double adaptive_simpson(const std::function<double(double)>& f,
                        double a, double b, double tol, int max_depth = 48);

/// Composite Simpson over uniformly spaced samples (even interval count
/// required; falls back to a trapezoid correction on the last interval
/// when the count is odd).
double composite_simpson(const std::vector<double>& values, double h);

std::vector<double> linspace(double a, double b, int n);
std::vector<double> logspace(double a, double b, int n); // endpoints are values, not exponents

// Least-squares line through (x_i, y_i); returns {slope, intercept}.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Indices of strict local maxima of |values|, endpoints included when they
/// dominate their single neighbor. Used for fitting decay exponents of
/// oscillating magnitudes without zero-crossing artifacts.
std::vector<std::size_t> upper_envelope_indices(const std::vector<double>& values);

/// Log-log slope of the upper envelope of (x, y); y entries below
/// `floor` are ignored. Returns 0 and sets *all_zero when nothing survives.
double envelope_loglog_slope(const std::vector<double>& x,
                             const std::vector<double>& y,
                             double floor = 0.0,
                             bool* all_zero = nullptr);

std::uint64_t fnv1a64(const std::string& data);

/// Formats with 17 significant digits (round-trip exact for binary64).
std::string format_float(double v);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to preallocated, index-disjoint storage so the outcome does not
/// depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

} // namespace bsrlab
