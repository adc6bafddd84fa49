#include "bsrlab/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "bsrlab/errors.hpp"

namespace bsrlab {

namespace {

void check_unit(const Vec3& v, const char* who) {
    if (std::abs(v.norm() - 1.0) > 1e-8)
        throw std::invalid_argument(std::string(who) + ": direction must be a unit vector");
}

// Orthonormal frame (u, v, w) with w = pole.
void frame_from_pole(const Vec3& pole, Vec3& u, Vec3& v) {
    int least = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(pole[i]) < std::abs(pole[least])) least = i;
    Vec3 e = Vec3::Zero();
    e[least] = 1.0;
    u = (e - pole.dot(e) * pole).normalized();
    v = pole.cross(u);
}

SphereQuadrature build_quadrature_impl(int polar_count, int azimuth_count, const Vec3& pole,
                                       bool aligned) {
    if (polar_count < 2) throw std::invalid_argument("build_quadrature: polar_count must be >= 2");
    if (azimuth_count < 4) throw std::invalid_argument("build_quadrature: azimuth_count must be >= 4");

    SphereQuadrature q;
    q.polar_count = polar_count;
    q.azimuth_count = azimuth_count;
    q.l_exact = std::min(polar_count - 1, azimuth_count / 2 - 1);
    q.pole = pole;

    Quadrature1D gl = gauss_legendre(polar_count);
    q.polar_cos = gl.nodes;
    q.polar_weight = gl.weights;

    Vec3 u(1, 0, 0), v(0, 1, 0), w(0, 0, 1);
    if (aligned) {
        w = pole;
        frame_from_pole(pole, u, v);
    }

    const double dphi = 2.0 * M_PI / azimuth_count;
    q.nodes.reserve(static_cast<std::size_t>(polar_count) * azimuth_count);
    q.weights.reserve(q.nodes.capacity());
    for (int i = 0; i < polar_count; ++i) {
        const double ct = gl.nodes[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        const double wring = gl.weights[i] * dphi;
        for (int j = 0; j < azimuth_count; ++j) {
            const double phi = dphi * j;
            const Vec3 p = st * std::cos(phi) * u + st * std::sin(phi) * v + ct * w;
            q.nodes.push_back(p);
            q.weights.push_back(wring);
        }
    }
    return q;
}

// theta-part of the orthonormal harmonic: Y_lm = theta_part(l, m) * e^{i m phi},
// for m >= 0, Condon-Shortley included. Stable diagonal-then-up recurrence.
void theta_column(int lmax, int m, double ct, double st, double* out /* indices m..lmax */) {
    double pmm = 1.0 / std::sqrt(4.0 * M_PI);
    for (int k = 1; k <= m; ++k)
        pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * st;
    out[0] = pmm;
    if (lmax == m) return;
    double pm1 = std::sqrt(2.0 * m + 3.0) * ct * pmm;
    out[1] = pm1;
    double pm2 = pmm;
    for (int l = m + 2; l <= lmax; ++l) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
        const double b = std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) /
                                   (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        const double pl = a * (ct * pm1 - b * pm2);
        out[l - m] = pl;
        pm2 = pm1;
        pm1 = pl;
    }
}

} // namespace

SphereQuadrature build_quadrature(int polar_count, int azimuth_count) {
    return build_quadrature_impl(polar_count, azimuth_count, Vec3(0, 0, 1), false);
}

SphereQuadrature build_quadrature_aligned(int polar_count, int azimuth_count, const Vec3& pole) {
    check_unit(pole, "build_quadrature_aligned");
    return build_quadrature_impl(polar_count, azimuth_count, pole, true);
}

std::vector<Complex> harmonic_table(int lmax, const Vec3& point) {
    check_unit(point, "harmonic_table");
    const double ct = point.z();
    const double st = std::hypot(point.x(), point.y());
    const double phi = (st > 0.0) ? std::atan2(point.y(), point.x()) : 0.0;

    std::vector<Complex> table(harmonic_table_size(lmax));
    std::vector<double> col(lmax + 1);
    for (int m = 0; m <= lmax; ++m) {
        theta_column(lmax, m, ct, st, col.data());
        const Complex phase = std::polar(1.0, m * phi);
        const double parity = (m % 2 == 0) ? 1.0 : -1.0;
        for (int l = m; l <= lmax; ++l) {
            const Complex ylm = col[l - m] * phase;
            table[harmonic_flat_index(l, m)] = ylm;
            if (m > 0) // Y_{l,-m} = (-1)^m conj(Y_{l,m})
                table[harmonic_flat_index(l, -m)] = parity * std::conj(ylm);
        }
    }
    return table;
}

Complex eval_harmonic(const HarmonicIndex& idx, const Vec3& point) {
    if (std::abs(idx.m) > idx.l)
        throw std::invalid_argument("eval_harmonic: |m| must not exceed l");
    auto table = harmonic_table(idx.l, point);
    return table[harmonic_flat_index(idx.l, idx.m)];
}

// ----------------------------------------------------------------------------
// BoundaryFunction
// ----------------------------------------------------------------------------

BoundaryFunction BoundaryFunction::from_coefficients(int lmax, std::vector<Complex> coeffs) {
    if (lmax < 0 || coeffs.size() != harmonic_table_size(lmax))
        throw std::invalid_argument("BoundaryFunction: coefficient vector size must be (lmax+1)^2");
    BoundaryFunction f;
    f.coeff_lmax_ = lmax;
    f.coeffs_ = std::move(coeffs);
    return f;
}

BoundaryFunction BoundaryFunction::from_nodal(std::shared_ptr<const SphereQuadrature> quad,
                                              std::vector<Complex> values) {
    if (!quad || values.size() != quad->size())
        throw std::invalid_argument("BoundaryFunction: nodal size mismatch");
    BoundaryFunction f;
    f.quad_ = std::move(quad);
    f.values_ = std::move(values);
    return f;
}

BoundaryFunction BoundaryFunction::from_function(std::shared_ptr<const SphereQuadrature> quad,
                                                 const std::function<Complex(const Vec3&)>& fn) {
    if (!quad) throw std::invalid_argument("BoundaryFunction: null quadrature");
    std::vector<Complex> values(quad->size());
    for (std::size_t i = 0; i < quad->size(); ++i) values[i] = fn(quad->nodes[i]);
    return from_nodal(std::move(quad), std::move(values));
}

BoundaryFunction BoundaryFunction::harmonic(int l, int m, Complex amp) {
    if (std::abs(m) > l) throw std::invalid_argument("BoundaryFunction::harmonic: |m| > l");
    std::vector<Complex> coeffs(harmonic_table_size(l), Complex(0.0));
    coeffs[harmonic_flat_index(l, m)] = amp;
    return from_coefficients(l, std::move(coeffs));
}

BoundaryFunction BoundaryFunction::constant(Complex value) {
    // f = c * Y_00 with c = value * sqrt(4 pi)
    return from_coefficients(0, {value * std::sqrt(4.0 * M_PI)});
}

const std::vector<Complex>& BoundaryFunction::coefficients() const {
    if (!has_coefficients())
        throw std::logic_error("BoundaryFunction: no coefficient representation; project first");
    return coeffs_;
}

Complex BoundaryFunction::coefficient(int l, int m) const {
    if (l > coeff_lmax_) return 0.0;
    return coefficients()[harmonic_flat_index(l, m)];
}

const std::vector<Complex>& BoundaryFunction::nodal_values() const {
    if (!has_nodal()) throw std::logic_error("BoundaryFunction: no nodal representation");
    return values_;
}

const SphereQuadrature& BoundaryFunction::quadrature() const {
    if (!has_nodal()) throw std::logic_error("BoundaryFunction: no nodal representation");
    return *quad_;
}

void BoundaryFunction::ensure_coefficients(int lmax) {
    if (has_coefficients() && (lmax < 0 || coeff_lmax_ >= lmax)) return;
    if (!has_nodal())
        throw std::logic_error("BoundaryFunction: cannot project without nodal data");
    int target = (lmax < 0) ? quad_->l_exact : std::min(lmax, quad_->l_exact);
    coeffs_.assign(harmonic_table_size(target), Complex(0.0));
    for (std::size_t i = 0; i < quad_->size(); ++i) {
        auto ylm = harmonic_table(target, quad_->nodes[i]);
        const Complex fw = values_[i] * quad_->weights[i];
        for (std::size_t k = 0; k < ylm.size(); ++k)
            coeffs_[k] += fw * std::conj(ylm[k]);
    }
    coeff_lmax_ = target;
}

std::vector<Complex> BoundaryFunction::synthesize(const SphereQuadrature& quad) const {
    const auto& c = coefficients();
    std::vector<Complex> out(quad.size(), Complex(0.0));
    for (std::size_t i = 0; i < quad.size(); ++i) {
        auto ylm = harmonic_table(coeff_lmax_, quad.nodes[i]);
        Complex acc = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * ylm[k];
        out[i] = acc;
    }
    return out;
}

Complex BoundaryFunction::value_at(const Vec3& point) const {
    const auto& c = coefficients();
    auto ylm = harmonic_table(coeff_lmax_, point);
    Complex acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * ylm[k];
    return acc;
}

double hs_norm(const BoundaryFunction& f, double s) {
    if (s < 0.0) throw std::invalid_argument("hs_norm: s must be >= 0");
    BoundaryFunction g = f;
    g.ensure_coefficients();
    const auto& c = g.coefficients();
    double acc = 0.0;
    for (int l = 0; l <= g.coefficient_degree(); ++l) {
        const double w = std::pow(1.0 + l * (l + 1.0), s);
        for (int m = -l; m <= l; ++m)
            acc += w * std::norm(c[harmonic_flat_index(l, m)]);
    }
    return std::sqrt(acc);
}

double hs_norm_single(double amp, int l, double s) {
    return std::abs(amp) * std::pow(1.0 + l * (l + 1.0), 0.5 * s);
}

StationaryPointSet stationary_points(const Vec3& theta) {
    check_unit(theta, "stationary_points");
    StationaryPointSet s;
    s.direction = theta;
    // Height function theta.x on S^2: maximum at +theta (index d-1 = 2),
    // minimum at -theta (index 0); in normal coordinates the Hessians are
    // -I and +I, both with |det| = 1.
    s.points = {theta, -theta};
    s.hessian_indices = {2, 0};
    s.hessian_dets = {1.0, 1.0};
    return s;
}

double c_s_constant(double s, int dim) {
    if (dim < 1) throw std::invalid_argument("c_s_constant: dim must be >= 1");
    if (!(s > 0.5 * dim))
        throw std::domain_error("c_s_constant: integral diverges for s <= dim/2");

    // Reduce to int_0^1 w^(p-1) (1-w)^((dim-2)/2) dw / 2 with w = cos^2(u),
    // p = s - dim/2, scaled by the surface area of S^(dim-1).
    const double p = s - 0.5 * dim;
    const double surf = 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
    const double gexp = 0.5 * (dim - 2.0);

    double integral;
    if (p >= 1.0) {
        integral = adaptive_simpson(
            [&](double w) { return std::pow(w, p - 1.0) * std::pow(1.0 - w, gexp); },
            0.0, 1.0, 1e-12);
    } else {
        // w = y^(1/p) removes the endpoint singularity at w = 0
        integral = adaptive_simpson(
            [&](double y) {
                const double w = std::pow(y, 1.0 / p);
                return std::pow(1.0 - w, gexp) / p;
            },
            0.0, 1.0, 1e-12);
    }
    return surf * 0.5 * integral;
}

} // namespace bsrlab
