#include "bsrlab/radial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bsrlab/errors.hpp"
#include "bsrlab/numeric.hpp"

namespace bsrlab {

// ============================================================================
// RadialPotential
// ============================================================================

RadialPotential::RadialPotential(std::vector<double> grid, std::vector<double> values,
                                 double budget, std::string kind,
                                 std::map<std::string, double> params)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      budget_(budget),
      kind_(std::move(kind)),
      params_(std::move(params)) {
    if (grid_.size() < 2 || grid_.size() != values_.size())
        throw ConfigError("RadialPotential: need matching grid/value arrays of size >= 2");
    if (budget_ <= 0.0) throw ConfigError("RadialPotential: norm budget must be positive");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!std::isfinite(grid_[i]) || !std::isfinite(values_[i]))
            throw ConfigError("RadialPotential: non-finite data");
        if (i > 0 && grid_[i] <= grid_[i - 1])
            throw ConfigError("RadialPotential: radii must be strictly increasing");
    }
    if (grid_.front() > 1e-12 || std::abs(grid_.back() - 1.0) > 1e-12)
        throw ConfigError("RadialPotential: grid must span [0, 1]");

    const double h0 = (grid_.back() - grid_.front()) / (grid_.size() - 1);
    uniform_ = true;
    for (std::size_t i = 1; i < grid_.size(); ++i)
        if (std::abs(grid_[i] - grid_[i - 1] - h0) > 1e-10 * std::max(1.0, h0)) {
            uniform_ = false;
            break;
        }

    // L^sigma norm over the ball, sigma = 2, and the pointwise minimum
    const int fine = 4096;
    std::vector<double> integrand(fine + 1);
    min_value_ = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= fine; ++i) {
        const double r = static_cast<double>(i) / fine;
        const double v = value_at(r);
        integrand[i] = v * v * r * r;
        min_value_ = std::min(min_value_, v);
    }
    norm_ = std::sqrt(4.0 * M_PI * composite_simpson(integrand, 1.0 / fine));
    if (norm_ > budget_ * (1.0 + 1e-12))
        throw ConfigError("RadialPotential: L^sigma norm " + format_float(norm_) +
                          " exceeds budget " + format_float(budget_));
}

double RadialPotential::value_at(double r) const {
    r = std::clamp(r, 0.0, 1.0);
    const std::size_t n = grid_.size();
    if (n < 4 || !uniform_) {
        auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
        std::size_t hi = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - grid_.begin(), 1), n - 1);
        const double t = (r - grid_[hi - 1]) / (grid_[hi] - grid_[hi - 1]);
        return (1.0 - t) * values_[hi - 1] + t * values_[hi];
    }
    // 4-point Lagrange on the uniform grid
    const double h = 1.0 / (n - 1);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(r / h), n - 2);
    std::size_t i0 = (i == 0) ? 0 : std::min(i - 1, n - 4);
    const double t = (r - grid_[i0]) / h;
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b)
            if (a != b) w *= (t - b) / (a - b);
        acc += w * values_[i0 + a];
    }
    return acc;
}

RadialPotential RadialPotential::zero(double budget) {
    return constant(0.0, budget);
}

RadialPotential RadialPotential::constant(double value, double budget) {
    return RadialPotential({0.0, 0.5, 1.0}, {value, value, value}, budget, "constant",
                           {{"value", value}});
}

RadialPotential RadialPotential::gaussian_bump(double amplitude, double width, double budget,
                                               int samples) {
    if (width <= 0.0) throw ConfigError("RadialPotential: width must be positive");
    std::vector<double> r = linspace(0.0, 1.0, samples);
    std::vector<double> v(samples);
    for (int i = 0; i < samples; ++i) v[i] = amplitude * std::exp(-(r[i] / width) * (r[i] / width));
    return RadialPotential(std::move(r), std::move(v), budget, "gaussian_bump",
                           {{"amplitude", amplitude}, {"width", width}});
}

RadialPotential RadialPotential::from_samples(std::vector<double> radii,
                                              std::vector<double> values, double budget) {
    return RadialPotential(std::move(radii), std::move(values), budget, "samples", {});
}

RadialPotential RadialPotential::from_function(const std::function<double(double)>& f, int samples,
                                               double budget) {
    std::vector<double> r = linspace(0.0, 1.0, samples);
    std::vector<double> v(samples);
    for (int i = 0; i < samples; ++i) v[i] = f(r[i]);
    return RadialPotential(std::move(r), std::move(v), budget, "sampled_function", {});
}

RobinCoefficient::RobinCoefficient(double alpha, std::string regularity)
    : value(alpha), regularity_class(std::move(regularity)) {
    if (!std::isfinite(alpha) || alpha < 0.0)
        throw ConfigError("RobinCoefficient: alpha must be finite and >= 0");
}

// ============================================================================
// Finite-difference estimation (Liouville transform v = r u)
// ============================================================================
//
// v solves -v'' + [l(l+1)/r^2 + q] v = lambda v with v(0) = 0 and
// v'(1) + (alpha - 1) v(1) = 0. P1 elements with lumped mass on the uniform
// mesh r_i = i h give a generalized symmetric pencil whose similarity
// reduction is tridiagonal; the half boundary cell carries the Robin term.

namespace {

std::vector<double> fd_eigenvalues(const RadialPotential& q, double alpha, int l, int mesh) {
    const double h = 1.0 / mesh;
    const double abar = alpha - 1.0;
    Eigen::VectorXd diag(mesh);
    Eigen::VectorXd sub(mesh - 1);
    for (int i = 1; i <= mesh; ++i) {
        const double r = i * h;
        const double w = l * (l + 1.0) / (r * r) + q.value_at(r);
        if (i < mesh)
            diag[i - 1] = 2.0 / (h * h) + w;
        else
            diag[i - 1] = 2.0 / (h * h) + 2.0 * abar / h + w;
    }
    for (int i = 0; i < mesh - 1; ++i) sub[i] = -1.0 / (h * h);
    sub[mesh - 2] = -std::sqrt(2.0) / (h * h);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericError("radial solver: tridiagonal eigendecomposition failed");
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + mesh);
    return out;
}

struct ShotResult {
    double y1 = 0.0;       // v(1)
    double yp1 = 0.0;      // v'(1)
    int sign_changes = 0;  // interior zeros of v
    double norm2 = 0.0;    // int_0^1 v^2 dr (of the raw, unnormalized shot)
};

// Numerov march of v'' = (W - lambda) v from the origin, with a series start
// v ~ r^(l+1) (1 + a2 r^2 + a4 r^4) where the centrifugal term dominates.
// The march runs in long double: with ~5k steps the double-precision
// roundoff walk is what limits the lowest eigenvalues, not truncation.
ShotResult numerov_shoot(const RadialPotential& q, int l, double lambda, int n,
                         std::vector<double>* store) {
    using LD = long double;
    const LD h = LD(1.0) / n;
    const double q0 = q.value_at(0.0);
    const LD a2 = (LD(q0) - LD(lambda)) / (4.0 * l + 6.0);
    const LD a4 = (LD(q0) - LD(lambda)) * a2 / (8.0 * l + 20.0);
    auto series = [&](LD r) { return LD(1.0) + a2 * r * r + a4 * r * r * r * r; };

    int m0 = 0; // first marching node index
    std::vector<LD> y(n + 1, LD(0.0));
    if (l == 0) {
        y[1] = h * series(h);
    } else {
        m0 = std::max(2, static_cast<int>(std::ceil(std::sqrt(l * (l + 1.0) / 0.6))));
        if (m0 + 4 >= n) throw NumericError("radial solver: shooting grid too coarse for degree");
        const LD r0 = m0 * h;
        y[m0] = series(r0);
        y[m0 + 1] = std::pow((r0 + h) / r0, LD(l + 1.0)) * series(r0 + h);
    }

    auto fval = [&](int i) -> LD {
        const double r = static_cast<double>(i) / n;
        const LD cf = (i == 0) ? LD(0.0) : LD(l) * (l + 1.0) / (LD(r) * LD(r));
        return cf + LD(q.value_at(r)) - LD(lambda);
    };

    const LD h2_12 = h * h / 12.0;
    const int start = m0;
    LD t_prev = h2_12 * fval(start);
    LD t_curr = h2_12 * fval(start + 1);
    for (int i = start + 1; i < n; ++i) {
        const LD t_next = h2_12 * fval(i + 1);
        y[i + 1] = ((2.0 + 10.0 * t_curr) * y[i] - (1.0 - t_prev) * y[i - 1]) / (1.0 - t_next);
        t_prev = t_curr;
        t_curr = t_next;
        if (!std::isfinite(static_cast<double>(y[i + 1])))
            throw NumericError("radial solver: shooting overflow (degree too high for grid)");
    }

    ShotResult res;
    res.y1 = static_cast<double>(y[n]);
    // One-sided derivative with y'' = f y folded in: O(h^4) truncation on a
    // 3-node stencil.
    res.yp1 = static_cast<double>((y[n] - y[n - 2]) / (2.0 * h) +
                                  (h / 3.0) * (fval(n) * y[n] + 2.0 * fval(n - 1) * y[n - 1]));

    for (int i = std::max(start, 1); i < n; ++i)
        if (y[i] != 0.0 && y[i + 1] != 0.0 && std::signbit(static_cast<double>(y[i])) !=
                                                  std::signbit(static_cast<double>(y[i + 1])))
            ++res.sign_changes;

    // squared norm: series part on [0, r0] plus Simpson over the march
    double norm = 0.0;
    if (start > 0) {
        const double r0 = static_cast<double>(start) / n;
        const int ns = 32;
        std::vector<double> seg(ns + 1);
        for (int i = 0; i <= ns; ++i) {
            const double r = r0 * i / ns;
            const double vv = std::pow(r / r0, l + 1.0) * static_cast<double>(series(LD(r)));
            seg[i] = vv * vv;
        }
        norm += composite_simpson(seg, r0 / ns);
    }
    {
        std::vector<double> seg(n + 1 - start);
        for (int i = start; i <= n; ++i) {
            const double v = static_cast<double>(y[i]);
            seg[i - start] = v * v;
        }
        norm += composite_simpson(seg, static_cast<double>(h));
    }
    res.norm2 = norm;

    if (store) {
        store->resize(n + 1);
        for (int i = 0; i <= n; ++i) (*store)[i] = static_cast<double>(y[i]);
    }
    return res;
}

double robin_residual(const ShotResult& s, double alpha) {
    const double scale = std::max({std::abs(s.y1), std::abs(s.yp1), 1e-300});
    return (s.yp1 + (alpha - 1.0) * s.y1) / scale;
}

// Safeguarded secant/bisection root polish for F on a sign-changing bracket.
template <typename F>
double refine_root(F&& f, double a, double b, double fa, double fb) {
    double best = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        const double tol = 1e-13 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
        if (std::abs(b - a) <= tol) break;
        double c;
        const double denom = fb - fa;
        if (denom != 0.0) {
            c = b - fb * (b - a) / denom; // secant
            const double lo = std::min(a, b), hi = std::max(a, b);
            const double guard = 0.01 * (hi - lo);
            if (!(c > lo + guard && c < hi - guard)) c = 0.5 * (a + b);
        } else {
            c = 0.5 * (a + b);
        }
        const double fc = f(c);
        best = c;
        if (fc == 0.0) return c;
        if (std::signbit(fc) != std::signbit(fa)) {
            b = c;
            fb = fc;
        } else {
            a = c;
            fa = fc;
        }
    }
    return best;
}

int numerov_steps(double lambda_top, int profile_points) {
    const int block = std::max(2, profile_points - 1);
    const double k = std::sqrt(std::max(1.0, lambda_top));
    int n = std::max(4096, static_cast<int>(std::ceil(80.0 * k)));
    n = ((n + block - 1) / block) * block;
    if (n % 2 == 1) n *= 2;
    return n;
}

std::vector<RadialMode> build_modes(const RadialPotential& q, const RobinCoefficient& alpha, int l,
                                    const std::vector<double>& fd, std::size_t count,
                                    const RadialSolveOptions& opts, int mesh_used) {
    std::vector<RadialMode> modes;
    if (count == 0) return modes;
    const double lambda_top = fd[count - 1];
    const int n = numerov_steps(lambda_top, opts.profile_points);
    const double h_fd = 1.0 / mesh_used;

    for (std::size_t k = 0; k < count; ++k) {
        double lam = fd[k];
        int zeros = -1;
        if (opts.refine) {
            auto F = [&](double x) {
                return robin_residual(numerov_shoot(q, l, x, n, nullptr), alpha.value);
            };
            // bracket around the estimate, capped at midpoints to the neighbors
            const double lo_lim = (k == 0) ? lam - std::max(10.0, 0.5 * std::abs(lam))
                                           : 0.5 * (fd[k - 1] + lam);
            const double hi_lim = (k + 1 < fd.size()) ? 0.5 * (lam + fd[k + 1])
                                                      : lam + std::max(10.0, 0.5 * std::abs(lam));
            double e = std::max({1e-7 * std::max(1.0, std::abs(lam)),
                                 std::abs(lam) * std::max(1.0, lam) * h_fd * h_fd / 6.0, 1e-9});
            double a = lam, b = lam, fa = F(lam), fb = fa;
            bool bracketed = false;
            for (int grow = 0; grow < 60 && !bracketed; ++grow) {
                a = std::max(lo_lim, lam - e);
                b = std::min(hi_lim, lam + e);
                fa = F(a);
                fb = F(b);
                bracketed = std::signbit(fa) != std::signbit(fb);
                if (a == lo_lim && b == hi_lim) break;
                e *= 2.0;
            }
            if (!bracketed)
                throw NumericError("radial solver: failed to bracket eigenvalue at l=" +
                                   std::to_string(l) + " k=" + std::to_string(k + 1));
            lam = refine_root(F, a, b, fa, fb);
        }

        std::vector<double> y;
        ShotResult shot = numerov_shoot(q, l, lam, n, &y);
        zeros = shot.sign_changes;
        if (opts.refine && zeros != static_cast<int>(k))
            throw NumericError("radial solver: oscillation count mismatch at l=" +
                               std::to_string(l) + " k=" + std::to_string(k + 1) + " (got " +
                               std::to_string(zeros) + " zeros)");

        const double scale = 1.0 / std::sqrt(shot.norm2);
        RadialMode mode;
        mode.l = l;
        mode.k = static_cast<int>(k) + 1;
        mode.lambda = lam;
        mode.boundary_value = shot.y1 * scale; // u(1) = v(1)/1
        mode.boundary_derivative = (shot.yp1 - shot.y1) * scale;
        mode.interior_zeros = zeros;

        const int pts = opts.profile_points;
        const int stride = n / (pts - 1);
        mode.radial_r.resize(pts);
        mode.radial_values.resize(pts);
        const double q0 = q.value_at(0.0);
        const double a2 = (q0 - lam) / (4.0 * l + 6.0);
        const double a4 = (q0 - lam) * a2 / (8.0 * l + 20.0);
        const int m0 = (l == 0) ? 0 : std::max(2, static_cast<int>(std::ceil(std::sqrt(l * (l + 1.0) / 0.6))));
        const double r0 = m0 / static_cast<double>(n);
        for (int j = 0; j < pts; ++j) {
            const int gi = j * stride;
            const double r = gi / static_cast<double>(n);
            mode.radial_r[j] = r;
            double u;
            if (gi == 0) {
                // l = 0 marches v = r (1 + ...), so u(0) = v'(0) = 1 before scaling
                u = (l == 0) ? scale : 0.0;
            } else if (gi < m0) {
                const double v = std::pow(r / r0, l + 1.0) * (1.0 + a2 * r * r + a4 * std::pow(r, 4));
                u = scale * v / r;
            } else {
                u = scale * y[gi] / r;
            }
            mode.radial_values[j] = u;
        }
        modes.push_back(std::move(mode));
    }
    return modes;
}

int effective_mesh(const RadialSolveOptions& opts, double lambda_hint, std::size_t count) {
    int mesh = opts.mesh;
    mesh = std::max(mesh, static_cast<int>(8 * count) + 100);
    mesh = std::max(mesh, static_cast<int>(std::ceil(10.0 * std::sqrt(std::max(1.0, lambda_hint)))));
    return mesh;
}

} // namespace

std::vector<RadialMode> solve_radial_modes(const RadialPotential& q, const RobinCoefficient& alpha,
                                           int l, int count, const RadialSolveOptions& opts) {
    if (count < 1) throw std::invalid_argument("solve_radial_modes: count must be >= 1");
    if (opts.mesh < 200) throw std::invalid_argument("solve_radial_modes: mesh must be >= 200");
    if (l < 0) throw std::invalid_argument("solve_radial_modes: degree must be >= 0");

    int mesh = effective_mesh(opts, 0.0, count);
    std::vector<double> fd = fd_eigenvalues(q, alpha.value, l, mesh);
    const int mesh2 = effective_mesh(opts, fd[count - 1], count);
    if (mesh2 > mesh) {
        mesh = mesh2;
        fd = fd_eigenvalues(q, alpha.value, l, mesh);
    }
    fd.resize(std::min<std::size_t>(fd.size(), count + 1));
    return build_modes(q, alpha, l, fd, count, opts, mesh);
}

std::vector<RadialMode> solve_radial_modes_below(const RadialPotential& q,
                                                 const RobinCoefficient& alpha, int l,
                                                 double lambda_max,
                                                 const RadialSolveOptions& opts) {
    if (opts.mesh < 200) throw std::invalid_argument("solve_radial_modes: mesh must be >= 200");
    int mesh = effective_mesh(opts, lambda_max, 0);
    std::vector<double> fd = fd_eigenvalues(q, alpha.value, l, mesh);
    std::size_t count = 0;
    while (count < fd.size() && fd[count] <= lambda_max) ++count;
    if (count == 0) return {};
    mesh = effective_mesh(opts, lambda_max, count);
    fd = fd_eigenvalues(q, alpha.value, l, mesh);
    count = 0;
    while (count < fd.size() && fd[count] <= lambda_max) ++count;
    fd.resize(std::min(fd.size(), count + 1));
    return build_modes(q, alpha, l, fd, count, opts, mesh);
}

BoundarySpectralData assemble_bsd(const RadialPotential& q, const RobinCoefficient& alpha,
                                  int l_max, double lambda_max, const AssembleOptions& opts) {
    if (l_max < 0) throw std::invalid_argument("assemble_bsd: l_max must be >= 0");
    if (lambda_max <= 0.0) throw std::invalid_argument("assemble_bsd: lambda_max must be positive");

    std::vector<std::vector<RadialMode>> per_l(l_max + 1);
    std::vector<std::string> failures(l_max + 1);
    parallel_for(static_cast<std::size_t>(l_max) + 1, opts.threads, [&](std::size_t l) {
        try {
            per_l[l] = solve_radial_modes_below(q, alpha, static_cast<int>(l), lambda_max,
                                                opts.solver);
        } catch (const std::exception& ex) {
            failures[l] = ex.what();
        }
    });
    for (int l = 0; l <= l_max; ++l)
        if (!failures[l].empty())
            throw NumericError("assemble_bsd: degree " + std::to_string(l) + ": " + failures[l]);

    if (per_l[0].empty())
        throw ConfigError("assemble_bsd: lambda_max lies below the first eigenvalue");
    if (!per_l[l_max].empty())
        throw CapError("assemble_bsd: degree cap too small, l=" + std::to_string(l_max) +
                           " still has eigenvalues <= lambda_max; raise l_max",
                       l_max);

    BoundarySpectralData bsd;
    bsd.alpha = alpha.value;
    bsd.lambda_max = lambda_max;
    std::size_t mode_count = 0;
    for (int l = 0; l <= l_max; ++l) {
        for (const auto& mode : per_l[l]) {
            ++mode_count;
            for (int m = -l; m <= l; ++m) {
                SpectralEntry e;
                e.lambda = mode.lambda;
                e.l = l;
                e.m = m;
                e.boundary_value = mode.boundary_value;
                bsd.entries.push_back(e);
            }
        }
    }
    std::sort(bsd.entries.begin(), bsd.entries.end(), [](const SpectralEntry& a, const SpectralEntry& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        if (a.l != b.l) return a.l < b.l;
        return a.m < b.m;
    });
    for (std::size_t i = 0; i < bsd.entries.size(); ++i) bsd.entries[i].n = static_cast<int>(i) + 1;

    nlohmann::json pot;
    pot["kind"] = q.kind();
    for (const auto& [k, v] : q.params()) pot[k] = v;
    pot["min_value"] = q.min_value();
    pot["l_sigma_norm"] = q.l_sigma_norm();
    pot["budget"] = q.budget();
    bsd.provenance = nlohmann::json{{"potential", pot},
                                    {"alpha", alpha.value},
                                    {"l_max", l_max},
                                    {"lambda_max", lambda_max},
                                    {"mesh", opts.solver.mesh},
                                    {"refined", opts.solver.refine},
                                    {"solver", "fd+numerov-shooting"},
                                    {"mode_count", mode_count},
                                    {"entry_count", bsd.entries.size()}};
    bsd.validate();
    return bsd;
}

} // namespace bsrlab
