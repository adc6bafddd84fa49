#include "bsrlab/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "bsrlab/errors.hpp"

namespace bsrlab {

namespace {

// entries of `bsd` with eigenvalue at or below the cap (entries are sorted)
std::size_t count_below(const BoundarySpectralData& bsd, double cap) {
    std::size_t n = 0;
    while (n < bsd.size() && bsd.entries[n].lambda <= cap) ++n;
    return n;
}

int shared_degree(const BoundarySpectralData& a, const BoundarySpectralData& b,
                  std::size_t count) {
    int lmax = 0;
    for (std::size_t i = 0; i < count; ++i)
        lmax = std::max({lmax, a.entries[i].l, b.entries[i].l});
    return lmax;
}

void check_pairable(const BoundarySpectralData& bsd, const BoundarySpectralData& bsd_tilde,
                    double lambda_cap) {
    if (std::abs(bsd.alpha - bsd_tilde.alpha) > 1e-12)
        throw PairingError("series: Robin coefficients differ between the two data sets");
    if (lambda_cap > std::min(bsd.lambda_max, bsd_tilde.lambda_max) * (1.0 + 1e-12))
        throw ConfigError("series: lambda_cap exceeds the guaranteed range of the data");
}

// bound on |d_n| for an unknown trace: the uniform-in-tau pairing bound
// C (1+alpha) ||psi_n||_{H^m} applied to both factors
double dn_bound(const SpectralEntry& e, double alpha, double c, int m) {
    const double nrm = hs_norm_single(e.boundary_value, e.l, static_cast<double>(m));
    const double one = c * (1.0 + std::abs(alpha)) * nrm;
    return one * one;
}

} // namespace

SeriesEvaluation s_star_series(const BoundarySpectralData& bsd,
                               const BoundarySpectralData& bsd_tilde,
                               const FrequencyProbe& probe, double lambda_cap,
                               const SeriesOptions& opts) {
    check_pairable(bsd, bsd_tilde, lambda_cap);

    SeriesEvaluation ev;
    ev.probe = probe;
    ev.cap_warning = lambda_cap < opts.cap_factor * probe.tau * probe.tau;

    const std::size_t count = count_below(bsd, lambda_cap);
    if (count > bsd_tilde.size())
        throw PairingError("series: mismatched data lengths (need " + std::to_string(count) +
                           " paired entries)");

    const int lmax = shared_degree(bsd, bsd_tilde, count);
    PairingEngine engine(probe, bsd.alpha, lmax);
    const int m = static_cast<int>(std::ceil(opts.sobolev_s)) + 1;

    const Complex lam_tau = probe.lambda;
    for (std::size_t i = 0; i < count; ++i) {
        const auto& e = bsd.entries[i];
        const auto& et = bsd_tilde.entries[i];
        const Complex den1 = e.lambda - lam_tau;
        const Complex den2 = et.lambda - lam_tau;
        if (e.trace_known && et.trace_known) {
            const Complex d = engine.dn(e);
            const Complex dt = engine.dn(et);
            ev.sum1 += (d - dt) / den1;
            ev.sum2 += (et.lambda - e.lambda) * dt / (den1 * den2);
        } else {
            const double bn = dn_bound(e, bsd.alpha, opts.vdc_constant, m);
            const double bt = dn_bound(et, bsd.alpha, opts.vdc_constant, m);
            ev.excluded_bound += (bn + bt) / std::abs(den1) +
                                 std::abs(et.lambda - e.lambda) * bt /
                                     (std::abs(den1) * std::abs(den2));
        }
    }
    ev.n_used = static_cast<int>(count);
    ev.tail_bound = tail_bound(bsd, bsd_tilde, probe, lambda_cap, opts);
    return ev;
}

double u_series_norm(const BoundarySpectralData& bsd, const GoTrace& trace, Complex lambda) {
    PairingEngine engine(trace.probe, trace.alpha, bsd.max_degree());
    double acc = 0.0;
    for (const auto& e : bsd.entries) {
        const Complex c = (trace.kind == TraceKind::g) ? engine.pair_g(e) : engine.pair_h(e);
        acc += std::norm(c) / std::norm(e.lambda - lambda);
    }
    return std::sqrt(acc);
}

double tail_bound(const BoundarySpectralData& bsd, const BoundarySpectralData& bsd_tilde,
                  const FrequencyProbe& probe, double lambda_cap, const SeriesOptions& opts) {
    (void)opts;
    check_pairable(bsd, bsd_tilde, lambda_cap);
    const std::size_t shared = std::min(bsd.size(), bsd_tilde.size());

    double lambda1 = 0.0;
    for (std::size_t i = 0; i < shared; ++i)
        lambda1 = std::max(lambda1,
                           std::abs(bsd.entries[i].lambda - bsd_tilde.entries[i].lambda));

    const std::size_t n_tail = count_below(bsd, lambda_cap);
    double lambda_n = 0.0;
    for (std::size_t i = n_tail; i < shared; ++i)
        lambda_n = std::max(lambda_n,
                            std::abs(bsd.entries[i].lambda - bsd_tilde.entries[i].lambda));
    if (n_tail >= shared) lambda_n = lambda1; // no tail data: fall back on the sup

    if (lambda_n == 0.0) return 0.0;

    const Complex lam_tau = probe.lambda;
    const double front = 1.0 + lambda1 / (2.0 * probe.tau);

    // Cauchy-Schwarz over the in-data tail, with the perturbed traces
    PairingEngine engine(probe, bsd.alpha, bsd_tilde.max_degree());
    double ug2 = 0.0, uh2 = 0.0;
    for (std::size_t i = n_tail; i < shared; ++i) {
        const auto& et = bsd_tilde.entries[i];
        const double den = std::norm(et.lambda - lam_tau);
        ug2 += std::norm(engine.pair_g(et)) / den;
        uh2 += std::norm(engine.pair_h(et)) / den;
    }
    double bound = front * std::sqrt(ug2) * std::sqrt(uh2) * lambda_n;

    // crude remainder beyond the data: Weyl-growth extrapolation of the
    // pairing energy density against |lambda - lambda_tau|^2
    const double lam_data = std::min(bsd.lambda_max, bsd_tilde.lambda_max);
    double e_top = 0.0;
    std::size_t band = 0;
    for (std::size_t i = 0; i < shared; ++i) {
        const auto& et = bsd_tilde.entries[i];
        if (et.lambda > 0.7 * lam_data && et.lambda <= lam_data) {
            e_top += std::abs(engine.dn(et));
            ++band;
        }
    }
    if (band > 0 && e_top > 0.0) {
        const double density = e_top / (0.3 * lam_data);
        const double a = probe.tau * probe.tau - 1.0;
        const double four_tau2 = 4.0 * probe.tau * probe.tau;
        const double lam_big = std::max({4.0 * lam_data, 4.0 * a, 100.0});
        const double head = adaptive_simpson(
            [&](double lam) {
                return std::sqrt(lam / lam_data) / ((lam - a) * (lam - a) + four_tau2);
            },
            lam_data, lam_big, 1e-12);
        const double tail_int = 2.0 / (std::sqrt(lam_big) * std::sqrt(lam_data));
        bound += front * lambda_n * density * (head + tail_int);
    }
    return bound;
}

RhoHatResult rho_hat_at(const BoundarySpectralData& bsd, const BoundarySpectralData& bsd_tilde,
                        const Vec3& xi, const std::vector<double>& tau_ladder, double lambda_cap,
                        const SeriesOptions& opts) {
    if (tau_ladder.size() < 2)
        throw std::invalid_argument("rho_hat_at: tau ladder needs at least two points");
    for (std::size_t i = 0; i < tau_ladder.size(); ++i) {
        if (tau_ladder[i] <= 0.5 * xi.norm())
            throw std::invalid_argument("rho_hat_at: every tau must exceed |xi|/2");
        if (i > 0 && tau_ladder[i] <= tau_ladder[i - 1])
            throw std::invalid_argument("rho_hat_at: tau ladder must be increasing");
    }

    RhoHatResult res;
    res.taus = tau_ladder;
    for (double tau : tau_ladder) {
        const auto ev = s_star_series(bsd, bsd_tilde, make_probe(xi, tau), lambda_cap, opts);
        res.series_values.push_back(ev.total());
        res.excluded_bounds.push_back(ev.excluded_bound);
        if (tau == tau_ladder.back()) {
            res.tail_term = ev.tail_bound;
            res.excluded_term = ev.excluded_bound;
        }
    }

    // remove the leading 1/tau error: f(tau) = f_inf + a/tau
    const std::size_t n = tau_ladder.size();
    const double t1 = tau_ladder[n - 2], t2 = tau_ladder[n - 1];
    const Complex f1 = res.series_values[n - 2], f2 = res.series_values[n - 1];
    res.value = (t2 * f2 - t1 * f1) / (t2 - t1);
    res.extrapolation_term = std::abs(f2 - res.value);
    res.error_estimate = res.extrapolation_term + res.tail_term + res.excluded_term;
    return res;
}

Complex fourier_oracle_radial(const std::function<double(double)>& rho, const Vec3& xi) {
    const double k = xi.norm();
    auto sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; };
    const double val = adaptive_simpson(
        [&](double r) { return rho(r) * sinc(k * r) * r * r; }, 0.0, 1.0, 1e-13);
    return Complex(4.0 * M_PI * val, 0.0);
}

Complex fourier_oracle_radial(const RadialPotential& q, const RadialPotential& q_tilde,
                              const Vec3& xi) {
    return fourier_oracle_radial(
        [&](double r) { return q_tilde.value_at(r) - q.value_at(r); }, xi);
}

// ----------------------------------------------------------------------------
// Truncated inversion
// ----------------------------------------------------------------------------

std::size_t FourierField::index(int i, int j, int k) const {
    const int K = half_extent;
    const std::size_t side = 2 * K + 1;
    return (static_cast<std::size_t>(i + K) * side + (j + K)) * side + (k + K);
}

Vec3 FourierField::xi_at(int i, int j, int k) const {
    return Vec3(i * dxi, j * dxi, k * dxi);
}

FourierField reconstruct_field(const BoundarySpectralData& bsd,
                               const BoundarySpectralData& bsd_tilde, double delta,
                               const GridSpec& grid, const ReconstructOptions& opts) {
    if (!(delta > 0.0)) throw ValidationError("reconstruct_field: delta must be positive");
    if (!(grid.dxi > 0.0) || grid.dxi > M_PI / 2.0 + 1e-12)
        throw ValidationError("reconstruct_field: degenerate grid (need 0 < dxi <= pi/2)");
    if (opts.tau_ladder.size() < 2)
        throw std::invalid_argument("reconstruct_field: tau ladder needs two points");

    FourierField field;
    field.delta = delta;
    field.dxi = grid.dxi;
    field.r_cut = grid.r_cut_override.value_or(std::pow(delta, -0.4));
    field.half_extent = static_cast<int>(std::floor(field.r_cut / grid.dxi + 1e-12));

    const double tau_max = opts.tau_ladder.back();
    double cap = opts.lambda_cap;
    const double data_cap = std::min(bsd.lambda_max, bsd_tilde.lambda_max);
    if (cap <= 0.0) cap = std::min(4.0 * tau_max * tau_max, data_cap);

    const int K = field.half_extent;
    const std::size_t side = 2 * K + 1;
    field.rho_hat.assign(side * side * side, Complex(0.0));
    field.error_estimate.assign(side * side * side, 0.0);

    // Hermitian halving: evaluate the lexicographically nonnegative half,
    // mirror the conjugate onto -xi.
    struct Task {
        int i, j, k;
    };
    std::vector<Task> tasks;
    for (int i = 0; i <= K; ++i)
        for (int j = (i == 0 ? 0 : -K); j <= K; ++j)
            for (int k = ((i == 0 && j == 0) ? 0 : -K); k <= K; ++k) {
                if (field.xi_at(i, j, k).norm() > field.r_cut + 1e-12) continue;
                tasks.push_back({i, j, k});
            }

    std::vector<Complex> values(tasks.size());
    std::vector<double> errs(tasks.size()), tails(tasks.size()), excls(tasks.size()),
        extraps(tasks.size());
    std::vector<std::string> failures(tasks.size());
    parallel_for(tasks.size(), opts.threads, [&](std::size_t t) {
        try {
            const auto& tk = tasks[t];
            auto res = rho_hat_at(bsd, bsd_tilde, field.xi_at(tk.i, tk.j, tk.k), opts.tau_ladder,
                                  cap, opts.series);
            values[t] = res.value;
            errs[t] = res.error_estimate;
            tails[t] = res.tail_term;
            excls[t] = res.excluded_term;
            extraps[t] = res.extrapolation_term;
        } catch (const std::exception& ex) {
            failures[t] = ex.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty()) throw NumericError("reconstruct_field: " + f);

    for (std::size_t t = 0; t < tasks.size(); ++t) {
        const auto& tk = tasks[t];
        Complex v = values[t];
        if (tk.i == 0 && tk.j == 0 && tk.k == 0) v = Complex(v.real(), 0.0);
        field.rho_hat[field.index(tk.i, tk.j, tk.k)] = v;
        field.rho_hat[field.index(-tk.i, -tk.j, -tk.k)] = std::conj(v);
        field.error_estimate[field.index(tk.i, tk.j, tk.k)] = errs[t];
        field.error_estimate[field.index(-tk.i, -tk.j, -tk.k)] = errs[t];
        field.max_tail = std::max(field.max_tail, tails[t]);
        field.max_excluded = std::max(field.max_excluded, excls[t]);
        field.max_extrapolation = std::max(field.max_extrapolation, extraps[t]);
    }
    return field;
}

double h_minus1_norm(const FourierField& field) {
    const int K = field.half_extent;
    double acc = 0.0;
    for (int i = -K; i <= K; ++i)
        for (int j = -K; j <= K; ++j)
            for (int k = -K; k <= K; ++k) {
                const Complex v = field.rho_hat[field.index(i, j, k)];
                if (v == Complex(0.0)) continue;
                const double xi2 = field.xi_at(i, j, k).squaredNorm();
                acc += std::norm(v) / (1.0 + xi2);
            }
    const double cell = std::pow(field.dxi, 3) / std::pow(2.0 * M_PI, 3);
    return std::sqrt(acc * cell);
}

void synthesize_real_field(FourierField& field, int points_per_axis) {
    if (points_per_axis < 2) throw std::invalid_argument("synthesize_real_field: need >= 2 points");
    const int K = field.half_extent;
    field.real_points.clear();
    field.real_field.clear();
    const double cell = std::pow(field.dxi, 3) / std::pow(2.0 * M_PI, 3);
    for (int a = 0; a < points_per_axis; ++a)
        for (int b = 0; b < points_per_axis; ++b)
            for (int c = 0; c < points_per_axis; ++c) {
                const Vec3 x(-1.0 + 2.0 * a / (points_per_axis - 1.0),
                             -1.0 + 2.0 * b / (points_per_axis - 1.0),
                             -1.0 + 2.0 * c / (points_per_axis - 1.0));
                Complex acc = 0.0;
                for (int i = -K; i <= K; ++i)
                    for (int j = -K; j <= K; ++j)
                        for (int k = -K; k <= K; ++k) {
                            const Complex v = field.rho_hat[field.index(i, j, k)];
                            if (v == Complex(0.0)) continue;
                            acc += v * std::exp(Complex(0, field.xi_at(i, j, k).dot(x)));
                        }
                field.real_points.push_back(x);
                field.real_field.push_back(acc.real() * cell);
            }
}

void write_field_csv(const FourierField& field, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("write_field_csv: cannot open " + tmp);
        out << "xi1,xi2,xi3,re_rho_hat,im_rho_hat\n";
        const int K = field.half_extent;
        for (int i = -K; i <= K; ++i)
            for (int j = -K; j <= K; ++j)
                for (int k = -K; k <= K; ++k) {
                    const Vec3 xi = field.xi_at(i, j, k);
                    if (xi.norm() > field.r_cut + 1e-12) continue;
                    const Complex v = field.rho_hat[field.index(i, j, k)];
                    out << format_float(xi.x()) << ',' << format_float(xi.y()) << ','
                        << format_float(xi.z()) << ',' << format_float(v.real()) << ','
                        << format_float(v.imag()) << '\n';
                }
    }
    std::filesystem::rename(tmp, path);
}

void write_field_report_json(const FourierField& field, const std::string& path) {
    nlohmann::json doc;
    doc["delta"] = field.delta;
    doc["r_cut"] = field.r_cut;
    doc["h_minus1"] = h_minus1_norm(field);
    doc["error_budget"] = {{"tail", field.max_tail},
                           {"excluded", field.max_excluded},
                           {"extrapolation", field.max_extrapolation}};
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("write_field_report_json: cannot open " + tmp);
        out << doc.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

} // namespace bsrlab
