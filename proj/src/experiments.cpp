#include "bsrlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bsrlab/errors.hpp"

namespace bsrlab {

namespace {

std::uint64_t fingerprint_of(const nlohmann::json& blob) {
    return fnv1a64(blob.dump());
}

double loo_slope_spread(const std::vector<double>& lx, const std::vector<double>& ly,
                        double full_slope) {
    double spread = 0.0;
    for (std::size_t skip = 0; skip < lx.size(); ++skip) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < lx.size(); ++i)
            if (i != skip) {
                x.push_back(lx[i]);
                y.push_back(ly[i]);
            }
        if (x.size() >= 2) spread = std::max(spread, std::abs(fit_line(x, y).slope - full_slope));
    }
    return spread;
}

} // namespace

SweepResult stability_sweep(const BoundarySpectralData& bsd,
                            const std::vector<double>& delta_ladder,
                            const StabilitySweepOptions& opts) {
    if (delta_ladder.size() < 5)
        throw std::invalid_argument("stability_sweep: need at least five delta points");
    for (std::size_t i = 1; i < delta_ladder.size(); ++i)
        if (delta_ladder[i] >= delta_ladder[i - 1])
            throw std::invalid_argument("stability_sweep: ladder must decrease strictly");
    const double span = delta_ladder.front() / delta_ladder.back();
    if (span < 99.0)
        throw std::invalid_argument("stability_sweep: ladder must span at least two decades");
    for (double d : delta_ladder)
        if (!(d > 0.0)) throw std::invalid_argument("stability_sweep: deltas must be positive");

    SweepResult sweep;
    sweep.kind = "stability";
    sweep.columns = {"delta", "h_minus1", "r_cut",
                     "tail",  "excluded", "extrapolation"};

    ReconstructOptions ropts;
    ropts.tau_ladder = opts.tau_ladder;
    ropts.lambda_cap = opts.lambda_cap;
    ropts.threads = opts.threads;

    std::vector<double> lx, ly;
    for (double delta : delta_ladder) {
        PerturbationSpec spec;
        spec.kind = PerturbationSpec::Kind::Constant;
        spec.amplitude = delta;
        const auto perturbed = perturb_eigenvalues(bsd, spec);
        const auto field = reconstruct_field(bsd, perturbed, delta, opts.grid, ropts);
        const double err = h_minus1_norm(field);
        sweep.rows.push_back({delta, err, field.r_cut, field.max_tail, field.max_excluded,
                              field.max_extrapolation});
        if (err > 0.0) {
            lx.push_back(std::log(delta));
            ly.push_back(std::log(err));
        }
        sweep.bound_constant = std::max(sweep.bound_constant, err / std::pow(delta, 0.4));
    }

    if (lx.size() >= 2) {
        sweep.fitted_slope = fit_line(lx, ly).slope;
        sweep.slope_ci_width = loo_slope_spread(lx, ly, sweep.fitted_slope);
    }

    nlohmann::json cfg{{"kind", "stability"},
                       {"provenance", bsd.provenance},
                       {"deltas", delta_ladder},
                       {"taus", opts.tau_ladder},
                       {"dxi", opts.grid.dxi},
                       {"lambda_cap", opts.lambda_cap}};
    sweep.fingerprint = fingerprint_of(cfg);
    return sweep;
}

void check_incomplete_conditions(double alpha, double q_min, double q_tilde_min) {
    const bool c1 = q_min >= 0.0 && q_tilde_min >= 0.0 && alpha > 0.0;
    const bool c2 = q_min > 0.0 && q_tilde_min > 0.0 && alpha >= 0.0;
    if (c1 || c2) return;
    std::ostringstream msg;
    msg << "incomplete-data conditions violated: need either (c1) q, q~ >= 0 and alpha > 0, "
        << "or (c2) q, q~ > 0 and alpha >= 0; got alpha=" << alpha << ", min q=" << q_min
        << ", min q~=" << q_tilde_min;
    throw ConfigError(msg.str());
}

SweepResult incomplete_sweep(const BoundarySpectralData& bsd,
                             const BoundarySpectralData& bsd_tilde,
                             const std::vector<int>& n0_ladder, const std::vector<Vec3>& xi_probes,
                             const IncompleteSweepOptions& opts) {
    if (n0_ladder.empty() || xi_probes.empty())
        throw std::invalid_argument("incomplete_sweep: empty ladder or probe list");
    for (int n0 : n0_ladder)
        if (n0 < 1 || n0 > 32)
            throw std::invalid_argument("incomplete_sweep: n0 ladder must stay within [1, 32]");

    const double q_min = bsd.provenance.contains("potential")
                             ? bsd.provenance["potential"].value("min_value", 0.0)
                             : 0.0;
    const double qt_min = bsd_tilde.provenance.contains("potential")
                              ? bsd_tilde.provenance["potential"].value("min_value", 0.0)
                              : 0.0;
    check_incomplete_conditions(bsd.alpha, q_min, qt_min);

    const double tau_max = opts.tau_ladder.back();
    double cap = opts.lambda_cap;
    if (cap <= 0.0)
        cap = std::min(4.0 * tau_max * tau_max, std::min(bsd.lambda_max, bsd_tilde.lambda_max));
    std::vector<double> decay_taus = opts.decay_taus;
    if (decay_taus.empty()) decay_taus = logspace(8.0, 64.0, 17);

    SweepResult sweep;
    sweep.kind = "incomplete";
    sweep.columns = {"n0",           "max_abs_dev", "max_combined_err", "within_bars",
                     "decay_slope",  "decay_zero"};

    // full-data reference values
    std::vector<RhoHatResult> full;
    full.reserve(xi_probes.size());
    for (const auto& xi : xi_probes)
        full.push_back(rho_hat_at(bsd, bsd_tilde, xi, opts.tau_ladder, cap, opts.series));

    for (int n0 : n0_ladder) {
        const auto dropped = drop_traces(bsd, std::min<int>(n0, bsd.size()));
        const auto dropped_t = drop_traces(bsd_tilde, std::min<int>(n0, bsd_tilde.size()));

        double max_dev = 0.0, max_err = 0.0;
        bool within = true;
        for (std::size_t p = 0; p < xi_probes.size(); ++p) {
            const auto res =
                rho_hat_at(dropped, dropped_t, xi_probes[p], opts.tau_ladder, cap, opts.series);
            const double dev = std::abs(res.value - full[p].value);
            const double bar = res.error_estimate + full[p].error_estimate;
            max_dev = std::max(max_dev, dev);
            max_err = std::max(max_err, bar);
            if (dev > bar) within = false;
        }

        const auto decay = finite_sum_decay(bsd, bsd_tilde, n0, xi_probes.front(), decay_taus);
        const bool decay_fine = decay.exact_zero || decay.fitted_slope <= -1.5;
        sweep.rows.push_back({static_cast<double>(n0), max_dev, max_err, within ? 1.0 : 0.0,
                              decay.fitted_slope, decay.exact_zero ? 1.0 : 0.0});
        sweep.all_within_bars = sweep.all_within_bars && within;
        sweep.decay_ok = sweep.decay_ok && decay_fine;
    }

    nlohmann::json cfg{{"kind", "incomplete"},
                       {"provenance", bsd.provenance},
                       {"provenance_tilde", bsd_tilde.provenance},
                       {"n0", n0_ladder},
                       {"taus", opts.tau_ladder},
                       {"lambda_cap", cap}};
    sweep.fingerprint = fingerprint_of(cfg);
    return sweep;
}

ReferenceConfig make_reference_configuration(double lambda_max, int l_max, int threads, int mesh) {
    // calibrate the bump amplitude to L^2(ball) norm 0.1 at width 0.35
    const double width = 0.35;
    const auto unit = RadialPotential::gaussian_bump(1.0, width, 1e6);
    const double amp = 0.1 / unit.l_sigma_norm();

    ReferenceConfig ref{RadialPotential::zero(2.0),
                        RadialPotential::gaussian_bump(amp, width, 2.0),
                        RobinCoefficient(1.0),
                        lambda_max,
                        l_max,
                        {},
                        {}};
    AssembleOptions opts;
    opts.threads = threads;
    opts.solver.mesh = mesh;
    ref.bsd = assemble_bsd(ref.q, ref.alpha, l_max, lambda_max, opts);
    ref.bsd_tilde = assemble_bsd(ref.q_tilde, ref.alpha, l_max, lambda_max, opts);
    return ref;
}

CutoffBalance cutoff_tradeoff(double c_fitted, double rho_norm, double delta) {
    if (!(c_fitted > 0.0) || !(rho_norm > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("cutoff_tradeoff: positive inputs required");
    CutoffBalance out;
    const double a = c_fitted * c_fitted * delta * delta; // E = a r^3 + b r^-2
    const double b = rho_norm * rho_norm;
    auto energy = [&](double r) { return a * r * r * r + b / (r * r); };
    out.r_rule = std::pow(delta, -0.4);
    out.r_star = std::pow(2.0 * b / (3.0 * a), 0.2);
    out.location_ratio = std::max(out.r_star / out.r_rule, out.r_rule / out.r_star);
    out.energy_ratio = energy(out.r_rule) / energy(out.r_star);
    return out;
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + tmp);
        for (std::size_t c = 0; c < sweep.columns.size(); ++c)
            out << sweep.columns[c] << (c + 1 < sweep.columns.size() ? ',' : '\n');
        for (const auto& row : sweep.rows)
            for (std::size_t c = 0; c < row.size(); ++c)
                out << format_float(row[c]) << (c + 1 < row.size() ? ',' : '\n');
    }
    std::filesystem::rename(tmp, path);
}

void write_run_manifest(const nlohmann::json& config, std::uint64_t fingerprint,
                        const std::vector<std::string>& outputs, const std::string& path) {
    nlohmann::json doc;
    doc["config"] = config;
    char hex[19];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(fingerprint));
    doc["fingerprint"] = hex;
    doc["outputs"] = outputs;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("write_run_manifest: cannot open " + tmp);
        out << doc.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

} // namespace bsrlab
