// bsrlab - boundary spectral reconstruction laboratory on the unit ball.
//
// Pipelines: forward Robin eigensolve -> boundary spectral data files,
// controlled perturbations, frequency-probe reconstruction of the potential
// difference, oscillatory-integral decay reports, and the stability /
// incomplete-data sweeps. Outputs are plain CSV / JSON files written
// atomically; every run prints a one-line summary with the key metrics.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bsrlab/errors.hpp"
#include "bsrlab/experiments.hpp"

using namespace bsrlab;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int threads = 2;
    long seed = 12345;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory (created if missing)");
    cmd->add_option("--threads", args.threads, "worker thread cap")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args.seed, "random seed for generated densities");
}

json load_config(const CommonArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) throw ConfigError("cannot open config file " + args.config_path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
    }
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    return cfg;
}

void check_keys(const json& cfg, const std::vector<std::string>& allowed,
                const std::string& where) {
    for (const auto& [key, value] : cfg.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    if (args.out_dir.empty()) return name;
    std::filesystem::create_directories(args.out_dir);
    return (std::filesystem::path(args.out_dir) / name).string();
}

RadialPotential potential_from_config(const json& cfg) {
    check_keys(cfg, {"kind", "value", "amplitude", "width", "budget", "samples"}, "potential");
    const std::string kind = cfg.value("kind", "zero");
    const double budget = cfg.value("budget", 2.0);
    if (kind == "zero") return RadialPotential::zero(budget);
    if (kind == "constant") return RadialPotential::constant(cfg.value("value", 0.0), budget);
    if (kind == "gaussian_bump")
        return RadialPotential::gaussian_bump(cfg.value("amplitude", 0.3),
                                              cfg.value("width", 0.35), budget);
    if (kind == "samples") {
        std::vector<double> radii, values;
        for (const auto& pair : cfg.at("samples")) {
            radii.push_back(pair.at(0).get<double>());
            values.push_back(pair.at(1).get<double>());
        }
        return RadialPotential::from_samples(std::move(radii), std::move(values), budget);
    }
    throw ConfigError("potential: unknown kind '" + kind + "'");
}

std::vector<double> tau_pair(const json& cfg) {
    const double t1 = cfg.value("tau1", 16.0);
    const double t2 = cfg.value("tau2", 32.0);
    if (!(t2 > t1) || !(t1 > 0.0)) throw ConfigError("need 0 < tau1 < tau2");
    return {t1, t2};
}

int run_forward(const CommonArgs& args) {
    const json cfg = load_config(args);
    check_keys(cfg, {"alpha", "lambda_max", "l_max", "mesh", "potential", "output"}, "forward");
    const auto q = potential_from_config(cfg.value("potential", json{{"kind", "zero"}}));
    RobinCoefficient alpha(cfg.value("alpha", 1.0));
    AssembleOptions opts;
    opts.threads = args.threads;
    opts.solver.mesh = cfg.value("mesh", 600);
    const auto bsd = assemble_bsd(q, alpha, cfg.value("l_max", 12),
                                  cfg.value("lambda_max", 100.0), opts);
    const std::string path = out_path(args, cfg.value("output", "bsd.json"));
    save_bsd(bsd, path);
    std::printf("forward: %zu entries, lambda1=%s, wrote %s\n", bsd.size(),
                format_float(bsd.entries.front().lambda).c_str(), path.c_str());
    return 0;
}

int run_perturb(const CommonArgs& args) {
    const json cfg = load_config(args);
    check_keys(cfg, {"input", "kind", "amplitude", "eps", "transient", "n0", "output"}, "perturb");
    const auto bsd = load_bsd(cfg.at("input").get<std::string>());
    PerturbationSpec spec;
    const std::string kind = cfg.value("kind", "constant");
    if (kind == "constant")
        spec.kind = PerturbationSpec::Kind::Constant;
    else if (kind == "decaying")
        spec.kind = PerturbationSpec::Kind::Decaying;
    else if (kind == "list")
        spec.kind = PerturbationSpec::Kind::ExplicitList;
    else
        throw ConfigError("perturb: unknown kind '" + kind + "'");
    spec.amplitude = cfg.value("amplitude", 0.0);
    if (cfg.contains("eps")) spec.eps = cfg.at("eps").get<std::vector<double>>();
    spec.transient = cfg.value("transient", 0);
    spec.n0 = cfg.value("n0", 1);
    const auto out = perturb_eigenvalues(bsd, spec);
    const std::string path = out_path(args, cfg.value("output", "bsd_perturbed.json"));
    save_bsd(out, path);
    const auto& pert = out.provenance["perturbation"];
    std::printf("perturb: lambda1=%s, delta_tail=%s, wrote %s\n",
                format_float(pert["lambda1"].get<double>()).c_str(),
                format_float(pert["delta_tail"].get<double>()).c_str(), path.c_str());
    return 0;
}

int run_validate(const CommonArgs& args) {
    const json cfg = load_config(args);
    check_keys(cfg, {"input"}, "validate");
    const auto bsd = load_bsd(cfg.at("input").get<std::string>());
    std::printf("validate: OK (%zu entries, lambda_max=%s)\n", bsd.size(),
                format_float(bsd.lambda_max).c_str());
    return 0;
}

int run_reconstruct(const CommonArgs& args) {
    const json cfg = load_config(args);
    check_keys(cfg,
               {"bsd", "bsd_tilde", "delta", "dxi", "tau1", "tau2", "lambda_cap",
                "real_field_points", "output_prefix"},
               "reconstruct");
    const auto bsd = load_bsd(cfg.at("bsd").get<std::string>());
    const auto bsdt = load_bsd(cfg.at("bsd_tilde").get<std::string>());
    const double delta = cfg.at("delta").get<double>();

    GridSpec grid;
    grid.dxi = cfg.value("dxi", M_PI / 2.0);
    ReconstructOptions opts;
    opts.tau_ladder = tau_pair(cfg);
    opts.lambda_cap = cfg.value("lambda_cap", 0.0);
    opts.threads = args.threads;

    auto field = reconstruct_field(bsd, bsdt, delta, grid, opts);
    if (cfg.contains("real_field_points"))
        synthesize_real_field(field, cfg.at("real_field_points").get<int>());

    const std::string prefix = cfg.value("output_prefix", "field");
    const std::string csv = out_path(args, prefix + ".csv");
    const std::string rep = out_path(args, prefix + "_report.json");
    write_field_csv(field, csv);
    write_field_report_json(field, rep);
    std::printf("reconstruct: h_minus1=%s, r_cut=%s, wrote %s %s\n",
                format_float(h_minus1_norm(field)).c_str(), format_float(field.r_cut).c_str(),
                csv.c_str(), rep.c_str());
    return 0;
}

BoundaryFunction phi_from_config(const json& cfg, long seed) {
    if (cfg.is_string()) {
        if (cfg.get<std::string>() == "one") return BoundaryFunction::constant(1.0);
        throw ConfigError("vdc: unknown phi '" + cfg.get<std::string>() + "'");
    }
    if (cfg.contains("random_degree")) {
        const int degree = cfg.at("random_degree").get<int>();
        std::mt19937 rng(static_cast<unsigned>(seed));
        std::normal_distribution<double> n(0.0, 1.0);
        std::vector<Complex> coeffs(harmonic_table_size(degree));
        for (int l = 0; l <= degree; ++l)
            for (int m = 0; m <= l; ++m) {
                const Complex c(n(rng), m == 0 ? 0.0 : n(rng));
                coeffs[harmonic_flat_index(l, m)] = c;
                if (m > 0) coeffs[harmonic_flat_index(l, -m)] = std::pow(-1.0, m) * std::conj(c);
            }
        return BoundaryFunction::from_coefficients(degree, std::move(coeffs));
    }
    if (cfg.contains("coefficients")) {
        int degree = 0;
        for (const auto& c : cfg.at("coefficients"))
            degree = std::max(degree, c.at("l").get<int>());
        std::vector<Complex> coeffs(harmonic_table_size(degree), Complex(0.0));
        for (const auto& c : cfg.at("coefficients"))
            coeffs[harmonic_flat_index(c.at("l").get<int>(), c.at("m").get<int>())] =
                Complex(c.value("re", 0.0), c.value("im", 0.0));
        return BoundaryFunction::from_coefficients(degree, std::move(coeffs));
    }
    throw ConfigError("vdc: phi must be \"one\", {random_degree}, or {coefficients}");
}

int run_vdc(const CommonArgs& args) {
    const json cfg = load_config(args);
    check_keys(cfg, {"phi", "theta", "tau_min", "tau_max", "tau_count", "s", "output_prefix"},
               "vdc");
    const auto phi = phi_from_config(cfg.value("phi", json("one")), args.seed);
    Vec3 theta(0, 0, 1);
    if (cfg.contains("theta")) {
        const auto t = cfg.at("theta").get<std::vector<double>>();
        if (t.size() != 3) throw ConfigError("vdc: theta must have three components");
        theta = Vec3(t[0], t[1], t[2]).normalized();
    }
    const auto taus = linspace(cfg.value("tau_min", 1.0), cfg.value("tau_max", 100.0),
                               cfg.value("tau_count", 199));
    const auto report = vdc_decay_report(phi, theta, taus, cfg.value("s", 2.0));

    const std::string prefix = cfg.value("output_prefix", "vdc");
    const std::string csv = out_path(args, prefix + ".csv");
    const std::string summary = out_path(args, prefix + "_summary.json");
    write_oscillatory_csv(report, csv);
    write_oscillatory_summary_json(report, summary);
    std::printf("vdc: exponent=%s, constant=%s, wrote %s %s\n",
                format_float(report.fitted_exponent).c_str(),
                format_float(report.bound_constant).c_str(), csv.c_str(), summary.c_str());
    return 0;
}

int run_stability(const CommonArgs& args) {
    const json cfg = load_config(args);
    check_keys(cfg, {"bsd", "deltas", "dxi", "tau1", "tau2", "lambda_cap", "output_prefix"},
               "stability");
    const auto bsd = load_bsd(cfg.at("bsd").get<std::string>());
    StabilitySweepOptions opts;
    opts.grid.dxi = cfg.value("dxi", M_PI / 2.0);
    if (cfg.contains("tau1") || cfg.contains("tau2")) {
        json taus = cfg;
        if (!cfg.contains("tau1")) taus["tau1"] = 8.0;
        if (!cfg.contains("tau2")) taus["tau2"] = 16.0;
        opts.tau_ladder = tau_pair(taus);
    }
    opts.lambda_cap = cfg.value("lambda_cap", 0.0);
    opts.threads = args.threads;
    const auto deltas = cfg.value("deltas", logspace(1e-1, 1e-3, 5));
    const auto sweep = stability_sweep(bsd, deltas, opts);

    const std::string prefix = cfg.value("output_prefix", "stability");
    const std::string csv = out_path(args, prefix + ".csv");
    const std::string manifest = out_path(args, prefix + "_manifest.json");
    write_sweep_csv(sweep, csv);
    write_run_manifest(cfg, sweep.fingerprint, {csv}, manifest);
    std::printf("stability: slope=%s, C=%s, ci=%s, wrote %s %s\n",
                format_float(sweep.fitted_slope).c_str(),
                format_float(sweep.bound_constant).c_str(),
                format_float(sweep.slope_ci_width).c_str(), csv.c_str(), manifest.c_str());
    return 0;
}

int run_incomplete(const CommonArgs& args) {
    const json cfg = load_config(args);
    check_keys(cfg,
               {"bsd", "bsd_tilde", "n0_ladder", "xi_probes", "tau1", "tau2", "lambda_cap",
                "output_prefix"},
               "incomplete");
    const auto bsd = load_bsd(cfg.at("bsd").get<std::string>());
    const auto bsdt = load_bsd(cfg.at("bsd_tilde").get<std::string>());

    IncompleteSweepOptions opts;
    if (cfg.contains("tau1") || cfg.contains("tau2")) {
        json taus = cfg;
        if (!cfg.contains("tau1")) taus["tau1"] = 8.0;
        if (!cfg.contains("tau2")) taus["tau2"] = 16.0;
        opts.tau_ladder = tau_pair(taus);
    }
    opts.lambda_cap = cfg.value("lambda_cap", 0.0);
    opts.threads = args.threads;
    std::vector<int> n0s = cfg.value("n0_ladder", std::vector<int>{1, 2, 4, 8});
    std::vector<Vec3> probes;
    if (cfg.contains("xi_probes")) {
        for (const auto& p : cfg.at("xi_probes")) {
            const auto v = p.get<std::vector<double>>();
            if (v.size() != 3) throw ConfigError("incomplete: xi probes must have 3 components");
            probes.emplace_back(v[0], v[1], v[2]);
        }
    } else {
        probes = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 0, 2)};
    }
    const auto sweep = incomplete_sweep(bsd, bsdt, n0s, probes, opts);

    const std::string prefix = cfg.value("output_prefix", "incomplete");
    const std::string csv = out_path(args, prefix + ".csv");
    const std::string manifest = out_path(args, prefix + "_manifest.json");
    write_sweep_csv(sweep, csv);
    write_run_manifest(cfg, sweep.fingerprint, {csv}, manifest);
    std::printf("incomplete: within_bars=%d, decay_ok=%d, wrote %s %s\n",
                sweep.all_within_bars ? 1 : 0, sweep.decay_ok ? 1 : 0, csv.c_str(),
                manifest.c_str());
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"bsrlab - boundary spectral reconstruction laboratory (unit ball)"};
    app.name("bsrlab");
    app.require_subcommand(1);

    CommonArgs args;
    auto* forward = app.add_subcommand("forward", "solve Robin eigenpairs and write a BSD file");
    auto* perturb = app.add_subcommand("perturb", "apply eigenvalue noise to a BSD file");
    auto* reconstruct =
        app.add_subcommand("reconstruct", "recover the potential-difference Fourier field");
    auto* vdc = app.add_subcommand("vdc", "oscillatory-integral decay report on the sphere");
    auto* stability = app.add_subcommand("stability", "noise-response sweep at the Hoelder cutoff");
    auto* incomplete = app.add_subcommand("incomplete", "missing-trace sweep");
    auto* validate = app.add_subcommand("validate", "check a BSD file against all invariants");
    for (auto* cmd : {forward, perturb, reconstruct, vdc, stability, incomplete, validate})
        add_common(cmd, args);

    CLI11_PARSE(app, argc, argv);

    if (forward->parsed()) return run_forward(args);
    if (perturb->parsed()) return run_perturb(args);
    if (reconstruct->parsed()) return run_reconstruct(args);
    if (vdc->parsed()) return run_vdc(args);
    if (stability->parsed()) return run_stability(args);
    if (incomplete->parsed()) return run_incomplete(args);
    if (validate->parsed()) return run_validate(args);
    return 0;
}

void emit_error(const char* kind, const std::exception& ex) {
    json err{{"error", kind}, {"message", ex.what()}};
    std::cerr << err.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ValidationError& ex) {
        emit_error("validation", ex);
        return 2;
    } catch (const ConfigError& ex) {
        emit_error("config", ex);
        return 2;
    } catch (const std::invalid_argument& ex) {
        emit_error("config", ex);
        return 2;
    } catch (const std::domain_error& ex) {
        emit_error("config", ex);
        return 2;
    } catch (const std::out_of_range& ex) {
        emit_error("config", ex);
        return 2;
    } catch (const NumericError& ex) {
        emit_error("numeric", ex);
        return 3;
    } catch (const std::exception& ex) {
        emit_error("internal", ex);
        return 3;
    }
}
