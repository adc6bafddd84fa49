#include "bsrlab/spectral_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "bsrlab/errors.hpp"

namespace bsrlab {

using nlohmann::json;

int BoundarySpectralData::max_degree() const {
    int lmax = 0;
    for (const auto& e : entries) lmax = std::max(lmax, e.l);
    return lmax;
}

void BoundarySpectralData::validate() const {
    const bool perturbed = provenance.is_object() && provenance.contains("perturbation");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.n != static_cast<int>(i) + 1)
            throw ValidationError("bsd: entry ranks must be 1..N in order");
        if (std::abs(e.m) > e.l)
            throw ValidationError("bsd: harmonic order |m| exceeds degree l at n=" +
                                  std::to_string(e.n));
        if (!std::isfinite(e.lambda) || !std::isfinite(e.boundary_value))
            throw ValidationError("bsd: non-finite entry at n=" + std::to_string(e.n));
        if (i > 0 && !perturbed && entries[i - 1].lambda > e.lambda)
            throw ValidationError("bsd: eigenvalues must be non-decreasing (violated at n=" +
                                  std::to_string(e.n) + ")");
    }
    if (!std::isfinite(lambda_max) || lambda_max <= 0.0)
        throw ValidationError("bsd: lambda_max must be recorded and positive");
    if (domain_tag != "unit-ball-3d")
        throw ValidationError("bsd: unsupported domain tag '" + domain_tag + "'");
}

std::vector<double> PerturbationSpec::resolve(std::size_t count) const {
    std::vector<double> out(count, 0.0);
    switch (kind) {
        case Kind::ExplicitList:
            if (eps.size() < count)
                throw std::invalid_argument("PerturbationSpec: eps list shorter than entry count");
            std::copy_n(eps.begin(), count, out.begin());
            break;
        case Kind::Constant:
            std::fill(out.begin(), out.end(), amplitude);
            break;
        case Kind::Decaying:
            for (std::size_t i = 0; i < count; ++i) out[i] = amplitude / static_cast<double>(i + 1);
            break;
    }
    for (double v : out)
        if (!std::isfinite(v)) throw std::invalid_argument("PerturbationSpec: non-finite eps");
    return out;
}

BoundarySpectralData perturb_eigenvalues(const BoundarySpectralData& bsd,
                                         const PerturbationSpec& spec) {
    auto eps = spec.resolve(bsd.size());
    BoundarySpectralData out = bsd;

    double lambda1 = 0.0;
    for (std::size_t i = 0; i < out.entries.size(); ++i) {
        out.entries[i].lambda = bsd.entries[i].lambda + eps[i];
        lambda1 = std::max(lambda1, std::abs(eps[i]));
    }

    const std::size_t tail_start = std::min<std::size_t>(spec.transient, out.size());
    double delta_tail = 0.0;
    for (std::size_t i = tail_start; i < eps.size(); ++i)
        delta_tail = std::max(delta_tail, std::abs(eps[i]));

    // limsup proxy over the last decile, to flag the vanishing-difference regime
    double tail_decile = 0.0;
    const std::size_t dec_start = out.size() - std::max<std::size_t>(1, out.size() / 10);
    for (std::size_t i = dec_start; i < eps.size(); ++i)
        tail_decile = std::max(tail_decile, std::abs(eps[i]));

    bool monotone = true;
    for (std::size_t i = 1; i < out.entries.size(); ++i)
        if (out.entries[i - 1].lambda > out.entries[i].lambda) { monotone = false; break; }

    json pert;
    pert["lambda1"] = lambda1;
    pert["delta_tail"] = delta_tail;
    pert["transient"] = spec.transient;
    pert["corollary1_regime"] = (lambda1 > 0.0 && tail_decile <= 0.05 * lambda1);
    if (!monotone) {
        std::vector<int> perm(out.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
            return out.entries[a].lambda < out.entries[b].lambda;
        });
        pert["sort_permutation"] = perm; // recorded only; index pairing is kept
    }
    if (!out.provenance.is_object()) out.provenance = json::object();
    out.provenance["perturbation"] = pert;
    return out;
}

BoundarySpectralData drop_traces(const BoundarySpectralData& bsd, int n0) {
    if (n0 < 1 || n0 > static_cast<int>(bsd.size()))
        throw std::out_of_range("drop_traces: n0 must be in [1, entry count]");
    BoundarySpectralData out = bsd;
    for (auto& e : out.entries)
        if (e.n < n0) e.trace_known = false;
    if (!out.provenance.is_object()) out.provenance = json::object();
    int prev = out.provenance.value("dropped_below_n0", 1);
    out.provenance["dropped_below_n0"] = std::max(prev, n0);
    return out;
}

std::vector<std::size_t> group_indices(const BoundarySpectralData& bsd, int l, int k) {
    std::vector<std::size_t> idx;
    int seen = 0;
    double current = std::nan("");
    for (std::size_t i = 0; i < bsd.entries.size(); ++i) {
        const auto& e = bsd.entries[i];
        if (e.l != l) continue;
        if (std::isnan(current) || e.lambda != current) {
            ++seen;
            current = e.lambda;
        }
        if (seen == k) idx.push_back(i);
        if (seen > k) break;
    }
    if (idx.empty())
        throw std::out_of_range("group_indices: no (l=" + std::to_string(l) + ", k=" +
                                std::to_string(k) + ") group in data");
    return idx;
}

json bsd_to_json(const BoundarySpectralData& bsd) {
    json doc;
    doc["schema"] = "bsd/1";
    doc["domain"] = bsd.domain_tag;
    doc["alpha"] = bsd.alpha;
    doc["lambda_max"] = bsd.lambda_max;
    doc["entries"] = json::array();
    for (const auto& e : bsd.entries) {
        doc["entries"].push_back({{"n", e.n},
                                  {"lambda", e.lambda},
                                  {"l", e.l},
                                  {"m", e.m},
                                  {"boundary_value", e.boundary_value},
                                  {"trace_known", e.trace_known}});
    }
    doc["provenance"] = bsd.provenance.is_null() ? json::object() : bsd.provenance;
    return doc;
}

BoundarySpectralData bsd_from_json(const json& doc) {
    if (!doc.is_object() || doc.value("schema", "") != std::string("bsd/1"))
        throw ValidationError("bsd: unknown schema (expected \"bsd/1\")");
    BoundarySpectralData bsd;
    try {
        bsd.domain_tag = doc.at("domain").get<std::string>();
        bsd.alpha = doc.at("alpha").get<double>();
        bsd.lambda_max = doc.at("lambda_max").get<double>();
        for (const auto& j : doc.at("entries")) {
            SpectralEntry e;
            e.n = j.at("n").get<int>();
            e.lambda = j.at("lambda").get<double>();
            e.l = j.at("l").get<int>();
            e.m = j.at("m").get<int>();
            e.boundary_value = j.at("boundary_value").get<double>();
            e.trace_known = j.at("trace_known").get<bool>();
            bsd.entries.push_back(e);
        }
        bsd.provenance = doc.value("provenance", json::object());
    } catch (const json::exception& ex) {
        throw ValidationError(std::string("bsd: malformed document: ") + ex.what());
    }
    bsd.validate();
    return bsd;
}

void save_bsd(const BoundarySpectralData& bsd, const std::string& path) {
    const json doc = bsd_to_json(bsd);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("save_bsd: cannot open " + tmp);
        out << doc.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

BoundarySpectralData load_bsd(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_bsd: cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& ex) {
        throw ValidationError(std::string("bsd: invalid JSON: ") + ex.what());
    }
    return bsd_from_json(doc);
}

} // namespace bsrlab
