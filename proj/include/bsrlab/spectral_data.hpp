#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace bsrlab {

// One boundary spectral datum: eigenvalue plus the trace psi_n = b * Y_lm.
// trace_known = false models the incomplete-data scenario where psi_n is
// withheld from the reconstruction.
struct SpectralEntry {
    int n = 0; // 1-based rank
    double lambda = 0.0;
    int l = 0;
    int m = 0;
    double boundary_value = 0.0;
    bool trace_known = true;
};

struct BoundarySpectralData {
    std::vector<SpectralEntry> entries;
    std::string domain_tag = "unit-ball-3d";
    double alpha = 0.0;
    double lambda_max = 0.0;
    nlohmann::json provenance;

    std::size_t size() const { return entries.size(); }
    int max_degree() const;

    /// Throws ValidationError on any invariant violation. Non-decreasing
    /// eigenvalue order is waived when provenance records an applied
    /// perturbation (index pairing is kept, the sort permutation is only
    /// recorded).
    void validate() const;
};

/// Eigenvalue noise to apply to a BSD. Either an explicit per-entry list or
/// a generated rule. n0 tags the first index whose trace is guaranteed to
/// match the unperturbed data; transient is the head length ignored by the
/// tail-sup proxy for the limsup.
struct PerturbationSpec {
    enum class Kind { ExplicitList, Constant, Decaying };
    Kind kind = Kind::Constant;
    std::vector<double> eps; // ExplicitList
    double amplitude = 0.0;  // Constant: eps_n = amplitude; Decaying: eps_n = amplitude / n
    int n0 = 1;
    int transient = 0;

    std::vector<double> resolve(std::size_t count) const;
};

/// Copy with lambda~_n = lambda_n + eps_n and traces unchanged. Records
/// Lambda_1 = sup|eps|, the tail-sup proxy for delta, and (when the shift
/// breaks monotonicity) the sort permutation - never applied, since the
/// stability comparison pairs same-index eigenvalues.
BoundarySpectralData perturb_eigenvalues(const BoundarySpectralData& bsd,
                                         const PerturbationSpec& spec);

/// Copy with trace_known = false for every entry with n < n0.
BoundarySpectralData drop_traces(const BoundarySpectralData& bsd, int n0);

/// Entry indices of the degenerate group: degree l, k-th distinct eigenvalue
/// (1-based) within that degree.
std::vector<std::size_t> group_indices(const BoundarySpectralData& bsd, int l, int k);

// Persistence: JSON schema "bsd/1". Round-trips are lossless at full
// binary float precision; load re-validates all invariants.
void save_bsd(const BoundarySpectralData& bsd, const std::string& path);
BoundarySpectralData load_bsd(const std::string& path);

nlohmann::json bsd_to_json(const BoundarySpectralData& bsd);
BoundarySpectralData bsd_from_json(const nlohmann::json& doc);

} // namespace bsrlab
