#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bsrlab/errors.hpp"
#include "bsrlab/radial.hpp"
#include "bsrlab/spectral_data.hpp"

using namespace bsrlab;
using doctest::Approx;

namespace {

BoundarySpectralData small_bsd() {
    static BoundarySpectralData cached =
        assemble_bsd(RadialPotential::zero(1.0), RobinCoefficient(1.0), 8, 30.0);
    return cached;
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("zero perturbation is the identity") {
    auto bsd = small_bsd();
    PerturbationSpec spec;
    spec.kind = PerturbationSpec::Kind::Constant;
    spec.amplitude = 0.0;
    auto out = perturb_eigenvalues(bsd, spec);
    for (std::size_t i = 0; i < bsd.size(); ++i)
        CHECK(out.entries[i].lambda == bsd.entries[i].lambda);
    CHECK(out.provenance["perturbation"]["lambda1"].get<double>() == 0.0);
}

TEST_CASE("uniform shift records Lambda_1 = delta = eps") {
    auto bsd = small_bsd();
    PerturbationSpec spec;
    spec.amplitude = 0.01;
    auto out = perturb_eigenvalues(bsd, spec);
    for (std::size_t i = 0; i < bsd.size(); ++i)
        CHECK(out.entries[i].lambda == bsd.entries[i].lambda + 0.01);
    CHECK(out.provenance["perturbation"]["lambda1"].get<double>() == Approx(0.01));
    CHECK(out.provenance["perturbation"]["delta_tail"].get<double>() == Approx(0.01));
    CHECK_FALSE(out.provenance["perturbation"]["corollary1_regime"].get<bool>());
    // ordering preserved, no permutation recorded
    CHECK_FALSE(out.provenance["perturbation"].contains("sort_permutation"));
}

TEST_CASE("decaying shift sets the vanishing-difference flag and keeps pairing") {
    auto bsd = small_bsd();
    PerturbationSpec spec;
    spec.kind = PerturbationSpec::Kind::Decaying;
    spec.amplitude = 0.1;
    auto out = perturb_eigenvalues(bsd, spec);
    CHECK(out.provenance["perturbation"]["lambda1"].get<double>() == Approx(0.1));
    CHECK(out.provenance["perturbation"]["corollary1_regime"].get<bool>());
    // 0.1/n breaks ties inside degenerate groups: permutation recorded, not applied
    CHECK(out.provenance["perturbation"].contains("sort_permutation"));
    for (std::size_t i = 0; i < bsd.size(); ++i)
        CHECK(out.entries[i].lambda == bsd.entries[i].lambda + 0.1 / (i + 1.0));
}

TEST_CASE("perturb then negated perturb restores eigenvalues exactly") {
    auto bsd = small_bsd();
    PerturbationSpec spec;
    spec.kind = PerturbationSpec::Kind::ExplicitList;
    spec.eps.resize(bsd.size());
    for (std::size_t i = 0; i < bsd.size(); ++i) spec.eps[i] = 0.03 * std::cos(1.7 * i);
    auto fwd = perturb_eigenvalues(bsd, spec);
    for (auto& e : spec.eps) e = -e;
    auto back = perturb_eigenvalues(fwd, spec);
    for (std::size_t i = 0; i < bsd.size(); ++i)
        CHECK(back.entries[i].lambda == bsd.entries[i].lambda);
}

TEST_CASE("perturbation input validation") {
    auto bsd = small_bsd();
    PerturbationSpec spec;
    spec.kind = PerturbationSpec::Kind::ExplicitList;
    spec.eps.assign(3, 0.0); // too short
    CHECK_THROWS_AS(perturb_eigenvalues(bsd, spec), std::invalid_argument);
    spec.eps.assign(bsd.size(), 0.0);
    spec.eps[2] = std::nan("");
    CHECK_THROWS_AS(perturb_eigenvalues(bsd, spec), std::invalid_argument);
}

TEST_CASE("drop_traces flags the head and is idempotent and monotone") {
    auto bsd = small_bsd();
    auto one = drop_traces(bsd, 1);
    for (std::size_t i = 0; i < bsd.size(); ++i) CHECK(one.entries[i].trace_known);

    auto five = drop_traces(bsd, 5);
    for (const auto& e : five.entries) CHECK(e.trace_known == (e.n >= 5));
    auto again = drop_traces(five, 5);
    for (std::size_t i = 0; i < five.size(); ++i)
        CHECK(again.entries[i].trace_known == five.entries[i].trace_known);
    auto more = drop_traces(five, 9);
    for (const auto& e : more.entries) CHECK(e.trace_known == (e.n >= 9));

    CHECK_THROWS_AS(drop_traces(bsd, 0), std::out_of_range);
    CHECK_THROWS_AS(drop_traces(bsd, static_cast<int>(bsd.size()) + 1), std::out_of_range);
}

TEST_CASE("save/load round trip is lossless") {
    auto bsd = small_bsd();
    bsd = drop_traces(bsd, 3);
    const std::string path = temp_path("bsrlab_roundtrip.json");
    save_bsd(bsd, path);
    auto back = load_bsd(path);
    REQUIRE(back.size() == bsd.size());
    for (std::size_t i = 0; i < bsd.size(); ++i) {
        CHECK(back.entries[i].lambda == bsd.entries[i].lambda); // bitwise
        CHECK(back.entries[i].boundary_value == bsd.entries[i].boundary_value);
        CHECK(back.entries[i].l == bsd.entries[i].l);
        CHECK(back.entries[i].m == bsd.entries[i].m);
        CHECK(back.entries[i].trace_known == bsd.entries[i].trace_known);
    }
    CHECK(back.alpha == bsd.alpha);
    CHECK(back.lambda_max == bsd.lambda_max);
    std::filesystem::remove(path);
}

TEST_CASE("load rejects invalid documents") {
    auto bsd = small_bsd();
    const std::string path = temp_path("bsrlab_invalid.json");

    auto doc = bsd_to_json(bsd);
    doc["entries"][0]["lambda"] = 1e9; // decreasing afterwards
    {
        std::ofstream out(path);
        out << doc.dump();
    }
    CHECK_THROWS_AS(load_bsd(path), ValidationError);

    doc = bsd_to_json(bsd);
    doc["entries"][1]["m"] = 7; // |m| > l
    {
        std::ofstream out(path);
        out << doc.dump();
    }
    CHECK_THROWS_AS(load_bsd(path), ValidationError);

    doc = bsd_to_json(bsd);
    doc["schema"] = "bsd/999";
    {
        std::ofstream out(path);
        out << doc.dump();
    }
    CHECK_THROWS_AS(load_bsd(path), ValidationError);
    std::filesystem::remove(path);
}

TEST_CASE("group lookup finds degenerate blocks") {
    auto bsd = small_bsd();
    auto g = group_indices(bsd, 1, 1);
    CHECK(g.size() == 3);
    for (auto i : g) {
        CHECK(bsd.entries[i].l == 1);
        CHECK(bsd.entries[i].lambda == bsd.entries[g[0]].lambda);
    }
    CHECK_THROWS_AS(group_indices(bsd, 1, 99), std::out_of_range);
}
