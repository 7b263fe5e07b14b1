#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "vbell/fock.hpp"
#include "vbell/optics.hpp"
#include "vbell/vsource.hpp"

using namespace vbell;
using vsource::Topology;
using vsource::VSchemeSpec;

namespace {

std::vector<double> random_angles(int count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> a(0.15, 1.4);
    std::vector<double> out(static_cast<std::size_t>(count));
    for (auto& x : out) x = a(rng);
    return out;
}

// Frozen two-stage root of the amplitude-equalization system (photon_rail).
const std::vector<double> kTwoStageAngles = {0.98558745783719884, 1.0184321175554131};

}  // namespace

TEST_CASE("counting argument") {
    for (int n = 1; n <= 4; ++n) {
        CHECK(vsource::required_bs_count(n) == 2 * n - 1);
        CHECK(vsource::independent_equation_count(n) == n);
    }
    CHECK_THROWS_AS(vsource::required_bs_count(0), fock::DimensionError);
    CHECK_THROWS_AS(vsource::independent_equation_count(0), fock::DimensionError);
}

TEST_CASE("spec accessors and validation") {
    VSchemeSpec spec;
    spec.n = 2;
    spec.angles = {0.3, 0.4};
    spec.validate();
    CHECK(spec.bell_dimension() == 5);
    CHECK(spec.parameter_count() == 2);

    spec.angles = {0.3};
    CHECK_THROWS_AS(spec.validate(), fock::DimensionError);

    VSchemeSpec bad;
    bad.n = 1;
    bad.n_second = 2;
    bad.angles = {0.3};
    CHECK_THROWS_AS(bad.validate(), fock::DimensionError);

    VSchemeSpec qubit;
    qubit.n = 1;
    qubit.n_second = 0;
    qubit.angles = {0.3};
    qubit.validate();
    CHECK(qubit.bell_dimension() == 2);
    CHECK_FALSE(qubit.symmetric());
}

TEST_CASE("angle naming follows the published pattern") {
    CHECK(vsource::angle_names(1) == std::vector<std::string>{"theta"});
    CHECK(vsource::angle_names(2) == std::vector<std::string>{"theta", "phi"});
    CHECK(vsource::angle_names(4) ==
          std::vector<std::string>{"theta", "phi1", "phi2", "phi3"});
}

TEST_CASE("topology names round-trip") {
    for (Topology t : vsource::registered_topologies())
        CHECK(vsource::topology_from_name(vsource::topology_name(t)) == t);
    CHECK_THROWS_AS(vsource::topology_from_name("nonsense"), fock::DimensionError);
}

TEST_CASE("built circuits have the required element count") {
    std::mt19937_64 rng(3);
    for (Topology t : vsource::registered_topologies()) {
        for (int n = 1; n <= 4; ++n) {
            VSchemeSpec spec;
            spec.n = n;
            spec.topology = t;
            spec.angles = random_angles(n, rng);
            const auto src = vsource::build_circuit(spec);
            CHECK(src.circuit.elements().size() ==
                  static_cast<std::size_t>(vsource::required_bs_count(n)));
            // Detectors cover every mode except the two outputs.
            CHECK(src.detection.size() ==
                  static_cast<std::size_t>(src.circuit.modes() - 2));
            CHECK_FALSE(src.detection.count(0));
            CHECK_FALSE(src.detection.count(1));
            // Stage elements on the two branches share one angle symbol.
            CHECK(src.bindings.size() == src.circuit.elements().size());
            for (int i = 1; i <= spec.stage_count(); ++i) {
                CHECK(src.bindings[static_cast<std::size_t>(2 * i - 1)].var ==
                      static_cast<std::size_t>(i));
                CHECK(src.bindings[static_cast<std::size_t>(2 * i)].var ==
                      static_cast<std::size_t>(i));
            }
        }
    }
}

TEST_CASE("single-stage source is one splitter with no detectors") {
    for (Topology t : vsource::registered_topologies()) {
        VSchemeSpec spec;
        spec.topology = t;
        spec.angles = {0.7};
        const auto src = vsource::build_circuit(spec);
        CHECK(src.circuit.modes() == 2);
        CHECK(src.circuit.elements().size() == 1);
        CHECK(src.detection.empty());
        CHECK(src.input == fock::FockBasisState({1, 1}));
    }
}

TEST_CASE("three-level amplitudes at the published transmittivity") {
    VSchemeSpec spec;
    spec.angles = {std::acos(std::sqrt(0.211325))};
    const auto v = vsource::bell_amplitudes(spec);
    REQUIRE(v.amplitudes.size() == 3);
    for (const auto& a : v.amplitudes)
        CHECK(std::abs(a) == Catch::Approx(0.57735).margin(1e-5));
    CHECK(v.amplitudes[0].real() < 0.0);
    CHECK(v.amplitudes[1].real() < 0.0);
    CHECK(v.amplitudes[2].real() > 0.0);
    CHECK(v.herald_probability == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("balanced splitter is not a Bell-type source") {
    VSchemeSpec spec;
    spec.angles = {std::acos(std::sqrt(0.5))};
    const auto v = vsource::bell_amplitudes(spec);
    CHECK(std::abs(v.amplitudes[1]) < 1e-12);
    CHECK(std::abs(v.amplitudes[0]) == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
    CHECK(std::abs(v.amplitudes[2]) == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("two-stage source equalizes at the solved angles") {
    VSchemeSpec spec;
    spec.n = 2;
    spec.angles = kTwoStageAngles;
    const auto v = vsource::bell_amplitudes(spec);
    REQUIRE(v.amplitudes.size() == 5);
    const double first = std::abs(v.amplitudes[0]);
    for (const auto& a : v.amplitudes)
        CHECK(std::abs(a) == Catch::Approx(first).margin(1e-6));
    CHECK(v.herald_probability == Catch::Approx(0.0533232960187453).margin(1e-9));

    const auto schmidt = fock::schmidt_coefficients(vsource::heralded_state(spec));
    REQUIRE(schmidt.size() == 5);
    for (double s : schmidt)
        CHECK(s == Catch::Approx(1.0 / std::sqrt(5.0)).margin(1e-6));
}

TEST_CASE("fast amplitudes match the full-circuit reference") {
    std::mt19937_64 rng(17);
    for (Topology t : vsource::registered_topologies()) {
        for (int n = 1; n <= 3; ++n) {
            for (int rep = 0; rep < 4; ++rep) {
                VSchemeSpec spec;
                spec.n = n;
                spec.topology = t;
                spec.angles = random_angles(n, rng);
                const auto fast = vsource::bell_amplitudes(spec);
                const auto ref = vsource::bell_amplitudes_reference(spec);
                REQUIRE(fast.amplitudes.size() == ref.amplitudes.size());
                for (std::size_t k = 0; k < fast.amplitudes.size(); ++k)
                    CHECK(std::abs(fast.amplitudes[k] - ref.amplitudes[k]) < 1e-12);
                CHECK(fast.herald_probability ==
                      Catch::Approx(ref.herald_probability).margin(1e-12));
            }
        }
    }
}

TEST_CASE("branch symmetry of the amplitude moduli") {
    // Holds for every wiring that treats the two branches alike. The zigzag
    // couples both branches to one shared rail in sequence, which breaks the
    // exchange symmetry; that asymmetry is part of what calibration sees.
    std::mt19937_64 rng(29);
    for (Topology t : {Topology::photon_rail, Topology::vacuum_rail,
                       Topology::double_pass, Topology::cascade}) {
        for (int n = 1; n <= 3; ++n) {
            VSchemeSpec spec;
            spec.n = n;
            spec.topology = t;
            spec.angles = random_angles(n, rng);
            const auto v = vsource::bell_amplitudes(spec);
            const int d = spec.bell_dimension();
            for (int k = 0; k < d; ++k)
                CHECK(std::abs(v.amplitudes[static_cast<std::size_t>(k)]) ==
                      Catch::Approx(std::abs(v.amplitudes[static_cast<std::size_t>(d - 1 - k)]))
                          .margin(1e-10));
        }
    }

    VSchemeSpec zig;
    zig.n = 2;
    zig.topology = Topology::zigzag;
    zig.angles = {0.9, 0.7};
    const auto v = vsource::bell_amplitudes(zig);
    double asymmetry = 0.0;
    for (int k = 0; k < 5; ++k)
        asymmetry = std::max(asymmetry,
                             std::abs(std::abs(v.amplitudes[static_cast<std::size_t>(k)]) -
                                      std::abs(v.amplitudes[static_cast<std::size_t>(4 - k)])));
    CHECK(asymmetry > 1e-3);
}

TEST_CASE("herald probability equals the projection probability") {
    std::mt19937_64 rng(41);
    for (Topology t : {Topology::photon_rail, Topology::vacuum_rail, Topology::zigzag}) {
        VSchemeSpec spec;
        spec.n = 2;
        spec.topology = t;
        spec.angles = random_angles(2, rng);
        const auto src = vsource::build_circuit(spec);
        const auto out =
            optics::apply_circuit(fock::QuantumState::basis(src.input), src.circuit);
        const auto projected = fock::project(out, src.detection);
        CHECK(vsource::bell_amplitudes(spec).herald_probability ==
              Catch::Approx(projected.probability).margin(1e-12));
        CHECK(vsource::source_efficiency(spec) ==
              Catch::Approx(projected.probability).margin(1e-12));
    }
}

TEST_CASE("source efficiency is exactly one without detectors") {
    std::mt19937_64 rng(53);
    VSchemeSpec single;
    single.angles = random_angles(1, rng);
    CHECK(vsource::source_efficiency(single) == 1.0);

    VSchemeSpec cascade;
    cascade.n = 3;
    cascade.topology = Topology::cascade;
    cascade.angles = random_angles(3, rng);
    CHECK(vsource::source_efficiency(cascade) == 1.0);
}

TEST_CASE("heralded state rejects a zero-weight condition") {
    VSchemeSpec spec;
    spec.n = 2;
    spec.topology = Topology::vacuum_rail;
    spec.angles = {0.4, std::numbers::pi / 2.0};
    CHECK_THROWS_AS(vsource::heralded_state(spec), fock::NormalizationError);
}

TEST_CASE("symbolic amplitudes evaluate to the numeric ones") {
    std::mt19937_64 rng(67);
    for (Topology t : vsource::registered_topologies()) {
        for (int n = 1; n <= 2; ++n) {
            VSchemeSpec spec;
            spec.n = n;
            spec.topology = t;
            spec.angles = random_angles(n, rng);
            const auto polys = vsource::symbolic_bell_amplitudes(spec);
            for (int rep = 0; rep < 5; ++rep) {
                spec.angles = random_angles(n, rng);
                const auto v = vsource::bell_amplitudes(spec);
                for (std::size_t k = 0; k < polys.size(); ++k)
                    CHECK(polys[k].evaluate(spec.angles) ==
                          Catch::Approx(v.amplitudes[k].real()).margin(1e-10));
            }
        }
    }
}

TEST_CASE("asymmetric qubit source amplitudes") {
    VSchemeSpec spec;
    spec.n = 1;
    spec.n_second = 0;
    spec.angles = {std::numbers::pi / 4.0};
    const auto v = vsource::bell_amplitudes(spec);
    REQUIRE(v.amplitudes.size() == 2);
    CHECK(std::abs(v.amplitudes[0]) == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
    CHECK(std::abs(v.amplitudes[1]) == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
}
