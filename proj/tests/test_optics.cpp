#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "vbell/fock.hpp"
#include "vbell/optics.hpp"

using namespace vbell;
using fock::complex;
using fock::FockBasisState;
using fock::QuantumState;

namespace {

QuantumState ket(std::vector<int> occ) {
    QuantumState s(static_cast<int>(occ.size()));
    s.add(FockBasisState(std::move(occ)), complex(1.0, 0.0));
    return s;
}

optics::Circuit random_circuit(int modes, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> mode(0, modes - 1);
    std::uniform_real_distribution<double> angle(-1.5, 1.5);
    std::uniform_int_distribution<int> count(1, 6);
    optics::Circuit c(modes);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        int a = mode(rng);
        int b = mode(rng);
        while (b == a) b = mode(rng);
        c.append({a, b, angle(rng)});
    }
    return c;
}

QuantumState random_state(int modes, int total_photons, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    QuantumState s(modes);
    for (int t = 0; t < 5; ++t) {
        std::vector<int> occ(static_cast<std::size_t>(modes), 0);
        int left = total_photons;
        for (int m = 0; m + 1 < modes && left > 0; ++m) {
            occ[static_cast<std::size_t>(m)] = static_cast<int>(rng() % (left + 1));
            left -= occ[static_cast<std::size_t>(m)];
        }
        occ[static_cast<std::size_t>(modes - 1)] = left;
        s.add(FockBasisState(std::move(occ)), complex(gauss(rng), gauss(rng)));
    }
    s.normalize();
    return s;
}

}  // namespace

TEST_CASE("element validation and normalization") {
    CHECK_THROWS_AS(optics::BeamSplitterElement(1, 1, 0.3), fock::DimensionError);
    CHECK_THROWS_AS(optics::BeamSplitterElement(-1, 0, 0.3), fock::DimensionError);

    optics::BeamSplitterElement e(0, 1, 0.4);
    CHECK(e.transmittivity() == Catch::Approx(std::cos(0.4) * std::cos(0.4)).margin(1e-15));
    CHECK(e.transmittivity() + e.reflectivity() == Catch::Approx(1.0).margin(1e-15));

    // Angles outside (-pi, pi] fold back without changing the unitary.
    optics::BeamSplitterElement wrapped(0, 1, 0.4 + 2.0 * std::numbers::pi);
    CHECK(wrapped.theta == Catch::Approx(0.4).margin(1e-12));
}

TEST_CASE("hong-ou-mandel dip at the balanced splitter") {
    QuantumState out = optics::apply_beam_splitter(
        ket({1, 1}), {0, 1, std::acos(std::sqrt(0.5))});
    CHECK(std::abs(out.amplitude(FockBasisState({1, 1}))) < 1e-12);
    const double inv = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(out.amplitude(FockBasisState({0, 2})) - complex(inv)) < 1e-12);
    CHECK(std::abs(out.amplitude(FockBasisState({2, 0})) - complex(-inv)) < 1e-12);
}

TEST_CASE("two-photon amplitudes across random transmittivities") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.02, 0.98);
    for (int i = 0; i < 20; ++i) {
        const double T = unit(rng);
        const double R = 1.0 - T;
        const double theta = std::acos(std::sqrt(T));
        QuantumState out = optics::apply_beam_splitter(ket({1, 1}), {0, 1, theta});
        CHECK(std::abs(out.amplitude(FockBasisState({1, 1})) - complex(T - R)) < 1e-12);
        CHECK(std::abs(out.amplitude(FockBasisState({0, 2})) -
                       complex(std::sqrt(2.0 * T * R))) < 1e-12);
        CHECK(std::abs(out.amplitude(FockBasisState({2, 0})) +
                       complex(std::sqrt(2.0 * T * R))) < 1e-12);
    }
}

TEST_CASE("single photon splits by the amplitude matrix") {
    QuantumState out = optics::apply_beam_splitter(
        ket({1, 0}), {0, 1, std::acos(std::sqrt(0.5))});
    const double inv = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(out.amplitude(FockBasisState({1, 0})) - complex(inv)) < 1e-12);
    CHECK(std::abs(out.amplitude(FockBasisState({0, 1})) - complex(inv)) < 1e-12);
}

TEST_CASE("photon number and norm are conserved") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> angle(-1.5, 1.5);
    for (int i = 0; i < 10; ++i) {
        QuantumState s = random_state(3, 4, rng);
        QuantumState out = optics::apply_beam_splitter(s, {0, 2, angle(rng)});
        CHECK(out.squared_norm() == Catch::Approx(1.0).margin(1e-12));
        for (const auto& [k, amp] : out.terms()) CHECK(k.total() == 4);
    }
}

TEST_CASE("empty and single-element circuits") {
    QuantumState s = ket({1, 1});
    optics::Circuit empty(2);
    CHECK(fock::fidelity(optics::apply_circuit(s, empty), s) ==
          Catch::Approx(1.0).margin(1e-14));

    optics::Circuit single(2);
    single.append({0, 1, 0.3});
    QuantumState via_circuit = optics::apply_circuit(s, single);
    QuantumState direct = optics::apply_beam_splitter(s, {0, 1, 0.3});
    CHECK(std::abs(fock::inner_product(via_circuit, direct) - complex(1.0)) < 1e-12);
}

TEST_CASE("circuit element range checks") {
    optics::Circuit c(2);
    CHECK_THROWS_AS(c.append({0, 2, 0.1}), fock::DimensionError);
    CHECK_THROWS_AS(optics::apply_beam_splitter(ket({1}), {0, 1, 0.1}),
                    fock::DimensionError);
}

TEST_CASE("adjoint round trip at criterion scale") {
    std::mt19937_64 rng(97);
    std::uniform_int_distribution<int> modes(2, 6);
    std::uniform_int_distribution<int> photons(1, 8);
    for (int i = 0; i < 100; ++i) {
        const int m = modes(rng);
        optics::Circuit c = random_circuit(m, rng);
        QuantumState s = random_state(m, photons(rng), rng);
        QuantumState back = optics::apply_circuit(optics::apply_circuit(s, c),
                                                  optics::adjoint(c));
        CHECK(fock::fidelity(back, s) >= 1.0 - 1e-10);
    }
}

TEST_CASE("adjoint is an involution") {
    std::mt19937_64 rng(101);
    optics::Circuit c = random_circuit(4, rng);
    CHECK(optics::adjoint(optics::adjoint(c)) == c);
    optics::Circuit empty(3);
    CHECK(optics::adjoint(empty) == empty);
}

TEST_CASE("mode unitary of a single element") {
    const double theta = 0.37;
    optics::Circuit c(2);
    c.append({0, 1, theta});
    Eigen::MatrixXcd u = optics::mode_unitary(c);
    CHECK(std::abs(u(0, 0) - complex(std::cos(theta))) < 1e-15);
    CHECK(std::abs(u(0, 1) - complex(-std::sin(theta))) < 1e-15);
    CHECK(std::abs(u(1, 0) - complex(std::sin(theta))) < 1e-15);
    CHECK(std::abs(u(1, 1) - complex(std::cos(theta))) < 1e-15);
}

TEST_CASE("mode unitary properties") {
    std::mt19937_64 rng(211);
    for (int i = 0; i < 5; ++i) {
        optics::Circuit c = random_circuit(4, rng);
        Eigen::MatrixXcd u = optics::mode_unitary(c);
        CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);

        // Composition: concatenation multiplies in application order.
        optics::Circuit c2 = random_circuit(4, rng);
        optics::Circuit both(4);
        for (const auto& e : c.elements()) both.append(e);
        for (const auto& e : c2.elements()) both.append(e);
        Eigen::MatrixXcd expect = optics::mode_unitary(c2) * u;
        CHECK((optics::mode_unitary(both) - expect).norm() < 1e-12);

        // Column k reproduces the single-photon evolution out of mode k.
        for (int k = 0; k < 4; ++k) {
            std::vector<int> occ(4, 0);
            occ[static_cast<std::size_t>(k)] = 1;
            QuantumState out = optics::apply_circuit(ket(occ), c);
            for (int m = 0; m < 4; ++m) {
                std::vector<int> target(4, 0);
                target[static_cast<std::size_t>(m)] = 1;
                CHECK(std::abs(out.amplitude(FockBasisState(target)) - u(m, k)) < 1e-12);
            }
        }
    }
}
