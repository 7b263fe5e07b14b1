#pragma once

// End-to-end teleportation of photon-number-encoded qudits: teleportee plus
// heralded Bell resource, analyser projection on the identified pattern,
// classically-conditioned phase correction on Bob's mode, and the
// destroyed-original check under the ideal generalized Bell measurement.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "vbell/bsa.hpp"
#include "vbell/fock.hpp"
#include "vbell/vsource.hpp"

namespace vbell::teleport {

// d-level pure state encoded in the photon number of one mode.
struct QuditState {
    int d = 0;
    std::vector<fock::complex> coefficients;

    QuditState(int dimension, std::vector<fock::complex> coeffs)
        : d(dimension), coefficients(std::move(coeffs)) {
        if (d < 2 || coefficients.size() != static_cast<std::size_t>(d))
            throw fock::DimensionError("qudit needs d >= 2 coefficients");
        double n2 = 0.0;
        for (const auto& c : coefficients) n2 += std::norm(c);
        if (std::abs(n2 - 1.0) > 1e-12)
            throw fock::NormalizationError("qudit coefficients must be normalized");
    }

    fock::QuantumState as_state() const {
        fock::QuantumState s(1);
        for (int k = 0; k < d; ++k)
            if (coefficients[static_cast<std::size_t>(k)] != fock::complex(0.0))
                s.add(fock::FockBasisState({k}), coefficients[static_cast<std::size_t>(k)]);
        return s;
    }
};

inline QuditState random_qudit(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<fock::complex> c(static_cast<std::size_t>(d));
    double n2 = 0.0;
    for (auto& x : c) {
        x = fock::complex(gauss(rng), gauss(rng));
        n2 += std::norm(x);
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& x : c) x *= inv;
    return QuditState(d, std::move(c));
}

// Diagonal phase correction derived from the resource and projector
// amplitudes: level l gets the conjugate phase of
// resource_l * conj(projector_{d-1-l}), which is the identity when all
// phases are trivial.
inline std::vector<fock::complex> correction(const std::vector<fock::complex>& resource,
                                             const std::vector<fock::complex>& projector) {
    if (resource.size() != projector.size())
        throw fock::DimensionError("correction: amplitude vectors differ in length");
    const std::size_t d = resource.size();
    std::vector<fock::complex> diag(d, fock::complex(1.0, 0.0));
    for (std::size_t l = 0; l < d; ++l) {
        const fock::complex z = resource[l] * std::conj(projector[d - 1 - l]);
        const double m = std::abs(z);
        if (m > 1e-300) diag[l] = std::conj(z) / m;
    }
    return diag;
}

struct TeleportRecord {
    int d = 0;
    double herald_probability = 0.0;
    double fidelity_after_correction = 0.0;
    double alice_trace_distance = 0.0;
    fock::QuantumState bob_state{1};          // corrected, normalized
    fock::DensityMatrix alice_remnant;        // Bell-projector remnant on the teleportee mode
    std::vector<fock::complex> correction_diagonal;
};

// One full protocol run. Mode layout during the analysis stage:
// 0 = teleportee, 1 = resource half kept by Alice, 2 = Bob's half,
// 3.. = analyser side modes.
inline TeleportRecord teleport_once(const QuditState& psi, const vsource::VSchemeSpec& spec) {
    spec.validate();
    if (spec.bell_dimension() != psi.d)
        throw fock::DimensionError("qudit dimension does not match the source");

    const fock::QuantumState bell = vsource::heralded_state(spec);
    const bsa::BsaSetup setup = bsa::build_bsa(spec);
    const int src_modes = setup.circuit.modes();
    const int total_modes = src_modes + 1;  // Bob's mode is carved out at index 2

    // Analyser elements act on (teleportee, Alice's half) plus side modes;
    // source mode m >= 2 shifts to m + 1 to make room for Bob's mode.
    optics::Circuit analyser(total_modes);
    for (const auto& e : setup.circuit.elements()) {
        auto shift = [](int m) { return m >= 2 ? m + 1 : m; };
        analyser.append({shift(e.mode_a), shift(e.mode_b), e.theta});
    }

    fock::QuantumState joint = fock::tensor(psi.as_state(), bell);
    fock::QuantumState full(total_modes);
    for (const auto& [ket, amp] : joint.terms()) {
        std::vector<int> occ(static_cast<std::size_t>(total_modes), 0);
        occ[0] = ket.occupation(0);
        occ[1] = ket.occupation(1);
        occ[2] = ket.occupation(2);
        for (int m = 2; m < src_modes; ++m)
            occ[static_cast<std::size_t>(m + 1)] = setup.ancilla_input.occupation(m);
        full.add(fock::FockBasisState(std::move(occ)), amp);
    }

    const fock::QuantumState analysed = optics::apply_circuit(full, analyser);

    fock::DetectionPattern identified;
    identified[0] = setup.identified.occupation(0);
    identified[1] = setup.identified.occupation(1);
    for (int m = 2; m < src_modes; ++m)
        identified[m + 1] = setup.identified.occupation(m);

    const fock::ProjectionResult heralded = fock::project(analysed, identified);

    TeleportRecord rec;
    rec.d = psi.d;
    rec.herald_probability = heralded.probability;
    if (heralded.probability <= 0.0) return rec;

    // Resource amplitude vector A_k on |d-1-k, k>; the analyser projects onto
    // the same Bell state, so resource and projector phases coincide.
    std::vector<fock::complex> resource(static_cast<std::size_t>(psi.d));
    for (int k = 0; k < psi.d; ++k)
        resource[static_cast<std::size_t>(k)] =
            bell.amplitude(fock::FockBasisState({psi.d - 1 - k, k}));
    rec.correction_diagonal = correction(resource, resource);

    fock::QuantumState bob(1);
    for (const auto& [ket, amp] : heralded.conditional.terms()) {
        const int level = ket.occupation(0);
        if (level >= psi.d)
            throw fock::DimensionError("heralded level outside the qudit space");
        bob.add(ket, amp * rec.correction_diagonal[static_cast<std::size_t>(level)]);
    }
    bob.normalize();
    rec.bob_state = bob;
    rec.fidelity_after_correction = fock::fidelity(bob, psi.as_state());

    // Alice's side after the identifying Bell projection: the projector state
    // on (teleportee, Alice's half), reduced to the teleportee mode.
    fock::QuantumState projector(2);
    for (int k = 0; k < psi.d; ++k)
        projector.add(fock::FockBasisState({psi.d - 1 - k, k}),
                      resource[static_cast<std::size_t>(k)]);
    rec.alice_remnant = fock::reduced_density(projector, {0});
    std::vector<fock::FockBasisState> labels;
    for (int j = 0; j < psi.d; ++j) labels.push_back(fock::FockBasisState({j}));
    rec.alice_trace_distance =
        fock::trace_distance(rec.alice_remnant, fock::maximally_mixed(labels));
    return rec;
}

// Product of the source heralding probability and the 1/d^2 analyser share.
// For the three-level source the source factor is exactly 1.
inline double end_to_end_efficiency(const vsource::VSchemeSpec& spec) {
    spec.validate();
    const double d = static_cast<double>(spec.bell_dimension());
    return vsource::source_efficiency(spec) / (d * d);
}

// Complete orthonormal family of d^2 maximally entangled two-mode states
// B_{a,b} = (1/sqrt(d)) sum_j w^{jb} |j> |d-1-((j+a) mod d)>, w = exp(2 pi i / d).
// Index order: a * d + b.
inline std::vector<fock::QuantumState> ideal_bell_measurement(int d) {
    if (d < 2) throw fock::DimensionError("dimension must be >= 2");
    std::vector<fock::QuantumState> family;
    family.reserve(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
    const double inv = 1.0 / std::sqrt(static_cast<double>(d));
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            fock::QuantumState s(2);
            for (int j = 0; j < d; ++j) {
                const double phase =
                    2.0 * std::numbers::pi * static_cast<double>(j) * static_cast<double>(b) /
                    static_cast<double>(d);
                s.add(fock::FockBasisState({j, d - 1 - (j + a) % d}),
                      std::polar(inv, phase));
            }
            family.push_back(std::move(s));
        }
    }
    return family;
}

// Worst-case trace distance of the measured pair's remnant on the teleportee
// mode from I/d, over all measurement outcomes with non-negligible
// probability. `projectors` defaults to the ideal Bell family; substituting a
// product family models a non-entangled measurement and drives the distance
// away from zero.
inline double max_remnant_trace_distance(const QuditState& psi,
                                         const vsource::VSchemeSpec& spec,
                                         const std::vector<fock::QuantumState>& projectors) {
    spec.validate();
    if (spec.bell_dimension() != psi.d)
        throw fock::DimensionError("qudit dimension does not match the source");
    const fock::QuantumState bell = vsource::heralded_state(spec);
    const fock::QuantumState joint = fock::tensor(psi.as_state(), bell);

    std::vector<fock::FockBasisState> labels;
    for (int j = 0; j < psi.d; ++j) labels.push_back(fock::FockBasisState({j}));
    const fock::DensityMatrix mixed = fock::maximally_mixed(labels);

    double total_p = 0.0;
    double worst = 0.0;
    for (const auto& proj : projectors) {
        // Bob amplitude vector conditioned on this outcome.
        std::vector<fock::complex> bob(static_cast<std::size_t>(psi.d), fock::complex(0.0));
        for (const auto& [ket, amp] : joint.terms()) {
            const fock::complex overlap =
                std::conj(proj.amplitude(fock::FockBasisState(
                    {ket.occupation(0), ket.occupation(1)})));
            if (overlap != fock::complex(0.0))
                bob[static_cast<std::size_t>(ket.occupation(2))] += overlap * amp;
        }
        double p = 0.0;
        for (const auto& c : bob) p += std::norm(c);
        total_p += p;
        if (p < 1e-15) continue;

        fock::DensityMatrix remnant = fock::reduced_density(proj, {0});
        if (remnant.basis_labels != labels) {
            // Embed sparse remnants (product projectors occupy one level).
            Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(psi.d, psi.d);
            for (int i = 0; i < remnant.dimension(); ++i)
                for (int j = 0; j < remnant.dimension(); ++j)
                    full(remnant.basis_labels[static_cast<std::size_t>(i)].occupation(0),
                         remnant.basis_labels[static_cast<std::size_t>(j)].occupation(0)) =
                        remnant.entries(i, j);
            remnant = fock::DensityMatrix{labels, std::move(full)};
        }
        worst = std::max(worst, fock::trace_distance(remnant, mixed));
    }
    if (std::abs(total_p - 1.0) > 1e-9)
        throw fock::NormalizationError("measurement family is not complete on the support");
    return worst;
}

inline double destroyed_original_check(const QuditState& psi,
                                       const vsource::VSchemeSpec& spec) {
    return max_remnant_trace_distance(psi, spec, ideal_bell_measurement(psi.d));
}

}  // namespace vbell::teleport
