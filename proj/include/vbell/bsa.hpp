#pragma once

// Bell-state analyser: the time-reversed source circuit. Feeding it the
// source's heralded output reproduces the source's input configuration, which
// is the single identifiable Bell pattern; everything else lands on other
// detector patterns. Includes the symmetric-splitter cascade model for
// photon-number-resolving detection.

#include <cmath>
#include <numbers>
#include <vector>

#include "vbell/optics.hpp"
#include "vbell/vsource.hpp"

namespace vbell::bsa {

struct BsaSetup {
    optics::Circuit circuit;              // adjoint of the source circuit
    fock::FockBasisState ancilla_input;   // side-mode occupations fed into the analyser
    fock::FockBasisState identified;      // the one detector pattern tied to a Bell label
    int port_a = 0;                       // analyser input carrying the first Bell mode
    int port_b = 1;
};

inline BsaSetup build_bsa(const vsource::VSchemeSpec& spec) {
    const vsource::BuiltSource src = vsource::build_circuit(spec);
    // Time reversal swaps the roles of the source's detectors and inputs:
    // the analyser's side modes are fed what the source's detectors expect,
    // and its identified pattern is the source's input configuration.
    std::vector<int> ancilla(static_cast<std::size_t>(src.circuit.modes()), 0);
    for (const auto& [mode, count] : src.detection)
        ancilla[static_cast<std::size_t>(mode)] = count;
    return {optics::adjoint(src.circuit), fock::FockBasisState(std::move(ancilla)),
            src.input, src.out_a, src.out_b};
}

struct BellOutcome {
    fock::FockBasisState pattern;
    double probability = 0.0;
    bool identified = false;  // true only for the source-input pattern
};

// Exact outcome distribution of the analyser over detector patterns.
// A two-mode input is placed on the Bell ports with the side modes fed the
// ancilla occupations; a full-width input is analysed as given (the form the
// unconditioned source output arrives in). Probabilities sum to 1.
inline std::vector<BellOutcome> analyze(const fock::QuantumState& state,
                                        const vsource::VSchemeSpec& spec) {
    const BsaSetup setup = build_bsa(spec);
    if (state.modes() != 2 && state.modes() != setup.circuit.modes())
        throw fock::DimensionError("analyze expects the two Bell modes or the full width");

    fock::QuantumState full(setup.circuit.modes());
    if (state.modes() == setup.circuit.modes()) {
        full = state;
    } else {
        for (const auto& [ket, amp] : state.terms()) {
            std::vector<int> occ = setup.ancilla_input.occupations();
            occ[static_cast<std::size_t>(setup.port_a)] = ket.occupation(0);
            occ[static_cast<std::size_t>(setup.port_b)] = ket.occupation(1);
            full.add(fock::FockBasisState(std::move(occ)), amp);
        }
    }

    const fock::QuantumState out = optics::apply_circuit(full, setup.circuit);
    std::vector<BellOutcome> outcomes;
    for (const auto& [ket, amp] : out.terms()) {
        const double p = std::norm(amp);
        if (p < 1e-24) continue;
        outcomes.push_back({ket, p, ket == setup.identified});
    }
    return outcomes;
}

inline double identified_probability(const std::vector<BellOutcome>& outcomes) {
    double p = 0.0;
    for (const auto& o : outcomes)
        if (o.identified) p += o.probability;
    return p;
}

// Fraction of Bell outcomes a one-pattern analyser resolves for a
// d-dimensional teleportee.
inline double discrimination_efficiency(int d) {
    if (d < 2) throw fock::DimensionError("dimension must be >= 2");
    return 1.0 / (static_cast<double>(d) * static_cast<double>(d));
}

// Probability that a |photons> pulse fanned out through a balanced splitter
// tree with 2^depth leaves puts at most one photon on every leaf, computed by
// exact bosonic simulation (bunching matters).
inline double cascade_resolution_probability(int photons, int depth) {
    if (photons < 0 || depth < 0)
        throw fock::DimensionError("photons and depth must be >= 0");
    if (photons > 8)
        throw fock::CapacityError("cascade model is sized for at most 8 photons");
    if (photons <= 1) return 1.0;

    const int leaves = 1 << depth;
    optics::Circuit tree(leaves);
    // Split [lo, hi) in half at every level; each split is a balanced element.
    auto build = [&](auto&& self, int lo, int hi) -> void {
        if (hi - lo <= 1) return;
        const int mid = lo + (hi - lo) / 2;
        tree.append({lo, mid, std::numbers::pi / 4.0});
        self(self, lo, mid);
        self(self, mid, hi);
    };
    build(build, 0, leaves);

    std::vector<int> occ(static_cast<std::size_t>(leaves), 0);
    occ[0] = photons;
    const fock::QuantumState out =
        optics::apply_circuit(fock::QuantumState::basis(fock::FockBasisState(occ)), tree);
    double p = 0.0;
    for (const auto& [ket, amp] : out.terms()) {
        bool resolved = true;
        for (int m = 0; m < ket.modes(); ++m)
            if (ket.occupation(m) > 1) { resolved = false; break; }
        if (resolved) p += std::norm(amp);
    }
    return p;
}

}  // namespace vbell::bsa
