#pragma once

// V-layout EPR source synthesis: candidate branch wirings, circuit
// construction, post-selected Bell amplitudes and herald probability.
//
// Layout common to all candidates: one central splitter mixes the two
// branches, then stage i (i = 1..n-1) places one equal-angle element on each
// branch. Candidates differ in what the stage elements couple the branch to:
//
//   photon_rail  - a side mode carrying one photon, detector expects one
//   vacuum_rail  - a side mode in vacuum, detector expects vacuum
//   double_pass  - a folded (retro-reflected) vacuum side mode; the two
//                  passes through one physical element act as a single
//                  element of twice the angle
//   zigzag       - one shared side mode per stage crossing between the
//                  branches, vacuum in and vacuum detected
//   cascade      - no side modes; stage elements act on the branch pair
//
// Every candidate uses 2n-1 elements and n distinct angles.

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "vbell/fock.hpp"
#include "vbell/optics.hpp"
#include "vbell/symbolic.hpp"

namespace vbell::vsource {

enum class Topology { photon_rail, vacuum_rail, double_pass, zigzag, cascade };

inline const std::vector<Topology>& registered_topologies() {
    static const std::vector<Topology> all = {
        Topology::photon_rail, Topology::vacuum_rail, Topology::double_pass,
        Topology::zigzag, Topology::cascade};
    return all;
}

inline std::string topology_name(Topology t) {
    switch (t) {
        case Topology::photon_rail: return "photon_rail";
        case Topology::vacuum_rail: return "vacuum_rail";
        case Topology::double_pass: return "double_pass";
        case Topology::zigzag: return "zigzag";
        case Topology::cascade: return "cascade";
    }
    throw fock::DimensionError("unknown topology");
}

inline Topology topology_from_name(const std::string& name) {
    for (Topology t : registered_topologies())
        if (topology_name(t) == name) return t;
    throw fock::DimensionError("unknown topology name: " + name);
}

// Stage operations commute for every candidate except zigzag, whose shared
// side modes thread photons between the branches in stage order.
inline bool stages_commute(Topology t) { return t != Topology::zigzag; }

inline int required_bs_count(int n) {
    if (n < 1) throw fock::DimensionError("n must be >= 1");
    return 2 * n - 1;
}

inline int independent_equation_count(int n) {
    if (n < 1) throw fock::DimensionError("n must be >= 1");
    return n;
}

// Source description: |n>|n_second> input (n_second = -1 means symmetric),
// a wiring candidate, and the n distinct angles (theta, phi_1, ..., phi_{n-1}).
struct VSchemeSpec {
    int n = 1;
    Topology topology = Topology::photon_rail;
    std::vector<double> angles;
    int n_second = -1;

    int branch_a() const { return n; }
    int branch_b() const { return n_second < 0 ? n : n_second; }
    bool symmetric() const { return branch_a() == branch_b(); }
    int total_photons_in_branches() const { return branch_a() + branch_b(); }
    int bell_dimension() const { return total_photons_in_branches() + 1; }
    int stage_count() const { return std::max(branch_a(), branch_b()) - 1; }
    int parameter_count() const { return stage_count() + 1; }

    void validate() const {
        if (n < 1) throw fock::DimensionError("spec: n must be >= 1");
        if (n_second >= 0 && n_second > n)
            throw fock::DimensionError("spec: second branch may not exceed the first");
        if (static_cast<int>(angles.size()) != parameter_count())
            throw fock::DimensionError("spec: expected " +
                                       std::to_string(parameter_count()) + " angles");
    }
};

inline std::vector<std::string> angle_names(int parameters) {
    std::vector<std::string> names = {"theta"};
    if (parameters == 2) {
        names.push_back("phi");
    } else {
        for (int i = 1; i < parameters; ++i) names.push_back("phi" + std::to_string(i));
    }
    return names;
}

struct BuiltSource {
    optics::Circuit circuit;
    fock::FockBasisState input;
    fock::DetectionPattern detection;  // all modes except the two outputs
    int out_a = 0;                     // output mode 1'
    int out_b = 1;                     // output mode 2'
    std::vector<symbolic::SymbolicElementBinding> bindings;
    std::vector<std::string> var_names;
};

inline BuiltSource build_circuit(const VSchemeSpec& spec) {
    spec.validate();
    const int stages = spec.stage_count();
    const bool rail_per_branch = spec.topology == Topology::photon_rail ||
                                 spec.topology == Topology::vacuum_rail ||
                                 spec.topology == Topology::double_pass;
    const int rail_fill = spec.topology == Topology::photon_rail ? 1 : 0;
    int modes = 2;
    if (rail_per_branch) modes += 2 * stages;
    if (spec.topology == Topology::zigzag) modes += stages;

    optics::Circuit circuit(modes);
    std::vector<symbolic::SymbolicElementBinding> bindings;
    circuit.append({0, 1, spec.angles[0]});
    bindings.push_back({0, 1});

    fock::DetectionPattern detection;
    for (int i = 1; i <= stages; ++i) {
        const double phi = spec.angles[static_cast<std::size_t>(i)];
        if (rail_per_branch) {
            const int r = 2 * i;  // rails for stage i sit at modes 2i, 2i+1
            const bool folded = spec.topology == Topology::double_pass;
            const double angle = folded ? 2.0 * phi : phi;
            circuit.append({0, r, angle});
            circuit.append({1, r + 1, angle});
            bindings.push_back({static_cast<std::size_t>(i), folded ? 2 : 1});
            bindings.push_back({static_cast<std::size_t>(i), folded ? 2 : 1});
            detection[r] = rail_fill;
            detection[r + 1] = rail_fill;
        } else if (spec.topology == Topology::zigzag) {
            const int r = 1 + i;
            circuit.append({0, r, phi});
            circuit.append({1, r, phi});
            bindings.push_back({static_cast<std::size_t>(i), 1});
            bindings.push_back({static_cast<std::size_t>(i), 1});
            detection[r] = 0;
        } else {  // cascade
            circuit.append({0, 1, phi});
            circuit.append({0, 1, phi});
            bindings.push_back({static_cast<std::size_t>(i), 1});
            bindings.push_back({static_cast<std::size_t>(i), 1});
        }
    }

    std::vector<int> occ(static_cast<std::size_t>(modes), rail_per_branch ? rail_fill : 0);
    occ[0] = spec.branch_a();
    occ[1] = spec.branch_b();

    return {std::move(circuit), fock::FockBasisState(std::move(occ)),
            std::move(detection), 0, 1, std::move(bindings),
            angle_names(spec.parameter_count())};
}

struct BellAmplitudeVector {
    std::vector<fock::complex> amplitudes;  // A_k on outcome |d-1-k, k>, k = 0..d-1
    double herald_probability = 0.0;        // sum of |A_k|^2
};

namespace detail {

using ArmState = std::map<std::pair<int, int>, fock::complex>;

inline void full_pair_element(ArmState& state, double theta) {
    ArmState next;
    for (const auto& [key, amp] : state) {
        const auto [na, nb] = key;
        for (int a = 0; a <= na + nb; ++a) {
            const double coeff = optics::detail::bs_transfer(na, nb, a, theta);
            if (coeff == 0.0) continue;
            next[{a, na + nb - a}] += amp * coeff;
        }
    }
    state = std::move(next);
}

// Element coupling one branch to a side mode whose input is `fill` photons
// and whose detector fires on `want`; conditioning forces the branch count.
inline void conditioned_rail_element(ArmState& state, int branch, double theta, int fill,
                                     int want) {
    ArmState next;
    for (const auto& [key, amp] : state) {
        const int occ = branch == 0 ? key.first : key.second;
        const int out = occ + fill - want;
        if (out < 0) continue;
        const double coeff = optics::detail::bs_transfer(occ, fill, out, theta);
        if (coeff == 0.0) continue;
        auto nk = key;
        (branch == 0 ? nk.first : nk.second) = out;
        next[nk] += amp * coeff;
    }
    state = std::move(next);
}

// Zigzag stage: both branches couple to one shared vacuum mode, which is then
// conditioned on vacuum. Needs the three-mode joint state transiently.
inline void zigzag_stage(ArmState& state, double phi) {
    std::map<std::tuple<int, int, int>, fock::complex> triple;
    for (const auto& [key, amp] : state) triple[{key.first, key.second, 0}] = amp;

    auto couple = [&](int which) {
        std::map<std::tuple<int, int, int>, fock::complex> next;
        for (const auto& [key, amp] : triple) {
            const auto [a, b, r] = key;
            const int occ = which == 0 ? a : b;
            for (int out = 0; out <= occ + r; ++out) {
                const double coeff = optics::detail::bs_transfer(occ, r, out, phi);
                if (coeff == 0.0) continue;
                const int rail_out = occ + r - out;
                auto nk = key;
                (which == 0 ? std::get<0>(nk) : std::get<1>(nk)) = out;
                std::get<2>(nk) = rail_out;
                next[nk] += amp * coeff;
            }
        }
        triple = std::move(next);
    };
    couple(0);
    couple(1);

    ArmState collapsed;
    for (const auto& [key, amp] : triple) {
        const auto [a, b, r] = key;
        if (r == 0) collapsed[{a, b}] += amp;
    }
    state = std::move(collapsed);
}

}  // namespace detail

// Unnormalized post-selected amplitudes of the heralded component. Side modes
// are conditioned as soon as their last element has acted, which keeps the
// working state on the branch pair; a property test pins this against the
// full-state simulation.
inline BellAmplitudeVector bell_amplitudes(const VSchemeSpec& spec) {
    spec.validate();
    const int stages = spec.stage_count();
    detail::ArmState state;
    state[{spec.branch_a(), spec.branch_b()}] = fock::complex(1.0, 0.0);
    detail::full_pair_element(state, spec.angles[0]);

    for (int i = 1; i <= stages; ++i) {
        const double phi = spec.angles[static_cast<std::size_t>(i)];
        switch (spec.topology) {
            case Topology::photon_rail:
                detail::conditioned_rail_element(state, 0, phi, 1, 1);
                detail::conditioned_rail_element(state, 1, phi, 1, 1);
                break;
            case Topology::vacuum_rail:
                detail::conditioned_rail_element(state, 0, phi, 0, 0);
                detail::conditioned_rail_element(state, 1, phi, 0, 0);
                break;
            case Topology::double_pass:
                detail::conditioned_rail_element(state, 0, 2.0 * phi, 0, 0);
                detail::conditioned_rail_element(state, 1, 2.0 * phi, 0, 0);
                break;
            case Topology::zigzag:
                detail::zigzag_stage(state, phi);
                break;
            case Topology::cascade:
                detail::full_pair_element(state, phi);
                detail::full_pair_element(state, phi);
                break;
        }
    }

    const int d = spec.bell_dimension();
    BellAmplitudeVector out;
    out.amplitudes.assign(static_cast<std::size_t>(d), fock::complex(0.0));
    for (int k = 0; k < d; ++k) {
        auto it = state.find({d - 1 - k, k});
        // Same floor the circuit simulator applies per element, so both
        // routes agree that a sub-threshold condition has zero weight.
        if (it != state.end() && std::abs(it->second) >= optics::kPruneThreshold)
            out.amplitudes[static_cast<std::size_t>(k)] = it->second;
        out.herald_probability += std::norm(out.amplitudes[static_cast<std::size_t>(k)]);
    }
    return out;
}

// Same quantity through the generic circuit simulator; reference route for
// consistency tests and for callers that need the full output state.
inline BellAmplitudeVector bell_amplitudes_reference(const VSchemeSpec& spec) {
    const BuiltSource src = build_circuit(spec);
    const fock::QuantumState out =
        optics::apply_circuit(fock::QuantumState::basis(src.input), src.circuit);
    const int d = spec.bell_dimension();
    BellAmplitudeVector v;
    v.amplitudes.assign(static_cast<std::size_t>(d), fock::complex(0.0));
    for (int k = 0; k < d; ++k) {
        std::vector<int> occ(static_cast<std::size_t>(src.circuit.modes()), 0);
        occ[0] = d - 1 - k;
        occ[1] = k;
        for (const auto& [m, count] : src.detection) occ[static_cast<std::size_t>(m)] = count;
        v.amplitudes[static_cast<std::size_t>(k)] = out.amplitude(fock::FockBasisState(occ));
        v.herald_probability += std::norm(v.amplitudes[static_cast<std::size_t>(k)]);
    }
    return v;
}

// Herald probability of the post-selected component; exactly 1 when there is
// nothing to condition on (single-element sources).
inline double source_efficiency(const VSchemeSpec& spec) {
    spec.validate();
    if (spec.stage_count() == 0 || spec.topology == Topology::cascade) return 1.0;
    return bell_amplitudes(spec).herald_probability;
}

// Normalized two-mode Bell-type output after heralding.
inline fock::QuantumState heralded_state(const VSchemeSpec& spec) {
    const BellAmplitudeVector v = bell_amplitudes(spec);
    if (v.herald_probability <= 0.0)
        throw fock::NormalizationError("heralded component has zero weight");
    fock::QuantumState bell(2);
    const int d = spec.bell_dimension();
    for (int k = 0; k < d; ++k) {
        const fock::complex a = v.amplitudes[static_cast<std::size_t>(k)];
        if (a != fock::complex(0.0))
            bell.add(fock::FockBasisState({d - 1 - k, k}), a);
    }
    bell.normalize();
    return bell;
}

// Exact amplitudes A_0..A_{d-1} as canonical polynomials in the spec's
// angle symbols.
inline std::vector<symbolic::TrigPolynomial> symbolic_bell_amplitudes(const VSchemeSpec& spec) {
    const BuiltSource src = build_circuit(spec);
    auto state = symbolic::symbolic_apply(src.circuit, src.bindings, src.var_names, src.input);
    const int d = spec.bell_dimension();
    std::vector<symbolic::TrigPolynomial> out;
    out.reserve(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        std::vector<int> occ(static_cast<std::size_t>(src.circuit.modes()), 0);
        occ[0] = d - 1 - k;
        occ[1] = k;
        for (const auto& [m, count] : src.detection) occ[static_cast<std::size_t>(m)] = count;
        auto it = state.find(fock::FockBasisState(occ));
        out.push_back(it == state.end() ? symbolic::TrigPolynomial::zero(src.var_names)
                                        : it->second);
    }
    return out;
}

}  // namespace vbell::vsource
