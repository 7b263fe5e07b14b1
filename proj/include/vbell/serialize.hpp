#pragma once

// JSON wire formats. Key order is alphabetical (nlohmann object = std::map),
// so equal inputs serialize to identical bytes. Doubles use the library's
// shortest exact round-trip form.

#include <string>
#include <vector>

#include <json.hpp>

#include "vbell/bsa.hpp"
#include "vbell/calibrate.hpp"
#include "vbell/fock.hpp"
#include "vbell/optics.hpp"
#include "vbell/solver.hpp"
#include "vbell/teleport.hpp"

namespace vbell::serialize {

using nlohmann::json;

// {"modes": m, "terms": [{"ket": [...], "im": y, "re": x}, ...]}
// Term order is lexicographic in the ket, inherited from the state's map.
inline json state_to_json(const fock::QuantumState& s) {
    json terms = json::array();
    for (const auto& [ket, amp] : s.terms()) {
        terms.push_back(json{{"ket", ket.occupations()},
                             {"re", amp.real()},
                             {"im", amp.imag()}});
    }
    return json{{"modes", s.modes()}, {"terms", std::move(terms)}};
}

inline fock::QuantumState state_from_json(const json& j) {
    fock::QuantumState s(j.at("modes").get<int>());
    for (const auto& t : j.at("terms")) {
        s.add(fock::FockBasisState(t.at("ket").get<std::vector<int>>()),
              fock::complex(t.at("re").get<double>(), t.at("im").get<double>()));
    }
    return s;
}

// {"modes": m, "elements": [{"bs": {"a": i, "b": j, "theta": t}}, ...]}
inline json circuit_to_json(const optics::Circuit& c) {
    json elements = json::array();
    for (const auto& e : c.elements()) {
        elements.push_back(json{{"bs", json{{"a", e.mode_a},
                                            {"b", e.mode_b},
                                            {"theta", e.theta}}}});
    }
    return json{{"modes", c.modes()}, {"elements", std::move(elements)}};
}

inline optics::Circuit circuit_from_json(const json& j) {
    optics::Circuit c(j.at("modes").get<int>());
    for (const auto& el : j.at("elements")) {
        const json& bs = el.at("bs");
        c.append({bs.at("a").get<int>(), bs.at("b").get<int>(),
                  bs.at("theta").get<double>()});
    }
    return c;
}

// {"n": n, "solutions": [{"T": [...], "residual": r, "theta": [...]}, ...]}
inline json solve_to_json(int n, const solver::SolveResult& result) {
    json solutions = json::array();
    for (const auto& s : result.solutions) {
        solutions.push_back(json{{"T", s.transmittivities},
                                 {"theta", s.angles},
                                 {"residual", s.residual_norm}});
    }
    return json{{"n", n}, {"solutions", std::move(solutions)}};
}

// [{"identified": bool, "p": x, "pattern": [...]}, ...]
inline json outcomes_to_json(const std::vector<bsa::BellOutcome>& outcomes) {
    json arr = json::array();
    for (const auto& o : outcomes) {
        arr.push_back(json{{"pattern", o.pattern.occupations()},
                           {"p", o.probability},
                           {"identified", o.identified}});
    }
    return arr;
}

// {"alice_trace_distance": t, "d": d, "fidelity": f, "herald_p": x}
inline json teleport_to_json(const teleport::TeleportRecord& rec) {
    return json{{"d", rec.d},
                {"herald_p", rec.herald_probability},
                {"fidelity", rec.fidelity_after_correction},
                {"alice_trace_distance", rec.alice_trace_distance}};
}

inline json candidate_to_json(const vsource::CandidateReport& c) {
    std::vector<double> solved_t;
    if (c.best_comparison) {
        solved_t = c.best_comparison->solved;
    } else if (!c.solutions.empty()) {
        solved_t = c.solutions.front().transmittivities;
    }
    json j{{"candidate", vsource::topology_name(c.candidate)},
           {"amplitude_match", c.amplitude_match},
           {"solved_T", solved_t},
           {"table1_match", c.table_match},
           {"note", c.note},
           {"common_factor", c.common_factor},
           {"match_signs", c.match_signs},
           {"solution_count", c.solutions.size()},
           {"best_table_deviation", c.best_table_deviation}};
    if (c.solutions.empty())
        j["residual"] = nullptr;
    else
        j["residual"] = c.residual;
    return j;
}

inline json topology_report_to_json(const vsource::TopologyReport& r) {
    json candidates = json::array();
    for (const auto& c : r.candidates) candidates.push_back(candidate_to_json(c));
    json j{{"n", r.n},
           {"any_amplitude_match", r.any_amplitude_match},
           {"candidates", std::move(candidates)}};
    if (r.reference_pair) {
        const auto& p = *r.reference_pair;
        j["reference_pair"] = json{{"t_theta", p.t_theta},
                                   {"t_phi", p.t_phi},
                                   {"modulus_a", p.modulus_a},
                                   {"modulus_b", p.modulus_b},
                                   {"modulus_c", p.modulus_c},
                                   {"max_gap", p.max_gap},
                                   {"is_root", p.is_root}};
    }
    return j;
}

}  // namespace vbell::serialize
