#pragma once

// Reference calibration targets: the published transmittivity table the
// solver is expected to reproduce, and the published closed-form amplitude
// polynomials used by the topology calibration. Values are data, not claims;
// the calibration report records where they are internally inconsistent.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vbell/symbolic.hpp"

namespace vbell::targets {

struct ReferenceRow {
    std::string label;       // teleportee name
    int branch_a;            // photons in branch 1
    int branch_b;            // photons in branch 2
    std::vector<double> transmittivities;  // T_theta, T_phi1, ...
    double efficiency;       // published figure (semantics recorded separately)
    std::string efficiency_note;
};

inline const std::vector<ReferenceRow>& reference_table() {
    static const std::vector<ReferenceRow> rows = {
        {"qubit", 1, 0, {0.5}, 0.25, "with polarization splitter"},
        {"qutrit", 1, 1, {0.211325}, 0.06415, ""},
        {"qupentit", 2, 2, {0.7236068, 0.2763932}, 0.008, ""},
        {"quheptit", 3, 3, {0.1510043, 0.6098260, 0.8495319}, 5.306e-5, ""},
        {"qunit", 4, 4, {0.2896110, 0.5212421, 0.8281260, 0.0399748}, 5.4e-9, ""},
    };
    return rows;
}

inline const ReferenceRow& reference_row(int branch_a, int branch_b) {
    for (const auto& row : reference_table())
        if (row.branch_a == branch_a && row.branch_b == branch_b) return row;
    throw fock::DimensionError("no reference row for this input");
}

// Published single-splitter amplitudes for the three-level source, ordered
// (|2,0>, |1,1>, |0,2>): (-sqrt(2) c s, c^2 - s^2, +sqrt(2) c s).
inline std::vector<symbolic::TrigPolynomial> three_level_amplitudes() {
    using symbolic::Rational;
    using symbolic::TrigPolynomial;
    const std::vector<std::string> vars = {"theta"};
    const auto c = TrigPolynomial::cosine(vars, 0);
    const auto s = TrigPolynomial::sine(vars, 0);
    const auto sqrt2 = TrigPolynomial::constant(vars, Rational(1), 2);
    return {-(sqrt2 * c * s), c * c - s * s, sqrt2 * c * s};
}

// Published five-level amplitude polynomials in (theta, phi), exactly as
// printed in their factored forms:
//   A = -sqrt(6) c_phi^4 c_th^2 (c_th^2 - 1) (5 c_phi^2 - 4)
//   B =  sqrt(6) c_phi^2 s_th c_th (-3 + 10 c_phi^2 - 8 c_phi^4
//                                   + 6 c_th^2 - 20 c_phi^2 c_th^2 + 16 c_phi^4 c_th^2)
//   C =  c_phi^2 (1 - 6 c_th^2 + 6 c_th^4) (2 s_phi^2 - c_phi^2)^2
struct FiveLevelTargets {
    symbolic::TrigPolynomial a;
    symbolic::TrigPolynomial b;
    symbolic::TrigPolynomial c;
};

inline FiveLevelTargets five_level_polynomials() {
    using symbolic::Rational;
    using symbolic::TrigPolynomial;
    const std::vector<std::string> vars = {"theta", "phi"};
    const auto ct = TrigPolynomial::cosine(vars, 0);
    const auto st = TrigPolynomial::sine(vars, 0);
    const auto cp = TrigPolynomial::cosine(vars, 1);
    const auto sp = TrigPolynomial::sine(vars, 1);
    const auto one = TrigPolynomial::constant(vars, Rational(1));
    const auto k = [&](long long v) { return TrigPolynomial::constant(vars, Rational(v)); };
    const auto sqrt6 = TrigPolynomial::constant(vars, Rational(1), 6);

    const auto ct2 = ct * ct;
    const auto cp2 = cp * cp;

    const auto a = -(sqrt6 * cp2 * cp2 * ct2 * (ct2 - one) * (cp2.scaled(Rational(5)) - k(4)));

    const auto b_bracket = k(-3) + cp2.scaled(Rational(10)) - (cp2 * cp2).scaled(Rational(8)) +
                           ct2.scaled(Rational(6)) - (cp2 * ct2).scaled(Rational(20)) +
                           (cp2 * cp2 * ct2).scaled(Rational(16));
    const auto b = sqrt6 * cp2 * st * ct * b_bracket;

    const auto c_mid = one - ct2.scaled(Rational(6)) + (ct2 * ct2).scaled(Rational(6));
    const auto c_last = (sp * sp).scaled(Rational(2)) - cp2;
    const auto c = cp2 * c_mid * c_last * c_last;

    return {a, b, c};
}

// Published transmittivity pair for the five-level source. Direct evaluation
// of the printed polynomials at this pair (see the calibration report) gives
// unequal moduli |A| = sqrt(6)/25, |B| ~ 0.11472, |C| = (5 + 2 sqrt(5))/125,
// so the pair cannot be a root of the printed system; it solves the
// single-splitter condition 5T^2 - 5T + 1 = 0 instead.
struct FiveLevelPair {
    double t_theta = 0.7236068;
    double t_phi = 0.2763932;
};

inline FiveLevelPair five_level_pair() { return {}; }

// Closed-form moduli of the printed polynomials at the published pair, used
// as the oracle for the consistency record. Exact values: sqrt(6)/25 and
// (5 + 2 sqrt(5))/125 arise when the pair is taken as the exact roots
// (5 +- sqrt(5))/10 of 5T^2 - 5T + 1.
inline double printed_a_modulus_at_pair() { return std::sqrt(6.0) / 25.0; }
inline double printed_c_modulus_at_pair() { return (5.0 + 2.0 * std::sqrt(5.0)) / 125.0; }

}  // namespace vbell::targets
