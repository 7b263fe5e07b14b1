#pragma once

// Beam-splitter elements and exact circuit evolution on Fock states,
// including the adjoint (time-reversed) circuit and the first-quantized
// single-photon transfer matrix.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "vbell/fock.hpp"

namespace vbell::optics {

// Amplitudes below this are dropped after every element application.
inline constexpr double kPruneThreshold = 1e-14;

// Largest photon count a single expansion handles; sqrt-factorial tables
// stay well inside double range below this.
inline constexpr int kMaxPhotonsPerElement = 60;

namespace detail {

inline double sqrt_factorial(int n) {
    static const auto table = [] {
        std::array<double, kMaxPhotonsPerElement + 1> t{};
        t[0] = 1.0;
        for (int i = 1; i <= kMaxPhotonsPerElement; ++i)
            t[static_cast<std::size_t>(i)] =
                t[static_cast<std::size_t>(i - 1)] * std::sqrt(static_cast<double>(i));
        return t;
    }();
    if (n < 0 || n > kMaxPhotonsPerElement)
        throw fock::CapacityError("photon count beyond factorial table");
    return table[static_cast<std::size_t>(n)];
}

inline double binomial(int n, int k) {
    double acc = 1.0;
    for (int i = 1; i <= k; ++i)
        acc = acc * static_cast<double>(n - k + i) / static_cast<double>(i);
    return acc;
}

}  // namespace detail

// Two-port element acting on modes (a, b) with the creation-operator
// substitution a+ -> cos(theta) a+ + sin(theta) b+ and
// b+ -> -sin(theta) a+ + cos(theta) b+. Transmittivity T = cos^2(theta).
// theta is normalized into (-pi, pi] on construction (same unitary);
// source layouts keep their angles in [0, pi/2].
struct BeamSplitterElement {
    int mode_a;
    int mode_b;
    double theta;

    BeamSplitterElement(int a, int b, double angle) : mode_a(a), mode_b(b), theta(angle) {
        if (a == b)
            throw fock::DimensionError("beam splitter needs two distinct modes");
        if (a < 0 || b < 0)
            throw fock::DimensionError("negative mode index");
        constexpr double pi = std::numbers::pi;
        if (theta <= -pi || theta > pi) {
            theta = std::remainder(theta, 2.0 * pi);
            if (theta <= -pi) theta += 2.0 * pi;
        }
    }

    double transmittivity() const {
        double c = std::cos(theta);
        return c * c;
    }
    double reflectivity() const { return 1.0 - transmittivity(); }

    BeamSplitterElement inverse() const { return {mode_a, mode_b, -theta}; }

    friend bool operator==(const BeamSplitterElement& x, const BeamSplitterElement& y) {
        return x.mode_a == y.mode_a && x.mode_b == y.mode_b && x.theta == y.theta;
    }
};

class Circuit {
public:
    explicit Circuit(int modes) : modes_(modes) {
        if (modes < 1)
            throw fock::DimensionError("circuit needs at least one mode");
    }

    Circuit(int modes, std::vector<BeamSplitterElement> elements) : Circuit(modes) {
        for (auto& e : elements) check(e);
        elements_ = std::move(elements);
    }

    int modes() const { return modes_; }
    const std::vector<BeamSplitterElement>& elements() const { return elements_; }

    void append(BeamSplitterElement e) {
        check(e);
        elements_.push_back(e);
    }

    friend bool operator==(const Circuit& a, const Circuit& b) {
        return a.modes_ == b.modes_ && a.elements_ == b.elements_;
    }

private:
    void check(const BeamSplitterElement& e) const {
        if (e.mode_a >= modes_ || e.mode_b >= modes_)
            throw fock::DimensionError("element mode index out of circuit range");
    }

    int modes_;
    std::vector<BeamSplitterElement> elements_;
};

namespace detail {

// <na_out, na+nb-na_out| BS(theta) |na, nb>, the exact two-mode transfer
// coefficient of the substitution convention above.
inline double bs_transfer(int na, int nb, int na_out, double theta) {
    if (na_out < 0 || na_out > na + nb) return 0.0;
    const double c = std::cos(theta), s = std::sin(theta);
    const int nb_out = na + nb - na_out;
    double sum = 0.0;
    const int j_lo = std::max(0, na_out - nb);
    const int j_hi = std::min(na, na_out);
    for (int j = j_lo; j <= j_hi; ++j) {
        const int k = na_out - j;  // photons arriving at a from the b input
        double term = binomial(na, j) * binomial(nb, k);
        term *= std::pow(c, j) * std::pow(s, na - j);
        term *= std::pow(-s, k) * std::pow(c, nb - k);
        sum += term;
    }
    return sum * sqrt_factorial(na_out) * sqrt_factorial(nb_out) /
           (sqrt_factorial(na) * sqrt_factorial(nb));
}

}  // namespace detail

inline fock::QuantumState apply_beam_splitter(const fock::QuantumState& state,
                                              const BeamSplitterElement& bs,
                                              double prune = kPruneThreshold) {
    if (bs.mode_a >= state.modes() || bs.mode_b >= state.modes())
        throw fock::DimensionError("beam splitter mode out of state range");
    fock::QuantumState out(state.modes());
    for (const auto& [ket, amp] : state.terms()) {
        const int na = ket.occupation(bs.mode_a);
        const int nb = ket.occupation(bs.mode_b);
        if (na + nb > kMaxPhotonsPerElement)
            throw fock::CapacityError("too many photons on one element");
        for (int na_out = 0; na_out <= na + nb; ++na_out) {
            const double coeff = detail::bs_transfer(na, nb, na_out, bs.theta);
            if (coeff == 0.0) continue;
            out.add(ket.with(bs.mode_a, na_out).with(bs.mode_b, na + nb - na_out),
                    amp * coeff);
        }
    }
    out.prune(prune);
    return out;
}

inline fock::QuantumState apply_circuit(const fock::QuantumState& state, const Circuit& c,
                                        double prune = kPruneThreshold) {
    if (c.modes() > state.modes())
        throw fock::DimensionError("circuit modes exceed state modes");
    fock::QuantumState cur = state;
    for (const auto& e : c.elements()) cur = apply_beam_splitter(cur, e, prune);
    return cur;
}

// Reversed element order with each element inverted (theta -> -theta in the
// same port convention), so apply_circuit(apply_circuit(psi, c), adjoint(c)) = psi.
inline Circuit adjoint(const Circuit& c) {
    Circuit out(c.modes());
    for (auto it = c.elements().rbegin(); it != c.elements().rend(); ++it)
        out.append(it->inverse());
    return out;
}

// First-quantized transfer matrix: column k is the circuit's action on a
// single photon in mode k. Unitary by construction.
inline Eigen::MatrixXcd mode_unitary(const Circuit& c) {
    const auto m = static_cast<Eigen::Index>(c.modes());
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(m, m);
    for (const auto& e : c.elements()) {
        Eigen::MatrixXcd step = Eigen::MatrixXcd::Identity(m, m);
        const double cv = std::cos(e.theta), sv = std::sin(e.theta);
        step(e.mode_a, e.mode_a) = cv;
        step(e.mode_b, e.mode_a) = sv;
        step(e.mode_a, e.mode_b) = -sv;
        step(e.mode_b, e.mode_b) = cv;
        u = step * u;
    }
    return u;
}

}  // namespace vbell::optics
