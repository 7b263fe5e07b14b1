#pragma once

// Exact symbolic amplitudes: multivariate polynomials in the cosines and
// sines of element angles, with coefficients of the form rational * sqrt(k)
// for square-free positive k. Canonical form keeps every sine exponent <= 1
// by rewriting s^2 = 1 - c^2 to fixpoint, making equality decidable.

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "vbell/optics.hpp"

namespace vbell::symbolic {

struct SymbolicError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline long long checked_narrow(__int128 v) {
    if (v > static_cast<__int128>(INT64_MAX) || v < static_cast<__int128>(INT64_MIN))
        throw fock::CapacityError("rational coefficient overflows 64 bits");
    return static_cast<long long>(v);
}

// Removes the largest square factor from r and returns its square root.
inline std::uint64_t extract_square(std::uint64_t& r) {
    std::uint64_t g = 1;
    for (std::uint64_t p = 2; p * p <= r; ++p) {
        const std::uint64_t p2 = p * p;
        while (r % p2 == 0) {
            r /= p2;
            g *= p;
        }
    }
    return g;
}

}  // namespace detail

// Exact rational with 64-bit numerator/denominator; intermediates widen to
// 128 bits and overflow raises CapacityError instead of wrapping.
class Rational {
public:
    Rational() = default;
    Rational(long long n) : num_(n) {}  // NOLINT: implicit by design
    Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

    long long num() const { return num_; }
    long long den() const { return den_; }
    bool is_zero() const { return num_ == 0; }

    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return make(static_cast<__int128>(a.num_) * b.den_ +
                        static_cast<__int128>(b.num_) * a.den_,
                    static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return a + Rational(-b.num_, b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make(static_cast<__int128>(a.num_) * b.num_,
                    static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw SymbolicError("division by zero rational");
        return make(static_cast<__int128>(a.num_) * b.den_,
                    static_cast<__int128>(a.den_) * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    std::string str() const {
        return "(" + std::to_string(num_) + "/" + std::to_string(den_) + ")";
    }

private:
    static Rational make(__int128 n, __int128 d) {
        if (d == 0) throw SymbolicError("zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n, b = d;
        while (b) { __int128 t = a % b; a = b; b = t; }
        if (a > 1) { n /= a; d /= a; }
        Rational r;
        r.num_ = detail::checked_narrow(n);
        r.den_ = detail::checked_narrow(d);
        return r;
    }

    void normalize() { *this = make(num_, den_); }

    long long num_ = 0;
    long long den_ = 1;
};

// One product c_0^e0 s_0^f0 ... c_k^ek s_k^fk * sqrt(radicand); canonical
// monomials keep every sine exponent <= 1 and a square-free radicand.
struct Monomial {
    std::vector<std::uint8_t> cos_exp;
    std::vector<std::uint8_t> sin_exp;
    std::uint64_t radicand = 1;

    friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

class TrigPolynomial {
public:
    explicit TrigPolynomial(std::vector<std::string> variables)
        : vars_(std::move(variables)) {}

    static TrigPolynomial zero(std::vector<std::string> vars) {
        return TrigPolynomial(std::move(vars));
    }

    static TrigPolynomial constant(std::vector<std::string> vars, Rational value,
                                   std::uint64_t radicand = 1) {
        TrigPolynomial p(std::move(vars));
        Monomial m = p.unit_monomial();
        const std::uint64_t g = detail::extract_square(radicand);
        m.radicand = radicand;
        p.accumulate(m, value * Rational(static_cast<long long>(g)));
        return p;
    }

    static TrigPolynomial cosine(std::vector<std::string> vars, std::size_t var) {
        TrigPolynomial p(std::move(vars));
        Monomial m = p.unit_monomial();
        m.cos_exp.at(var) = 1;
        p.accumulate(m, Rational(1));
        return p;
    }

    static TrigPolynomial sine(std::vector<std::string> vars, std::size_t var) {
        TrigPolynomial p(std::move(vars));
        Monomial m = p.unit_monomial();
        m.sin_exp.at(var) = 1;
        p.accumulate(m, Rational(1));
        return p;
    }

    const std::vector<std::string>& variables() const { return vars_; }
    const std::map<Monomial, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    friend TrigPolynomial operator+(const TrigPolynomial& a, const TrigPolynomial& b) {
        a.require_same_vars(b);
        TrigPolynomial out = a;
        for (const auto& [m, r] : b.terms_) out.accumulate(m, r);
        return out;
    }

    friend TrigPolynomial operator-(const TrigPolynomial& a, const TrigPolynomial& b) {
        return a + (-b);
    }

    TrigPolynomial operator-() const {
        TrigPolynomial out(vars_);
        for (const auto& [m, r] : terms_) out.terms_.emplace(m, -r);
        return out;
    }

    friend TrigPolynomial operator*(const TrigPolynomial& a, const TrigPolynomial& b) {
        a.require_same_vars(b);
        TrigPolynomial out(a.vars_);
        for (const auto& [ma, ra] : a.terms_) {
            for (const auto& [mb, rb] : b.terms_) {
                Monomial m;
                m.cos_exp.resize(a.vars_.size());
                m.sin_exp.resize(a.vars_.size());
                for (std::size_t v = 0; v < a.vars_.size(); ++v) {
                    m.cos_exp[v] = static_cast<std::uint8_t>(ma.cos_exp[v] + mb.cos_exp[v]);
                    m.sin_exp[v] = static_cast<std::uint8_t>(ma.sin_exp[v] + mb.sin_exp[v]);
                }
                std::uint64_t rad = ma.radicand * mb.radicand;
                const std::uint64_t g = detail::extract_square(rad);
                m.radicand = rad;
                out.accumulate(m, ra * rb * Rational(static_cast<long long>(g)));
            }
        }
        return out;
    }

    TrigPolynomial scaled(const Rational& r) const {
        TrigPolynomial out(vars_);
        if (r.is_zero()) return out;
        for (const auto& [m, c] : terms_) out.terms_.emplace(m, c * r);
        return out;
    }

    TrigPolynomial pow(int e) const {
        if (e < 0) throw SymbolicError("negative power");
        TrigPolynomial acc = constant(vars_, Rational(1));
        for (int i = 0; i < e; ++i) acc = acc * *this;
        return acc;
    }

    friend bool operator==(const TrigPolynomial& a, const TrigPolynomial& b) {
        return a.vars_ == b.vars_ && a.terms_ == b.terms_;
    }

    // Values are already canonical; exposed for contract completeness
    // (idempotent, evaluation-equivalent).
    TrigPolynomial reduce() const { return *this; }

    double evaluate(const std::vector<double>& angles) const {
        if (angles.size() != vars_.size())
            throw SymbolicError("evaluate: angle count does not match variables");
        std::vector<double> c(vars_.size()), s(vars_.size());
        for (std::size_t v = 0; v < vars_.size(); ++v) {
            c[v] = std::cos(angles[v]);
            s[v] = std::sin(angles[v]);
        }
        long double acc = 0.0L;
        for (const auto& [m, r] : terms_) {
            long double t = static_cast<long double>(r.to_double()) *
                            std::sqrt(static_cast<long double>(m.radicand));
            for (std::size_t v = 0; v < vars_.size(); ++v) {
                for (int i = 0; i < m.cos_exp[v]; ++i) t *= c[v];
                if (m.sin_exp[v]) t *= s[v];
            }
            acc += t;
        }
        return static_cast<double>(acc);
    }

    // Smallest cos exponent of `var` across terms (0 for the zero polynomial).
    int min_cos_exponent(std::size_t var) const {
        int best = terms_.empty() ? 0 : 255;
        for (const auto& [m, r] : terms_) best = std::min(best, static_cast<int>(m.cos_exp.at(var)));
        return best;
    }

    bool depends_on(std::size_t var) const {
        for (const auto& [m, r] : terms_)
            if (m.cos_exp.at(var) != 0 || m.sin_exp.at(var) != 0) return true;
        return false;
    }

    // Exact division by c_var^e (requires every term to carry the factor).
    TrigPolynomial divided_by_cos_power(std::size_t var, int e) const {
        TrigPolynomial out(vars_);
        for (const auto& [m, r] : terms_) {
            if (m.cos_exp.at(var) < e)
                throw SymbolicError("divided_by_cos_power: factor not common");
            Monomial q = m;
            q.cos_exp[var] = static_cast<std::uint8_t>(q.cos_exp[var] - e);
            out.terms_.emplace(q, r);
        }
        return out;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, r] : terms_) {
            if (!first) out += " + ";
            first = false;
            out += r.str();
            if (m.radicand != 1) out += "*sqrt(" + std::to_string(m.radicand) + ")";
            for (std::size_t v = 0; v < vars_.size(); ++v) {
                if (m.cos_exp[v])
                    out += "*c_" + vars_[v] + "^" + std::to_string(m.cos_exp[v]);
                if (m.sin_exp[v])
                    out += "*s_" + vars_[v] + "^" + std::to_string(m.sin_exp[v]);
            }
        }
        return out;
    }

private:
    Monomial unit_monomial() const {
        Monomial m;
        m.cos_exp.assign(vars_.size(), 0);
        m.sin_exp.assign(vars_.size(), 0);
        return m;
    }

    void require_same_vars(const TrigPolynomial& other) const {
        if (vars_ != other.vars_)
            throw SymbolicError("operands carry different variable lists");
    }

    // Inserts coeff * monomial, rewriting s^2 -> 1 - c^2 until every sine
    // exponent is <= 1. Radicands are assumed square-free already.
    void accumulate(const Monomial& m, const Rational& coeff) {
        if (coeff.is_zero()) return;
        for (std::size_t v = 0; v < vars_.size(); ++v) {
            if (m.sin_exp[v] < 2) continue;
            const int q = m.sin_exp[v] / 2;
            const int rem = m.sin_exp[v] % 2;
            // (1 - c^2)^q expanded binomially.
            long long binom = 1;
            for (int i = 0; i <= q; ++i) {
                Monomial t = m;
                t.sin_exp[v] = static_cast<std::uint8_t>(rem);
                t.cos_exp[v] = static_cast<std::uint8_t>(t.cos_exp[v] + 2 * i);
                const long long sign = (i % 2 == 0) ? 1 : -1;
                accumulate(t, coeff * Rational(sign * binom));
                binom = binom * (q - i) / (i + 1);
            }
            return;
        }
        auto [it, inserted] = terms_.try_emplace(m, coeff);
        if (!inserted) {
            it->second = it->second + coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    std::vector<std::string> vars_;
    std::map<Monomial, Rational> terms_;
};

inline bool matches_up_to_global_sign(const TrigPolynomial& p, const TrigPolynomial& q) {
    return p == q || p == -q;
}

// Binds one circuit element to a symbol; angle_multiplier 2 marks a folded
// double-pass element whose physical angle is twice the symbol's.
struct SymbolicElementBinding {
    std::size_t var;
    int angle_multiplier = 1;
};

using SymbolicState = std::map<fock::FockBasisState, TrigPolynomial>;

// Exact circuit evolution with per-element symbols. bindings[i] names the
// variable of circuit element i; shared variables model equal-angle elements.
inline SymbolicState symbolic_apply(const optics::Circuit& circuit,
                                    const std::vector<SymbolicElementBinding>& bindings,
                                    const std::vector<std::string>& var_names,
                                    const fock::FockBasisState& input) {
    if (bindings.size() != circuit.elements().size())
        throw SymbolicError("one binding per circuit element required");
    SymbolicState state;
    state.emplace(input, TrigPolynomial::constant(var_names, Rational(1)));

    auto factorial_i128 = [](int n) {
        unsigned __int128 f = 1;
        for (int i = 2; i <= n; ++i) f *= static_cast<unsigned>(i);
        return f;
    };

    for (std::size_t ei = 0; ei < circuit.elements().size(); ++ei) {
        const auto& el = circuit.elements()[ei];
        const auto& bind = bindings[ei];
        if (bind.var >= var_names.size()) throw SymbolicError("binding variable out of range");

        TrigPolynomial cos_el = TrigPolynomial::cosine(var_names, bind.var);
        TrigPolynomial sin_el = TrigPolynomial::sine(var_names, bind.var);
        if (bind.angle_multiplier == 2) {
            // cos(2x) = 2c^2 - 1, sin(2x) = 2sc.
            const auto one = TrigPolynomial::constant(var_names, Rational(1));
            const auto c = cos_el, s = sin_el;
            cos_el = (c * c).scaled(Rational(2)) - one;
            sin_el = (s * c).scaled(Rational(2));
        } else if (bind.angle_multiplier != 1) {
            throw SymbolicError("unsupported angle multiplier");
        }

        SymbolicState next;
        for (const auto& [ket, poly] : state) {
            const int na = ket.occupation(el.mode_a);
            const int nb = ket.occupation(el.mode_b);
            for (int j = 0; j <= na; ++j) {
                for (int k = 0; k <= nb; ++k) {
                    const int na_out = j + k;
                    const int nb_out = na - j + nb - k;
                    // binomials and the sqrt(factorial ratio), kept exact:
                    // sqrt(P/Q) = sqrt(P*Q)/Q with the square part extracted.
                    long long binoms = 1;
                    {
                        long long bj = 1;
                        for (int i = 1; i <= j; ++i) bj = bj * (na - j + i) / i;
                        long long bk = 1;
                        for (int i = 1; i <= k; ++i) bk = bk * (nb - k + i) / i;
                        binoms = detail::checked_narrow(static_cast<__int128>(bj) * bk);
                    }
                    const unsigned __int128 p128 =
                        factorial_i128(na_out) * factorial_i128(nb_out);
                    const unsigned __int128 q128 = factorial_i128(na) * factorial_i128(nb);
                    const unsigned __int128 prod = p128 * q128;
                    if (prod > static_cast<unsigned __int128>(UINT64_MAX))
                        throw fock::CapacityError("symbolic factorial radicand overflow");
                    std::uint64_t rad = static_cast<std::uint64_t>(prod);
                    const std::uint64_t g = detail::extract_square(rad);
                    const long long q_ll = detail::checked_narrow(static_cast<__int128>(q128));
                    Rational coeff = Rational(binoms) *
                                     Rational(static_cast<long long>(g), q_ll);
                    if (k % 2 == 1) coeff = -coeff;

                    TrigPolynomial term =
                        TrigPolynomial::constant(var_names, coeff, rad) *
                        cos_el.pow(j + nb - k) * sin_el.pow(na - j + k);
                    term = term * poly;
                    if (term.is_zero()) continue;

                    fock::FockBasisState out_ket =
                        ket.with(el.mode_a, na_out).with(el.mode_b, nb_out);
                    auto it = next.find(out_ket);
                    if (it == next.end()) next.emplace(std::move(out_ket), std::move(term));
                    else it->second = it->second + term;
                }
            }
        }
        for (auto it = next.begin(); it != next.end();) {
            if (it->second.is_zero()) it = next.erase(it);
            else ++it;
        }
        state = std::move(next);
    }
    return state;
}

// <outcome|U|input> as a canonical TrigPolynomial. Elements get their own
// variables named theta, phi1, phi2, ... in circuit order. A photon-number
// mismatch yields the zero polynomial.
inline TrigPolynomial symbolic_amplitude(const optics::Circuit& circuit,
                                         const fock::FockBasisState& input,
                                         const fock::FockBasisState& outcome) {
    std::vector<std::string> names;
    std::vector<SymbolicElementBinding> bindings;
    for (std::size_t i = 0; i < circuit.elements().size(); ++i) {
        names.push_back(i == 0 ? "theta" : "phi" + std::to_string(i));
        bindings.push_back({i, 1});
    }
    if (names.empty()) names.push_back("theta");
    if (input.total() != outcome.total()) return TrigPolynomial::zero(names);
    auto state = symbolic_apply(circuit, bindings, names, input);
    auto it = state.find(outcome);
    return it == state.end() ? TrigPolynomial::zero(names) : it->second;
}

// As above with explicit variable sharing across elements.
inline TrigPolynomial symbolic_amplitude(const optics::Circuit& circuit,
                                         const std::vector<SymbolicElementBinding>& bindings,
                                         const std::vector<std::string>& var_names,
                                         const fock::FockBasisState& input,
                                         const fock::FockBasisState& outcome) {
    if (input.total() != outcome.total()) return TrigPolynomial::zero(var_names);
    auto state = symbolic_apply(circuit, bindings, var_names, input);
    auto it = state.find(outcome);
    return it == state.end() ? TrigPolynomial::zero(var_names) : it->second;
}

}  // namespace vbell::symbolic
