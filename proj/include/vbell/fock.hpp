#pragma once

// Exact sparse representation of multimode bosonic number states:
// basis kets, state vectors, projection/conditioning, overlaps,
// Schmidt data and reduced density matrices.

#include <algorithm>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vbell::fock {

using complex = std::complex<double>;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NormalizationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Occupation-number tuple |n_1, ..., n_m>. Entries are non-negative;
// the total photon number is cached and kept consistent.
class FockBasisState {
public:
    explicit FockBasisState(std::vector<int> occupations)
        : occ_(std::move(occupations)) {
        if (occ_.empty())
            throw DimensionError("FockBasisState needs at least one mode");
        total_ = 0;
        for (int n : occ_) {
            if (n < 0)
                throw DimensionError("negative occupation");
            total_ += n;
        }
    }

    static FockBasisState vacuum(int modes) {
        return FockBasisState(std::vector<int>(static_cast<std::size_t>(modes), 0));
    }

    int modes() const { return static_cast<int>(occ_.size()); }
    int total() const { return total_; }
    int occupation(int mode) const { return occ_.at(static_cast<std::size_t>(mode)); }
    const std::vector<int>& occupations() const { return occ_; }

    // Copy with one mode's occupation replaced.
    FockBasisState with(int mode, int count) const {
        std::vector<int> occ = occ_;
        occ.at(static_cast<std::size_t>(mode)) = count;
        return FockBasisState(std::move(occ));
    }

    // Copy with the given modes removed (indices sorted ascending).
    FockBasisState without(const std::vector<int>& drop) const {
        std::vector<int> occ;
        occ.reserve(occ_.size());
        std::size_t d = 0;
        for (int m = 0; m < modes(); ++m) {
            if (d < drop.size() && drop[d] == m) { ++d; continue; }
            occ.push_back(occ_[static_cast<std::size_t>(m)]);
        }
        return FockBasisState(std::move(occ));
    }

    friend auto operator<=>(const FockBasisState& a, const FockBasisState& b) {
        return a.occ_ <=> b.occ_;
    }
    friend bool operator==(const FockBasisState& a, const FockBasisState& b) {
        return a.occ_ == b.occ_;
    }

    std::string str() const {
        std::string s = "|";
        for (int m = 0; m < modes(); ++m) {
            if (m) s += ",";
            s += std::to_string(occ_[static_cast<std::size_t>(m)]);
        }
        return s + ">";
    }

private:
    std::vector<int> occ_;
    int total_ = 0;
};

// Constrains a subset of modes to exact photon counts.
using DetectionPattern = std::map<int, int>;

// Sparse ket: map from FockBasisState to complex amplitude. Every stored
// ket has exactly modes() entries; callers prune sub-threshold amplitudes.
class QuantumState {
public:
    using TermMap = std::map<FockBasisState, complex>;

    explicit QuantumState(int modes) : modes_(modes) {
        if (modes < 1)
            throw DimensionError("QuantumState needs at least one mode");
    }

    static QuantumState basis(FockBasisState ket) {
        QuantumState s(ket.modes());
        s.terms_.emplace(std::move(ket), complex(1.0, 0.0));
        return s;
    }

    int modes() const { return modes_; }
    const TermMap& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    void add(const FockBasisState& ket, complex amp) {
        if (ket.modes() != modes_)
            throw DimensionError("ket mode count does not match state");
        auto [it, inserted] = terms_.try_emplace(ket, amp);
        if (!inserted) it->second += amp;
    }

    complex amplitude(const FockBasisState& ket) const {
        auto it = terms_.find(ket);
        return it == terms_.end() ? complex(0.0) : it->second;
    }

    double squared_norm() const {
        double s = 0.0;
        for (const auto& [ket, amp] : terms_) s += std::norm(amp);
        return s;
    }

    bool is_normalized(double tol = 1e-12) const {
        return std::abs(squared_norm() - 1.0) <= tol;
    }

    void scale(complex factor) {
        for (auto& [ket, amp] : terms_) amp *= factor;
    }

    void normalize() {
        double n2 = squared_norm();
        if (n2 <= 0.0)
            throw NormalizationError("cannot normalize the zero state");
        scale(1.0 / std::sqrt(n2));
    }

    void prune(double threshold) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (std::abs(it->second) < threshold) it = terms_.erase(it);
            else ++it;
        }
    }

    bool empty() const { return terms_.empty(); }

private:
    int modes_;
    TermMap terms_;
};

// C(total + modes - 1, modes - 1), the number of occupation tuples.
// Throws CapacityError if the count overflows 64 bits.
inline std::uint64_t fock_dimension(int total_photons, int modes) {
    if (modes < 1) throw DimensionError("modes must be >= 1");
    if (total_photons < 0) throw DimensionError("photon count must be >= 0");
    const int n = total_photons + modes - 1;
    const int k = std::min(modes - 1, total_photons);
    unsigned __int128 acc = 1;
    for (int i = 1; i <= k; ++i) {
        acc = acc * static_cast<unsigned>(n - k + i);
        acc /= static_cast<unsigned>(i);  // exact: prefix products of C are integral
        if (acc > static_cast<unsigned __int128>(UINT64_MAX))
            throw CapacityError("fock_dimension overflows 64 bits");
    }
    return static_cast<std::uint64_t>(acc);
}

// <a|b>: conjugate-linear in a, linear in b.
inline complex inner_product(const QuantumState& a, const QuantumState& b) {
    if (a.modes() != b.modes())
        throw DimensionError("inner_product: mode count mismatch");
    // Iterate the smaller support.
    const QuantumState& small = a.term_count() <= b.term_count() ? a : b;
    const QuantumState& large = a.term_count() <= b.term_count() ? b : a;
    const bool small_is_a = &small == &a;
    complex acc = 0.0;
    for (const auto& [ket, amp] : small.terms()) {
        complex other = large.amplitude(ket);
        acc += small_is_a ? std::conj(amp) * other : std::conj(other) * amp;
    }
    return acc;
}

// |<a|b>|^2 for normalized states; invariant under global phases.
inline double fidelity(const QuantumState& a, const QuantumState& b) {
    if (!a.is_normalized(1e-9) || !b.is_normalized(1e-9))
        throw NormalizationError("fidelity requires normalized states");
    return std::norm(inner_product(a, b));
}

inline QuantumState tensor(const QuantumState& a, const QuantumState& b) {
    QuantumState out(a.modes() + b.modes());
    for (const auto& [ka, va] : a.terms()) {
        for (const auto& [kb, vb] : b.terms()) {
            std::vector<int> occ = ka.occupations();
            occ.insert(occ.end(), kb.occupations().begin(), kb.occupations().end());
            out.add(FockBasisState(std::move(occ)), va * vb);
        }
    }
    return out;
}

struct ProjectionResult {
    QuantumState conditional;  // constrained modes removed; empty state when probability is 0
    double probability = 0.0;
};

// Condition on exact photon counts in the pattern's modes. The conditional
// state drops the constrained modes and is renormalized. An empty match
// yields probability 0 and an empty state, not an exception.
inline ProjectionResult project(const QuantumState& state, const DetectionPattern& pattern) {
    std::vector<int> drop;
    drop.reserve(pattern.size());
    for (const auto& [mode, count] : pattern) {
        if (mode < 0 || mode >= state.modes())
            throw DimensionError("projection pattern mode out of range");
        if (count < 0)
            throw DimensionError("projection pattern count must be >= 0");
        drop.push_back(mode);
    }
    if (drop.size() >= static_cast<std::size_t>(state.modes()) && !drop.empty())
        throw DimensionError("projection must leave at least one mode");

    QuantumState cond(std::max(1, state.modes() - static_cast<int>(drop.size())));
    double prob = 0.0;
    for (const auto& [ket, amp] : state.terms()) {
        bool match = true;
        for (const auto& [mode, count] : pattern)
            if (ket.occupation(mode) != count) { match = false; break; }
        if (!match) continue;
        prob += std::norm(amp);
        cond.add(drop.empty() ? ket : ket.without(drop), amp);
    }
    if (prob <= 0.0)
        return {QuantumState(cond.modes()), 0.0};
    cond.scale(1.0 / std::sqrt(prob));
    return {std::move(cond), prob};
}

// Dense Hermitian density matrix over an explicit ket labeling.
struct DensityMatrix {
    std::vector<FockBasisState> basis_labels;  // lexicographically sorted
    Eigen::MatrixXcd entries;

    int dimension() const { return static_cast<int>(basis_labels.size()); }

    double trace() const { return entries.trace().real(); }

    bool is_valid(double tol = 1e-10) const {
        if (entries.rows() != dimension() || entries.cols() != dimension()) return false;
        if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > 1e-12) return false;
        if (std::abs(trace() - 1.0) > 1e-12) return false;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries);
        return es.eigenvalues().minCoeff() > -tol;
    }
};

// Maximally mixed state over the given labels.
inline DensityMatrix maximally_mixed(std::vector<FockBasisState> labels) {
    std::sort(labels.begin(), labels.end());
    const auto d = static_cast<Eigen::Index>(labels.size());
    DensityMatrix rho{std::move(labels), Eigen::MatrixXcd::Identity(d, d)};
    rho.entries /= static_cast<double>(d);
    return rho;
}

// Partial trace over the complement of keep_modes (indices into state's modes).
inline DensityMatrix reduced_density(const QuantumState& state, const std::vector<int>& keep_modes) {
    if (keep_modes.empty())
        throw DimensionError("reduced_density needs a non-empty keep set");
    std::vector<int> keep = keep_modes;
    std::sort(keep.begin(), keep.end());
    for (int m : keep)
        if (m < 0 || m >= state.modes())
            throw DimensionError("reduced_density: mode out of range");
    std::vector<int> traced;
    for (int m = 0; m < state.modes(); ++m)
        if (!std::binary_search(keep.begin(), keep.end(), m)) traced.push_back(m);

    auto split = [&](const FockBasisState& ket) {
        std::vector<int> kept, rest;
        kept.reserve(keep.size());
        rest.reserve(traced.size());
        for (int m : keep) kept.push_back(ket.occupation(m));
        for (int m : traced) rest.push_back(ket.occupation(m));
        return std::pair(std::move(kept), std::move(rest));
    };

    // Group amplitudes by the traced-out occupations; each group contributes
    // an outer product on the kept labels.
    std::map<std::vector<int>, std::vector<std::pair<std::vector<int>, complex>>> groups;
    std::map<std::vector<int>, int> label_index;
    for (const auto& [ket, amp] : state.terms()) {
        auto [kept, rest] = split(ket);
        label_index.emplace(kept, 0);
        groups[std::move(rest)].emplace_back(std::move(kept), amp);
    }
    std::vector<FockBasisState> labels;
    labels.reserve(label_index.size());
    int idx = 0;
    for (auto& [occ, i] : label_index) {
        i = idx++;
        labels.emplace_back(occ);
    }
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(idx, idx);
    for (const auto& [rest, members] : groups)
        for (const auto& [ki, vi] : members)
            for (const auto& [kj, vj] : members)
                rho(label_index.at(ki), label_index.at(kj)) += vi * std::conj(vj);
    return {std::move(labels), std::move(rho)};
}

// (1/2) tr |rho - sigma| for density matrices over the same labeling.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.basis_labels != b.basis_labels)
        throw DimensionError("trace_distance: label mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.entries - b.entries);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// Singular values of the coefficient matrix M[n1][n2] of a 2-mode pure state,
// sorted descending. These are the Schmidt coefficients; their squares sum to 1.
inline std::vector<double> schmidt_coefficients(const QuantumState& state) {
    if (state.modes() != 2)
        throw DimensionError("schmidt_coefficients requires a 2-mode state");
    if (!state.is_normalized(1e-9))
        throw NormalizationError("schmidt_coefficients requires a normalized state");
    int max_a = 0, max_b = 0;
    for (const auto& [ket, amp] : state.terms()) {
        max_a = std::max(max_a, ket.occupation(0));
        max_b = std::max(max_b, ket.occupation(1));
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(max_a + 1, max_b + 1);
    for (const auto& [ket, amp] : state.terms())
        m(ket.occupation(0), ket.occupation(1)) = amp;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        double s = svd.singularValues()(i);
        if (s > 1e-12) out.push_back(s);
    }
    std::sort(out.rbegin(), out.rend());
    return out;
}

}  // namespace vbell::fock
