#pragma once

// Amplitude-equalization solver: multi-start Newton over the open angle box
// (0, pi/2)^n for the system |A_k| = |A_{k+1}|, k = 0..n-1 (squared moduli by
// default, signed real parts in signed mode). Residuals are normalized by the
// mean squared modulus so tolerances stay meaningful when the amplitudes
// themselves are tiny (they reach ~4e-7 for the four-stage source).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vbell/vsource.hpp"

namespace vbell::solver {

struct SolveConfig {
    int grid_points_per_dim = 32;  // capped at 14 (dim 3) / 8 (dim 4+) unless uncapped
    bool uncapped_grid = false;
    int max_iterations = 60;
    double tolerance = 1e-10;          // accepted normalized residual norm
    double fd_step = 1e-7;             // central-difference step
    double dedup_radius = 1e-6;        // angle-space L-inf duplicate radius
    double boundary_margin = 1e-6;     // reject T within this of {0, 1}
    double degenerate_amplitude = 1e-7;  // reject roots with max |A_k| below
    double start_margin = 0.08;        // grid inset from the box edges
    int threads = 1;
    bool signed_mode = false;
};

// The n-equation system attached to one source spec; angles in the base spec
// are placeholders and get overwritten per evaluation.
struct EqualizationProblem {
    vsource::VSchemeSpec base;
    bool signed_mode = false;

    int dimension() const { return base.parameter_count(); }

    // Squared-moduli equalization: branch symmetry pairs up the adjacent
    // differences, leaving n independent equations. Sign-level equalization
    // has no such pairing, so every adjacent difference counts and the
    // system is overdetermined.
    int equation_count() const {
        return signed_mode ? base.bell_dimension() - 1 : dimension();
    }

    vsource::BellAmplitudeVector amplitudes(const std::vector<double>& angles) const {
        vsource::VSchemeSpec spec = base;
        spec.angles = angles;
        return vsource::bell_amplitudes(spec);
    }

    std::vector<double> residuals(const std::vector<double>& angles) const {
        const auto v = amplitudes(angles);
        const std::size_t d = v.amplitudes.size();
        double scale = 0.0;
        for (const auto& a : v.amplitudes) scale += std::norm(a);
        scale = std::max(scale / static_cast<double>(d), 1e-300);
        std::vector<double> r(static_cast<std::size_t>(equation_count()));
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (signed_mode) {
                r[k] = (v.amplitudes[k].real() - v.amplitudes[k + 1].real()) /
                       std::sqrt(scale);
            } else {
                r[k] = (std::norm(v.amplitudes[k]) - std::norm(v.amplitudes[k + 1])) / scale;
            }
        }
        return r;
    }
};

struct Solution {
    std::vector<double> angles;            // canonical representatives in (0, pi/2)
    std::vector<double> transmittivities;  // cos^2 of each angle
    double residual_norm = 0.0;
    double herald_probability = 0.0;
    double common_modulus = 0.0;      // mean |A_k|
    double max_modulus_spread = 0.0;  // max |A_k| - min |A_k|
    std::vector<fock::complex> amplitudes;
    std::vector<int> signs;  // sign of Re A_k; 0 when the amplitude is negligible
};

struct SolveResult {
    std::vector<Solution> solutions;  // sorted by angle vector
    int starts = 0;
    int converged = 0;
};

struct VerificationRecord {
    double residual_norm = 0.0;
    double max_modulus_deviation = 0.0;   // max |A_k| - min |A_k| at the solution
    double schmidt_max_deviation = 0.0;   // worst |schmidt_k - 1/sqrt(d)|
    bool equalized = false;
};

// Exact roots of 6T^2 - 6T + 1 = 0, the single-splitter equal-modulus
// condition: T = 1/2 -+ 1/(2 sqrt(3)).
inline std::pair<double, double> closed_form_quadratic() {
    const double half_width = 0.5 / std::sqrt(3.0);
    return {0.5 - half_width, 0.5 + half_width};
}

namespace detail {

inline double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline std::optional<std::vector<double>> newton(const EqualizationProblem& problem,
                                                 std::vector<double> x,
                                                 const SolveConfig& cfg) {
    constexpr double pi = std::numbers::pi;
    const int dim = problem.dimension();
    const double lo = 5e-4, hi = pi - 5e-4;
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        const std::vector<double> r = problem.residuals(x);
        if (norm_inf(r) < cfg.tolerance) return x;
        const int eqs = static_cast<int>(r.size());
        Eigen::MatrixXd jac(eqs, dim);
        for (int j = 0; j < dim; ++j) {
            std::vector<double> xp = x, xm = x;
            xp[static_cast<std::size_t>(j)] += cfg.fd_step;
            xm[static_cast<std::size_t>(j)] -= cfg.fd_step;
            const auto rp = problem.residuals(xp);
            const auto rm = problem.residuals(xm);
            for (int k = 0; k < eqs; ++k)
                jac(k, j) = (rp[static_cast<std::size_t>(k)] - rm[static_cast<std::size_t>(k)]) /
                            (2.0 * cfg.fd_step);
        }
        Eigen::VectorXd rhs(eqs);
        for (int k = 0; k < eqs; ++k) rhs(k) = -r[static_cast<std::size_t>(k)];
        Eigen::VectorXd dx;
        if (eqs == dim) {
            Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
            if (!lu.isInvertible()) return std::nullopt;
            dx = lu.solve(rhs);
        } else {
            // Overdetermined: Gauss-Newton through the normal equations. The
            // final residual recheck keeps only genuine roots.
            Eigen::FullPivLU<Eigen::MatrixXd> lu(jac.transpose() * jac);
            if (!lu.isInvertible()) return std::nullopt;
            dx = lu.solve(jac.transpose() * rhs);
        }
        if (!dx.allFinite()) return std::nullopt;
        const double step_cap = 0.5;
        const double mag = dx.cwiseAbs().maxCoeff();
        if (mag > step_cap) dx *= step_cap / mag;
        for (int j = 0; j < dim; ++j)
            x[static_cast<std::size_t>(j)] =
                std::clamp(x[static_cast<std::size_t>(j)] + dx(j), lo, hi);
    }
    return std::nullopt;
}

// Fold an angle into the canonical box. Squared-moduli equalization is
// invariant under theta -> pi - theta (each T unchanged), so magnitudes fold
// into (0, pi/2); signed mode only reduces modulo pi.
inline double canonical_angle(double a, bool signed_mode) {
    constexpr double pi = std::numbers::pi;
    a = std::fmod(a, pi);
    if (a < 0) a += pi;
    if (!signed_mode && a > pi / 2.0) a = pi - a;
    return a;
}

}  // namespace detail

inline int effective_grid(int requested, int dim, bool uncapped) {
    if (uncapped || dim <= 2) return requested;
    return std::min(requested, dim == 3 ? 14 : 8);
}

inline SolveResult solve(const EqualizationProblem& problem, const SolveConfig& cfg = {}) {
    constexpr double pi = std::numbers::pi;
    problem.base.validate();
    const int dim = problem.dimension();
    const int grid = effective_grid(cfg.grid_points_per_dim, dim, cfg.uncapped_grid);

    std::vector<double> points;
    if (grid <= 1) {
        points.push_back(pi / 4.0);
    } else {
        const double lo = cfg.start_margin, hi = pi / 2.0 - cfg.start_margin;
        for (int i = 0; i < grid; ++i)
            points.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                      static_cast<double>(grid - 1));
    }

    long long total = 1;
    for (int j = 0; j < dim; ++j) total *= static_cast<long long>(points.size());

    auto start_for = [&](long long index) {
        std::vector<double> x(static_cast<std::size_t>(dim));
        for (int j = 0; j < dim; ++j) {
            x[static_cast<std::size_t>(j)] =
                points[static_cast<std::size_t>(index % static_cast<long long>(points.size()))];
            index /= static_cast<long long>(points.size());
        }
        return x;
    };

    std::vector<std::vector<std::vector<double>>> chunk_roots;
    const int threads = std::max(1, cfg.threads);
    chunk_roots.resize(static_cast<std::size_t>(threads));
    std::atomic<int> converged{0};

    auto run_chunk = [&](int chunk) {
        const long long begin = total * chunk / threads;
        const long long end = total * (chunk + 1) / threads;
        for (long long i = begin; i < end; ++i) {
            auto root = detail::newton(problem, start_for(i), cfg);
            if (!root) continue;
            converged.fetch_add(1, std::memory_order_relaxed);
            chunk_roots[static_cast<std::size_t>(chunk)].push_back(std::move(*root));
        }
    };

    if (threads == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(run_chunk, t);
        for (auto& th : pool) th.join();
    }

    SolveResult result;
    result.starts = static_cast<int>(total);
    result.converged = converged.load();

    std::vector<std::vector<double>> kept;
    for (auto& chunk : chunk_roots) {
        for (auto& raw : chunk) {
            std::vector<double> x(raw.size());
            for (std::size_t j = 0; j < raw.size(); ++j)
                x[j] = detail::canonical_angle(raw[j], cfg.signed_mode);
            // Stage angles of commuting wirings are interchangeable; use the
            // sorted representative.
            if (vsource::stages_commute(problem.base.topology) && x.size() > 1)
                std::sort(x.begin() + 1, x.end());

            bool boundary = false;
            for (double a : x) {
                const double t = std::cos(a) * std::cos(a);
                if (t < cfg.boundary_margin || t > 1.0 - cfg.boundary_margin) boundary = true;
            }
            if (boundary) continue;

            const auto r = problem.residuals(x);
            if (detail::norm_inf(r) >= cfg.tolerance) continue;

            const auto v = problem.amplitudes(x);
            double max_mod = 0.0;
            for (const auto& a : v.amplitudes) max_mod = std::max(max_mod, std::abs(a));
            if (max_mod < cfg.degenerate_amplitude) continue;

            bool dup = false;
            for (const auto& seen : kept) {
                double dist = 0.0;
                for (std::size_t j = 0; j < x.size(); ++j)
                    dist = std::max(dist, std::abs(x[j] - seen[j]));
                if (dist < cfg.dedup_radius) { dup = true; break; }
            }
            if (dup) continue;
            kept.push_back(x);

            Solution sol;
            sol.angles = x;
            for (double a : x) sol.transmittivities.push_back(std::cos(a) * std::cos(a));
            sol.residual_norm = detail::norm_inf(r);
            sol.herald_probability = v.herald_probability;
            double min_mod = std::abs(v.amplitudes[0]), sum_mod = 0.0;
            for (const auto& a : v.amplitudes) {
                min_mod = std::min(min_mod, std::abs(a));
                sum_mod += std::abs(a);
            }
            sol.common_modulus = sum_mod / static_cast<double>(v.amplitudes.size());
            sol.max_modulus_spread = max_mod - min_mod;
            sol.amplitudes = v.amplitudes;
            for (const auto& a : v.amplitudes) {
                if (std::abs(a) < cfg.degenerate_amplitude * 1e-3) sol.signs.push_back(0);
                else sol.signs.push_back(a.real() >= 0.0 ? 1 : -1);
            }
            result.solutions.push_back(std::move(sol));
        }
    }

    std::sort(result.solutions.begin(), result.solutions.end(),
              [](const Solution& a, const Solution& b) { return a.angles < b.angles; });
    return result;
}

inline SolveResult solve(const vsource::VSchemeSpec& spec, const SolveConfig& cfg = {}) {
    return solve(EqualizationProblem{spec, cfg.signed_mode}, cfg);
}

inline VerificationRecord verify(const Solution& solution, const EqualizationProblem& problem) {
    VerificationRecord rec;
    rec.residual_norm = detail::norm_inf(problem.residuals(solution.angles));

    const auto v = problem.amplitudes(solution.angles);
    double max_mod = 0.0, min_mod = std::abs(v.amplitudes.at(0));
    for (const auto& a : v.amplitudes) {
        max_mod = std::max(max_mod, std::abs(a));
        min_mod = std::min(min_mod, std::abs(a));
    }
    rec.max_modulus_deviation = max_mod - min_mod;

    vsource::VSchemeSpec spec = problem.base;
    spec.angles = solution.angles;
    const auto schmidt = fock::schmidt_coefficients(vsource::heralded_state(spec));
    const double uniform = 1.0 / std::sqrt(static_cast<double>(spec.bell_dimension()));
    double worst =
        schmidt.size() == static_cast<std::size_t>(spec.bell_dimension()) ? 0.0 : uniform;
    for (double s : schmidt) worst = std::max(worst, std::abs(s - uniform));
    rec.schmidt_max_deviation = worst;

    rec.equalized = rec.max_modulus_deviation < 1e-6 && rec.schmidt_max_deviation < 1e-6;
    return rec;
}

}  // namespace vbell::solver
