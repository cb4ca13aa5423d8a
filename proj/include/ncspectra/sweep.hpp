#pragma once

// Spectrum sweeps: expand a config into (theta, n, m, branch) tuples, solve
// each level, and optionally pin every (n, m) against the finite-difference
// eigensolver. Row errors are recorded in flags instead of aborting the sweep.

#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "core.hpp"
#include "oracle.hpp"
#include "perturbation.hpp"
#include "series.hpp"

namespace ncspectra {

struct SpectrumRow {
    SpaceVariant variant = SpaceVariant::Canonical;
    int n = 0, m = 0;
    std::optional<SpinBranch> branch;
    double theta = 0.0;
    double E_commutative = 0.0;
    double E_zeroth_nc = 0.0;
    double delta_E_first_order = 0.0;
    double E_total = 0.0;
    ClosedFormMode method = ClosedFormMode::QuadratureOnly;
    std::optional<double> oracle_E;
    std::vector<std::string> discrepancy_flags;

    // Companion values consumed by the report writer (not CSV columns):
    // the same shift evaluated under the published closed form and under
    // plain quadrature, whichever the sweep's own method was.
    double shift_paper_literal = std::numeric_limits<double>::quiet_NaN();
    double shift_quadrature = std::numeric_limits<double>::quiet_NaN();
    PotentialParams params;
};

namespace detail {

struct LevelCache {
    std::map<std::pair<int, int>, SeriesSolution> solutions;  // (n, m)
    std::map<std::pair<int, int>, std::string> solve_errors;
    // Shift integrals I keyed by (n, m) with m = -1 for the complex tower
    // reference; one entry per closed-form mode actually needed.
    std::map<std::tuple<int, int, int>, double> integrals;
    std::map<std::tuple<int, int, int>, std::string> integral_errors;
    std::map<int, OracleResult> oracle;  // keyed by m
    std::map<int, std::string> oracle_errors;
};

inline int mode_index(ClosedFormMode m) { return static_cast<int>(m); }

/// Shift integral with memoization; key.m == -1 requests the complex tower
/// reference integral for that n.
inline void cache_integral(LevelCache& cache, const PotentialParams& params, int n, int m,
                           ClosedFormMode mode) {
    const auto key = std::make_tuple(n, m, mode_index(mode));
    if (cache.integrals.count(key) || cache.integral_errors.count(key)) return;
    try {
        double I;
        if (m < 0) {
            I = complex_reference_integral(params, n, mode);
        } else {
            const auto& sol = cache.solutions.at({n, m});
            I = canonical_shift_integral(sol, mode);
        }
        cache.integrals[key] = I;
    } catch (const std::exception& e) {
        cache.integral_errors[key] = e.what();
    }
}

}  // namespace detail

/// One level per (theta, n, m, branch), ordered by theta, then n, then m,
/// then branch ("-" before "+"). Canonical sweeps ignore the branch axis.
inline std::vector<SpectrumRow> run_sweep(const ExperimentConfig& cfg) {
    const bool complex_variant = cfg.nc.variant == SpaceVariant::Complex;
    std::vector<double> thetas = cfg.theta_values;
    std::sort(thetas.begin(), thetas.end());
    thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
    std::vector<SpinBranch> branches = cfg.branches;
    std::sort(branches.begin(), branches.end());
    branches.erase(std::unique(branches.begin(), branches.end()), branches.end());
    if (branches.empty()) branches = {SpinBranch::Minus, SpinBranch::Plus};

    // Serial pre-pass: series solutions, shift integrals and oracle runs are
    // shared across rows, so fill the caches before fanning out.
    detail::LevelCache cache;
    for (int n = cfg.n_range.lo; n <= cfg.n_range.hi; ++n)
        for (int m = cfg.m_range.lo; m <= cfg.m_range.hi; ++m) {
            try {
                cache.solutions.emplace(std::make_pair(n, m), solve_quasi_exact(cfg.params, n, m));
            } catch (const std::exception& e) {
                cache.solve_errors[{n, m}] = e.what();
            }
        }

    const bool any_positive_theta =
        std::any_of(thetas.begin(), thetas.end(), [](double t) { return t > 0.0; });
    std::vector<ClosedFormMode> wanted = {cfg.nc.closed_form_mode};
    // The report writer always compares the published closed form against
    // quadrature, so compute both alongside whatever the sweep method is.
    for (auto extra : {ClosedFormMode::PaperLiteral, ClosedFormMode::QuadratureOnly})
        if (extra != cfg.nc.closed_form_mode) wanted.push_back(extra);
    if (any_positive_theta) {
        for (int n = cfg.n_range.lo; n <= cfg.n_range.hi; ++n)
            for (int m = cfg.m_range.lo; m <= cfg.m_range.hi; ++m) {
                if (!cache.solutions.count({n, m})) continue;
                for (auto mode : wanted) {
                    if (complex_variant)
                        detail::cache_integral(cache, cfg.params, n, -1, mode);
                    else if (m >= 1)
                        detail::cache_integral(cache, cfg.params, n, m, mode);
                }
            }
    }

    if (cfg.validate_oracle) {
        const int k = cfg.n_range.hi + 2;
        for (int m = cfg.m_range.lo; m <= cfg.m_range.hi; ++m) {
            try {
                cache.oracle.emplace(m, radial_eigensolve(cfg.params, m, cfg.grid, k));
            } catch (const std::exception& e) {
                cache.oracle_errors[m] = e.what();
            }
        }
    }

    // Row skeletons in final order.
    std::vector<SpectrumRow> rows;
    for (double theta : thetas)
        for (int n = cfg.n_range.lo; n <= cfg.n_range.hi; ++n)
            for (int m = cfg.m_range.lo; m <= cfg.m_range.hi; ++m) {
                if (complex_variant) {
                    for (auto br : branches) {
                        SpectrumRow r;
                        r.variant = cfg.nc.variant;
                        r.n = n;
                        r.m = m;
                        r.branch = br;
                        r.theta = theta;
                        rows.push_back(r);
                    }
                } else {
                    SpectrumRow r;
                    r.variant = cfg.nc.variant;
                    r.n = n;
                    r.m = m;
                    r.theta = theta;
                    rows.push_back(r);
                }
            }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto compute_row = [&](SpectrumRow& row) {
        row.method = cfg.nc.closed_form_mode;
        row.params = cfg.params;
        NCConfig nc = cfg.nc;
        nc.theta = row.theta;
        const QuantumState state{row.n, row.m, row.branch};

        auto solve_err = cache.solve_errors.find({row.n, row.m});
        if (solve_err != cache.solve_errors.end()) {
            row.discrepancy_flags.push_back("SERIES_ERROR:" + solve_err->second);
            row.E_commutative = row.E_zeroth_nc = row.delta_E_first_order = row.E_total = nan;
            return;
        }
        const SeriesSolution& sol = cache.solutions.at({row.n, row.m});
        row.E_commutative = sol.energy;
        if (sol.constraint_residual > 1e-8) row.discrepancy_flags.push_back("NONTERMINATING");
        row.E_zeroth_nc = zeroth_energy(state, cfg.params, nc);

        const int mult = effective_multiplier(row.m, nc.variant, row.branch);
        auto shift_with = [&](ClosedFormMode mode) -> std::pair<double, std::string> {
            if (row.theta == 0.0 || mult == 0) return {0.0, ""};
            const auto key = std::make_tuple(row.n, complex_variant ? -1 : row.m,
                                             detail::mode_index(mode));
            auto it = cache.integrals.find(key);
            if (it == cache.integrals.end()) {
                auto err = cache.integral_errors.find(key);
                return {nan, err != cache.integral_errors.end() ? err->second : "integral unavailable"};
            }
            const double I = it->second;
            if (complex_variant && mode == ClosedFormMode::PaperLiteral)
                return {nc.theta * mult * I, ""};
            return {cfg.params.c * M_PI * nc.theta * mult * I, ""};
        };

        auto [shift, shift_err] = shift_with(cfg.nc.closed_form_mode);
        if (!shift_err.empty()) row.discrepancy_flags.push_back("SHIFT_ERROR:" + shift_err);
        row.delta_E_first_order = shift;
        row.E_total = row.E_zeroth_nc + row.delta_E_first_order;
        row.shift_paper_literal = shift_with(ClosedFormMode::PaperLiteral).first;
        row.shift_quadrature = shift_with(ClosedFormMode::QuadratureOnly).first;

        if (cfg.validate_oracle) {
            auto oit = cache.oracle.find(row.m);
            if (oit == cache.oracle.end()) {
                row.discrepancy_flags.push_back("ORACLE_ERROR:" + cache.oracle_errors.at(row.m));
            } else {
                const OracleResult& oracle = oit->second;
                int best = 0;
                double best_diff = std::numeric_limits<double>::infinity();
                for (size_t i = 0; i < oracle.eigenvalues.size(); ++i) {
                    const double d = std::abs(oracle.eigenvalues[i] - row.E_commutative);
                    if (d < best_diff) {
                        best_diff = d;
                        best = static_cast<int>(i);
                    }
                }
                row.oracle_E = oracle.eigenvalues[best];
                if (!oracle.converged[best]) row.discrepancy_flags.push_back("ORACLE_UNCONVERGED");
                const double rel =
                    best_diff / std::max(std::abs(*row.oracle_E), 1e-12);
                if (rel > 1e-4) row.discrepancy_flags.push_back("ORACLE_MISMATCH");
            }
        }
    };

    // Rows are independent once the caches are frozen; split them across a
    // few workers and write into preallocated slots to keep output ordering
    // deterministic.
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(std::min<size_t>(rows.size(), 8), hw);
    if (workers <= 1) {
        for (auto& r : rows) compute_row(r);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= rows.size()) break;
                    compute_row(rows[i]);
                }
            });
        for (auto& t : pool) t.join();
    }
    return rows;
}

/// True when any oracle-validated row failed to converge or errored; the CLI
/// maps this to its numerical-failure exit code.
inline bool sweep_had_oracle_failure(const std::vector<SpectrumRow>& rows) {
    for (const auto& r : rows)
        for (const auto& f : r.discrepancy_flags)
            if (f.rfind("ORACLE_UNCONVERGED", 0) == 0 || f.rfind("ORACLE_ERROR", 0) == 0) return true;
    return false;
}

}  // namespace ncspectra
