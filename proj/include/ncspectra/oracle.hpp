#pragma once

// Independent finite-difference ground truth for the radial problem.
//
// Uniform spacing: conservative (finite-volume) discretization of the reduced
// problem in u = sqrt(r) R on cell-centered nodes r_i = (i+1/2)h covering
// [0, r_max]; grid.r_min only drives the log-spaced variant. The innermost
// face sits exactly at r = 0, where the flux r R' vanishes identically — the
// regularity condition, with no boundary model. (A Dirichlet wall at small
// r_min shifts m = 0 levels by O(1/|log r_min|); dropping the flux at a face
// r_min > 0 leaves an O(r_min) bias for Coulomb-cusped m = 0 states. Both sit
// far above tolerance.) The matrix stays symmetric tridiagonal:
//   d_i = 2/h^2 + m^2/r_i^2 + V(r_i),
//   e_i = -(face radius)/(h^2 sqrt(r_i r_{i+1})),
// and is second-order accurate uniformly in m.
//
// Log spacing: x = ln r, w(x) = R, generalized pencil A w = E B w with
//   A: d = 2/h^2 + m^2 + r^2 V(r), e = -1/h^2,  B = diag(r^2),
// solved without symmetrization (the symmetrized matrix has norm
// ~ 1/(h r_min)^2 and loses the low eigenvalues to roundoff). m = 0 uses a
// regularity ghost from R'(0+) = c R(0); m >= 1 keeps the Dirichlet wall.
//
// Eigenvalues: Sturm-count bisection on the LDL^T pivots of A - lambda B;
// eigenvectors by inverse iteration with partial pivoting.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace ncspectra {

namespace detail {

struct Pencil {
    std::vector<double> d, e;   // A tridiagonal
    std::vector<double> bdiag;  // B diagonal (all ones for the uniform scheme)
    std::vector<double> nodes;
    std::vector<double> weights;  // dr-measure weights per node
};

inline double potential(const PotentialParams& p, double r) {
    return p.c / r + p.a * r + p.b * r * r;
}

inline Pencil build_pencil(const PotentialParams& p, int m, const GridSpec& g, int points) {
    Pencil pc;
    const int N = points;
    if (g.spacing == GridSpec::Spacing::Uniform) {
        const double h = g.r_max / N;
        pc.d.resize(static_cast<size_t>(N));
        pc.e.resize(static_cast<size_t>(N) - 1);
        pc.nodes.resize(static_cast<size_t>(N));
        pc.bdiag.assign(static_cast<size_t>(N), 1.0);
        pc.weights.assign(static_cast<size_t>(N), h);
        // The i = 0 row needs no special case: its left face is r = 0, whose
        // flux term carries a factor 0, and (r_left + r_right) = 2 r_i holds
        // for every cell including the first.
        for (int i = 0; i < N; ++i) {
            const double r = h * (i + 0.5);
            pc.nodes[static_cast<size_t>(i)] = r;
            pc.d[static_cast<size_t>(i)] =
                2.0 / (h * h) + static_cast<double>(m) * m / (r * r) + potential(p, r);
        }
        for (int i = 0; i + 1 < N; ++i) {
            const double face = h * (i + 1);
            pc.e[static_cast<size_t>(i)] =
                -face / (h * h * std::sqrt(pc.nodes[static_cast<size_t>(i)] * pc.nodes[static_cast<size_t>(i) + 1]));
        }
    } else {
        const double x_min = std::log(g.r_min), x_max = std::log(g.r_max);
        const double h = (x_max - x_min) / (N + 1);
        pc.d.resize(static_cast<size_t>(N));
        pc.e.assign(static_cast<size_t>(N) - 1, -1.0 / (h * h));
        pc.nodes.resize(static_cast<size_t>(N));
        pc.bdiag.resize(static_cast<size_t>(N));
        pc.weights.resize(static_cast<size_t>(N));
        for (int i = 0; i < N; ++i) {
            const double r = std::exp(x_min + h * (i + 1));
            pc.nodes[static_cast<size_t>(i)] = r;
            pc.bdiag[static_cast<size_t>(i)] = r * r;
            pc.weights[static_cast<size_t>(i)] = r * h;  // dr = r dx
            pc.d[static_cast<size_t>(i)] =
                2.0 / (h * h) + static_cast<double>(m) * m + r * r * potential(p, r);
        }
        if (m == 0) {
            // Ghost w_{-1} = w_0 (1 - h c r_0) from the regular small-r behavior
            // R(r) ~ R(0)(1 + c r); plain Neumann stalls when c != 0.
            const double r0 = pc.nodes[0];
            pc.d[0] = 1.0 / (h * h) + r0 * r0 * potential(p, r0) + p.c * r0 / h;
        }
    }
    return pc;
}

/// Number of pencil eigenvalues strictly below lam (negative LDL^T pivots).
inline int sturm_count(const Pencil& pc, double lam) {
    const size_t n = pc.d.size();
    int count = 0;
    double q = pc.d[0] - lam * pc.bdiag[0];
    if (q < 0.0) ++count;
    for (size_t i = 1; i < n; ++i) {
        const double denom = q == 0.0 ? 1e-300 : q;
        q = (pc.d[i] - lam * pc.bdiag[i]) - pc.e[i - 1] * pc.e[i - 1] / denom;
        if (q < 0.0) ++count;
    }
    return count;
}

inline std::pair<double, double> gershgorin_bounds(const Pencil& pc) {
    const size_t n = pc.d.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (size_t i = 0; i < n; ++i) {
        const double off = (i > 0 ? std::abs(pc.e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(pc.e[i]) : 0.0);
        lo = std::min(lo, (pc.d[i] - off) / pc.bdiag[i]);
        hi = std::max(hi, (pc.d[i] + off) / pc.bdiag[i]);
    }
    return {lo, hi};
}

inline double bisect_eigenvalue(const Pencil& pc, int index, double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(pc, mid) >= index + 1)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-14 * std::max(1.0, std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

/// One inverse-iteration eigenvector of (A - sigma B) with partial pivoting.
inline std::vector<double> inverse_iteration(const Pencil& pc, double sigma) {
    const size_t n = pc.d.size();
    // Factor T = A - sigma B once per iteration sweep (Gaussian elimination
    // with partial pivoting on a tridiagonal; fill-in limited to one band).
    std::vector<double> diag(n), upper1(n, 0.0), upper2(n, 0.0), lower(n, 0.0);
    std::vector<int> pivoted(n, 0);
    auto factor = [&] {
        for (size_t i = 0; i < n; ++i) {
            diag[i] = pc.d[i] - sigma * pc.bdiag[i];
            upper1[i] = i + 1 < n ? pc.e[i] : 0.0;
            upper2[i] = 0.0;
            lower[i] = i + 1 < n ? pc.e[i] : 0.0;  // subdiagonal entry T(i+1, i)
        }
        for (size_t i = 0; i + 1 < n; ++i) {
            double sub = lower[i];
            if (std::abs(sub) > std::abs(diag[i])) {
                pivoted[i] = 1;  // swap rows i, i+1
                std::swap(diag[i], sub);
                const double t1 = upper1[i];
                upper1[i] = diag[i + 1];
                diag[i + 1] = t1;
                upper2[i] = upper1[i + 1];
                upper1[i + 1] = 0.0;
            } else {
                pivoted[i] = 0;
            }
            if (diag[i] == 0.0) diag[i] = 1e-300;
            const double mult = sub / diag[i];
            lower[i] = mult;
            diag[i + 1] -= mult * upper1[i];
            if (i + 2 < n) upper1[i + 1] -= mult * upper2[i];
        }
        if (diag[n - 1] == 0.0) diag[n - 1] = 1e-300;
    };
    factor();

    std::vector<double> x(n, 1.0);
    for (size_t i = 0; i < n; ++i) x[i] = 1.0 / std::sqrt(static_cast<double>(n)) * (1.0 + 0.001 * ((i * 2654435761u) % 97));
    for (int sweep = 0; sweep < 3; ++sweep) {
        // Right-hand side is B x for the generalized problem.
        std::vector<double> rhs(n);
        for (size_t i = 0; i < n; ++i) rhs[i] = pc.bdiag[i] * x[i];
        // Forward elimination with recorded pivots.
        for (size_t i = 0; i + 1 < n; ++i) {
            if (pivoted[i]) std::swap(rhs[i], rhs[i + 1]);
            rhs[i + 1] -= lower[i] * rhs[i];
        }
        // Back substitution.
        for (size_t ii = n; ii-- > 0;) {
            double v = rhs[ii];
            if (ii + 1 < n) v -= upper1[ii] * rhs[ii + 1];
            if (ii + 2 < n) v -= upper2[ii] * rhs[ii + 2];
            rhs[ii] = v / diag[ii];
        }
        double nrm = 0.0;
        for (size_t i = 0; i < n; ++i) nrm += rhs[i] * rhs[i] * pc.bdiag[i];
        nrm = std::sqrt(nrm);
        for (size_t i = 0; i < n; ++i) x[i] = rhs[i] / nrm;
    }
    return x;
}

struct PencilSolve {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;  // B-normalized
};

inline PencilSolve solve_lowest(const Pencil& pc, int k, bool want_vectors) {
    auto [lo, hi] = gershgorin_bounds(pc);
    PencilSolve out;
    for (int j = 0; j < k; ++j)
        out.values.push_back(bisect_eigenvalue(pc, j, lo, hi));
    if (want_vectors) {
        for (int j = 0; j < k; ++j) {
            // Nudge degenerate shifts apart so inverse iteration separates them.
            double sigma = out.values[static_cast<size_t>(j)];
            if (j > 0 && std::abs(sigma - out.values[static_cast<size_t>(j) - 1]) < 1e-9 * std::max(1.0, std::abs(sigma)))
                sigma += 1e-8 * std::max(1.0, std::abs(sigma));
            out.vectors.push_back(inverse_iteration(pc, sigma));
        }
    }
    return out;
}

}  // namespace detail

/// Reasonable default grid for the given potential: left edge well inside the
/// centrifugal/Coulomb region, right edge several Gaussian widths past the
/// classical turning point of the highest requested level.
inline GridSpec default_grid(const PotentialParams& p, double energy_guess, int points = 8000) {
    GridSpec g;
    const double length = std::pow(p.b, -0.25);
    g.r_min = 1e-4 * length;
    g.r_max = 12.0 * length + 2.0 * std::sqrt(std::max(energy_guess, 1.0)) / std::pow(p.b, 0.25);
    g.points = points;
    g.spacing = GridSpec::Spacing::Uniform;
    return g;
}

/// <r^power> of a solved state: trapezoid over the grid plus a power-law
/// extrapolation of the missing [0, r_0] piece. The small-r exponent of
/// R^2 r^{power+1} is 2m + power + 1; at or below -1 the moment diverges.
inline double expectation_numeric(const OracleResult& result, int which_state, int power) {
    if (which_state < 0 || which_state >= static_cast<int>(result.radial_functions.size()))
        throw std::invalid_argument("expectation_numeric: state index out of range");
    if (power < -2) throw std::invalid_argument("expectation_numeric: power must be ≥ -2");
    const int m = result.m;
    if (2 * m + power + 1 <= -1)
        throw std::domain_error("expectation_numeric: divergent moment for this state's small-r exponent");

    const auto& R = result.radial_functions[static_cast<size_t>(which_state)];
    const auto& r = result.nodes;
    const size_t n = r.size();
    auto integrate = [&](int p) {
        auto f = [&](size_t i) { return R[i] * R[i] * std::pow(r[i], p + 1); };
        double acc = 0.0;
        for (size_t i = 0; i + 1 < n; ++i) acc += 0.5 * (f(i) + f(i + 1)) * (r[i + 1] - r[i]);
        const double expo = 2.0 * m + p + 1;  // f ~ C r^expo near 0
        acc += f(0) * r[0] / (expo + 1.0);    // integral of the fitted power law over [0, r_0]
        return acc;
    };
    return integrate(power) / integrate(0);
}

/// Lowest k eigenvalues/eigenfunctions of the radial problem at the given m.
/// Each eigenvalue is re-solved on a spacing-doubled grid; if the two values
/// differ by more than 1e-5 relative the state is flagged unconverged.
inline OracleResult radial_eigensolve(const PotentialParams& params, int m, const GridSpec& grid, int k) {
    require_valid(validate_params(params));
    if (m < 0) throw std::invalid_argument("radial_eigensolve: m must be ≥ 0");
    if (k < 1) throw std::invalid_argument("radial_eigensolve: k must be ≥ 1");
    if (!(grid.r_min > 0.0) || !(grid.r_max > grid.r_min))
        throw std::invalid_argument("radial_eigensolve: need 0 < r_min < r_max");
    if (grid.points < 100) throw std::invalid_argument("radial_eigensolve: points must be ≥ 100");
    if (k > grid.points / 8)
        throw std::invalid_argument("radial_eigensolve: k exceeds the states this grid can resolve");

    const auto pencil = detail::build_pencil(params, m, grid, grid.points);
    const auto pencil_half = detail::build_pencil(params, m, grid, grid.points / 2);
    auto fine = detail::solve_lowest(pencil, k, /*want_vectors=*/true);
    auto coarse = detail::solve_lowest(pencil_half, k, /*want_vectors=*/false);

    OracleResult res;
    res.grid = grid;
    res.m = m;
    res.nodes = pencil.nodes;
    res.weights = pencil.weights;
    res.eigenvalues = fine.values;
    for (int j = 0; j < k; ++j) {
        const double ej = fine.values[static_cast<size_t>(j)];
        const double rel = std::abs(ej - coarse.values[static_cast<size_t>(j)]) / std::max(std::abs(ej), 1e-8);
        res.converged.push_back(rel < 1e-5);
    }

    // Convert solver vectors to physical radial samples R(r_i) with
    // integral R^2 r dr = 1 under the stored weights.
    const size_t n = pencil.nodes.size();
    for (int j = 0; j < k; ++j) {
        const auto& y = fine.vectors[static_cast<size_t>(j)];
        std::vector<double> R(n);
        if (grid.spacing == GridSpec::Spacing::Uniform) {
            // y is u = sqrt(r) R up to scale.
            for (size_t i = 0; i < n; ++i) R[i] = y[i] / std::sqrt(pencil.nodes[i]);
        } else {
            for (size_t i = 0; i < n; ++i) R[i] = y[i];  // w = R directly
        }
        double norm2 = 0.0;
        for (size_t i = 0; i < n; ++i) norm2 += pencil.weights[i] * pencil.nodes[i] * R[i] * R[i];
        const double s = 1.0 / std::sqrt(norm2);
        double sign = 0.0;
        for (size_t i = 0; i < n && sign == 0.0; ++i)
            if (std::abs(R[i]) > 1e-8 * s) sign = R[i] > 0 ? 1.0 : -1.0;
        for (size_t i = 0; i < n; ++i) R[i] *= s * (sign < 0 ? -1.0 : 1.0);
        res.radial_functions.push_back(std::move(R));
    }

    for (int p = -2; p <= 2; ++p)
        if (2 * m + p + 1 > -1) res.moments[p] = expectation_numeric(res, 0, p);
    return res;
}

}  // namespace ncspectra
