#pragma once

// Power-series (Frobenius) solution of the commutative radial equation.
// Substituting R = r^m exp(-alpha r - beta r^2/2) S(r), S = sum_p a_p r^p,
// with alpha = a/(2 sqrt(b)), beta = sqrt(b), reduces the radial ODE to
//   S'' + [(2m+1)/r - 2 alpha - 2 beta r] S' + [lambda - mu / r] S = 0,
//   mu = c + alpha (2m+1),   lambda = E + alpha^2 - 2 beta (m+1),
// whose power balance at r^(p-1) gives the three-term relation
//   (p+1)(p+1+2m) a_{p+1} = (2 alpha p + mu) a_p + (2 beta (p-1) - lambda) a_{p-1}.
// The series terminates at order n iff lambda = 2 beta n (fixing E) and
// a_{n+1}(mu) = 0, a polynomial constraint that picks the admissible c.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "special.hpp"

namespace ncspectra {

struct RecurrenceRelation {
    PotentialParams params;
    int m = 0;
    double alpha = 0.0;
    double beta = 1.0;
    int order = 3;  // three-term relation

    double mu() const { return params.c + alpha * (2 * m + 1); }
    double lambda(double E) const { return E + alpha * alpha - 2.0 * beta * (m + 1); }

    /// Row p (p >= 0) of the relation, as coefficients (next, this, prev) with
    /// next*a_{p+1} + this*a_p + prev*a_{p-1} = 0 and a_{-1} = 0.
    struct Row {
        double next, current, prev;
    };
    Row row(int p, double E) const {
        return {static_cast<double>(p + 1) * (p + 1 + 2 * m),
                -(2.0 * alpha * p + mu()),
                -(2.0 * beta * (p - 1) - lambda(E))};
    }

    /// a_0..a_{count-1} generated from a_0 = 1 at the given energy.
    std::vector<double> coefficients(int count, double E) const {
        std::vector<double> a(static_cast<size_t>(count), 0.0);
        if (count > 0) a[0] = 1.0;
        for (int p = 0; p + 1 < count; ++p) {
            const Row r = row(p, E);
            const double prev = p > 0 ? a[static_cast<size_t>(p - 1)] : 0.0;
            a[static_cast<size_t>(p + 1)] = -(r.current * a[static_cast<size_t>(p)] + r.prev * prev) / r.next;
        }
        return a;
    }

    /// Max relation violation over all rows reaching into the list (a_p = 0 past the end).
    double residual(const std::vector<double>& a, double E) const {
        double scale = 0.0;
        for (double v : a) scale = std::max(scale, std::abs(v));
        if (scale == 0.0) return 0.0;
        double worst = 0.0;
        const int count = static_cast<int>(a.size());
        auto at = [&](int i) { return (i >= 0 && i < count) ? a[static_cast<size_t>(i)] : 0.0; };
        for (int p = 0; p <= count; ++p) {
            const Row r = row(p, E);
            worst = std::max(worst, std::abs(r.next * at(p + 1) + r.current * at(p) + r.prev * at(p - 1)));
        }
        return worst / scale;
    }
};

inline RecurrenceRelation build_recurrence(const PotentialParams& params, int m) {
    require_valid(validate_params(params));
    if (m < 0) throw std::invalid_argument("build_recurrence: m must be ≥ 0");
    RecurrenceRelation rel;
    rel.params = params;
    rel.m = m;
    rel.beta = std::sqrt(params.b);
    rel.alpha = params.a / (2.0 * rel.beta);
    return rel;
}

struct TerminationConstraint {
    double energy = 0.0;            // E fixed by lambda = 2 beta n
    std::vector<double> c_values;   // real Coulomb coefficients admitting termination at n
    std::function<double(double /*E*/, double /*c*/)> residual_fn;
};

namespace detail {

/// Real roots of a polynomial (ascending coefficients) via the companion matrix.
inline std::vector<double> real_poly_roots(const std::vector<double>& coeffs) {
    // Trim trailing zeros.
    int degree = static_cast<int>(coeffs.size()) - 1;
    while (degree > 0 && coeffs[static_cast<size_t>(degree)] == 0.0) --degree;
    std::vector<double> roots;
    if (degree < 1) return roots;
    if (degree == 1) {
        roots.push_back(-coeffs[0] / coeffs[1]);
        return roots;
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    const double lead = coeffs[static_cast<size_t>(degree)];
    for (int i = 0; i < degree; ++i) {
        companion(i, degree - 1) = -coeffs[static_cast<size_t>(i)] / lead;
        if (i > 0) companion(i, i - 1) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    double scale = 0.0;
    for (const auto& z : solver.eigenvalues()) scale = std::max(scale, std::abs(z));
    for (const auto& z : solver.eigenvalues())
        if (std::abs(z.imag()) <= 1e-10 * std::max(scale, 1.0)) roots.push_back(z.real());
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace detail

/// All real c for which the series terminates at order n, with the energy the
/// termination fixes. The a_{n+1}(mu) = 0 condition is a degree-(n+1)
/// polynomial in mu = c + alpha(2m+1); its real roots are translated back to c.
inline TerminationConstraint termination_constraints(double a, double b, int n, int m) {
    if (!(b > 0.0)) throw std::invalid_argument("termination_constraints: b must be > 0");
    if (!(a >= 0.0)) throw std::invalid_argument("termination_constraints: a must be ≥ 0");
    if (n < 0 || m < 0) throw std::invalid_argument("termination_constraints: n, m must be ≥ 0");

    const double beta = std::sqrt(b);
    const double alpha = a / (2.0 * beta);
    TerminationConstraint out;
    out.energy = 2.0 * beta * (1 + m + n) - alpha * alpha;

    // Polynomials in mu, ascending coefficients; lambda pinned to 2 beta n.
    const double lambda = 2.0 * beta * n;
    std::vector<std::vector<double>> apoly(static_cast<size_t>(n) + 2);
    apoly[0] = {1.0};
    for (int p = 0; p <= n; ++p) {
        // a_{p+1} = [(2 alpha p + mu) a_p + (2 beta (p-1) - lambda) a_{p-1}] / ((p+1)(p+1+2m))
        const double denom = static_cast<double>(p + 1) * (p + 1 + 2 * m);
        const auto& ap = apoly[static_cast<size_t>(p)];
        std::vector<double> next(ap.size() + 1, 0.0);
        for (size_t i = 0; i < ap.size(); ++i) {
            next[i] += 2.0 * alpha * p * ap[i];  // (2 alpha p) * a_p
            next[i + 1] += ap[i];                // mu * a_p
        }
        if (p > 0) {
            const auto& am = apoly[static_cast<size_t>(p - 1)];
            const double w = 2.0 * beta * (p - 1) - lambda;
            for (size_t i = 0; i < am.size(); ++i) next[i] += w * am[i];
        }
        for (double& v : next) v /= denom;
        apoly[static_cast<size_t>(p + 1)] = std::move(next);
    }

    for (double mu : detail::real_poly_roots(apoly[static_cast<size_t>(n) + 1]))
        out.c_values.push_back(mu - alpha * (2 * m + 1));

    out.residual_fn = [a, b, n, m](double E, double c) {
        PotentialParams p{a, b, c};
        RecurrenceRelation rel = build_recurrence(p, m);
        auto coeffs = rel.coefficients(n + 1, E);
        coeffs.resize(static_cast<size_t>(n) + 1);  // treat a_{n+1}, a_{n+2} as forced zero
        return rel.residual(coeffs, E);
    };
    return out;
}

/// Terminated series solution for the given order. The Coulomb coefficient of
/// `params` is used as-is; its distance from an admissible termination root is
/// recorded in constraint_residual rather than silently repaired.
inline SeriesSolution solve_quasi_exact(const PotentialParams& params, int n, int m) {
    require_valid(validate_params(params));
    if (n < 0 || m < 0) throw std::invalid_argument("solve_quasi_exact: n, m must be ≥ 0");

    auto constraint = termination_constraints(params.a, params.b, n, m);
    if (constraint.c_values.empty())
        throw std::domain_error("solve_quasi_exact: no real termination root for this (n, m)");

    SeriesSolution sol;
    sol.params = params;
    sol.n = n;
    sol.m = m;
    sol.beta = std::sqrt(params.b);
    sol.alpha = params.a / (2.0 * sol.beta);
    sol.delta = 0.5 + m;
    sol.energy = constraint.energy;
    sol.paper_energy = 2.0 * sol.beta * (1 + m + n);
    sol.constraint_residual = constraint.residual_fn(constraint.energy, params.c);

    RecurrenceRelation rel = build_recurrence(params, m);
    sol.coeffs = rel.coefficients(n + 1, constraint.energy);

    // L^2(r dr) normalization: integral R^2 r dr = sum_{p,q} a_p a_q G(p+q+2m+1).
    double norm2 = 0.0;
    for (size_t p = 0; p < sol.coeffs.size(); ++p)
        for (size_t q = 0; q < sol.coeffs.size(); ++q)
            norm2 += sol.coeffs[p] * sol.coeffs[q] *
                     gaussian_linear_moment(static_cast<double>(p + q) + 2.0 * m + 1.0, params.a, params.b);
    if (!(norm2 > 0.0)) throw std::runtime_error("solve_quasi_exact: normalization integral not positive");
    const double scale = 1.0 / std::sqrt(norm2);
    for (double& v : sol.coeffs) v *= scale;
    return sol;
}

/// R(r) = r^m exp(-alpha r - beta r^2 / 2) sum_p a_p r^p.
inline double evaluate_radial(const SeriesSolution& sol, double r) {
    if (r < 0.0) throw std::invalid_argument("evaluate_radial: r must be ≥ 0");
    if (r == 0.0) return sol.m == 0 ? (sol.coeffs.empty() ? 0.0 : sol.coeffs[0]) : 0.0;
    double poly = 0.0;
    for (size_t p = sol.coeffs.size(); p-- > 0;) poly = poly * r + sol.coeffs[p];
    return std::pow(r, sol.m) * std::exp(-sol.alpha * r - 0.5 * sol.beta * r * r) * poly;
}

}  // namespace ncspectra
