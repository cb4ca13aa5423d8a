#pragma once

// Theta-deformed potentials and first-order noncommutative level corrections.
//
// Level bookkeeping: the constant theta term is absorbed exactly into the
// zeroth-order energy,
//   E0 = E_comm - theta (a/2 + b) * M,
// and the remaining c/(2 r^3)-type perturbation gives the first-order shift
//   dE = c pi theta M * I,
// where M is the angular multiplier (m canonically, m -/+ 1 per spin branch in
// the complex variant). I is a radial integral of the solved state:
//   canonical:  I = <r^-2>  of the state itself (vanishing multiplier at m = 0
//               makes the divergent m = 0 integral unreachable);
//   complex:    I = integral R^2 dr of the m = 0 reference member of the same
//               (params, n) tower, so the branch splitting E+ - E- is exactly
//               independent of m.
// The published closed forms for I (incomplete-gamma sums) are reproduced
// verbatim under PaperLiteral for comparison reports; CompletedSquare is the
// corrected re-derivation; QuadratureOnly integrates numerically.

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"
#include "series.hpp"
#include "special.hpp"

namespace ncspectra {

/// First-order coordinate deformation r -> r - theta m / (2r).
struct RadialDeformation {
    double theta = 0.0;
    int m = 0;
    bool is_identity() const { return theta == 0.0 || m == 0; }
    double operator()(double r) const { return r - 0.5 * theta * m / r; }
};

inline RadialDeformation deform_radius(double theta, int m) {
    if (!(theta >= 0.0)) throw std::invalid_argument("theta must be ≥ 0");
    return {theta, m};
}

/// Coefficients of the theta-linear potential terms. The full deformed
/// potential is V(r) + theta * M * (term_L + term_Lr / r + term_Lr3 / r^3)
/// with M the effective angular multiplier.
struct DeformedPotential {
    PotentialParams base;
    SpaceVariant variant = SpaceVariant::Canonical;
    std::optional<SpinBranch> branch;
    ATermMode mode = ATermMode::ExpandedExact;
    int m = 0;
    int multiplier = 0;     // m, or m - 2 s_z on the complex branches
    double term_L = 0.0;    // constant piece (energy/length^2 per theta)
    double term_Lr = 0.0;   // 1/r piece, zero in PaperLiteral mode
    double term_Lr3 = 0.0;  // 1/r^3 piece

    /// theta-linear potential correction at radius r.
    double correction(double theta, double r) const {
        return theta * multiplier * (term_L + term_Lr / r + term_Lr3 / (r * r * r));
    }
};

inline DeformedPotential deform_potential(const PotentialParams& params, const NCConfig& nc, int m,
                                          std::optional<SpinBranch> branch = std::nullopt) {
    require_valid(validate_params(params));
    if (nc.variant == SpaceVariant::Canonical && branch)
        throw std::invalid_argument("deform_potential: canonical variant does not take a spin branch");
    if (nc.variant == SpaceVariant::Complex && !branch)
        throw std::invalid_argument("deform_potential: complex variant requires a spin branch");
    DeformedPotential d;
    d.base = params;
    d.variant = nc.variant;
    d.branch = branch;
    d.mode = nc.a_term_mode;
    d.m = m;
    d.multiplier = effective_multiplier(m, nc.variant, branch);
    if (nc.a_term_mode == ATermMode::PaperLiteral) {
        d.term_L = -(0.5 * params.a + params.b);
        d.term_Lr = 0.0;
    } else {
        d.term_L = -params.b;
        d.term_Lr = -0.5 * params.a;
    }
    d.term_Lr3 = 0.5 * params.c;
    return d;
}

/// Commutative reference energy for a state: the termination-derived value
/// (E = 2 sqrt(b)(1+m+n) - a^2/(4b)); the uncorrected 2 sqrt(b)(1+m+n) is
/// available from SeriesSolution::paper_energy for comparison output.
inline double commutative_energy(const PotentialParams& params, int n, int m) {
    const double beta = std::sqrt(params.b);
    const double alpha = params.a / (2.0 * beta);
    return 2.0 * beta * (1 + m + n) - alpha * alpha;
}

/// E0 = E_comm - theta (a/2 + b) M, the exactly absorbed part of the
/// deformation (M = m, or m -/+ 1 on the complex branches).
inline double zeroth_energy(const QuantumState& state, const PotentialParams& params, const NCConfig& nc) {
    require_valid(validate_params(params));
    require_valid(validate_nc(nc));
    require_valid(validate_state(state, nc.variant));
    const double e_comm = commutative_energy(params, state.n, state.m);
    if (nc.alt_excited_sign_variant && nc.variant == SpaceVariant::Complex && state.n >= 1) {
        // Published excited-state form with the opposite sign pattern,
        // theta (a - b/2)(m + 1) on "+", (m - 1) on "-"; kept reproducible
        // behind this flag only.
        const int alt = state.branch == SpinBranch::Plus ? state.m + 1 : state.m - 1;
        return e_comm + nc.theta * (params.a - 0.5 * params.b) * alt;
    }
    const int mult = effective_multiplier(state.m, nc.variant, state.branch);
    return e_comm - nc.theta * (0.5 * params.a + params.b) * mult;
}

namespace detail {

/// Cauchy square of the coefficient list: C_p = sum_k a_k a_{p-k}.
inline std::vector<double> convolution_square(const std::vector<double>& a) {
    std::vector<double> c(a.size() * 2 - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a.size(); ++j) c[i + j] += a[i] * a[j];
    return c;
}

/// integral S^2 r^s e^{-(a/sqrt b) r - sqrt b r^2} dr by quadrature, S the
/// solution's series polynomial.
inline IntegrationResult series_square_integral_quadrature(const SeriesSolution& sol, double s) {
    const double A = sol.params.a / std::sqrt(sol.params.b);
    const double B = std::sqrt(sol.params.b);
    auto f = [&sol, A, B, s](double r) {
        double poly = 0.0;
        for (size_t p = sol.coeffs.size(); p-- > 0;) poly = poly * r + sol.coeffs[p];
        return poly * poly * std::pow(r, s) * std::exp(-A * r - B * r * r);
    };
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    spec.abs_tol = 1e-300;
    return integrate_semi_infinite(f, spec);
}

/// Same integral through the closed-form moments.
inline double series_square_integral_moments(const SeriesSolution& sol, double s) {
    const auto C = convolution_square(sol.coeffs);
    double total = 0.0;
    for (size_t p = 0; p < C.size(); ++p)
        total += C[p] * gaussian_linear_moment(static_cast<double>(p) + s, sol.params.a, sol.params.b);
    return total;
}

}  // namespace detail

struct ClosedFormValue {
    double value = 0.0;
    bool ok = false;
    std::string note;
};

/// Published-formula-vs-rederivation audit for the shift constant C = pi c * I(delta),
/// I(delta) = sum_p C_p integral r^{p + 2 delta - 1} e^{-(a/sqrt b) r - sqrt b r^2} dr
/// (the power matching the published Gamma(k + 2 delta, .) orders; delta = 1/2
/// reproduces the branch-splitting constant, delta = m the shift integral).
/// quadrature / completed_square evaluate I as defined, scaled by pi c;
/// paper_literal and paper_literal_order_fixed are the published
/// incomplete-gamma sums copied verbatim (k-indexed and order-fixed
/// readings), which also drop the pi c prefactor — the disagreement is the
/// point of the audit.
struct ClosedFormComparison {
    ClosedFormValue quadrature;
    ClosedFormValue completed_square;
    ClosedFormValue paper_literal;
    ClosedFormValue paper_literal_order_fixed;
    double delta = 0.0;
};

inline ClosedFormComparison paper_closed_form_C(const PotentialParams& params, int n, int m, double delta) {
    require_valid(validate_params(params));
    const double two_delta = 2.0 * delta;
    const double nearest = std::nearbyint(two_delta);
    if (std::abs(two_delta - nearest) > 1e-9 || nearest < 1.0)
        throw std::invalid_argument("paper_closed_form_C: 2*delta must be a positive integer");
    const int td = static_cast<int>(nearest);

    SeriesSolution sol = solve_quasi_exact(params, n, m);
    const auto C = detail::convolution_square(sol.coeffs);
    ClosedFormComparison cmp;
    cmp.delta = delta;

    const double cpi = M_PI * params.c;
    const double s = td - 1.0;  // always integrable: td >= 1
    {
        auto quad = detail::series_square_integral_quadrature(sol, s);
        cmp.quadrature = {cpi * quad.value, quad.converged,
                          quad.converged ? "" : "quadrature did not converge"};
        cmp.completed_square = {cpi * detail::series_square_integral_moments(sol, s), true, ""};
    }

    // Published closed form: exp((a^2 + 2ab)/(4b sqrt b)) sum_k C_k b^{-(k+2delta)/2} Gamma(k+2delta, -a/(2 sqrt b)).
    const double prefactor = std::exp((params.a * params.a + 2.0 * params.b * params.a) /
                                      (4.0 * params.b * std::sqrt(params.b)));
    const double gamma_arg = -params.a / (2.0 * std::sqrt(params.b));
    {
        double sum = 0.0;
        bool ok = true;
        std::string note;
        for (size_t k = 0; k < C.size(); ++k) {
            const int order = static_cast<int>(k) + td;
            if (order < 1) {
                ok = false;
                note = "Gamma(0, x) reached; sum not evaluable";
                break;
            }
            sum += C[k] * std::pow(params.b, -0.5 * order) * upper_incomplete_gamma_int(order, gamma_arg);
        }
        cmp.paper_literal = {ok ? prefactor * sum : 0.0, ok, note};
    }
    {
        const int order = n + td;
        if (order < 1) {
            cmp.paper_literal_order_fixed = {0.0, false, "Gamma(0, x) reached; sum not evaluable"};
        } else {
            double sum = 0.0;
            for (size_t k = 0; k < C.size(); ++k)
                sum += C[k] * std::pow(params.b, -0.5 * order) * upper_incomplete_gamma_int(order, gamma_arg);
            cmp.paper_literal_order_fixed = {prefactor * sum, true, ""};
        }
    }
    return cmp;
}

/// Shift integral I for the canonical variant: <r^-2> of the state, i.e. the
/// audit integral evaluated at the solution's own delta = 1/2 + m.
inline double canonical_shift_integral(const SeriesSolution& sol, ClosedFormMode mode) {
    if (sol.m < 1)
        throw std::domain_error("canonical shift integral diverges for m = 0 (the m factor removes it)");
    const double s = 2.0 * sol.m - 1.0;  // R^2 r^{-2} r dr -> S^2 r^{2m-1} e^{2g} dr
    switch (mode) {
        case ClosedFormMode::QuadratureOnly: {
            auto q = detail::series_square_integral_quadrature(sol, s);
            if (!q.converged) throw std::runtime_error("shift quadrature did not converge");
            return q.value;
        }
        case ClosedFormMode::CompletedSquare:
            return detail::series_square_integral_moments(sol, s);
        default: {
            auto cmp = paper_closed_form_C(sol.params, sol.n, sol.m, sol.delta);
            if (!cmp.paper_literal_order_fixed.ok)
                throw std::runtime_error("paper-literal closed form not evaluable: " +
                                         cmp.paper_literal_order_fixed.note);
            return cmp.paper_literal_order_fixed.value;  // published order-fixed sum
        }
    }
}

/// Tower reference integral for the complex variant: integral R^2 dr of the
/// m = 0 member with the same (params, n); a per-tower constant.
inline double complex_reference_integral(const PotentialParams& params, int n, ClosedFormMode mode) {
    SeriesSolution ref = solve_quasi_exact(params, n, 0);
    // Integrand is R^2 = S^2 e^{2g} at m = 0, i.e. power r^0.
    switch (mode) {
        case ClosedFormMode::QuadratureOnly: {
            auto q = detail::series_square_integral_quadrature(ref, 0.0);
            if (!q.converged) throw std::runtime_error("shift quadrature did not converge");
            return q.value;
        }
        case ClosedFormMode::CompletedSquare:
            return detail::series_square_integral_moments(ref, 0.0);
        default: {
            // Published complex closed form (delta = 1/2 + m at m = 0).
            auto cmp = paper_closed_form_C(params, n, 0, ref.delta);
            if (!cmp.paper_literal.ok)
                throw std::runtime_error("paper-literal closed form not evaluable: " + cmp.paper_literal.note);
            return cmp.paper_literal.value;
        }
    }
}

/// First-order shift dE = c pi theta M I. Exactly linear in theta and exactly
/// zero at theta = 0 or vanishing multiplier.
inline double first_order_shift(const SeriesSolution& solution, const QuantumState& state, const NCConfig& nc) {
    require_valid(validate_nc(nc));
    require_valid(validate_state(state, nc.variant));
    const int mult = effective_multiplier(state.m, nc.variant, state.branch);
    if (nc.theta == 0.0 || mult == 0) return 0.0;
    double I = 0.0;
    if (nc.variant == SpaceVariant::Canonical) {
        I = canonical_shift_integral(solution, nc.closed_form_mode);
        return solution.params.c * M_PI * nc.theta * mult * I;
    }
    I = complex_reference_integral(solution.params, solution.n, nc.closed_form_mode);
    if (nc.closed_form_mode == ClosedFormMode::PaperLiteral)
        return nc.theta * mult * I;  // the published form already bakes its own constant in
    return solution.params.c * M_PI * nc.theta * mult * I;
}

struct NCEnergyLevel {
    QuantumState state;
    double zeroth = 0.0;
    double first_order_shift = 0.0;
    double total = 0.0;
    ClosedFormMode method = ClosedFormMode::QuadratureOnly;
};

/// Assembled levels for a list of states; complex states without an explicit
/// branch are expanded into both branches (minus first).
inline std::vector<NCEnergyLevel> total_levels(const PotentialParams& params, const NCConfig& nc,
                                               const std::vector<QuantumState>& states) {
    require_valid(validate_params(params));
    require_valid(validate_nc(nc));
    std::vector<QuantumState> expanded;
    for (const auto& s : states) {
        if (nc.variant == SpaceVariant::Complex && !s.branch) {
            QuantumState minus = s, plus = s;
            minus.branch = SpinBranch::Minus;
            plus.branch = SpinBranch::Plus;
            expanded.push_back(minus);
            expanded.push_back(plus);
        } else {
            expanded.push_back(s);
        }
    }
    std::map<std::pair<int, int>, SeriesSolution> cache;
    std::vector<NCEnergyLevel> out;
    for (const auto& s : expanded) {
        auto key = std::make_pair(s.n, s.m);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, solve_quasi_exact(params, s.n, s.m)).first;
        NCEnergyLevel lvl;
        lvl.state = s;
        lvl.method = nc.closed_form_mode;
        lvl.zeroth = zeroth_energy(s, params, nc);
        lvl.first_order_shift = first_order_shift(it->second, s, nc);
        lvl.total = lvl.zeroth + lvl.first_order_shift;
        out.push_back(lvl);
    }
    return out;
}

/// E+ - E- at fixed (n, m): theta-linear and independent of m by construction.
inline double branch_splitting(const PotentialParams& params, const NCConfig& nc, int n, int m) {
    NCConfig cfg = nc;
    cfg.variant = SpaceVariant::Complex;
    QuantumState plus{n, m, SpinBranch::Plus}, minus{n, m, SpinBranch::Minus};
    SeriesSolution sol = solve_quasi_exact(params, n, m);
    const double ep = zeroth_energy(plus, params, cfg) + first_order_shift(sol, plus, cfg);
    const double em = zeroth_energy(minus, params, cfg) + first_order_shift(sol, minus, cfg);
    return ep - em;
}

}  // namespace ncspectra
