#pragma once

// Core domain types and validation shared by every module.
// Units: hbar = 1, 2M = 1, so the radial equation reads
//   R'' + (1/r) R' + [E - m^2/r^2 - V(r)] R = 0,   V(r) = c/r + a r + b r^2.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncspectra {

/// Mixed-potential coefficients: V(r) = c/r + a*r + b*r^2.
struct PotentialParams {
    double a = 0.0;  // linear term, energy/length
    double b = 1.0;  // harmonic term, energy/length^2; must be > 0
    double c = 0.0;  // Coulomb term, energy*length; any sign
};

enum class SpaceVariant { Canonical, Complex };

/// Spin branch label for the complex-space variant: s_z = +1/2 (Plus) or -1/2 (Minus).
enum class SpinBranch { Minus, Plus };

/// How the linear (a) term enters the deformed potential.
/// PaperLiteral folds it into the constant multiplier; ExpandedExact keeps the
/// first-order -a/(2r) piece separate.
enum class ATermMode { PaperLiteral, ExpandedExact };

/// How the first-order shift integral is evaluated.
enum class ClosedFormMode { PaperLiteral, CompletedSquare, QuadratureOnly };

struct NCConfig {
    double theta = 0.0;  // noncommutativity parameter, length^2; >= 0
    SpaceVariant variant = SpaceVariant::Canonical;
    ATermMode a_term_mode = ATermMode::ExpandedExact;
    ClosedFormMode closed_form_mode = ClosedFormMode::QuadratureOnly;
    // Reproduction-only switch: use the alternate (m+1 / m-1 swapped) branch sign
    // and the (a - b/2) constant that one published variant of the excited-state
    // formula carries. Never used for level assembly.
    bool alt_excited_sign_variant = false;
};

struct QuantumState {
    int n = 0;  // series truncation order, >= 0
    int m = 0;  // magnetic quantum number, >= 0 (sign lives in the phase factor)
    std::optional<SpinBranch> branch;  // present iff variant == Complex
};

/// Terminated power-series solution of the commutative radial equation.
/// The stored radial function is R(r) = r^(delta - 1/2) * exp(-alpha r - beta r^2 / 2) * sum a_p r^p,
/// i.e. delta = 1/2 + m in the rescaled convention and the physical polar exponent is m.
struct SeriesSolution {
    double delta = 0.5;          // 1/2 + m
    double alpha = 0.0;          // a / (2 sqrt(b))
    double beta = 1.0;           // sqrt(b)
    std::vector<double> coeffs;  // a_0 .. a_n, normalized so integral R^2 r dr = 1
    double energy = 0.0;         // termination-derived eigenvalue
    double paper_energy = 0.0;   // the 2 sqrt(b) (1+m+n) value recorded for comparison
    double constraint_residual = 0.0;  // magnitude of unmet termination conditions
    int n = 0;
    int m = 0;
    PotentialParams params;
};

struct GridSpec {
    double r_min = 1e-4;
    double r_max = 12.0;
    int points = 8000;
    enum class Spacing { Uniform, Log } spacing = Spacing::Uniform;
};

/// Output of the finite-difference eigensolver.
struct OracleResult {
    GridSpec grid;
    std::vector<double> eigenvalues;  // lowest k, ascending
    // radial_functions[j][i] = R_j(r_i), normalized so integral R^2 r dr = 1
    // with the stored dr-measure weights: sum_i weights[i] * r_i * R^2 = 1.
    std::vector<std::vector<double>> radial_functions;
    std::vector<double> nodes;      // r_i
    std::vector<double> weights;    // per-node weight approximating integral (.) dr
    std::vector<bool> converged;    // per-eigenvalue spacing-halving check
    std::map<int, double> moments;  // ground-state <r^p> for |p| <= 2 where finite
    int m = 0;                      // angular quantum number the solve was run at
};

struct ValidationIssue {
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

inline ValidationReport validate_params(const PotentialParams& p) {
    ValidationReport rep;
    if (!(p.b > 0.0)) rep.issues.push_back({"b", "b must be > 0"});
    if (!(p.a >= 0.0)) rep.issues.push_back({"a", "a must be ≥ 0"});
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.c))
        rep.issues.push_back({"params", "coefficients must be finite"});
    return rep;
}

inline ValidationReport validate_nc(const NCConfig& nc) {
    ValidationReport rep;
    if (!(nc.theta >= 0.0)) rep.issues.push_back({"theta", "theta must be ≥ 0"});
    return rep;
}

inline ValidationReport validate_state(const QuantumState& s, SpaceVariant variant) {
    ValidationReport rep;
    if (s.n < 0) rep.issues.push_back({"n", "n must be ≥ 0"});
    if (s.m < 0) rep.issues.push_back({"m", "m must be ≥ 0"});
    const bool complex_variant = variant == SpaceVariant::Complex;
    if (complex_variant && !s.branch)
        rep.issues.push_back({"branch", "complex variant requires a spin branch"});
    if (!complex_variant && s.branch)
        rep.issues.push_back({"branch", "canonical variant does not take a spin branch"});
    return rep;
}

inline void require_valid(const ValidationReport& rep) {
    if (!rep.ok()) throw std::invalid_argument(rep.issues.front().message);
}

/// Effective angular multiplier of the theta terms: m for the canonical variant,
/// m - 2 s_z (i.e. m -/+ 1) for the complex one.
inline int effective_multiplier(int m, SpaceVariant variant,
                                std::optional<SpinBranch> branch) {
    if (variant == SpaceVariant::Canonical) return m;
    if (!branch) throw std::invalid_argument("complex variant requires a spin branch");
    return *branch == SpinBranch::Plus ? m - 1 : m + 1;
}

inline const char* to_string(SpaceVariant v) {
    return v == SpaceVariant::Canonical ? "canonical" : "complex";
}
inline const char* to_string(SpinBranch b) { return b == SpinBranch::Plus ? "+" : "-"; }
inline const char* to_string(ATermMode m) {
    return m == ATermMode::PaperLiteral ? "paper-literal" : "expanded-exact";
}
inline const char* to_string(ClosedFormMode m) {
    switch (m) {
        case ClosedFormMode::PaperLiteral: return "paper-literal";
        case ClosedFormMode::CompletedSquare: return "completed-square";
        default: return "quadrature-only";
    }
}
inline const char* to_string(GridSpec::Spacing s) {
    return s == GridSpec::Spacing::Uniform ? "uniform" : "log";
}

}  // namespace ncspectra
