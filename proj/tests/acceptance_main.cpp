// Acceptance gate: every release criterion in one binary, one PASS/FAIL line
// each, nonzero exit if anything fails. Tolerances here are the contract;
// tighten them in the unit suites, never here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <ncspectra/ncspectra.hpp>

using namespace ncspectra;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const char* label, bool pass, const std::string& detail) {
    std::printf("[%2d] %s  %s%s%s\n", idx, pass ? "PASS" : "FAIL", label,
                detail.empty() ? "" : ": ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double rel(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- 1: series energies against the finite-difference solver ---------------
void criterion_oracle_equivalence() {
    struct Set {
        PotentialParams params;
        int m;
    };
    const Set sets[] = {
        {{2.0, 1.0, -1.0}, 0}, {{0.0, 1.0, 0.0}, 0}, {{0.0, 1.0, 0.0}, 1},
        {{0.0, 4.0, 0.0}, 0},  {{0.0, 4.0, 0.0}, 1}, {{2.0, 1.0, -3.0}, 1},
    };
    double worst = 0.0, slowest = 0.0;
    bool ok = true;
    std::string fail;
    for (const auto& s : sets) {
        try {
            auto sol = solve_quasi_exact(s.params, 0, s.m);
            if (sol.constraint_residual > 1e-10) {
                ok = false;
                fail = "termination residual too large";
                break;
            }
            GridSpec grid;  // 8000 uniform points, well under the 20k cap
            const auto t0 = std::chrono::steady_clock::now();
            auto oracle = radial_eigensolve(s.params, s.m, grid, 2);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            slowest = std::max(slowest, secs);
            double best = oracle.eigenvalues.at(0);
            for (double e : oracle.eigenvalues)
                if (std::abs(e - sol.energy) < std::abs(best - sol.energy)) best = e;
            worst = std::max(worst, rel(sol.energy, best));
        } catch (const std::exception& e) {
            ok = false;
            fail = e.what();
            break;
        }
    }
    ok = ok && worst <= 1e-4 && slowest <= 5.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "6 sets, max rel %.3g (≤1e-4), slowest solve %.2fs (≤5s)%s%s",
                  worst, slowest, fail.empty() ? "" : ", error: ", fail.c_str());
    report(1, "series energies match the finite-difference oracle", ok, buf);
}

// --- 2: pure-oscillator limit ----------------------------------------------
void criterion_oscillator_limit() {
    const PotentialParams params{0.0, 1.0, 0.0};
    double worst_series = 0.0, worst_oracle = 0.0;
    bool ok = true;
    std::string fail;
    for (int m = 0; m <= 2 && ok; ++m) {
        const double expected = 2.0 * std::sqrt(params.b) * (1 + m);
        try {
            auto sol = solve_quasi_exact(params, 0, m);
            worst_series = std::max(worst_series, rel(sol.energy, expected));
            auto oracle = radial_eigensolve(params, m, GridSpec{}, 1);
            worst_oracle = std::max(worst_oracle, rel(oracle.eigenvalues.at(0), expected));
        } catch (const std::exception& e) {
            ok = false;
            fail = e.what();
        }
    }
    ok = ok && worst_series <= 1e-4 && worst_oracle <= 1e-4;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "E=2*sqrt(b)*(1+m), m=0..2: series rel %.3g, oracle rel %.3g (≤1e-4)%s%s",
                  worst_series, worst_oracle, fail.empty() ? "" : ", error: ", fail.c_str());
    report(2, "commutative oscillator limit", ok, buf);
}

// --- 3: theta -> 0 reduction -------------------------------------------------
void criterion_theta_zero() {
    bool ok = true;
    std::string fail;
    const auto modes = {ClosedFormMode::PaperLiteral, ClosedFormMode::CompletedSquare,
                        ClosedFormMode::QuadratureOnly};
    try {
        const PotentialParams mixed{2.0, 1.0, -1.0};
        const PotentialParams mixed_m1{2.0, 1.0, -3.0};
        auto sol0 = solve_quasi_exact(mixed, 0, 0);
        auto sol1 = solve_quasi_exact(mixed_m1, 0, 1);

        for (auto mode : modes) {
            NCConfig nc;
            nc.theta = 0.0;
            nc.closed_form_mode = mode;

            nc.variant = SpaceVariant::Canonical;
            for (const auto* sol : {&sol0, &sol1}) {
                const QuantumState st{sol->n, sol->m, std::nullopt};
                if (first_order_shift(*sol, st, nc) != 0.0) ok = false;
                if (zeroth_energy(st, sol->params, nc) !=
                    commutative_energy(sol->params, sol->n, sol->m))
                    ok = false;
            }

            nc.variant = SpaceVariant::Complex;
            for (auto branch : {SpinBranch::Minus, SpinBranch::Plus}) {
                const QuantumState st{0, 0, branch};
                if (first_order_shift(sol0, st, nc) != 0.0) ok = false;
                if (zeroth_energy(st, mixed, nc) != commutative_energy(mixed, 0, 0)) ok = false;
            }
        }
    } catch (const std::exception& e) {
        ok = false;
        fail = e.what();
    }
    report(3, "theta = 0 reproduces commutative levels exactly", ok,
           fail.empty() ? "all modes, canonical and complex, bitwise" : fail);
}

// --- 4: linearity in theta ---------------------------------------------------
void criterion_theta_linearity() {
    double worst = 0.0;
    bool ok = true;
    std::string fail;
    try {
        const PotentialParams mixed{2.0, 1.0, -1.0};
        auto sol_can = solve_quasi_exact(PotentialParams{2.0, 1.0, -3.0}, 0, 1);
        auto sol_ref = solve_quasi_exact(mixed, 0, 0);
        for (double theta : {1e-3, 1e-2}) {
            for (auto mode : {ClosedFormMode::CompletedSquare, ClosedFormMode::QuadratureOnly}) {
                NCConfig nc;
                nc.closed_form_mode = mode;

                nc.variant = SpaceVariant::Canonical;
                nc.theta = theta;
                const QuantumState st_can{0, 1, std::nullopt};
                const double s1 = first_order_shift(sol_can, st_can, nc);
                nc.theta = 2.0 * theta;
                const double s2 = first_order_shift(sol_can, st_can, nc);
                worst = std::max(worst, rel(s2, 2.0 * s1));

                nc.variant = SpaceVariant::Complex;
                const QuantumState st_cx{0, 0, SpinBranch::Plus};
                nc.theta = theta;
                const double c1 = first_order_shift(sol_ref, st_cx, nc);
                nc.theta = 2.0 * theta;
                const double c2 = first_order_shift(sol_ref, st_cx, nc);
                worst = std::max(worst, rel(c2, 2.0 * c1));
            }
        }
    } catch (const std::exception& e) {
        ok = false;
        fail = e.what();
    }
    ok = ok && worst <= 1e-12;
    char buf[128];
    std::snprintf(buf, sizeof buf, "shift(2*theta) vs 2*shift(theta): rel %.3g (≤1e-12)%s%s", worst,
                  fail.empty() ? "" : ", error: ", fail.c_str());
    report(4, "first-order shifts are linear in theta", ok, buf);
}

// --- 5: proportionality to m -------------------------------------------------
void criterion_m_proportionality() {
    double worst = 0.0;
    bool ok = true;
    std::string fail;
    try {
        auto sol = solve_quasi_exact(PotentialParams{2.0, 1.0, -3.0}, 0, 1);
        NCConfig nc;
        nc.variant = SpaceVariant::Canonical;
        nc.theta = 0.01;
        nc.closed_form_mode = ClosedFormMode::CompletedSquare;
        const double per_m = first_order_shift(sol, QuantumState{0, 1, std::nullopt}, nc);
        for (int m : {2, 3}) {
            const double s = first_order_shift(sol, QuantumState{0, m, std::nullopt}, nc);
            worst = std::max(worst, rel(s / m, per_m));
        }
    } catch (const std::exception& e) {
        ok = false;
        fail = e.what();
    }
    ok = ok && worst <= 1e-10;
    char buf[128];
    std::snprintf(buf, sizeof buf, "shift/m constant for m=1..3: rel %.3g (≤1e-10)%s%s", worst,
                  fail.empty() ? "" : ", error: ", fail.c_str());
    report(5, "canonical shift proportional to m", ok, buf);
}

// --- 6: complex branch splitting ---------------------------------------------
void criterion_branch_splitting() {
    bool ok = true;
    std::string fail;
    double worst_m = 0.0, magnitude_rel = 0.0, split0 = 0.0;
    try {
        const PotentialParams params{2.0, 1.0, -1.0};
        NCConfig nc;
        nc.variant = SpaceVariant::Complex;
        nc.theta = 0.01;
        nc.closed_form_mode = ClosedFormMode::QuadratureOnly;
        split0 = branch_splitting(params, nc, 0, 0);
        for (int m = 1; m <= 3; ++m)
            worst_m = std::max(worst_m, rel(branch_splitting(params, nc, 0, m), split0));
        const double C0 =
            params.c * M_PI * complex_reference_integral(params, 0, ClosedFormMode::QuadratureOnly);
        const double expected = 2.0 * nc.theta * std::abs(C0 - 0.5 * params.a - params.b);
        magnitude_rel = rel(std::abs(split0), expected);
    } catch (const std::exception& e) {
        ok = false;
        fail = e.what();
    }
    ok = ok && split0 != 0.0 && worst_m <= 1e-12 && magnitude_rel <= 1e-8;
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "split %.6g, m-independence rel %.3g (≤1e-12), |2*theta*(C0-a/2-b)| rel %.3g (≤1e-8)%s%s",
                  split0, worst_m, magnitude_rel, fail.empty() ? "" : ", error: ", fail.c_str());
    report(6, "branch splitting is m-independent with the closed-form magnitude", ok, buf);
}

// --- 7: degeneracy lifting -----------------------------------------------------
void criterion_degeneracy_lifting() {
    bool ok = true;
    std::string fail;
    double min_gap = std::numeric_limits<double>::infinity();
    try {
        const PotentialParams params{2.0, 1.0, -1.0};
        NCConfig nc;
        nc.variant = SpaceVariant::Canonical;
        nc.theta = 0.01;
        nc.closed_form_mode = ClosedFormMode::QuadratureOnly;
        std::vector<QuantumState> states;
        for (int m = 0; m <= 4; ++m) states.push_back({0, m, std::nullopt});
        auto levels = total_levels(params, nc, states);
        for (size_t i = 0; i < levels.size(); ++i)
            for (size_t j = i + 1; j < levels.size(); ++j)
                min_gap = std::min(min_gap, std::abs(levels[i].total - levels[j].total));
    } catch (const std::exception& e) {
        ok = false;
        fail = e.what();
    }
    ok = ok && min_gap > 1e-9;
    char buf[128];
    std::snprintf(buf, sizeof buf, "theta=0.01, m=0..4: min pairwise gap %.3g (>1e-9)%s%s", min_gap,
                  fail.empty() ? "" : ", error: ", fail.c_str());
    report(7, "theta lifts the m-degeneracy", ok, buf);
}

// --- 8: incomplete-gamma identities --------------------------------------------
void criterion_gamma_identities() {
    double worst = 0.0;
    for (int s = 1; s <= 10; ++s) {
        for (double x : {-3.0, -1.0, -0.5, 0.0, 0.7, 2.0, 5.0}) {
            const double lhs = upper_incomplete_gamma_int(s + 1, x);
            const double rhs = s * upper_incomplete_gamma_int(s, x) + std::pow(x, s) * std::exp(-x);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0}));
        }
    }
    const double fixture = std::abs(upper_incomplete_gamma_int(2, -1.0));
    const bool ok = worst <= 1e-12 && fixture <= 1e-14;
    char buf[128];
    std::snprintf(buf, sizeof buf, "recurrence rel %.3g (≤1e-12), |Gamma(2,-1)| = %.3g (≤1e-14)",
                  worst, fixture);
    report(8, "incomplete-gamma recurrence and zero fixture", ok, buf);
}

// --- 9: closed-form audit detects the published-formula discrepancy ------------
void criterion_closed_form_audit() {
    bool ok = true;
    std::string fail;
    int detected = 0;
    double worst_internal = 0.0;
    struct AuditSet {
        PotentialParams params;
        int m;
        double delta;
    };
    const AuditSet sets[] = {
        {{2.0, 1.0, -1.0}, 0, 0.5},
        {{2.0, 1.0, -3.0}, 1, 1.0},
        {{2.0, 1.0, -3.0}, 1, 1.5},
    };
    try {
        for (const auto& s : sets) {
            auto cmp = paper_closed_form_C(s.params, 0, s.m, s.delta);
            if (!(cmp.quadrature.ok && cmp.completed_square.ok && cmp.paper_literal.ok)) {
                ok = false;
                fail = "audit column unavailable";
                break;
            }
            worst_internal =
                std::max(worst_internal, rel(cmp.completed_square.value, cmp.quadrature.value));
            if (rel(cmp.paper_literal.value, cmp.quadrature.value) > 1e-3) ++detected;
        }
        // The report writer must carry the same numbers.
        const auto dir = fs::temp_directory_path() / "ncspectra_acceptance";
        fs::create_directories(dir);
        ExperimentConfig cfg;
        cfg.params = {2.0, 1.0, -1.0};
        cfg.nc.variant = SpaceVariant::Complex;
        cfg.nc.closed_form_mode = ClosedFormMode::QuadratureOnly;
        cfg.theta_values = {0.0, 0.01};
        cfg.n_range = {0, 0};
        cfg.m_range = {0, 2};
        cfg.branches = {SpinBranch::Minus, SpinBranch::Plus};
        auto rows = run_sweep(cfg);
        const auto report_path = dir / "audit_report.txt";
        emit_report(rows, report_path.string());
        const std::string text = read_file(report_path);
        size_t audit_lines = 0;
        for (size_t pos = 0; (pos = text.find("rel-discrepancy=", pos)) != std::string::npos; ++pos)
            ++audit_lines;
        if (text.find("closed-form audit") == std::string::npos || audit_lines < 3) {
            ok = false;
            fail = "report missing audit lines";
        }
    } catch (const std::exception& e) {
        ok = false;
        fail = e.what();
    }
    ok = ok && detected == 3 && worst_internal <= 1e-8;
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "%d/3 sets flag the literal formula; completed-square vs quadrature rel %.3g (≤1e-8)%s%s",
                  detected, worst_internal, fail.empty() ? "" : ", error: ", fail.c_str());
    report(9, "closed-form audit detects the documented discrepancy", ok, buf);
}

// --- 10: byte-level determinism --------------------------------------------------
void criterion_determinism() {
    bool ok = true;
    std::string fail;
    try {
        ExperimentConfig cfg;
        cfg.params = {2.0, 1.0, -1.0};
        cfg.nc.variant = SpaceVariant::Complex;
        cfg.nc.closed_form_mode = ClosedFormMode::QuadratureOnly;
        cfg.theta_values = {0.0, 0.005, 0.01};
        cfg.n_range = {0, 0};
        cfg.m_range = {0, 2};
        cfg.branches = {SpinBranch::Minus, SpinBranch::Plus};

        const auto dir = fs::temp_directory_path() / "ncspectra_acceptance";
        fs::create_directories(dir);
        std::string csv[2], svg[2];
        for (int run = 0; run < 2; ++run) {
            auto rows = run_sweep(cfg);
            const auto csv_path = dir / ("det_" + std::to_string(run) + ".csv");
            const auto svg_path = dir / ("det_" + std::to_string(run) + ".svg");
            emit_csv(rows, csv_path.string());
            emit_svg(rows, svg_path.string());
            csv[run] = read_file(csv_path);
            svg[run] = read_file(svg_path);
        }
        if (csv[0] != csv[1] || csv[0].empty()) {
            ok = false;
            fail = "CSV bytes differ between runs";
        }
        if (svg[0] != svg[1] || svg[0].empty()) {
            ok = false;
            fail += std::string(fail.empty() ? "" : "; ") + "SVG bytes differ between runs";
        }
    } catch (const std::exception& e) {
        ok = false;
        fail = e.what();
    }
    report(10, "repeated sweeps emit byte-identical CSV and SVG", ok,
           fail.empty() ? "12-row fixture, 2 runs" : fail);
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_oracle_equivalence();
    criterion_oscillator_limit();
    criterion_theta_zero();
    criterion_theta_linearity();
    criterion_m_proportionality();
    criterion_branch_splitting();
    criterion_degeneracy_lifting();
    criterion_gamma_identities();
    criterion_closed_form_audit();
    criterion_determinism();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("acceptance: %d/10 criteria passed in %.1fs\n", 10 - g_failures, secs);
    return g_failures == 0 ? 0 : 1;
}
