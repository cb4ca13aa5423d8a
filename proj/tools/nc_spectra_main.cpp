// nc-spectra: sweep noncommutative-deformed spectra from a config file and
// emit CSV / SVG / report artifacts.
//
// Exit codes: 0 success, 2 config error, 3 numerical non-convergence in a
// requested oracle run.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <ncspectra/ncspectra.hpp>

namespace fs = std::filesystem;
using namespace ncspectra;

namespace {

int run_command(const std::string& config_path, std::string out_dir, bool validate,
                const std::string& mode) {
    ExperimentConfig cfg;
    try {
        cfg = parse_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (validate) cfg.validate_oracle = true;
    if (!mode.empty()) {
        if (mode == "paper")
            cfg.nc.closed_form_mode = ClosedFormMode::PaperLiteral;
        else if (mode == "exact")
            cfg.nc.closed_form_mode = ClosedFormMode::CompletedSquare;
        else if (mode == "quadrature")
            cfg.nc.closed_form_mode = ClosedFormMode::QuadratureOnly;
        else {
            std::cerr << "config error: --mode must be paper, exact or quadrature\n";
            return 2;
        }
    }

    if (out_dir.empty()) {
        if (const char* env = std::getenv("NC_SPECTRA_OUT_DIR")) out_dir = env;
        if (out_dir.empty()) out_dir = ".";
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "config error: cannot create output directory " << out_dir << "\n";
        return 2;
    }

    std::vector<SpectrumRow> rows;
    try {
        rows = run_sweep(cfg);
    } catch (const std::exception& e) {
        std::cerr << "sweep failed: " << e.what() << "\n";
        return 3;
    }

    auto dest = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };
    try {
        if (cfg.outputs.csv) {
            emit_csv(rows, dest(*cfg.outputs.csv));
            std::cout << "wrote " << dest(*cfg.outputs.csv) << "\n";
        }
        if (cfg.outputs.svg) {
            emit_svg(rows, dest(*cfg.outputs.svg));
            std::cout << "wrote " << dest(*cfg.outputs.svg) << "\n";
        }
        if (cfg.outputs.report) {
            emit_report(rows, dest(*cfg.outputs.report));
            std::cout << "wrote " << dest(*cfg.outputs.report) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "emit failed: " << e.what() << "\n";
        return 2;
    }

    if (sweep_had_oracle_failure(rows)) {
        std::cerr << "oracle run did not converge for at least one state\n";
        return 3;
    }
    return 0;
}

struct CheckFailure {};

void expect(bool ok, const std::string& what, int& failures) {
    std::cout << (ok ? "  ok    " : "  FAIL  ") << what << "\n";
    if (!ok) ++failures;
}

// A small built-in fixture suite: cheap invariants runnable anywhere.
int check_command() {
    int failures = 0;
    std::cout << "self-check:\n";

    // Incomplete gamma fixtures.
    expect(std::abs(upper_incomplete_gamma_int(1, -1.0) - std::exp(1.0)) < 1e-14 &&
               std::abs(upper_incomplete_gamma_int(2, -1.0)) < 1e-14,
           "incomplete gamma fixtures Gamma(1,-1), Gamma(2,-1)", failures);

    // Moment recurrence 2 b^{1/2} G(s+1) = s G(s-1) - (a/sqrt b) G(s).
    {
        const double a = 2.0, b = 1.0;
        const double g0 = gaussian_linear_moment(0, a, b);
        const double g1 = gaussian_linear_moment(1, a, b);
        const double g2 = gaussian_linear_moment(2, a, b);
        const double resid = std::abs(2.0 * std::sqrt(b) * g2 - (g0 - (a / std::sqrt(b)) * g1));
        expect(resid < 1e-14, "moment recurrence at s = 1", failures);
    }

    // Ground-state termination fixture (a=2, b=1, m=0): c = -1, E = 1.
    {
        auto tc = termination_constraints(2.0, 1.0, 0, 0);
        expect(std::abs(tc.energy - 1.0) < 1e-12 && tc.c_values.size() == 1 &&
                   std::abs(tc.c_values[0] + 1.0) < 1e-12,
               "termination constraint (a=2, b=1, n=0, m=0)", failures);
    }

    // Oscillator oracle at coarse resolution.
    {
        PotentialParams p{0.0, 1.0, 0.0};
        GridSpec g;
        g.r_min = 1e-4;
        g.r_max = 12.0;
        g.points = 2000;
        auto res = radial_eigensolve(p, 0, g, 1);
        expect(std::abs(res.eigenvalues[0] - 2.0) < 1e-3, "oscillator ground state near 2", failures);
    }

    // theta-linearity of the first-order shift.
    {
        PotentialParams p{2.0, 1.0, -1.0};
        auto sol = solve_quasi_exact(p, 0, 1);
        NCConfig nc;
        nc.variant = SpaceVariant::Canonical;
        nc.closed_form_mode = ClosedFormMode::CompletedSquare;
        QuantumState st{0, 1, std::nullopt};
        nc.theta = 0.02;
        const double s2 = first_order_shift(sol, st, nc);
        nc.theta = 0.01;
        const double s1 = first_order_shift(sol, st, nc);
        expect(std::abs(s2 - 2.0 * s1) < 1e-15 * std::max(1.0, std::abs(s2)),
               "first-order shift linear in theta", failures);
    }

    std::cout << (failures ? "self-check FAILED\n" : "self-check passed\n");
    return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"noncommutative mixed-potential spectra"};
    app.require_subcommand(1);

    std::string config_path, out_dir, mode;
    bool validate = false;
    auto* run = app.add_subcommand("run", "run a sweep from a config file");
    run->add_option("config", config_path, "path to the experiment config")->required();
    run->add_option("--out-dir", out_dir, "output directory (default: $NC_SPECTRA_OUT_DIR or .)");
    run->add_flag("--validate", validate, "force finite-difference oracle validation");
    run->add_option("--mode", mode, "closed-form mode: paper | exact | quadrature");

    auto* check = app.add_subcommand("check", "run the built-in fixture suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the error message
        return code == 0 ? 0 : 2;
    }

    if (run->parsed()) return run_command(config_path, out_dir, validate, mode);
    if (check->parsed()) return check_command();
    return 2;
}
