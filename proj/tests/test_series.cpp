#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <ncspectra/series.hpp>
#include <ncspectra/special.hpp>

#include "testutil.hpp"

using namespace ncspectra;
using testutil::rel_diff;

TEST_CASE("recurrence rows reproduce the three-term relation") {
    PotentialParams p{1.3, 2.1, -0.7};
    auto rec = build_recurrence(p, 2);
    const double E = 4.2;
    auto coeffs = rec.coefficients(12, E);
    REQUIRE(coeffs.size() == 12);
    CHECK(coeffs[0] == 1.0);
    // Interior rows hold by construction; residual() adds the two truncation
    // rows (a_12 = a_13 = 0), which a generic energy cannot satisfy.
    for (int p = 0; p + 1 < 12; ++p) {
        const auto r = rec.row(p, E);
        const double prev = p > 0 ? coeffs[static_cast<size_t>(p - 1)] : 0.0;
        const double t1 = r.next * coeffs[static_cast<size_t>(p + 1)];
        const double t2 = r.current * coeffs[static_cast<size_t>(p)];
        const double t3 = r.prev * prev;
        CHECK(std::abs(t1 + t2 + t3) <=
              1e-13 * (std::abs(t1) + std::abs(t2) + std::abs(t3) + 1e-300));
    }
    CHECK(rec.residual(coeffs, E) > 1e-8);

    // Spot-check row p = 0: (1)(1 + 2m) a1 = mu a0.
    const double a1_expected = rec.mu() / (1.0 * (1 + 2 * rec.m));
    CHECK(rel_diff(coeffs[1], a1_expected) < 1e-15);
}

TEST_CASE("recurrence rejects invalid inputs") {
    CHECK_THROWS_AS(build_recurrence(PotentialParams{1.0, 0.0, 0.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_recurrence(PotentialParams{-1.0, 1.0, 0.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_recurrence(PotentialParams{1.0, 1.0, 0.0}, -1), std::invalid_argument);
}

TEST_CASE("ground-level termination constraints") {
    // n = 0: single root c = -a(2m+1)/(2 sqrt b), E = 2 sqrt(b)(1+m) - a^2/(4b).
    {
        auto tc = termination_constraints(2.0, 1.0, 0, 0);
        REQUIRE(tc.c_values.size() == 1);
        CHECK(rel_diff(tc.c_values[0], -1.0) < 1e-12);
        CHECK(rel_diff(tc.energy, 1.0) < 1e-12);
    }
    {
        auto tc = termination_constraints(2.0, 1.0, 0, 1);
        REQUIRE(tc.c_values.size() == 1);
        CHECK(rel_diff(tc.c_values[0], -3.0) < 1e-12);
        CHECK(rel_diff(tc.energy, 3.0) < 1e-12);
    }
    {
        auto tc = termination_constraints(0.0, 4.0, 0, 1);
        REQUIRE(tc.c_values.size() == 1);
        CHECK(std::abs(tc.c_values[0]) < 1e-12);
        CHECK(rel_diff(tc.energy, 8.0) < 1e-12);
    }
    // Generic scan of the n = 0 closed form.
    for (double a : {0.0, 0.5, 3.0})
        for (double b : {0.5, 1.0, 4.0})
            for (int m : {0, 1, 2, 5}) {
                auto tc = termination_constraints(a, b, 0, m);
                REQUIRE(tc.c_values.size() == 1);
                CHECK(rel_diff(tc.c_values[0], -a * (2 * m + 1) / (2 * std::sqrt(b)), 1e-12) < 1e-10);
                CHECK(rel_diff(tc.energy, 2 * std::sqrt(b) * (1 + m) - a * a / (4 * b)) < 1e-12);
            }
}

TEST_CASE("first-excited termination constraints (two real roots)") {
    auto tc = termination_constraints(1.0, 1.0, 1, 0);
    REQUIRE(tc.c_values.size() == 2);
    CHECK(rel_diff(tc.energy, 3.75) < 1e-12);
    // mu^2 + 2 alpha mu - 2 beta (1+2m) = 0 with alpha = 1/2, beta = 1:
    // mu in {1, -2}, c = mu - alpha(2m+1) in {+0.5, -2.5}, sorted ascending.
    CHECK(rel_diff(tc.c_values[0], -2.5) < 1e-10);
    CHECK(rel_diff(tc.c_values[1], 0.5) < 1e-10);
    // Residual function vanishes at the roots and not in between.
    CHECK(tc.residual_fn(tc.energy, -2.5) < 1e-10);
    CHECK(tc.residual_fn(tc.energy, 0.5) < 1e-10);
    CHECK(tc.residual_fn(tc.energy, -1.0) > 1e-3);
}

TEST_CASE("quasi-exact solution: ground state fixture") {
    PotentialParams p{2.0, 1.0, -1.0};
    auto sol = solve_quasi_exact(p, 0, 0);
    CHECK(rel_diff(sol.energy, 1.0) < 1e-12);
    CHECK(rel_diff(sol.paper_energy, 2.0) < 1e-12);  // uncorrected 2 sqrt(b)(1+m+n)
    CHECK(sol.delta == 0.5);
    CHECK(sol.constraint_residual < 1e-12);
    REQUIRE(sol.coeffs.size() == 1);
    // Normalization integral R^2 r dr = a0^2 G(1) = 1.
    CHECK(rel_diff(sol.coeffs[0] * sol.coeffs[0], 8.2600991613639115732) < 1e-12);
}

TEST_CASE("quasi-exact solutions are L2(r dr)-normalized") {
    struct Case {
        PotentialParams p;
        int n, m;
    };
    const Case cases[] = {
        {{2.0, 1.0, -1.0}, 0, 0}, {{2.0, 1.0, -3.0}, 0, 1},   {{1.0, 1.0, 0.5}, 1, 0},
        {{1.0, 1.0, -2.5}, 1, 0}, {{0.7, 2.3, -1.456}, 2, 1},
    };
    for (const auto& cs : cases) {
        auto sol = solve_quasi_exact(cs.p, cs.n, cs.m);
        double norm2 = 0.0;
        for (size_t i = 0; i < sol.coeffs.size(); ++i)
            for (size_t j = 0; j < sol.coeffs.size(); ++j)
                norm2 += sol.coeffs[i] * sol.coeffs[j] *
                         gaussian_linear_moment(static_cast<double>(i + j + 2 * cs.m + 1), cs.p.a,
                                                cs.p.b);
        CHECK(std::abs(norm2 - 1.0) < 1e-11);
    }
}

TEST_CASE("non-root Coulomb coefficient is flagged through the residual") {
    // c = -1 terminates at m = 0 but not at m = 1 (root there is -3).
    PotentialParams p{2.0, 1.0, -1.0};
    auto sol = solve_quasi_exact(p, 0, 1);
    CHECK(sol.constraint_residual > 1e-3);
    CHECK(std::isfinite(sol.energy));
    for (double c : sol.coeffs) CHECK(std::isfinite(c));
}

TEST_CASE("evaluated radial functions satisfy the radial equation") {
    struct Case {
        PotentialParams p;
        int n, m;
    };
    const Case cases[] = {
        {{2.0, 1.0, -1.0}, 0, 0}, {{2.0, 1.0, -3.0}, 0, 1}, {{1.0, 1.0, 0.5}, 1, 0},
        {{1.0, 1.0, -2.5}, 1, 0}, {{0.0, 4.0, 0.0}, 0, 1},  {{0.5, 2.0, -1.25}, 2, 2},
    };
    for (const auto& cs : cases) {
        PotentialParams p = cs.p;
        auto sol = solve_quasi_exact(p, cs.n, cs.m);
        if (sol.constraint_residual > 1e-8) {
            // Only exact terminating states solve the equation; pick the root.
            auto tc = termination_constraints(p.a, p.b, cs.n, cs.m);
            REQUIRE(!tc.c_values.empty());
            p.c = tc.c_values.front();
            sol = solve_quasi_exact(p, cs.n, cs.m);
        }
        REQUIRE(sol.constraint_residual < 1e-9);
        const double beta = sol.beta;
        for (double r : testutil::log_samples(1e-3, 10.0 / std::sqrt(beta), 24)) {
            INFO("n=" << cs.n << " m=" << cs.m << " r=" << r);
            CHECK(testutil::radial_ode_residual(sol, r) < 1e-8);
        }
    }
}

TEST_CASE("radial evaluation at the origin") {
    PotentialParams p{2.0, 1.0, -1.0};
    auto s0 = solve_quasi_exact(p, 0, 0);
    CHECK(evaluate_radial(s0, 0.0) == s0.coeffs[0]);  // r^0 prefactor
    PotentialParams p1{2.0, 1.0, -3.0};
    auto s1 = solve_quasi_exact(p1, 0, 1);
    CHECK(evaluate_radial(s1, 0.0) == 0.0);
}

TEST_CASE("series solver validates parameters") {
    CHECK_THROWS_AS(solve_quasi_exact(PotentialParams{2.0, -1.0, 0.0}, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(solve_quasi_exact(PotentialParams{2.0, 1.0, 0.0}, -1, 0), std::invalid_argument);
    CHECK_THROWS_AS(solve_quasi_exact(PotentialParams{2.0, 1.0, 0.0}, 0, -2), std::invalid_argument);
}

TEST_CASE("termination energies against excited-level formula across parameters") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> ua(0.0, 3.0), ub(0.25, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = ua(rng), b = ub(rng);
        const int n = trial % 3, m = (trial / 3) % 3;
        auto tc = termination_constraints(a, b, n, m);
        const double expect = 2 * std::sqrt(b) * (1 + m + n) - a * a / (4 * b);
        CHECK(rel_diff(tc.energy, expect) < 1e-12);
        for (double c : tc.c_values) CHECK(tc.residual_fn(tc.energy, c) < 1e-8);
    }
}
