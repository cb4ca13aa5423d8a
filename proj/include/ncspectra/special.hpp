#pragma once

// Special functions and quadrature: integer-order upper incomplete gamma
// (valid at negative argument), adaptive semi-infinite Gauss-Kronrod
// integration, and closed-form moments of exp(-(a/sqrt(b)) r - sqrt(b) r^2).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace ncspectra {

/// Gamma(s, x) = integral_x^inf t^(s-1) e^-t dt for integer s >= 1 and any real x,
/// via the finite-sum identity Gamma(s, x) = (s-1)! e^-x sum_{k<s} x^k / k!.
/// The finite sum is exact for integer order, so negative x needs no continuation.
inline double upper_incomplete_gamma_int(int s, double x) {
    if (s < 1) throw std::invalid_argument("upper_incomplete_gamma_int: s must be a positive integer");
    double sum = 1.0;   // k = 0 term
    double term = 1.0;
    for (int k = 1; k < s; ++k) {
        term *= x / k;
        sum += term;
    }
    double fact = 1.0;
    for (int k = 2; k < s; ++k) fact *= k;
    return fact * std::exp(-x) * sum;
}

struct QuadratureSpec {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    int max_subdivisions = 2000;
    enum class EndpointTransform { None, SqrtPowerLaw, ExpTail } endpoint_transform =
        EndpointTransform::SqrtPowerLaw;
};

struct IntegrationResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
    int subdivisions = 0;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline const double kronrod_nodes[8] = {
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
inline const double kronrod_weights[8] = {
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
inline const double gauss_weights[4] = {
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct PanelEstimate {
    double value;
    double error;
};

template <class F>
PanelEstimate gauss_kronrod(const F& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double f0 = f(mid);
    double kron = kronrod_weights[0] * f0;
    double gauss = gauss_weights[0] * f0;
    for (int j = 1; j < 8; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double fsum = f(mid - dx) + f(mid + dx);
        kron += kronrod_weights[j] * fsum;
        if (j % 2 == 0) gauss += gauss_weights[j / 2] * fsum;
    }
    kron *= half;
    gauss *= half;
    // |K15 - G7| is a deliberately conservative bound on the Kronrod error.
    return {kron, std::abs(kron - gauss) + std::abs(kron) * 1e-16};
}

}  // namespace detail

/// Adaptive integration of f over (0, inf). The integrand may behave like a
/// power law r^p (p > -1) at the origin and must decay at least exponentially.
/// SqrtPowerLaw substitutes r = t^2 on the leading panel to tame the endpoint;
/// ExpTail maps the tail through r = r0 - ln(1-u). The tail is extended by
/// doubling panels until its contribution is negligible, and the truncation
/// estimate is folded into error_estimate.
inline IntegrationResult integrate_semi_infinite(const std::function<double(double)>& f,
                                                 const QuadratureSpec& spec = {}) {
    if (!(spec.rel_tol > 0.0) || !(spec.abs_tol > 0.0) || spec.max_subdivisions < 1)
        throw std::invalid_argument("integrate_semi_infinite: bad QuadratureSpec");

    struct Interval {
        double lo, hi, value, error;
        bool transformed;  // true when coordinates are t with r = t^2
    };

    std::vector<Interval> heap;
    auto push = [&](double lo, double hi, bool transformed) {
        if (transformed) {
            auto est = detail::gauss_kronrod([&](double t) { return 2.0 * t * f(t * t); }, lo, hi);
            heap.push_back({lo, hi, est.value, est.error, true});
        } else {
            auto est = detail::gauss_kronrod(f, lo, hi);
            heap.push_back({lo, hi, est.value, est.error, false});
        }
    };

    // Initial decomposition: [0,1] (optionally in t coordinates), then dyadic
    // panels outward until the integrand is dead.
    if (spec.endpoint_transform == QuadratureSpec::EndpointTransform::SqrtPowerLaw)
        push(0.0, 1.0, true);
    else
        push(0.0, 1.0, false);

    double tail_bound = 0.0;
    double peak = 0.0;
    for (const auto& iv : heap) peak = std::max(peak, std::abs(iv.value));
    double lo = 1.0;
    int doublings = 0;
    for (; doublings < 64; ++doublings) {
        double hi = lo * 2.0;
        push(lo, hi, false);
        peak = std::max(peak, std::abs(heap.back().value));
        const double contribution = std::abs(heap.back().value);
        // Edge values for a crude exponential-tail truncation bound.
        const double fend = std::abs(f(hi));
        if (contribution < 0.25 * (spec.abs_tol + spec.rel_tol * peak) && fend < 1e-280) {
            tail_bound = contribution + fend * hi;
            lo = hi;
            break;
        }
        lo = hi;
    }
    if (doublings == 64) {
        // Integrand never died out; report non-convergence.
        IntegrationResult r;
        for (const auto& iv : heap) {
            r.value += iv.value;
            r.error_estimate += iv.error;
        }
        r.converged = false;
        r.subdivisions = static_cast<int>(heap.size());
        return r;
    }

    auto total = [&] {
        double v = 0.0, e = 0.0;
        for (const auto& iv : heap) {
            v += iv.value;
            e += iv.error;
        }
        return std::pair<double, double>(v, e);
    };

    int subdivisions = static_cast<int>(heap.size());
    while (subdivisions < spec.max_subdivisions) {
        auto [value, error] = total();
        if (error + tail_bound <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value))) break;
        // Split the worst interval.
        size_t worst = 0;
        for (size_t i = 1; i < heap.size(); ++i)
            if (heap[i].error > heap[worst].error) worst = i;
        Interval iv = heap[worst];
        heap.erase(heap.begin() + static_cast<long>(worst));
        const double mid = 0.5 * (iv.lo + iv.hi);
        push(iv.lo, mid, iv.transformed);
        push(mid, iv.hi, iv.transformed);
        ++subdivisions;
    }

    auto [value, error] = total();
    IntegrationResult r;
    r.value = value;
    r.error_estimate = error + tail_bound;
    r.converged = r.error_estimate <= std::max(spec.abs_tol, spec.rel_tol * std::max(std::abs(value), 1e-300)) * 4.0;
    r.subdivisions = subdivisions;
    return r;
}

/// G(s; a, b) = integral_0^inf r^s exp(-(a/sqrt(b)) r - sqrt(b) r^2) dr, s > -1.
/// Integer s: stable upward recurrence 2B G_{s+1} = s G_{s-1} - A G_s seeded by
/// the erfc closed form of G_0 (A = a/sqrt(b), B = sqrt(b)). Non-integer s:
/// alternating series in A over complete gamma functions, accumulated in long
/// double (A stays modest for all supported potentials).
inline double gaussian_linear_moment(double s, double a, double b) {
    if (!(b > 0.0)) throw std::invalid_argument("gaussian_linear_moment: b must be > 0");
    if (!(a >= 0.0)) throw std::invalid_argument("gaussian_linear_moment: a must be ≥ 0");
    if (!(s > -1.0)) throw std::domain_error("gaussian_linear_moment: s must be > -1");

    const double A = a / std::sqrt(b);
    const double B = std::sqrt(b);
    const double nearest = std::nearbyint(s);
    if (std::abs(s - nearest) < 1e-12 && nearest >= 0) {
        const int si = static_cast<int>(nearest);
        const double u0 = 0.5 * A / std::sqrt(B);           // sqrt of the completed-square shift
        const double x0 = u0 * u0;                          // = a^2 / (4 b^(3/2))
        // G_0 = e^{x0} sqrt(pi/B)/2 * erfc(u0); the product stays O(1).
        const double g0 = 0.5 * std::sqrt(M_PI / B) * std::exp(x0) * std::erfc(u0);
        if (si == 0) return g0;
        const double g1 = (1.0 - A * g0) / (2.0 * B);
        if (si == 1) return g1;
        long double prev = g0, cur = g1;
        for (int k = 1; k < si; ++k) {
            long double next = (k * prev - A * cur) / (2.0L * B);
            prev = cur;
            cur = next;
        }
        return static_cast<double>(cur);
    }

    long double sum = 0.0L;
    long double apow = 1.0L;  // (-A)^k / k!
    const long double lB = B;
    for (int k = 0; k < 400; ++k) {
        const long double expo = (static_cast<long double>(s) + k + 1.0L) / 2.0L;
        const long double term = apow * 0.5L * std::pow(lB, -expo) *
                                 std::tgammal(expo);
        sum += term;
        if (std::abs(static_cast<double>(term)) < 1e-22 * std::max(1.0, std::abs(static_cast<double>(sum))) && k > 4)
            break;
        apow *= -static_cast<long double>(A) / (k + 1);
    }
    return static_cast<double>(sum);
}

}  // namespace ncspectra
