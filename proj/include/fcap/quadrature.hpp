#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

#include "errors.hpp"

namespace fcap {

// Adaptive Gauss-Kronrod (G7/K15) quadrature over a finite interval.
// Value may be double or std::complex<long double>; the abscissa type is
// long double so the same kernel serves both the real reference integrals
// and the Mellin-Barnes contour.

template <class Value>
struct QuadResult {
    Value value{};
    double error = 0.0;      // estimated absolute error
    long nodes = 0;          // integrand evaluations spent
    bool converged = false;
};

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    long max_nodes = 200000;
    int initial_intervals = 1;
};

namespace detail {

// QUADPACK dqk15 nodes and weights.
inline constexpr long double gk_x[8] = {
    0.991455371120812639206854697526329L,
    0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L,
    0.741531185599394439863864773280788L,
    0.586087235467691130294144838258730L,
    0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L,
    0.0L};

inline constexpr long double gk_wk[8] = {
    0.022935322010529224963732008058970L,
    0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L,
    0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L,
    0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L,
    0.209482141084727828012999174891714L};

inline constexpr long double gk_wg[4] = {
    0.129484966168869693270611432679082L,
    0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L,
    0.417959183673469387755102040816327L};

template <class Value, class F>
void gk15(F& f, long double a, long double b, Value& integral, double& error) {
    const long double half = 0.5L * (b - a);
    const long double mid = 0.5L * (a + b);

    const Value fc = f(mid);
    Value resg = fc * (long double)gk_wg[3];
    Value resk = fc * (long double)gk_wk[7];
    for (int j = 0; j < 3; ++j) {
        const int i = 2 * j + 1;  // shared Gauss/Kronrod nodes
        const Value f1 = f(mid - half * gk_x[i]);
        const Value f2 = f(mid + half * gk_x[i]);
        resg += gk_wg[j] * (f1 + f2);
        resk += gk_wk[i] * (f1 + f2);
    }
    for (int j = 0; j < 4; ++j) {
        const int i = 2 * j;  // Kronrod-only nodes
        const Value f1 = f(mid - half * gk_x[i]);
        const Value f2 = f(mid + half * gk_x[i]);
        resk += gk_wk[i] * (f1 + f2);
    }
    integral = resk * half;
    error = static_cast<double>(std::abs((resk - resg) * half));
}

template <class Value>
struct QuadSegment {
    long double a, b;
    Value value;
    double error;
    bool operator<(const QuadSegment& o) const { return error < o.error; }
};

}  // namespace detail

template <class F>
auto integrate(F&& f, long double a, long double b, const QuadOptions& opt = {})
    -> QuadResult<std::decay_t<decltype(f((long double)0))>> {
    using Value = std::decay_t<decltype(f((long double)0))>;
    QuadResult<Value> out;
    if (a == b) {
        out.converged = true;
        return out;
    }

    std::priority_queue<detail::QuadSegment<Value>> heap;
    Value total{};
    double err_total = 0.0;
    const int n0 = std::max(1, opt.initial_intervals);
    for (int i = 0; i < n0; ++i) {
        detail::QuadSegment<Value> s;
        s.a = a + (b - a) * i / n0;
        s.b = a + (b - a) * (i + 1) / n0;
        detail::gk15(f, s.a, s.b, s.value, s.error);
        out.nodes += 15;
        total += s.value;
        err_total += s.error;
        heap.push(s);
    }

    const long double width_floor = std::fabs(b - a) * 1e-15L;
    while (true) {
        const double target =
            std::max(opt.abs_tol, opt.rel_tol * static_cast<double>(std::abs(total)));
        if (err_total <= target) {
            out.converged = true;
            break;
        }
        if (out.nodes + 30 > opt.max_nodes) break;
        detail::QuadSegment<Value> worst = heap.top();
        if (worst.b - worst.a < width_floor) break;  // cannot refine further
        heap.pop();
        total -= worst.value;
        err_total -= worst.error;

        const long double mids = 0.5L * (worst.a + worst.b);
        detail::QuadSegment<Value> left{worst.a, mids, Value{}, 0.0};
        detail::QuadSegment<Value> right{mids, worst.b, Value{}, 0.0};
        detail::gk15(f, left.a, left.b, left.value, left.error);
        detail::gk15(f, right.a, right.b, right.value, right.error);
        out.nodes += 30;
        total += left.value + right.value;
        err_total += left.error + right.error;
        heap.push(left);
        heap.push(right);
    }
    out.value = total;
    out.error = err_total;
    return out;
}

// Integral of g over [x0, inf) through the substitution t = s/(x + s),
// i.e. x = s(1-t)/t, which maps the tail onto (0, t0] with
// t0 = s/(x0 + s). The scale s should match the natural scale of the
// integrand so the transformed kernel is smooth and bounded. The mapping is
// carried out in long double so nodes next to t = 1 keep x > 0 exactly.
//
// When x0 = 0 the x -> 0 end (t -> 1) is reached through t = 1 - v^2,
// which absorbs algebraic endpoint behavior g ~ x^(m-1) down to m = 1/2.
template <class F>
QuadResult<double> integrate_upper_tail(F&& g, double x0, double scale,
                                        const QuadOptions& opt = {}) {
    auto h = [&](long double t) -> double {
        const long double x = scale * (1.0L - t) / t;
        return g(static_cast<double>(x)) * scale / static_cast<double>(t * t);
    };
    if (x0 > 0.0) {
        const double t0 = scale / (x0 + scale);
        return integrate(h, 0.0L, (long double)t0, opt);
    }
    auto hv = [&](long double v) -> double {
        const long double t = 1.0L - v * v;
        return h(t) * 2.0 * static_cast<double>(v);
    };
    QuadOptions half = opt;
    half.rel_tol = opt.rel_tol * 0.5;
    half.max_nodes = opt.max_nodes / 2;
    auto far = integrate(h, 0.0L, 0.5L, half);
    auto near = integrate(hv, 0.0L, 0.7071067811865475244L, half);
    QuadResult<double> out;
    out.value = far.value + near.value;
    out.error = far.error + near.error;
    out.nodes = far.nodes + near.nodes;
    out.converged = far.converged && near.converged;
    return out;
}

}  // namespace fcap
