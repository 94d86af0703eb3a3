#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "errors.hpp"
#include "quadrature.hpp"

namespace fcap {

// Real-argument special functions used by the capacity expressions:
// log-gamma, digamma, log-beta, the Gauss hypergeometric function for
// nonpositive real argument, and two specific Meijer-G instances evaluated
// by numerical Mellin-Barnes contour integration.

inline double ln_gamma(double x) {
    if (!(x > 0.0)) throw domain_error("ln_gamma", "requires x > 0");
    return std::lgamma(x);
}

// psi(x) for x > 0: shift into x >= 10 with psi(x) = psi(x+1) - 1/x, then
// the Bernoulli asymptotic series (next omitted term < 5e-17 at x = 10).
inline double digamma(double x) {
    if (!(x > 0.0)) throw domain_error("digamma", "requires x > 0");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double v = inv * inv;
    double s = std::log(x) - 0.5 * inv;
    s += v * (-1.0 / 12 +
              v * (1.0 / 120 +
                   v * (-1.0 / 252 +
                        v * (1.0 / 240 +
                             v * (-1.0 / 132 +
                                  v * (691.0 / 32760 + v * (-1.0 / 12)))))));
    return acc + s;
}

inline double ln_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw domain_error("ln_beta", "requires a, b > 0");
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace detail {

inline constexpr double euler_gamma = 0.5772156649015328606065120900824024;

inline bool is_nonpositive_integer(double x, double tol = 1e-12) {
    return x < 0.5 && std::fabs(x - std::nearbyint(x)) <= tol && std::nearbyint(x) <= 0.0;
}

// Snap values that sit within 1e-12 of a nonpositive integer so that
// terminating hypergeometric series terminate exactly.
inline double snap_nonpositive_integer(double x) {
    return is_nonpositive_integer(x) ? std::nearbyint(x) : x;
}

// sin(pi x) with the argument reduced first (sign-safe for negative x).
inline double sin_pi(double x) {
    const double n = std::nearbyint(x);
    const double f = x - n;
    const double s = std::sin(std::numbers::pi * f);
    return (static_cast<long long>(n) % 2 == 0) ? s : -s;
}

struct SignedLnGamma {
    double ln_abs;
    int sign;
};

// ln|Gamma(x)| and its sign for any non-pole real x (reflection for x < 0).
inline SignedLnGamma ln_gamma_signed(double x) {
    if (x > 0.0) return {std::lgamma(x), 1};
    const double s = sin_pi(x);
    if (s == 0.0) throw domain_error("ln_gamma_signed", "pole at nonpositive integer");
    return {std::log(std::numbers::pi) - std::log(std::fabs(s)) - std::lgamma(1.0 - x),
            s > 0.0 ? 1 : -1};
}

// Gauss series sum_k (a)_k (b)_k / ((c)_k k!) w^k. Stops once a geometric
// bound on the remaining tail falls below eps * |sum|; terminating series
// (a or b a nonpositive integer) stop exactly. Throws when the term budget
// is exhausted before the bound is met.
inline double hyp_series(double a, double b, double c, double w, long max_terms,
                         const char* op) {
    constexpr double eps = 1e-16;
    double term = 1.0;
    double sum = 1.0;
    for (long k = 0; k < max_terms; ++k) {
        const double den = (c + k) * (k + 1);
        if (den == 0.0) throw domain_error(op, "lower parameter hit a nonpositive integer");
        term *= (a + k) * (b + k) / den * w;
        if (term == 0.0) return sum;
        sum += term;
        const double r =
            std::fabs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2)) * w);
        if (r < 1.0 && std::fabs(term) * r / (1.0 - r) <= eps * std::fabs(sum))
            return sum;
    }
    throw convergence_error(op, "hypergeometric series budget exhausted");
}

// 2F1(1, p; p+1; 1-u) = p (1-u)^{-p} * [ -ln u - psi(p) - gamma_E
//     - sum_{j>=1} (-1)^j binom(p-1, j) u^j / j ].
// Exact logarithmic form; numerically sound for small u with (p-1) u < 1/2.
// u must be supplied directly (u = 1/(1-z)) so no accuracy is lost to the
// 1 - w cancellation.
inline double hyp_one_p_closed(double p, double u) {
    double t = 1.0;  // (-1)^j binom(p-1, j) u^j
    double corr = 0.0;
    for (int j = 1; j < 512; ++j) {
        t *= -(p - j) / j * u;
        const double dj = t / j;
        corr += dj;
        if (std::fabs(dj) <= 1e-18 * (1.0 + std::fabs(corr))) break;
    }
    const double bracket = -std::log(u) - digamma(p) - euler_gamma - corr;
    return p * std::pow(1.0 - u, -p) * bracket;
}

}  // namespace detail

// Gauss hypergeometric function 2F1(a, b; c; z) for real parameters with
// c > 0 and real argument z <= 0 (|z| may be very large). Strategy:
//   * direct series for z in (-0.5, 0];
//   * Pfaff transformation w = z/(z-1) in [1/3, 1) otherwise, with the
//     smaller upper parameter pulled into the (1-z)^-min(a,b) prefactor;
//   * exact logarithmic closed form when the transformed series is of the
//     form 2F1(1, p; p+1; w);
//   * for very large |z|, the two-term connection formula in 1/(1-z)
//     (argument <= 1e-3), valid away from integer a-b.
inline double gauss_2f1(double a, double b, double c, double z) {
    constexpr const char* op = "gauss_2f1";
    constexpr long budget = 100000;
    if (z > 0.0) throw domain_error(op, "argument must be <= 0");
    if (!(c > 0.0)) throw domain_error(op, "requires c > 0");
    if (z == 0.0) return 1.0;

    a = detail::snap_nonpositive_integer(a);
    b = detail::snap_nonpositive_integer(b);
    if (a == std::nearbyint(a) && a <= 0.0)
        return detail::hyp_series(a, b, c, z, budget, op);
    if (b == std::nearbyint(b) && b <= 0.0)
        return detail::hyp_series(b, a, c, z, budget, op);
    if (z > -0.5) return detail::hyp_series(a, b, c, z, budget, op);

    // Pfaff: 2F1(a,b;c;z) = (1-z)^{-lo} 2F1(c-hi, lo; c; w), w = z/(z-1).
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    const double w = z / (z - 1.0);
    const double u = 1.0 / (1.0 - z);
    const double ln_pref = -lo * std::log1p(-z);
    const double alpha = detail::snap_nonpositive_integer(c - hi);
    const double beta = lo;

    if (alpha == std::nearbyint(alpha) && alpha <= 0.0)
        return std::exp(ln_pref) * detail::hyp_series(alpha, beta, c, w, budget, op);

    // Logarithmic pattern 2F1(1, p; p+1; w) after the transformation.
    {
        double p = 0.0;
        if (std::fabs(alpha - 1.0) < 1e-12 && std::fabs(c - (beta + 1.0)) < 1e-12)
            p = beta;
        else if (std::fabs(beta - 1.0) < 1e-12 && std::fabs(c - (alpha + 1.0)) < 1e-12)
            p = alpha;
        if (p > 0.0 && u <= 0.1 && (p - 1.0) * u < 0.5)
            return std::exp(ln_pref) * detail::hyp_one_p_closed(p, u);
    }

    if (z >= -1000.0) {
        const double s = detail::hyp_series(alpha, beta, c, w, budget, op);
        return std::copysign(std::exp(ln_pref + std::log(std::fabs(s))), s);
    }

    // Far argument: connection formula in u = 1/(1-z),
    //   F = G(c)G(b-a)/(G(b)G(c-a)) (1-z)^{-a} 2F1(a, c-b; a-b+1; u)
    //     + G(c)G(a-b)/(G(a)G(c-b)) (1-z)^{-b} 2F1(b, c-a; b-a+1; u),
    // which degenerates for integer a-b.
    const double diff = a - b;
    if (std::fabs(diff - std::nearbyint(diff)) > 1e-5) {
        const double lgc = std::lgamma(c);
        double result = 0.0;
        const double cma = detail::snap_nonpositive_integer(c - a);
        const double cmb = detail::snap_nonpositive_integer(c - b);
        // term with prefactor (1-z)^{-a}
        if (!(cma == std::nearbyint(cma) && cma <= 0.0)) {
            const auto g1 = detail::ln_gamma_signed(b - a);
            const auto g2 = detail::ln_gamma_signed(b);
            const auto g3 = detail::ln_gamma_signed(cma);
            const double s1 = detail::hyp_series(a, c - b, a - b + 1.0, u, budget, op);
            const double mag = lgc + g1.ln_abs - g2.ln_abs - g3.ln_abs -
                               a * std::log1p(-z) + std::log(std::fabs(s1));
            result += g1.sign * g2.sign * g3.sign * std::copysign(std::exp(mag), s1);
        }
        // term with prefactor (1-z)^{-b}
        if (!(cmb == std::nearbyint(cmb) && cmb <= 0.0)) {
            const auto g1 = detail::ln_gamma_signed(a - b);
            const auto g2 = detail::ln_gamma_signed(a);
            const auto g3 = detail::ln_gamma_signed(cmb);
            const double s2 = detail::hyp_series(b, c - a, b - a + 1.0, u, budget, op);
            const double mag = lgc + g1.ln_abs - g2.ln_abs - g3.ln_abs -
                               b * std::log1p(-z) + std::log(std::fabs(s2));
            result += g1.sign * g2.sign * g3.sign * std::copysign(std::exp(mag), s2);
        }
        return result;
    }

    // Integer a-b at extreme argument: fall back to the transformed series
    // with the full budget; the polynomial decay k^{-1-|a-b|} may still meet
    // tolerance, otherwise hyp_series reports nonconvergence.
    const double s = detail::hyp_series(alpha, beta, c, w, budget, op);
    return std::copysign(std::exp(ln_pref + std::log(std::fabs(s))), s);
}

// ------------------------------------------------------------------------
// Meijer-G instances via Mellin-Barnes integration on a vertical line.

// Vertical integration line Re(y) = abscissa, Im(y) in [-truncation,
// truncation]. The abscissa must strictly separate the left and right pole
// families of the integrand; each instance validates this on entry.
struct ContourSpec {
    double abscissa;
    double truncation;
    long max_nodes = 400000;
    double tolerance = 1e-11;

    // Midpoint-style separation, adequate for moderate arguments.
    static ContourSpec opra_default(double ms) {
        return {-std::min(ms, 1.0) / 2.0, 14.0};
    }
    static ContourSpec ora_default(double ms) {
        return {std::min(ms, 1.0) / 2.0, 7.0};
    }

    // Argument-aware abscissas: for large |ln z| the line is moved toward
    // the pole whose residue dominates, which keeps the oscillatory
    // cancellation (and with it the effective precision loss) bounded.
    static ContourSpec opra_tuned(double z, double ms) {
        const double L = std::log(z);
        if (L > 2.0) return {-ms + std::min(ms / 2.0, 2.0 / L), 14.0};
        if (L < -2.0) return {-std::min(std::min(ms, 1.0) / 2.0, 2.0 / -L), 14.0};
        return opra_default(ms);
    }
    static ContourSpec ora_tuned(double z, double ms) {
        const double edge = std::min(1.0, ms);
        const double L = std::log(z);
        if (L > 2.0) return {std::min(edge / 2.0, 2.0 / L), 7.0};
        if (L < -2.0) return {edge - std::min(edge / 2.0, 2.0 / -L), 7.0};
        return ora_default(ms);
    }
};

struct MeijerDiagnostics {
    double im_residual = 0.0;   // |Im| of the contour integral
    double tail_bound = 0.0;    // estimated truncation remainder
    double error_estimate = 0.0;
    long nodes = 0;
};

namespace detail {

inline constexpr long double pi_l = std::numbers::pi_v<long double>;
using cld = std::complex<long double>;

// Spouge coefficients, a = 24: relative error ~1e-20 for Re(z) > 0,
// below long-double roundoff.
inline const std::array<long double, 24>& spouge_coeffs() {
    static const std::array<long double, 24> table = [] {
        std::array<long double, 24> c{};
        const long double a = 24.0L;
        c[0] = std::sqrt(2.0L * pi_l);
        long double factorial = 1.0L;  // (k-1)!
        for (int k = 1; k < 24; ++k) {
            const long double mag =
                std::exp((k - 0.5L) * std::log(a - k) + (a - k)) / factorial;
            c[k] = (k % 2 == 1) ? mag : -mag;
            factorial *= k;
        }
        return c;
    }();
    return table;
}

// log Gamma for complex z with Re(z) > 0. Branch offsets are irrelevant to
// callers because only exp(sum of log-gammas) is ever formed.
inline cld log_gamma_complex(cld z) {
    cld shift{0.0L, 0.0L};
    while (z.real() < 1.0L) {
        shift += std::log(z);
        z += 1.0L;
    }
    const auto& c = spouge_coeffs();
    const cld w = z - 1.0L;
    cld acc = c[0];
    for (int k = 1; k < 24; ++k) acc += c[k] / (w + (long double)k);
    return (w + 0.5L) * std::log(w + 24.0L) - (w + 24.0L) + std::log(acc) - shift;
}

template <class Integrand>
double mellin_barnes_line(Integrand&& ln_f, const ContourSpec& spec, double decay_rate,
                          MeijerDiagnostics* diag, const char* op, double osc_freq) {
    const long double c = spec.abscissa;
    const long double T = spec.truncation;
    if (!(T > 0.0L)) throw domain_error(op, "truncation must be positive");

    auto f = [&](long double t) -> cld { return std::exp(ln_f(cld{c, t})); };

    QuadOptions opt;
    opt.rel_tol = std::max(spec.tolerance * 0.1, 1e-14);
    opt.max_nodes = spec.max_nodes;
    // pre-split so each panel sees at most ~1 radian of z^{c+it} phase
    opt.initial_intervals = static_cast<int>(
        std::min<long>(8192, std::max<long>(16, std::lround(2.0 * T * std::max(1.0, osc_freq) / 3.0))));
    auto res = integrate(f, -T, T, opt);

    const cld total = res.value / (2.0L * pi_l);
    const double re = static_cast<double>(total.real());
    const double im = static_cast<double>(total.imag());
    const double scale = std::max(std::fabs(re), 1e-290);

    // the node budget may run out before the aggressive internal target is
    // met; what matters is the achieved error against the requested tolerance
    if (!res.converged && res.error / (2.0 * std::numbers::pi) > spec.tolerance * scale)
        throw convergence_error(op, "contour quadrature node budget exhausted");

    const double tail =
        static_cast<double>(std::abs(f(T)) + std::abs(f(-T))) / decay_rate / (2.0 * std::numbers::pi);
    if (tail > spec.tolerance * scale)
        throw convergence_error(op, "truncation tail bound exceeds tolerance");
    if (std::fabs(im) > spec.tolerance * scale)
        throw convergence_error(op, "imaginary residual exceeds tolerance");

    if (diag) {
        diag->im_residual = std::fabs(im);
        diag->tail_bound = tail;
        diag->error_estimate = res.error / (2.0 * std::numbers::pi);
        diag->nodes = res.nodes;
    }
    return re;
}

inline void check_margin(double c, double pole, const char* op) {
    if (std::fabs(c - pole) <= 1e-12)
        throw contour_error(op, "abscissa within 1e-12 of an integrand pole");
}

}  // namespace detail

// G^{1,3}_{3,3}(z | 1-ms,1-ms,1-m-ms ; 0,-ms,-ms): the contour integral
// (1/2 pi i) Int Gamma(-y) Gamma(m+ms+y) Gamma^2(ms+y) / Gamma^2(1+ms+y) z^y dy
// on Re(y) = c with c in (-ms, 0). The gamma ratio reduces to (ms+y)^-2,
// leaving right poles at y = 0,1,2,... and left poles at y = -ms (double)
// and y = -m-ms-k.
inline double meijer_g_opra(double z, double m, double ms, const ContourSpec& spec,
                            MeijerDiagnostics* diag = nullptr) {
    constexpr const char* op = "meijer_g_opra";
    if (!(z > 0.0)) throw domain_error(op, "requires z > 0");
    if (!(m > 0.0) || !(ms > 0.0)) throw domain_error(op, "requires m, ms > 0");
    const double c = spec.abscissa;
    if (!(c > -ms) || !(c < 0.0))
        throw contour_error(op, "abscissa must lie in (-ms, 0) to separate the poles");
    detail::check_margin(c, 0.0, op);
    detail::check_margin(c, -ms, op);

    const long double L = std::log((long double)z);
    const long double ml = m, msl = ms;
    auto ln_f = [=](detail::cld y) -> detail::cld {
        return detail::log_gamma_complex(-y) + detail::log_gamma_complex(ml + msl + y) -
               2.0L * std::log(msl + y) + y * L;
    };
    // two numerator gammas against an algebraic factor: |f| ~ exp(-pi |t|)
    return detail::mellin_barnes_line(ln_f, spec, std::numbers::pi, diag, op,
                                      std::fabs((double)L));
}

// G^{2,3}_{3,3}(z | 1,1,1-m ; 1,ms,0): integrand
// Gamma(1-s) Gamma(ms-s) Gamma^2(s) Gamma(m+s) / Gamma(1+s) z^s on
// Re(s) = c with c in (0, min(1, ms)). Gamma^2(s)/Gamma(1+s) = Gamma(s)/s,
// so the left family has a double pole at s = 0 plus s = -k, s = -m-k, and
// the right family sits at s = 1+k and s = ms+k.
inline double meijer_g_ora(double z, double m, double ms, const ContourSpec& spec,
                           MeijerDiagnostics* diag = nullptr) {
    constexpr const char* op = "meijer_g_ora";
    if (!(z > 0.0)) throw domain_error(op, "requires z > 0");
    if (!(m > 0.0) || !(ms > 0.0)) throw domain_error(op, "requires m, ms > 0");
    const double c = spec.abscissa;
    const double edge = std::min(1.0, ms);
    if (!(c > 0.0) || !(c < edge))
        throw contour_error(op, "abscissa must lie in (0, min(1, ms)) to separate the poles");
    detail::check_margin(c, 0.0, op);
    detail::check_margin(c, edge, op);

    const long double L = std::log((long double)z);
    const long double ml = m, msl = ms;
    auto ln_f = [=](detail::cld s) -> detail::cld {
        return detail::log_gamma_complex(1.0L - s) + detail::log_gamma_complex(msl - s) +
               detail::log_gamma_complex(s) + detail::log_gamma_complex(ml + s) -
               std::log(s) + s * L;
    };
    // four gammas: |f| ~ exp(-2 pi |t|)
    return detail::mellin_barnes_line(ln_f, spec, 2.0 * std::numbers::pi, diag, op,
                                      std::fabs((double)L));
}

}  // namespace fcap
