#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "errors.hpp"
#include "fading_model.hpp"
#include "quadrature.hpp"
#include "special_functions.hpp"

namespace fcap {

// Ergodic capacity (nats per channel use) under four transmit power
// adaptation strategies:
//   OPRA - water-filling power max(1/g0 - 1/g, 0) above a solved cutoff g0
//   ORA  - constant power, rate adapted
//   CI   - full channel inversion to a fixed receive SNR
//   TCI  - channel inversion only above a user-chosen cutoff g0
// Every closed form has a quadrature-only counterpart (ec_quadrature) used
// as the in-repo reference path.

enum class SchemeKind { opra, ora, ci, tci };

inline const char* to_string(SchemeKind k) {
    switch (k) {
        case SchemeKind::opra: return "opra";
        case SchemeKind::ora: return "ora";
        case SchemeKind::ci: return "ci";
        case SchemeKind::tci: return "tci";
    }
    return "?";
}

struct Scheme {
    SchemeKind kind;
    std::optional<double> gamma0;  // TCI only; OPRA's cutoff is solved internally

    static Scheme opra() { return {SchemeKind::opra, std::nullopt}; }
    static Scheme ora() { return {SchemeKind::ora, std::nullopt}; }
    static Scheme ci() { return {SchemeKind::ci, std::nullopt}; }
    static Scheme tci(double gamma0) {
        if (!(gamma0 > 0.0)) throw domain_error("Scheme::tci", "requires gamma0 > 0");
        return {SchemeKind::tci, gamma0};
    }
};

enum class EcMethod { closed_form, quadrature, asymptotic, monte_carlo };

inline const char* to_string(EcMethod m) {
    switch (m) {
        case EcMethod::closed_form: return "closed_form";
        case EcMethod::quadrature: return "quadrature";
        case EcMethod::asymptotic: return "asymptotic";
        case EcMethod::monte_carlo: return "monte_carlo";
    }
    return "?";
}

struct EcResult {
    Scheme scheme;
    double ec_nats = 0.0;
    EcMethod method = EcMethod::closed_form;
    std::map<std::string, double> diagnostics;
};

struct CutoffSolution {
    double gamma0 = 0.0;
    double residual = 0.0;  // f(gamma0) at the returned root
    int iterations = 0;
    std::pair<double, double> bracket{0.0, 0.0};
};

// P_t(g)/Pbar_t under OPRA.
inline double opra_power_ratio(double snr, double gamma0) {
    if (!(snr > 0.0)) throw domain_error("opra_power_ratio", "requires snr > 0");
    if (!(gamma0 > 0.0)) throw domain_error("opra_power_ratio", "requires gamma0 > 0");
    return std::max(1.0 / gamma0 - 1.0 / snr, 0.0);
}

namespace detail {

// Average-power constraint function whose unique root is the OPRA cutoff:
//   f(g0) = (1/g0) [1 - F(g0)] - Int_{g0}^inf f(x)/x dx - 1.
// f decreases monotonically, diverges to +inf at g0 -> 0+, and is negative
// at g0 = 1, so bisection over (1e-12, 1] always brackets the root.
inline double opra_constraint(const FadingParams& p, double g0) {
    return ccdf(p, g0) / g0 - inverse_moment_tail(p, g0) - 1.0;
}

template <class F>
CutoffSolution bisect_cutoff(F&& f, double tol, const char* op) {
    double lo = 1e-12, hi = 1.0;
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (!(f_lo > 0.0) || !(f_hi < 0.0))
        throw numeric_error(op, "cutoff bracket failure over (1e-12, 1]");
    CutoffSolution sol;
    sol.bracket = {lo, hi};
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < 100 && (hi - lo) > tol; ++i) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm > 0.0)
            lo = mid;
        else
            hi = mid;
        sol.iterations = i + 1;
    }
    sol.gamma0 = 0.5 * (lo + hi);
    sol.residual = f(sol.gamma0);
    return sol;
}

inline QuadOptions reference_quad_options() {
    QuadOptions opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-14;
    opt.max_nodes = 600000;
    opt.initial_intervals = 8;
    return opt;
}

// Quadrature-only complement and tail inverse moment (no 2F1 anywhere).
inline double ccdf_quad(const FadingParams& p, double g0) {
    if (g0 == 0.0) return 1.0;
    auto r = integrate_upper_tail([&](double x) { return pdf(p, x); }, g0, p.scale,
                                  reference_quad_options());
    return r.value;
}

inline double inverse_moment_tail_quad(const FadingParams& p, double g0) {
    auto r = integrate_upper_tail([&](double x) { return pdf(p, x) / x; }, g0, p.scale,
                                  reference_quad_options());
    return r.value;
}

}  // namespace detail

inline CutoffSolution solve_opra_cutoff(const FadingParams& p, double tol = 1e-12) {
    if (!(tol >= 1e-12))
        throw domain_error("solve_opra_cutoff", "requires tol >= 1e-12");
    return detail::bisect_cutoff([&](double g0) { return detail::opra_constraint(p, g0); },
                                 tol, "solve_opra_cutoff");
}

inline double ci_target_snr(const FadingParams& p) {
    if (!(p.m > 1.0))
        throw divergence_error("ci_target_snr", "inverse moment diverges for m <= 1");
    return (p.m - 1.0) * p.avg_snr / p.m;
}

// |Int (P_t/Pbar_t) f - 1| by quadrature for a fully specified scheme.
inline double verify_power_constraint(const FadingParams& p, const Scheme& scheme) {
    constexpr const char* op = "verify_power_constraint";
    const auto opt = detail::reference_quad_options();
    switch (scheme.kind) {
        case SchemeKind::ora: {
            auto r = integrate_upper_tail([&](double x) { return pdf(p, x); }, 0.0,
                                          p.scale, opt);
            return std::fabs(r.value - 1.0);
        }
        case SchemeKind::opra: {
            const double g0 = solve_opra_cutoff(p).gamma0;
            auto r = integrate_upper_tail(
                [&](double x) { return opra_power_ratio(x, g0) * pdf(p, x); }, g0,
                p.scale, opt);
            return std::fabs(r.value - 1.0);
        }
        case SchemeKind::ci: {
            if (!(p.m > 1.0))
                throw divergence_error(op, "CI power diverges for m <= 1");
            const double gt = ci_target_snr(p);
            auto r = integrate_upper_tail([&](double x) { return gt / x * pdf(p, x); },
                                          0.0, p.scale, opt);
            return std::fabs(r.value - 1.0);
        }
        case SchemeKind::tci: {
            if (!scheme.gamma0) throw domain_error(op, "TCI requires gamma0");
            const double g0 = *scheme.gamma0;
            const double gt = 1.0 / inverse_moment_tail(p, g0);
            auto r = integrate_upper_tail([&](double x) { return gt / x * pdf(p, x); },
                                          g0, p.scale, opt);
            return std::fabs(r.value - 1.0);
        }
    }
    throw domain_error(op, "unknown scheme");
}

// ---- OPRA ----------------------------------------------------------------

inline EcResult ec_opra(const FadingParams& p) {
    const CutoffSolution sol = solve_opra_cutoff(p);
    const double z = p.scale / sol.gamma0;
    MeijerDiagnostics mdiag;
    const double g = meijer_g_opra(z, p.m, p.ms, ContourSpec::opra_tuned(z, p.ms), &mdiag);
    if (!(g > 0.0))
        throw convergence_error("ec_opra", "contour integral lost all significance");
    const double ec =
        std::exp(p.ms * std::log(z) + std::log(g) - ln_gamma(p.m) - ln_gamma(p.ms));
    EcResult res{Scheme::opra(), ec, EcMethod::closed_form, {}};
    res.scheme.gamma0 = sol.gamma0;
    res.diagnostics["gamma0"] = sol.gamma0;
    res.diagnostics["cutoff_residual"] = sol.residual;
    res.diagnostics["constraint_residual"] = verify_power_constraint(p, Scheme::opra());
    res.diagnostics["contour_im_residual"] = mdiag.im_residual;
    return res;
}

// High-SNR expansion ln gb + ln(ms/(m g0)) + psi(m) - psi(ms), either with
// the solved cutoff or with its high-SNR limit g0 = 1.
inline double ec_opra_asym(const FadingParams& p, bool use_solved_cutoff) {
    double g0 = 1.0;
    if (use_solved_cutoff) g0 = solve_opra_cutoff(p).gamma0;
    return std::log(p.avg_snr) + std::log(p.ms / (p.m * g0)) + digamma(p.m) -
           digamma(p.ms);
}

// ---- ORA -----------------------------------------------------------------

inline EcResult ec_ora(const FadingParams& p) {
    const double z = p.scale;
    MeijerDiagnostics mdiag;
    const double g = meijer_g_ora(z, p.m, p.ms, ContourSpec::ora_tuned(z, p.ms), &mdiag);
    if (!(g > 0.0))
        throw convergence_error("ec_ora", "contour integral lost all significance");
    const double ec = std::exp(std::log(g) - ln_gamma(p.m) - ln_gamma(p.ms));
    EcResult res{Scheme::ora(), ec, EcMethod::closed_form, {}};
    res.diagnostics["contour_im_residual"] = mdiag.im_residual;
    return res;
}

inline double ec_ora_asym(const FadingParams& p) {
    return std::log(p.avg_snr) + std::log(p.ms / p.m) + digamma(p.m) - digamma(p.ms);
}

// ---- CI ------------------------------------------------------------------

inline EcResult ec_ci(const FadingParams& p) {
    EcResult res{Scheme::ci(), 0.0, EcMethod::closed_form, {}};
    if (!(p.m > 1.0)) {
        // the inverse moment diverges, no power level satisfies the
        // constraint and the capacity degenerates to zero
        res.diagnostics["divergent_inverse_moment"] = 1.0;
        return res;
    }
    const double gt = ci_target_snr(p);
    res.ec_nats = std::log1p(gt);
    res.diagnostics["target_snr"] = gt;
    return res;
}

inline double ec_ci_asym(const FadingParams& p) {
    if (!(p.m > 1.0)) throw domain_error("ec_ci_asym", "requires m > 1");
    return std::log(p.avg_snr) + std::log((p.m - 1.0) / p.m);
}

// ---- TCI -----------------------------------------------------------------

inline EcResult ec_tci(const FadingParams& p, double gamma0) {
    if (!(gamma0 > 0.0)) throw domain_error("ec_tci", "requires gamma0 > 0");
    const double inv_moment = inverse_moment_tail(p, gamma0);
    const double fbar = ccdf(p, gamma0);
    EcResult res{Scheme::tci(gamma0), std::log1p(1.0 / inv_moment) * fbar,
                 EcMethod::closed_form, {}};
    res.diagnostics["inverse_moment"] = inv_moment;
    res.diagnostics["outage"] = 1.0 - fbar;
    return res;
}

// Three-case high-SNR law: slope 1 with the CI offset for m > 1, slope m
// for m < 1, and a slowly varying logarithmic correction at m = 1.
inline double ec_tci_asym(const FadingParams& p, double gamma0) {
    if (!(gamma0 > 0.0)) throw domain_error("ec_tci_asym", "requires gamma0 > 0");
    const double lg = std::log(p.avg_snr);
    if (std::fabs(p.m - 1.0) < 1e-9) {
        const double denom =
            lg + std::log(p.ms / gamma0) + digamma(1.0) - digamma(1.0 + p.ms);
        return lg + ln_beta(1.0, p.ms) + std::log(p.ms) - std::log(denom);
    }
    if (p.m > 1.0) return lg + std::log((p.m - 1.0) / p.m);
    return p.m * lg + ln_beta(p.m, p.ms) + std::log1p(-p.m) -
           (p.m - 1.0) * std::log(gamma0) - p.m * std::log(p.m / p.ms);
}

// ---- quadrature reference path --------------------------------------------

// Scheme EC by adaptive quadrature only: no Meijer-G, no 2F1 anywhere in
// the evaluation chain (the OPRA cutoff is re-solved against quadrature
// versions of the CCDF and tail inverse moment).
inline EcResult ec_quadrature(const FadingParams& p, const Scheme& scheme) {
    constexpr const char* op = "ec_quadrature";
    const auto opt = detail::reference_quad_options();
    EcResult res{scheme, 0.0, EcMethod::quadrature, {}};
    switch (scheme.kind) {
        case SchemeKind::ora: {
            auto r = integrate_upper_tail(
                [&](double x) { return std::log1p(x) * pdf(p, x); }, 0.0, p.scale, opt);
            if (!r.converged) throw convergence_error(op, "ORA quadrature failed");
            res.ec_nats = r.value;
            return res;
        }
        case SchemeKind::opra: {
            auto f = [&](double g0) {
                return detail::ccdf_quad(p, g0) / g0 -
                       detail::inverse_moment_tail_quad(p, g0) - 1.0;
            };
            const CutoffSolution sol = detail::bisect_cutoff(f, 1e-12, op);
            auto r = integrate_upper_tail(
                [&](double x) { return std::log(x / sol.gamma0) * pdf(p, x); },
                sol.gamma0, p.scale, opt);
            if (!r.converged) throw convergence_error(op, "OPRA quadrature failed");
            res.ec_nats = r.value;
            res.scheme.gamma0 = sol.gamma0;
            res.diagnostics["gamma0"] = sol.gamma0;
            return res;
        }
        case SchemeKind::ci: {
            if (!(p.m > 1.0)) {
                res.diagnostics["divergent_inverse_moment"] = 1.0;
                return res;
            }
            const double im = detail::inverse_moment_tail_quad(p, 0.0);
            res.ec_nats = std::log1p(1.0 / im);
            res.diagnostics["target_snr"] = 1.0 / im;
            return res;
        }
        case SchemeKind::tci: {
            if (!scheme.gamma0) throw domain_error(op, "TCI requires gamma0");
            const double g0 = *scheme.gamma0;
            const double im = detail::inverse_moment_tail_quad(p, g0);
            const double fbar = detail::ccdf_quad(p, g0);
            res.ec_nats = std::log1p(1.0 / im) * fbar;
            res.diagnostics["inverse_moment"] = im;
            res.diagnostics["outage"] = 1.0 - fbar;
            return res;
        }
    }
    throw domain_error(op, "unknown scheme");
}

}  // namespace fcap
