#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"
#include "special_functions.hpp"

namespace fcap {

// SNR distribution of a Fisher-Snedecor F fading channel: the instantaneous
// SNR is scale * U/V with U ~ Gamma(m), V ~ Gamma(ms) and scale =
// ms * avg_snr / m, giving the density
//   f(g) = m^m (ms gb)^ms g^(m-1) / ( B(m,ms) (m g + ms gb)^(m+ms) ).
// m is the fading severity (number of multipath clusters), ms the shadowing
// shape, and avg_snr the linear-scale parameter gb of the model.

struct FadingParams {
    double m;
    double ms;
    double avg_snr;
    double scale;        // ms * avg_snr / m, cached
    double ln_beta_mms;  // ln B(m, ms), cached
    double ln_pdf_coef;  // m ln m + ms ln(ms avg_snr) - ln B(m, ms), cached

    FadingParams(double m_, double ms_, double avg_snr_)
        : m(m_), ms(ms_), avg_snr(avg_snr_), scale(ms_ * avg_snr_ / m_) {
        validate(m, "m");
        validate(ms, "ms");
        validate(avg_snr, "avg_snr");
        ln_beta_mms = ln_beta(m, ms);
        ln_pdf_coef = m * std::log(m) + ms * std::log(ms * avg_snr) - ln_beta_mms;
    }

    // Construct from the true mean SNR ms*gb/(ms-1); only defined for ms > 1.
    static FadingParams from_true_mean(double m_, double ms_, double mean_snr) {
        if (!(ms_ > 1.0))
            throw divergence_error("FadingParams::from_true_mean",
                                   "mean is undefined for ms <= 1");
        return FadingParams(m_, ms_, mean_snr * (ms_ - 1.0) / ms_);
    }

private:
    static void validate(double v, const char* name) {
        if (!(v >= 1e-8) || !(v <= 1e8))
            throw domain_error("FadingParams",
                               std::string(name) + " must lie in [1e-8, 1e8]");
    }
};

// Density, evaluated in log space so large powers of (m g + ms gb) cannot
// overflow at the extreme average SNRs used in asymptotic checks.
inline double pdf(const FadingParams& p, double snr) {
    if (!(snr >= 0.0)) throw domain_error("pdf", "requires snr >= 0");
    if (snr == 0.0) {
        if (p.m > 1.0) return 0.0;
        if (p.m == 1.0) return 1.0 / p.avg_snr;
        return std::numeric_limits<double>::infinity();
    }
    const double ln_f = p.ln_pdf_coef + (p.m - 1.0) * std::log(snr) -
                        (p.m + p.ms) * std::log(p.m * snr + p.ms * p.avg_snr);
    return std::exp(ln_f);
}

// F(g) = (m g / (ms gb))^m 2F1(m+ms, m; m+1; -m g/(ms gb)) / (m B(m, ms)).
inline double cdf(const FadingParams& p, double snr) {
    if (!(snr >= 0.0)) throw domain_error("cdf", "requires snr >= 0");
    if (snr == 0.0) return 0.0;
    const double x = p.m * snr / (p.ms * p.avg_snr);
    const double h = gauss_2f1(p.m + p.ms, p.m, p.m + 1.0, -x);
    const double ln_F = p.m * std::log(x) - std::log(p.m) - p.ln_beta_mms + std::log(h);
    double F = std::exp(ln_F);
    if (F > 1.0 && F < 1.0 + 1e-12) F = 1.0;  // clamp only roundoff excursions
    return F;
}

// 1 - F(g). Beyond the median region the complement is computed through
// the reciprocal property  P(X > g) = P(1/X < 1/g)  with 1/X again F
// distributed under (m <-> ms, gb -> 1/gb). Switching well before the
// 1 - F subtraction can cancel keeps the tail relatively accurate.
inline double ccdf(const FadingParams& p, double snr) {
    if (!(snr >= 0.0)) throw domain_error("ccdf", "requires snr >= 0");
    const double F = cdf(p, snr);
    if (F <= 0.9) return 1.0 - F;
    const FadingParams swapped(p.ms, p.m, 1.0 / p.avg_snr);
    return cdf(swapped, 1.0 / snr);
}

// True average SNR ms*gb/(ms-1); the first moment diverges for ms <= 1.
inline double true_mean(const FadingParams& p) {
    if (!(p.ms > 1.0))
        throw divergence_error("true_mean", "mean is undefined for ms <= 1");
    return p.ms * p.avg_snr / (p.ms - 1.0);
}

// Int_{gamma0}^inf f(x)/x dx. For gamma0 > 0:
//   (ms gb / m)^ms 2F1(m+ms, ms+1; ms+2; -ms gb/(m gamma0))
//   / ( B(m,ms) (ms+1) gamma0^(ms+1) ),
// assembled in log space. For gamma0 = 0 the integral is m/((m-1) gb),
// finite only for m > 1.
inline double inverse_moment_tail(const FadingParams& p, double gamma0) {
    constexpr const char* op = "inverse_moment_tail";
    if (!(gamma0 >= 0.0)) throw domain_error(op, "requires gamma0 >= 0");
    if (gamma0 == 0.0) {
        if (!(p.m > 1.0))
            throw divergence_error(op, "integral diverges at gamma0 = 0 for m <= 1");
        return p.m / ((p.m - 1.0) * p.avg_snr);
    }
    const double h = gauss_2f1(p.m + p.ms, p.ms + 1.0, p.ms + 2.0, -p.scale / gamma0);
    const double ln_v = p.ms * std::log(p.scale) - p.ln_beta_mms -
                        std::log(p.ms + 1.0) - (p.ms + 1.0) * std::log(gamma0) +
                        std::log(h);
    return std::exp(ln_v);
}

// Draws SNR values as scale * U/V with exact (rejection-based) gamma
// variates. Deterministic for a fixed seed; concurrent use requires
// distinct seeds per stream.
class SnrSampler {
public:
    SnrSampler(const FadingParams& p, std::uint64_t seed)
        : rng_(seed), num_(p.m, 1.0), den_(p.ms, 1.0), scale_(p.scale) {}

    double operator()() {
        const double u = num_(rng_);
        const double v = den_(rng_);
        return scale_ * u / v;
    }

private:
    std::mt19937_64 rng_;
    std::gamma_distribution<double> num_;
    std::gamma_distribution<double> den_;
    double scale_;
};

inline std::vector<double> sample(const FadingParams& p, std::uint64_t seed,
                                  std::size_t n) {
    if (n == 0) throw domain_error("sample", "requires n >= 1");
    SnrSampler gen(p, seed);
    std::vector<double> out(n);
    for (auto& x : out) x = gen();
    return out;
}

}  // namespace fcap
