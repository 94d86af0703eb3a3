#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <vector>

#include "capacity.hpp"
#include "errors.hpp"
#include "fading_model.hpp"

namespace fcap {

// Monte Carlo estimator of the ergodic capacity under each scheme,
// used as an independent statistical check on the closed forms.
//
// OPRA and ORA average a per-sample rate. CI and TCI are deterministic
// functionals of the distribution, so the estimator targets the tail
// inverse moment and the CCDF and maps them through ln(1 + 1/x); the
// standard error follows by the delta method.
//
// Sampling is streamed in one pass (no sample storage) and may be split
// across shards with derived seeds; results are bit-identical for a fixed
// (seed, shard count) pair.

struct McEstimate {
    double mean = 0.0;       // nats
    double std_error = 0.0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    unsigned shards = 1;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t shard_seed(std::uint64_t seed, unsigned shard) {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (shard + 1));
}

// Streaming bivariate moments (Welford / Chan merge).
struct BiMoments {
    std::uint64_t n = 0;
    double mean_a = 0.0, mean_b = 0.0;
    double m2_a = 0.0, m2_b = 0.0, c2 = 0.0;

    void add(double a, double b) {
        ++n;
        const double da = a - mean_a;
        const double db = b - mean_b;
        mean_a += da / n;
        mean_b += db / n;
        m2_a += da * (a - mean_a);
        m2_b += db * (b - mean_b);
        c2 += da * (b - mean_b);
    }

    void merge(const BiMoments& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double da = o.mean_a - mean_a;
        const double db = o.mean_b - mean_b;
        const double nn = static_cast<double>(n) + static_cast<double>(o.n);
        m2_a += o.m2_a + da * da * n * o.n / nn;
        m2_b += o.m2_b + db * db * n * o.n / nn;
        c2 += o.c2 + da * db * n * o.n / nn;
        mean_a += da * o.n / nn;
        mean_b += db * o.n / nn;
        n += o.n;
    }

    double var_a() const { return n > 1 ? m2_a / (n - 1) : 0.0; }
    double var_b() const { return n > 1 ? m2_b / (n - 1) : 0.0; }
    double cov() const { return n > 1 ? c2 / (n - 1) : 0.0; }
};

template <class Accumulate>
BiMoments run_shards(const FadingParams& p, std::uint64_t n, std::uint64_t seed,
                     unsigned shards, Accumulate accumulate) {
    if (shards == 0) throw domain_error("mc_ec", "requires shards >= 1");
    std::vector<std::future<BiMoments>> jobs;
    jobs.reserve(shards);
    const std::uint64_t base = n / shards;
    const std::uint64_t rem = n % shards;
    for (unsigned s = 0; s < shards; ++s) {
        const std::uint64_t count = base + (s < rem ? 1 : 0);
        jobs.push_back(std::async(std::launch::async, [&, s, count]() {
            BiMoments acc;
            SnrSampler gen(p, shard_seed(seed, s));
            for (std::uint64_t i = 0; i < count; ++i) accumulate(acc, gen());
            return acc;
        }));
    }
    BiMoments total;
    for (auto& j : jobs) total.merge(j.get());  // fixed merge order
    return total;
}

}  // namespace detail

inline McEstimate mc_ec(const FadingParams& p, const Scheme& scheme, std::uint64_t n,
                        std::uint64_t seed, unsigned shards = 1) {
    constexpr const char* op = "mc_ec";
    if (n == 0) throw domain_error(op, "requires n >= 1");
    McEstimate est;
    est.n = n;
    est.seed = seed;
    est.shards = shards;

    switch (scheme.kind) {
        case SchemeKind::ora: {
            auto acc = detail::run_shards(p, n, seed, shards,
                                          [](detail::BiMoments& a, double g) {
                                              a.add(std::log1p(g), 0.0);
                                          });
            est.mean = acc.mean_a;
            est.std_error = std::sqrt(acc.var_a() / n);
            return est;
        }
        case SchemeKind::opra: {
            const double g0 = solve_opra_cutoff(p).gamma0;
            auto acc = detail::run_shards(
                p, n, seed, shards, [g0](detail::BiMoments& a, double g) {
                    a.add(g >= g0 ? std::log(g / g0) : 0.0, 0.0);
                });
            est.mean = acc.mean_a;
            est.std_error = std::sqrt(acc.var_a() / n);
            return est;
        }
        case SchemeKind::ci: {
            if (!(p.m > 1.0))
                throw divergence_error(op, "CI sample inverse moment diverges for m <= 1");
            auto acc = detail::run_shards(p, n, seed, shards,
                                          [](detail::BiMoments& a, double g) {
                                              a.add(1.0 / g, 0.0);
                                          });
            const double im = acc.mean_a;
            est.mean = std::log1p(1.0 / im);
            // d/dx ln(1 + 1/x) = -1/(x(1+x))
            est.std_error = std::sqrt(acc.var_a() / n) / (im * (1.0 + im));
            return est;
        }
        case SchemeKind::tci: {
            if (!scheme.gamma0) throw domain_error(op, "TCI requires gamma0");
            const double g0 = *scheme.gamma0;
            auto acc = detail::run_shards(
                p, n, seed, shards, [g0](detail::BiMoments& a, double g) {
                    const bool on = g >= g0;
                    a.add(on ? 1.0 / g : 0.0, on ? 1.0 : 0.0);
                });
            const double im = acc.mean_a;   // tail inverse moment
            const double fbar = acc.mean_b; // CCDF at gamma0
            est.mean = std::log1p(1.0 / im) * fbar;
            const double d_im = -fbar / (im * (1.0 + im));
            const double d_fbar = std::log1p(1.0 / im);
            const double var = d_im * d_im * acc.var_a() + d_fbar * d_fbar * acc.var_b() +
                               2.0 * d_im * d_fbar * acc.cov();
            est.std_error = std::sqrt(std::max(var, 0.0) / n);
            return est;
        }
    }
    throw domain_error(op, "unknown scheme");
}

}  // namespace fcap
