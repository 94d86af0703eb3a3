#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <fcap/fading_model.hpp>
#include <fcap/quadrature.hpp>
#include <fcap/special_functions.hpp>

#include "golden_values.hpp"

using namespace fcap;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kM = 2.5;
constexpr double kMs = 1.5;
}  // namespace

TEST_CASE("opra instance against reference values") {
    CHECK_THAT(meijer_g_opra(10.0, kM, kMs, ContourSpec::opra_default(kMs)),
               WithinRel(golden::meijer_opra_z10, 1e-10));
    CHECK_THAT(meijer_g_opra(100.0, kM, kMs, ContourSpec::opra_tuned(100.0, kMs)),
               WithinRel(golden::meijer_opra_z100, 1e-10));
}

TEST_CASE("opra instance against the defining integral") {
    // with gb = 10 and gamma0 = scale/z the OPRA rate integral must equal
    // z^ms G(z) / (Gamma(m) Gamma(ms))
    const FadingParams p(kM, kMs, 10.0);
    const double z = 10.0;
    const double gamma0 = p.scale / z;
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    opt.max_nodes = 400000;
    const double oracle =
        integrate_upper_tail([&](double x) { return std::log(x / gamma0) * pdf(p, x); },
                             gamma0, p.scale, opt)
            .value;
    const double g = meijer_g_opra(z, kM, kMs, ContourSpec::opra_default(kMs));
    const double closed =
        std::pow(z, kMs) * g / std::exp(ln_gamma(kM) + ln_gamma(kMs));
    CHECK_THAT(closed, WithinRel(oracle, 1e-8));
}

TEST_CASE("opra instance high-order expansion") {
    // z^ms G(z) -> Gamma(m)Gamma(ms) [ln z + psi(m) - psi(ms)], error
    // strictly decreasing along z = 1e3, 1e4, 1e5
    const double gg = std::exp(ln_gamma(kM) + ln_gamma(kMs));
    double prev = std::numeric_limits<double>::infinity();
    for (double z : {1e3, 1e4, 1e5}) {
        const double g = meijer_g_opra(z, kM, kMs, ContourSpec::opra_tuned(z, kMs));
        const double lead = gg * (std::log(z) + digamma(kM) - digamma(kMs));
        const double err = std::fabs(std::pow(z, kMs) * g - lead);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("opra imaginary residual and self consistency") {
    MeijerDiagnostics diag;
    ContourSpec spec = ContourSpec::opra_default(kMs);
    const double v = meijer_g_opra(37.0, kM, kMs, spec, &diag);
    CHECK(diag.im_residual < spec.tolerance * std::fabs(v));

    // doubling the truncation and refining the rule must not move the result
    ContourSpec finer = spec;
    finer.truncation *= 2.0;
    finer.tolerance *= 0.1;
    finer.max_nodes *= 4;
    const double v2 = meijer_g_opra(37.0, kM, kMs, finer, &diag);
    CHECK_THAT(v2, WithinRel(v, spec.tolerance));
}

TEST_CASE("opra contour validation") {
    CHECK_THROWS_AS(meijer_g_opra(10.0, kM, kMs, ContourSpec{0.5, 14.0}), contour_error);
    CHECK_THROWS_AS(meijer_g_opra(10.0, kM, kMs, ContourSpec{-kMs, 14.0}), contour_error);
    CHECK_THROWS_AS(meijer_g_opra(10.0, kM, kMs, ContourSpec{-kMs + 1e-13, 14.0}),
                    contour_error);
    CHECK_THROWS_AS(meijer_g_opra(-1.0, kM, kMs, ContourSpec::opra_default(kMs)),
                    domain_error);
}

TEST_CASE("ora instance against reference values") {
    CHECK_THAT(meijer_g_ora(6.0, kM, kMs, ContourSpec::ora_default(kMs)),
               WithinRel(golden::meijer_ora_z6, 1e-10));
}

TEST_CASE("ora instance against the defining integral") {
    const FadingParams p(kM, kMs, 10.0);
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    opt.max_nodes = 400000;
    const double oracle =
        integrate_upper_tail([&](double x) { return std::log1p(x) * pdf(p, x); }, 0.0,
                             p.scale, opt)
            .value;
    const double w = meijer_g_ora(p.scale, kM, kMs, ContourSpec::ora_default(kMs));
    CHECK_THAT(w / std::exp(ln_gamma(kM) + ln_gamma(kMs)), WithinRel(oracle, 1e-8));
}

TEST_CASE("ora instance large argument limit") {
    const double gg = std::exp(ln_gamma(kM) + ln_gamma(kMs));
    double prev = std::numeric_limits<double>::infinity();
    for (double z : {1e3, 1e5}) {
        const double w = meijer_g_ora(z, kM, kMs, ContourSpec::ora_tuned(z, kMs));
        const double err =
            std::fabs(w / gg - (std::log(z) + digamma(kM) - digamma(kMs)));
        CHECK(err < prev);
        prev = err;
    }
    MeijerDiagnostics diag;
    ContourSpec spec = ContourSpec::ora_default(kMs);
    const double v = meijer_g_ora(11.0, kM, kMs, spec, &diag);
    CHECK(diag.im_residual < spec.tolerance * std::fabs(v));
}

TEST_CASE("ora self consistency") {
    ContourSpec spec = ContourSpec::ora_default(kMs);
    const double v = meijer_g_ora(17.0, kM, kMs, spec);
    ContourSpec finer = spec;
    finer.truncation *= 2.0;
    finer.tolerance *= 0.1;
    finer.max_nodes *= 4;
    CHECK_THAT(meijer_g_ora(17.0, kM, kMs, finer), WithinRel(v, spec.tolerance));
}

TEST_CASE("ora contour validation") {
    CHECK_THROWS_AS(meijer_g_ora(6.0, kM, kMs, ContourSpec{-0.2, 7.0}), contour_error);
    CHECK_THROWS_AS(meijer_g_ora(6.0, kM, kMs, ContourSpec{1.2, 7.0}), contour_error);
    CHECK_THROWS_AS(meijer_g_ora(6.0, kM, 0.8, ContourSpec{0.8 - 1e-13, 7.0}),
                    contour_error);
}
