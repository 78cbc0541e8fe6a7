#include "varstop/diffusion.hpp"
#include "varstop/errors.hpp"

#include "test_specs.hpp"

#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <random>

using namespace varstop;

namespace {
const double kCbrt4 = std::cbrt(4.0);
}

TEST_CASE("hit_prob: natural scale is symmetric") {
    const auto spec = natural_scale(0.0, 1.0);
    const auto [plo, pup] = hit_prob(spec, 0.5, 0.0, 1.0);
    CHECK(plo == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pup == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(hit_prob(spec, 0.5, 0.6, 1.0), DomainError);
}

TEST_CASE("hit_prob: tie scale and gbm closed forms") {
    const auto tie = tie_diffusion();
    // S(0.75) = 0.1875, S(2) = 0.5
    const auto [plo, pup] = hit_prob(tie, 0.75, 0.0, 2.0);
    CHECK(pup == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(plo + pup == doctest::Approx(1.0).epsilon(1e-14));

    const auto g = gbm(-1.0, 1.0); // S(z) = z^3/3
    const auto [plo2, pup2] = hit_prob(g, 1.0, 0.0, kCbrt4);
    CHECK(pup2 == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("exit_mean: worked values") {
    const auto tie = tie_diffusion();
    CHECK(exit_mean(tie, 2.0, 0.0, 12.0) ==
          doctest::Approx(6.0 / 63.0).epsilon(1e-12)); // ~ 0.0952
    CHECK(exit_mean(tie, 2.0, 2.0, 12.0) == doctest::Approx(2.0)); // degenerate
    const auto nat = natural_scale(0.0, 1.0);
    CHECK(exit_mean(nat, 0.5, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("exit_variance: worked values and range") {
    const auto nat = natural_scale(0.0, 1.0);
    CHECK(exit_variance(nat, 0.5, 0.0, 1.0) ==
          doctest::Approx(0.25).epsilon(1e-14));
    const auto g = gbm(-1.0, 1.0);
    CHECK(exit_variance(g, 1.0, 0.0, kCbrt4) ==
          doctest::Approx(std::pow(4.0, 2.0 / 3.0) * 0.25 * 0.75)
              .epsilon(1e-12));
    const auto tie = tie_diffusion();
    CHECK(exit_variance(tie, 0.75, 0.0, 2.0) ==
          doctest::Approx(4.0 * 0.375 * 0.625).epsilon(1e-12)); // 0.9375
    // p(1-p) <= 1/4 bound
    for (double b : {1.5, 2.5, 4.0, 9.0}) {
        const double v = exit_variance(tie, 1.0, 0.25, b);
        CHECK(v <= 0.25 * (b - 0.25) * (b - 0.25) * (1.0 + 1e-12));
    }
}

TEST_CASE("hit probabilities sum to one on compact subintervals") {
    std::mt19937_64 rng(7);
    const auto specs = {gbm(-1.0, 1.0), tie_diffusion(),
                        natural_scale(0.0, 1.0)};
    for (const auto& spec : specs) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 200; ++i) {
            const double hi = std::isinf(spec.interval.beta)
                                  ? 20.0
                                  : spec.interval.beta;
            double a = spec.interval.alpha +
                       (hi - spec.interval.alpha) * 0.499 * u(rng) + 1e-6;
            double b = hi - (hi - spec.interval.alpha) * 0.499 * u(rng) - 1e-6;
            if (!(a < b)) continue;
            const double x = a + (b - a) * (0.1 + 0.8 * u(rng));
            const auto [plo, pup] = hit_prob(spec, x, a, b);
            CHECK(plo >= 0.0);
            CHECK(pup >= 0.0);
            CHECK(plo + pup == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(exit_variance(spec, x, a, b) ==
                  doctest::Approx((b - a) * (b - a) * pup * (1.0 - pup))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("classify: gbm regimes across the drift range") {
    CHECK(classify(gbm(-1.0, 1.0), 1.0).tag == Regime::CaseI);
    CHECK(classify(gbm(1.0, 1.0), 1.0).tag == Regime::InfiniteValue);
    CHECK(classify(gbm(0.5, 1.0), 1.0).tag == Regime::InfiniteValue); // log
    CHECK(classify(gbm(-0.25, 1.0), 1.0).tag == Regime::InfiniteValue);
    CHECK(classify(gbm(-0.5, 1.0), 1.0).tag == Regime::SpecialTransientI);

    const auto cls = classify(gbm(-1.0, 1.0), 1.0);
    CHECK(cls.attractive_lower);
    CHECK_FALSE(cls.attractive_upper);
    CHECK(cls.limit_upper == doctest::Approx(0.0));
}

TEST_CASE("classify: bounded and mirrored regimes") {
    CHECK(classify(natural_scale(0.0, 1.0), 0.5).tag == Regime::CaseIII);
    CHECK(classify(natural_scale(
                       -std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity()),
                   0.0)
              .tag == Regime::InfiniteValue);
    CHECK(classify(testspec::logit_recurrent(), 0.5).tag ==
          Regime::RecurrentBounded);
    CHECK(classify(testspec::mirrored_gbm_case2(), -1.0).tag == Regime::CaseII);
    CHECK(classify(testspec::mirrored_marginal_case2(), -1.0).tag ==
          Regime::SpecialTransientII);
    CHECK(classify(testspec::marginal_refused_diffusion(), 1.0).tag ==
          Regime::SpecialTransientI);
}

TEST_CASE("classify: jacobi worked example is Case III") {
    const auto spec = jacobi(0.02, 0.038, 0.26);
    const auto cls = classify(spec, 0.5);
    CHECK(cls.tag == Regime::CaseIII);
    CHECK(cls.attractive_lower);
    CHECK(cls.attractive_upper);
}

TEST_CASE("classify by extrapolation when no limits are declared") {
    // cubic scale with no declared endpoint data: Case I must be recovered
    StateInterval iv{0.0, std::numeric_limits<double>::infinity(),
                     BoundaryKind::Natural, BoundaryKind::Natural};
    DiffusionSpec spec{iv,
                       ScaleModel::make(
                           iv, [](double x) { return x * x * x / 3.0; },
                           nullptr, ScaleKind::ClosedForm, {}, {}),
                       std::nullopt, std::nullopt, std::nullopt};
    const auto cls = classify(spec, 1.0);
    CHECK(cls.tag == Regime::CaseI);
    CHECK(cls.used_extrapolated_limits);

    // reciprocal scale: attractive unbounded endpoint, infinite value
    DiffusionSpec spec2{iv,
                        ScaleModel::make(
                            iv, [](double x) { return -1.0 / x; }, nullptr,
                            ScaleKind::ClosedForm, {}, {}),
                        std::nullopt, std::nullopt, std::nullopt};
    CHECK(classify(spec2, 1.0).tag == Regime::InfiniteValue);

    // quadratic scale: the marginal growth limit is found
    DiffusionSpec spec3{iv,
                        ScaleModel::make(
                            iv, [](double x) { return 0.5 * x * x; }, nullptr,
                            ScaleKind::ClosedForm, {}, {}),
                        std::nullopt, std::nullopt, std::nullopt};
    CHECK(classify(spec3, 1.0).tag == Regime::SpecialTransientI);
}

TEST_CASE("non-monotone scales are rejected") {
    StateInterval iv{0.0, 1.0, BoundaryKind::Natural, BoundaryKind::Natural};
    CHECK_THROWS_AS(ScaleModel::make(
                        iv, [](double x) { return x * (1.0 - x); }, nullptr,
                        ScaleKind::ClosedForm, {}, {}),
                    NonMonotoneScale);
}

TEST_CASE("scale-multiplication invariance") {
    const auto base = gbm(-1.0, 1.0);
    for (double lambda : {1e-3, 1e3}) {
        const auto scaled = testspec::scaled_copy(base, lambda);
        CHECK(classify(scaled, 1.0).tag == Regime::CaseI);
        const auto [plo, pup] = hit_prob(base, 1.0, 0.5, 3.0);
        const auto [qlo, qup] = hit_prob(scaled, 1.0, 0.5, 3.0);
        CHECK(qlo == doctest::Approx(plo).epsilon(1e-12));
        CHECK(qup == doctest::Approx(pup).epsilon(1e-12));
        CHECK(exit_mean(scaled, 1.0, 0.5, 3.0) ==
              doctest::Approx(exit_mean(base, 1.0, 0.5, 3.0)).epsilon(1e-12));
        CHECK(exit_variance(scaled, 1.0, 0.5, 3.0) ==
              doctest::Approx(exit_variance(base, 1.0, 0.5, 3.0))
                  .epsilon(1e-12));
    }
}

TEST_CASE("translate_to_zero: shift and round trip") {
    // interval (2,5) with an arbitrary increasing scale
    StateInterval iv{2.0, 5.0, BoundaryKind::Natural, BoundaryKind::Natural};
    DiffusionSpec spec{iv,
                       ScaleModel::make(
                           iv, [](double x) { return std::sqrt(x - 2.0); },
                           nullptr, ScaleKind::ClosedForm, {}, {}),
                       std::nullopt, std::nullopt, std::nullopt};
    const auto [shifted, back] = translate_to_zero(spec);
    CHECK(shifted.interval.alpha == 0.0);
    CHECK(shifted.interval.beta == doctest::Approx(3.0));
    CHECK(shifted.scale(1.0) == doctest::Approx(spec.scale(3.0)).epsilon(1e-12));
    CHECK(back.apply(1.0) == doctest::Approx(3.0));
    CHECK(back.invert(3.0) == doctest::Approx(1.0));

    // translation equivariance of exit quantities
    const double m_direct = exit_mean(spec, 3.5, 2.5, 4.5);
    const double m_shift = exit_mean(shifted, 1.5, 0.5, 2.5) + 2.0;
    CHECK(m_shift == doctest::Approx(m_direct).epsilon(1e-9));
    CHECK(exit_variance(shifted, 1.5, 0.5, 2.5) ==
          doctest::Approx(exit_variance(spec, 3.5, 2.5, 4.5)).epsilon(1e-9));

    // alpha already zero: identity
    const auto nat = natural_scale(0.0, 1.0);
    const auto [same, id] = translate_to_zero(nat);
    CHECK(id.shift == 0.0);
    CHECK(same.scale(0.5) == doctest::Approx(0.5));
}

TEST_CASE("reflect: mirrored scale vanishes at its lower boundary") {
    const auto nat = natural_scale(0.0, 1.0);
    const auto [mirror, back] = reflect(nat);
    CHECK(mirror.interval.alpha == 0.0);
    CHECK(mirror.interval.beta == doctest::Approx(1.0));
    // natural scale is reflection-symmetric
    for (double z : {0.1, 0.4, 0.9})
        CHECK(mirror.scale(z) == doctest::Approx(z).epsilon(1e-12));
    CHECK(back.apply(0.25) == doctest::Approx(0.75));

    const auto c2 = testspec::mirrored_gbm_case2();
    const auto [refl, back2] = reflect(c2);
    CHECK(refl.scale.s_lower() == 0.0);
    CHECK(std::isinf(refl.scale.s_upper()));
    // reflecting a Case II spec yields Case I
    CHECK(classify(refl, 1.0).tag == Regime::CaseI);
    // reflect twice then pull back: exit quantities agree with direct ones
    const double v_orig = exit_variance(c2, -1.0, -3.0, -0.5);
    const double v_refl = exit_variance(refl, 1.0, 0.5, 3.0);
    CHECK(v_refl == doctest::Approx(v_orig).epsilon(1e-10));
}

TEST_CASE("scale_inverse inverts the scale") {
    const auto g = gbm(-1.0, 1.0);
    for (double x : {0.3, 1.0, 2.7, 11.0}) {
        CHECK(scale_inverse(g, g.scale(x)) ==
              doctest::Approx(x).epsilon(1e-10));
    }
    const auto tie = tie_diffusion();
    CHECK(scale_inverse(tie, 0.1875) == doctest::Approx(0.75).epsilon(1e-10));
    // root of the third-branch quadratic x^2 - 1.89375 x - 3.15 = 0
    const double xbar =
        0.5 * (1.89375 + std::sqrt(1.89375 * 1.89375 + 4.0 * 3.15));
    CHECK(scale_inverse(tie, 3.9375) == doctest::Approx(xbar).epsilon(1e-9));
}

TEST_CASE("jacobi scale matches the incomplete beta oracle") {
    const double a = 0.02, b = 0.038, sigma = 0.26;
    const auto spec = jacobi(a, b, sigma);
    const double s2 = sigma * sigma;
    const double p = 1.0 - 2.0 * a / s2;
    const double q = 1.0 - 2.0 * (b - a) / s2;
    for (double x : {0.05, 0.2, 0.43, 0.7, 0.95}) {
        const double oracle = boost::math::beta(p, q, x); // non-normalized
        CHECK(spec.scale(x) == doctest::Approx(oracle).epsilon(1e-9));
    }
    CHECK(spec.scale.s_upper() ==
          doctest::Approx(boost::math::beta(p, q, 1.0)).epsilon(1e-9));
}

TEST_CASE("finite-difference derivative stands in for S'") {
    // same scale with and without a closed-form derivative
    StateInterval iv{0.0, std::numeric_limits<double>::infinity(),
                     BoundaryKind::Natural, BoundaryKind::Natural};
    ScaleLimits lim;
    lim.s_lower = 0.0;
    lim.s_upper = std::numeric_limits<double>::infinity();
    lim.upper_growth = 0.0;
    const auto fd = ScaleModel::make(
        iv, [](double x) { return x * x * x / 3.0; }, nullptr,
        ScaleKind::ClosedForm, {}, lim);
    for (double x : {0.2, 1.0, 7.0}) {
        CHECK(fd.deriv(iv, x) == doctest::Approx(x * x).epsilon(1e-7));
    }
    // one-sided at a breakpoint of the tie scale
    const auto tie = tie_diffusion();
    const double d = tie.scale.deriv(tie.interval, 2.0);
    CHECK(std::isfinite(d));
}

TEST_CASE("continuity probes: exit quantities obey a grid modulus") {
    // regression-style sanity: the largest adjacent-grid jump of
    // E_x[X_exit] and Var_x[X_exit] shrinks roughly linearly with spacing
    const auto tie = tie_diffusion();
    const double x = 1.7;
    auto max_jump = [&](int n) {
        double worst_mean = 0.0, worst_var = 0.0;
        double pm = 0.0, pv = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double b = 2.0 + 10.5 * i / n; // crosses the breakpoints
            const double mean = exit_mean(tie, x, 0.5, b);
            const double var = exit_variance(tie, x, 0.5, b);
            if (i > 0) {
                worst_mean = std::max(worst_mean, std::abs(mean - pm));
                worst_var = std::max(worst_var, std::abs(var - pv));
            }
            pm = mean;
            pv = var;
        }
        return std::make_pair(worst_mean, worst_var);
    };
    const auto coarse = max_jump(400);
    const auto fine = max_jump(1600);
    CHECK(fine.first < 0.5 * coarse.first);
    CHECK(fine.second < 0.5 * coarse.second);
}
