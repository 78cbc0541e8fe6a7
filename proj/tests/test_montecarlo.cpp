#include "varstop/montecarlo.hpp"
#include "varstop/errors.hpp"
#include "varstop/solver.hpp"

#include "test_specs.hpp"

#include <doctest.h>

#include <cmath>

using namespace varstop;

TEST_CASE("sample_rule: immediate rule has exactly zero variance") {
    const auto tie = tie_diffusion();
    const auto est =
        sample_rule(tie, 1.0, StoppingRule::immediate(), {42, 10000, 2});
    CHECK(est.mean == doctest::Approx(1.0));
    CHECK(est.variance == 0.0);
    CHECK(est.absorbed_fraction == 0.0);
}

TEST_CASE("sample_rule: reproducible across worker counts") {
    const auto tie = tie_diffusion();
    const auto rule = StoppingRule::mix(
        0.7375, StoppingRule::exit_interval(0.0, 2.0),
        StoppingRule::exit_interval(0.0, 12.0));
    const auto a = sample_rule(tie, 1.0, rule, {123, 200000, 1});
    const auto b = sample_rule(tie, 1.0, rule, {123, 200000, 4});
    const auto c = sample_rule(tie, 1.0, rule, {123, 200000, 16});
    CHECK(a.mean == b.mean);
    CHECK(b.mean == c.mean);
    CHECK(a.variance == b.variance);
    CHECK(b.variance == c.variance);
    CHECK(a.std_error_of_variance == c.std_error_of_variance);
    CHECK(a.absorbed_fraction == c.absorbed_fraction);
    // different seeds give different draws
    const auto d = sample_rule(tie, 1.0, rule, {124, 200000, 4});
    CHECK(d.variance != a.variance);
}

TEST_CASE("sample_rule: worked mixture within three standard errors") {
    const auto tie = tie_diffusion();
    const auto sol = solve(tie, 1.0);
    REQUIRE(sol.rule.kind == StoppingRule::Kind::BernoulliMix);
    const auto est = sample_rule(tie, 1.0, sol.rule, {2024, 1000000, 8});
    CHECK(std::abs(est.variance - 1.0625) <=
          3.0 * est.std_error_of_variance);
    // exit mass at the lower boundary shows up as absorption
    CHECK(est.absorbed_fraction > 0.5);
    CHECK(std::abs(est.mean - 0.75) <= 0.01);
}

TEST_CASE("sample_rule: gbm pure rule within three standard errors") {
    const auto g = gbm(-1.0, 1.0);
    const auto sol = solve(g, 1.0);
    const auto est = sample_rule(g, 1.0, sol.rule, {7, 1000000, 8});
    CHECK(std::abs(est.variance - sol.value) <=
          3.0 * est.std_error_of_variance);
}

TEST_CASE("sample_rule: law of total variance for mixtures") {
    const auto tie = tie_diffusion();
    const double x = 1.4;
    const auto r1 = StoppingRule::exit_interval(0.5, 3.0);
    const auto r2 = StoppingRule::exit_interval(0.0, 9.0);
    const auto mix = StoppingRule::mix(0.3, r1, r2);
    const double analytic = rule_variance(tie, x, mix);
    const auto est = sample_rule(tie, x, mix, {5150, 1000000, 8});
    CHECK(std::abs(est.variance - analytic) <=
          3.0 * est.std_error_of_variance);
}

TEST_CASE("sample_rule: recurrent epsilon family keeps most of the span") {
    const auto nat = natural_scale(0.0, 1.0);
    const auto sol = solve(nat, 0.5);
    REQUIRE(sol.rule.epsilon_builder);
    const auto fam = sol.rule.epsilon_builder(0.01);
    const auto est = sample_rule(nat, 0.5, fam, {99, 1000000, 8});
    CHECK(est.variance >= 0.25 - 0.01 - 3.0 * est.std_error_of_variance);
}

TEST_CASE("sample_rule: bare epsilon families are refused") {
    const auto g = gbm(-0.5, 1.0);
    const auto sol = solve(g, 1.0);
    CHECK_THROWS_AS(sample_rule(g, 1.0, sol.rule, {1, 100, 1}),
                    UnsupportedRule);
}

TEST_CASE("sample_rule: whole interval on a recurrent spec is unsampleable") {
    const auto spec = testspec::logit_recurrent();
    const auto rule = StoppingRule::whole_interval(0.0, 1.0);
    CHECK_THROWS_AS(sample_rule(spec, 0.5, rule, {1, 100, 1}), Unbounded);
}

TEST_CASE("sde_paths: gbm exit probabilities match the scale ratio") {
    const auto g = gbm(-1.0, 1.0);
    const auto res = sde_paths(g, 1.0, 0.5, 2.0, 2e-3, {31337, 20000, 8});
    const auto [plo, pup] = hit_prob(g, 1.0, 0.5, 2.0);
    CHECK(res.censored_fraction == 0.0);
    CHECK(std::abs(res.p_upper - pup) <= 1.6 * res.ci_upper); // ~3 std errors
    CHECK(std::abs(res.p_lower - plo) <= 1.6 * res.ci_lower);
}

TEST_CASE("sde_paths: jacobi exit probabilities match the quadrature scale") {
    const auto spec = jacobi(0.02, 0.038, 0.26);
    const auto res = sde_paths(spec, 0.5, 0.2, 0.8, 5e-3, {777, 8000, 8});
    const auto [plo, pup] = hit_prob(spec, 0.5, 0.2, 0.8);
    CHECK(res.censored_fraction == 0.0);
    CHECK(std::abs(res.p_upper - pup) <= 1.6 * res.ci_upper);
    CHECK(std::abs(res.p_lower - plo) <= 1.6 * res.ci_lower);
}

TEST_CASE("sde_paths: requires drift and vol") {
    const auto nat = natural_scale(0.0, 1.0);
    CHECK_THROWS_AS(sde_paths(nat, 0.5, 0.2, 0.8, 1e-3, {1, 100, 1}),
                    DomainError);
}
