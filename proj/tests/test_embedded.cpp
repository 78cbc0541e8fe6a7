#include "varstop/embedded.hpp"
#include "varstop/errors.hpp"

#include "test_specs.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace varstop;

namespace {

struct Fixture {
    DiffusionSpec tie = tie_diffusion();
    EmbeddedGrid tie_grid = build_embedded_grid(tie);
    DiffusionSpec g = gbm(-1.0, 1.0);
    EmbeddedGrid g_grid = build_embedded_grid(g);
};

Fixture& fx() {
    static Fixture f;
    return f;
}

} // namespace

TEST_CASE("ratio: closed-form checks") {
    CHECK(ratio(fx().g, 4.0, 1.0) == doctest::Approx(3.0 / 8.0).epsilon(1e-12));
    CHECK(std::abs(ratio(fx().g, 2.0, 1.0)) < 1e-12);
    CHECK(ratio(fx().tie, 2.0, 0.75) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ratio(fx().tie, 12.0, 0.75) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(ratio(fx().g, -1.0, 0.5), DomainError);
}

TEST_CASE("maximizer_set: unique, tied and endpoint maximizers") {
    // tie scale: z_c = 2 below the tie center, both {2,12} at it
    {
        const auto sol = maximizer_set(fx().tie, fx().tie_grid, 0.5);
        REQUIRE(sol.maximizers.size() == 1);
        CHECK(sol.maximizers[0] == doctest::Approx(2.0).epsilon(1e-9));
    }
    {
        const auto sol = maximizer_set(fx().tie, fx().tie_grid, 0.75);
        REQUIRE(sol.maximizers.size() == 2);
        CHECK(sol.maximizers[0] == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(sol.maximizers[1] == doctest::Approx(12.0).epsilon(1e-9));
        CHECK(sol.ratio_value == doctest::Approx(2.0).epsilon(1e-10));
    }
    // gbm: z_c = 4c (stationarity of the cubic-scale ratio)
    for (double c : {0.3, 1.0, 2.5}) {
        const auto sol = maximizer_set(fx().g, fx().g_grid, c);
        REQUIRE(sol.maximizers.size() == 1);
        CHECK(sol.maximizers[0] == doctest::Approx(4.0 * c).epsilon(1e-7));
    }
    // natural scale on (0,1): ratio z-2c increases to the endpoint
    const auto nat = natural_scale(0.0, 1.0);
    const auto nat_grid = build_embedded_grid(nat);
    const auto sol = maximizer_set(nat, nat_grid, 0.3);
    CHECK(sol.maximizers.back() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("maximizer_set agrees with a brute-force grid oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uc(0.05, 2.0);
    for (int it = 0; it < 20; ++it) {
        const double c = uc(rng);
        const auto sol = maximizer_set(fx().g, fx().g_grid, c);
        // oracle: dense scan
        double best = -1e300, bz = 0;
        for (int i = 1; i <= 200000; ++i) {
            const double z = 1e-3 + (40.0 * c) * i / 200000.0;
            const double r = ratio(fx().g, z, c);
            if (r > best) {
                best = r;
                bz = z;
            }
        }
        CHECK(sol.maximizers.back() == doctest::Approx(bz).epsilon(1e-3));
        CHECK(sol.ratio_value == doctest::Approx(best).epsilon(1e-6));
    }
}

TEST_CASE("embedded_value: worked values") {
    CHECK(embedded_value(fx().g, fx().g_grid, 1.0, 1.0) ==
          doctest::Approx(1.125).epsilon(1e-10));
    CHECK(embedded_value(fx().tie, fx().tie_grid, 1.0, 0.75) ==
          doctest::Approx(1.0625).epsilon(1e-10));
    CHECK(embedded_value(fx().tie, fx().tie_grid, 0.5, 0.75) ==
          doctest::Approx(0.8125).epsilon(1e-10));
    // x above the greatest maximizer must be refused
    CHECK_THROWS_AS(embedded_value(fx().g, fx().g_grid, 5.0, 1.0),
                    StartAboveMaximizer);
}

TEST_CASE("embedded value dominates one-sided exits and the payoff") {
    // V^c(x) >= ratio(z,c) S(x) + c^2 for every threshold, and >= (x-c)^2
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uc(0.1, 1.5);
    std::uniform_real_distribution<double> ux(0.05, 1.8);
    for (int it = 0; it < 25; ++it) {
        const double c = uc(rng);
        const double x = ux(rng);
        const auto sol = maximizer_set(fx().tie, fx().tie_grid, c);
        if (x > sol.maximizers.back()) continue;
        const double v = embedded_value(fx().tie, sol, x);
        CHECK(v >= (x - c) * (x - c) - 1e-10);
        for (int j = 1; j <= 50; ++j) {
            const double z = x + j * 0.3;
            const double lower =
                ratio(fx().tie, z, c) * fx().tie.scale(x) + c * c;
            CHECK(v >= lower - 1e-8 * std::max(1.0, std::abs(lower)));
        }
    }
}

TEST_CASE("stopping_set: tie scale gap is (2,12)") {
    const auto d = stopping_set(fx().tie, fx().tie_grid, 0.75, 2.5);
    CHECK(d.first == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(d.second == doctest::Approx(12.0).epsilon(1e-6));
    // starting below the lower maximizer, the gap is anchored at alpha
    const auto d2 = stopping_set(fx().tie, fx().tie_grid, 0.75, 1.2);
    CHECK(std::abs(d2.first) < 1e-9);
    CHECK(d2.second == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("stopping_set: gbm contact at the maximizer") {
    // c = 1: z_c = 4; beyond it the payoff is concave in natural scale, so
    // x = 5 already sits in the stopping set whose component starts at 4
    const auto d = stopping_set(fx().g, fx().g_grid, 1.0, 5.0);
    CHECK(d.first == doctest::Approx(4.0).epsilon(1e-4));
    CHECK(d.second >= 5.0);
    // interior continuation point 2c
    const auto d2 = stopping_set(fx().g, fx().g_grid, 1.0, 2.0);
    CHECK(d2.first < 2.0);
    CHECK(d2.second == doctest::Approx(4.0).epsilon(1e-4));
}

TEST_CASE("stopping_set matches a two-sided brute-force oracle") {
    // independent oracle: maximize E_x[(X_exit(a,b) - c)^2] over an (a,b)
    // grid and compare with the value of the returned interval
    const double c = 0.75, x = 2.5;
    const auto d = stopping_set(fx().tie, fx().tie_grid, c, x);
    auto value_of = [&](double a, double b) {
        const auto [plo, pup] = hit_prob(fx().tie, x, a, b);
        return plo * (a - c) * (a - c) + pup * (b - c) * (b - c);
    };
    double best = (x - c) * (x - c);
    for (int i = 0; i <= 250; ++i) {
        for (int j = 1; j <= 250; ++j) {
            const double a = x * i / 251.0;
            const double b = x + (20.0 - x) * j / 250.0;
            best = std::max(best, value_of(a, b));
        }
    }
    const double via_gap = value_of(d.first, d.second);
    CHECK(via_gap >= best - 1e-4 * best);
    // and the gap edges beat small perturbations
    CHECK(via_gap >= value_of(d.first + 0.05, d.second) - 1e-9);
    CHECK(via_gap >= value_of(d.first, d.second - 0.05) - 1e-9);
}

TEST_CASE("assumption2_holds: failing and holding ties") {
    const auto sol = maximizer_set(fx().tie, fx().tie_grid, 0.75);
    REQUIRE(sol.multiple());
    CHECK_FALSE(assumption2_holds(fx().tie, sol)); // 0.0952 < 0.75

    const auto hold = testspec::tie_holds_diffusion();
    const auto hold_grid = build_embedded_grid(hold);
    const auto scan = multi_maximizer_scan(hold, hold_grid, 1e-4, 4.0);
    REQUIRE(scan.ties.size() == 1);
    CHECK(scan.ties[0].c == doctest::Approx(0.75).epsilon(1e-7));
    CHECK(scan.ties[0].assumption2); // exit mean 0.769 > 0.75

    CHECK_THROWS_AS(assumption2_holds(
                        fx().g, maximizer_set(fx().g, fx().g_grid, 1.0)),
                    DomainError); // single maximizer
}

TEST_CASE("multi_maximizer_scan: tie detection") {
    const auto scan = multi_maximizer_scan(fx().tie, fx().tie_grid, 1e-5, 12.0);
    REQUIRE(scan.ties.size() == 1);
    CHECK(scan.ties[0].c == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(scan.ties[0].z_lo == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(scan.ties[0].z_hi == doctest::Approx(12.0).epsilon(1e-6));
    CHECK_FALSE(scan.ties[0].assumption2);

    // smooth maximizer curves produce no ties
    CHECK(multi_maximizer_scan(fx().g, fx().g_grid, 1e-4, 8.0).ties.empty());
    const auto nat = natural_scale(0.0, 1.0);
    const auto nat_grid = build_embedded_grid(nat);
    CHECK(multi_maximizer_scan(nat, nat_grid, 1e-4, 0.5).ties.empty());
}

TEST_CASE("marginal spec: scan flags the failing tie") {
    const auto spec = testspec::marginal_refused_diffusion();
    const auto grid = build_embedded_grid(spec);
    CHECK(grid.asymptote == doctest::Approx(1.0).epsilon(1e-6));
    const auto scan = multi_maximizer_scan(spec, grid, 1e-4, 12.0);
    bool found_failing = false;
    for (const auto& t : scan.ties) {
        if (!t.assumption2) found_failing = true;
    }
    CHECK(found_failing);
}

TEST_CASE("maximizer invariance under scale multiplication") {
    for (double lambda : {1e-3, 1e3}) {
        const auto scaled = testspec::scaled_copy(fx().tie, lambda);
        const auto grid = build_embedded_grid(scaled);
        const auto sol = maximizer_set(scaled, grid, 0.75);
        REQUIRE(sol.maximizers.size() == 2);
        CHECK(sol.maximizers[0] == doctest::Approx(2.0).epsilon(1e-8));
        CHECK(sol.maximizers[1] == doctest::Approx(12.0).epsilon(1e-8));
        CHECK(sol.ratio_value == doctest::Approx(2.0 / lambda).epsilon(1e-9));
    }
}

TEST_CASE("value function is concave in natural scale") {
    // chord slopes of V^c against s = S(y) must be non-increasing
    const double c = 0.75;
    const auto sol = maximizer_set(fx().tie, fx().tie_grid, c);
    const double z_top = sol.maximizers.back();
    std::vector<double> s, w;
    for (int i = 1; i <= 200; ++i) {
        const double y = z_top * i / 201.0;
        s.push_back(fx().tie.scale(y));
        w.push_back(embedded_value(fx().tie, sol, y));
    }
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const double left = (w[i] - w[i - 1]) / (s[i] - s[i - 1]);
        const double right = (w[i + 1] - w[i]) / (s[i + 1] - s[i]);
        CHECK(right <= left + 1e-8);
    }
}

TEST_CASE("analyze_center aggregates the stopping interval") {
    const auto sol = analyze_center(fx().tie, fx().tie_grid, 0.75, 2.5);
    REQUIRE(sol.stopping_interval.has_value());
    CHECK(sol.stopping_interval->first == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(sol.stopping_interval->second ==
          doctest::Approx(12.0).epsilon(1e-6));
    // below the smallest maximizer the one-sided rule needs no interval
    const auto low = analyze_center(fx().tie, fx().tie_grid, 0.75, 0.5);
    CHECK_FALSE(low.stopping_interval.has_value());
}
