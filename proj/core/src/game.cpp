#include "varstop/game.hpp"

#include "varstop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace varstop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEssentialRel = 1e-9;

void require_canonical(const DiffusionSpec& spec, const char* who) {
    if (std::isinf(spec.interval.alpha) || spec.scale.s_lower() != 0.0)
        throw DomainError(std::string(who) + ": spec must be canonical");
}

double ratio_at(const DiffusionSpec& spec, double z, double c) {
    const double alpha = spec.interval.alpha;
    const double s = spec.scale(z);
    if (!(s > 0.0)) return -kInf;
    return (z - alpha) * ((z + alpha) - 2.0 * c) / s;
}

struct ConstrainedMax {
    double value = -kInf;
    double z_best = 0.0;    // strict argmax (no plateau tolerance)
    std::vector<double> zs; // plateau achieving the value, ascending
};

// sup over thresholds z in [x, b_max] of the exit-payoff ratio.
ConstrainedMax sup_ratio_from(const DiffusionSpec& spec,
                              const EmbeddedGrid& grid, double x, double c) {
    ConstrainedMax out;
    const auto& zs = grid.z;
    const std::size_t n = zs.size();
    const std::size_t start = static_cast<std::size_t>(
        std::lower_bound(zs.begin(), zs.end(), x) - zs.begin());

    std::vector<std::pair<double, double>> cand; // (z, ratio)
    cand.emplace_back(x, ratio_at(spec, x, c));

    auto rf = [&](double z) { return ratio_at(spec, z, c); };
    if (start < n) {
        std::vector<double> rv(n - start);
        for (std::size_t j = start; j < n; ++j) rv[j - start] = rf(zs[j]);
        for (std::size_t j = 0; j < rv.size(); ++j) {
            const bool up = (j == 0) || rv[j] >= rv[j - 1];
            const bool down = (j + 1 == rv.size()) || rv[j] >= rv[j + 1];
            if (!(up && down)) continue;
            const double lo = j == 0 ? x : zs[start + j - 1];
            const double hi = j + 1 == rv.size() ? zs[start + j]
                                                 : zs[start + j + 1];
            double z = zs[start + j];
            if (lo < hi) z = refine_ratio_maximizer(spec, c, lo, hi);
            for (double zz : {z, zs[start + j]}) cand.emplace_back(zz, rf(zz));
        }
    }
    if (grid.beta_included)
        cand.emplace_back(zs[n - 1], ratio_at(spec, zs[n - 1], c));

    for (const auto& [z, r] : cand) {
        if (r > out.value) {
            out.value = r;
            out.z_best = z;
        }
    }
    const double tol = kEssentialRel * std::max(std::abs(out.value), 1e-30);
    std::vector<double> keep;
    for (const auto& [z, r] : cand) {
        if (out.value - r <= tol) keep.push_back(z);
    }
    std::sort(keep.begin(), keep.end());
    for (double z : keep) {
        if (out.zs.empty() ||
            z - out.zs.back() > 1e-7 * (1.0 + std::abs(z)))
            out.zs.push_back(z);
    }
    return out;
}

double g_of_c(const DiffusionSpec& spec, const EmbeddedGrid& grid, double x,
              double c) {
    const double alpha = spec.interval.alpha;
    const ConstrainedMax m = sup_ratio_from(spec, grid, x, c);
    return m.value * spec.scale(x) + (alpha - c) * (alpha - c);
}

} // namespace

double payoff(const DiffusionSpec& spec, double x, double z, double c) {
    require_canonical(spec, "payoff");
    if (z < x) throw DomainError("payoff: z must be >= x");
    const double alpha = spec.interval.alpha;
    if (z == x) return (x - c) * (x - c);
    return ratio(spec, z, c) * spec.scale(x) + (alpha - c) * (alpha - c);
}

StrategyBounds strategy_bounds(const DiffusionSpec& spec,
                               const EmbeddedGrid& grid, double x) {
    require_canonical(spec, "strategy_bounds");
    StrategyBounds out;

    // m_x from the embedded value at center 2x
    const EmbeddedSolution at2x = maximizer_set(spec, grid, 2.0 * x);
    const double m_hat = embedded_value(spec, at2x, x);
    out.m_x = 2.0 * x + std::sqrt(std::max(m_hat, 0.0));

    // c_hat = inf{c > alpha : greatest maximizer exceeds x}
    const double alpha = spec.interval.alpha;
    const double c_floor = alpha + 1e-9 * (out.m_x - alpha);
    auto z_top = [&](double c) {
        const EmbeddedSolution sol = maximizer_set(spec, grid, c);
        return sol.at_infinity ? kInf : sol.maximizers.back();
    };
    out.n_x = x;
    if (z_top(c_floor) > x) {
        out.c_hat = c_floor;
        out.c_hat_clamped = true;
    } else {
        double lo = c_floor, hi = out.m_x;
        // first bracket by linear scan, then bisect
        const int kProbe = 64;
        double prev = lo;
        bool found = false;
        for (int i = 1; i <= kProbe; ++i) {
            const double c = lo + (hi - lo) * i / kProbe;
            if (z_top(c) > x) {
                hi = c;
                lo = prev;
                found = true;
                break;
            }
            prev = c;
        }
        if (!found) {
            out.c_hat = out.m_x;
        } else {
            for (int it = 0; it < 48 && (hi - lo) > 1e-12 * (1.0 + hi); ++it) {
                const double c = 0.5 * (lo + hi);
                if (z_top(c) > x)
                    hi = c;
                else
                    lo = c;
            }
            out.c_hat = 0.5 * (lo + hi);
        }
    }

    // n_x over [c_hat, m_x]
    const int kN = 48;
    double n_best = x;
    for (int i = 0; i <= kN; ++i) {
        const double c = out.c_hat + (out.m_x - out.c_hat) * i / kN;
        const double zt = z_top(c);
        if (std::isfinite(zt)) n_best = std::max(n_best, zt);
    }
    out.n_x = std::min(n_best, grid.b_max);
    return out;
}

namespace {

void refuse_if_two_sided(const DiffusionSpec& spec, const EmbeddedGrid& grid,
                         double x, double c_hi) {
    const double alpha = spec.interval.alpha;
    const double c_lo = alpha + 1e-6 * (c_hi - alpha);
    const ScanResult scan = multi_maximizer_scan(spec, grid, c_lo, c_hi);
    for (const auto& tie : scan.ties) {
        if (!tie.assumption2 && !tie.upper_at_infinity &&
            x > tie.z_lo + 1e-9 * (1.0 + std::abs(tie.z_lo))) {
            // thresholds cannot reach the mean condition; the primal needs
            // the two-sided stopping-set rule here
            throw AssumptionViolated(
                "dual_value: tie center violates the mean inequality and x "
                "lies above its lower maximizer");
        }
        if (tie.upper_at_infinity)
            throw AssumptionViolated("dual_value: tie with an at-infinity "
                                     "maximizer is outside the dual route");
    }
}

} // namespace

std::pair<double, double> dual_value(const DiffusionSpec& spec,
                                     const EmbeddedGrid& grid, double x) {
    require_canonical(spec, "dual_value");
    if (!spec.interval.contains(x))
        throw DomainError("dual_value: x outside interval");

    const StrategyBounds sb = strategy_bounds(spec, grid, x);
    refuse_if_two_sided(spec, grid, x, sb.m_x);

    // g is convex with g'(c) = 2 (c - E_x[X under the attained threshold]);
    // bisecting the sign of g' resolves both smooth minima and the kinks at
    // tie centers to machine precision.
    const double alpha = spec.interval.alpha;
    auto gprime_sign = [&](double c) {
        const ConstrainedMax m = sup_ratio_from(spec, grid, x, c);
        const double z = m.z_best;
        const double mean =
            z <= x ? x : alpha + (z - alpha) * spec.scale(x) / spec.scale(z);
        return c - mean;
    };
    auto g = [&](double c) { return g_of_c(spec, grid, x, c); };

    double lo = sb.c_hat, hi = sb.m_x;
    double best_c;
    if (gprime_sign(lo) >= 0.0) {
        best_c = lo;
    } else if (gprime_sign(hi) <= 0.0) {
        best_c = hi;
    } else {
        for (int it = 0; it < 100 && (hi - lo) > 1e-16 * std::max(1.0, hi);
             ++it) {
            const double c = 0.5 * (lo + hi);
            if (gprime_sign(c) < 0.0)
                lo = c;
            else
                hi = c;
        }
        best_c = 0.5 * (lo + hi);
    }
    return {best_c, g(best_c)};
}

std::vector<double> essential_strategies(const DiffusionSpec& spec,
                                         const EmbeddedGrid& grid, double x,
                                         double c_star) {
    require_canonical(spec, "essential_strategies");
    const ConstrainedMax m = sup_ratio_from(spec, grid, x, c_star);
    if (m.zs.empty())
        throw EmptyEssentialSet("essential_strategies: empty plateau");
    return m.zs;
}

StoppingRule mixed_from_essentials(const DiffusionSpec& spec, double x,
                                   double c_star,
                                   const std::vector<double>& essentials) {
    require_canonical(spec, "mixed_from_essentials");
    if (essentials.empty())
        throw EmptyEssentialSet("mixed_from_essentials: no essentials");
    const double alpha = spec.interval.alpha;
    const auto& S = spec.scale;

    auto mean_of = [&](double z) {
        if (z <= x) return x; // immediate
        return alpha + (z - alpha) * S(x) / S(z);
    };
    auto aprime = [&](double z) { return 2.0 * (c_star - mean_of(z)); };

    // pure strategy when some essential already satisfies the mean condition
    for (double z : essentials) {
        if (std::abs(aprime(z)) <= 1e-9 * (1.0 + std::abs(c_star))) {
            return z <= x ? StoppingRule::immediate()
                          : StoppingRule::exit_interval(alpha, z);
        }
    }
    double z_neg = 0.0, z_pos = 0.0;
    bool has_neg = false, has_pos = false;
    for (double z : essentials) {
        const double d = aprime(z);
        if (d < 0.0 && (!has_neg || d < aprime(z_neg))) {
            z_neg = z;
            has_neg = true;
        }
        if (d > 0.0 && (!has_pos || d > aprime(z_pos))) {
            z_pos = z;
            has_pos = true;
        }
    }
    if (!has_neg || !has_pos)
        throw NoSignChange("mixed_from_essentials: derivative does not change "
                           "sign across the essential set");
    const double d1 = aprime(z_neg);
    const double d2 = aprime(z_pos);
    const double p = d2 / (d2 - d1); // weight on the A' < 0 strategy
    StoppingRule r1 = z_neg <= x ? StoppingRule::immediate()
                                 : StoppingRule::exit_interval(alpha, z_neg);
    StoppingRule r2 = z_pos <= x ? StoppingRule::immediate()
                                 : StoppingRule::exit_interval(alpha, z_pos);
    return StoppingRule::mix(p, std::move(r1), std::move(r2));
}

GameSolution dual_solve(const DiffusionSpec& spec, const EmbeddedGrid& grid,
                        double x) {
    GameSolution out;
    const auto [c_star, value] = dual_value(spec, grid, x);
    out.c_star = c_star;
    out.value = value;
    out.essential = essential_strategies(spec, grid, x, c_star);
    out.mix = mixed_from_essentials(spec, x, c_star, out.essential);
    // internal saddle check: inf_c A(mix, c) is the mix's variance, which
    // must meet the inf-sup value from above-below
    out.gap = std::abs(value - rule_variance(spec, x, out.mix));
    return out;
}

GameSolution dual_solve_original(const DiffusionSpec& spec, double x) {
    const Classification cls = classify(spec, x);
    if (cls.tag != Regime::CaseI)
        throw AssumptionViolated("dual route is implemented for Case I only");
    auto [cspec, back] = translate_to_zero(spec);
    const EmbeddedGrid grid = build_embedded_grid(cspec);
    GameSolution sol = dual_solve(cspec, grid, back.invert(x));
    sol.c_star = back.apply(sol.c_star);
    for (double& z : sol.essential) z = back.apply(z);
    // rules live in original coordinates
    if (sol.mix.kind == StoppingRule::Kind::ExitInterval) {
        sol.mix = StoppingRule::exit_interval(back.apply(sol.mix.a),
                                              back.apply(sol.mix.b));
    } else if (sol.mix.kind == StoppingRule::Kind::BernoulliMix) {
        auto map_leaf = [&](const StoppingRule& r) {
            if (r.kind == StoppingRule::Kind::ExitInterval)
                return StoppingRule::exit_interval(back.apply(r.a),
                                                   back.apply(r.b));
            return r;
        };
        sol.mix = StoppingRule::mix(sol.mix.p, map_leaf(*sol.mix.first),
                                    map_leaf(*sol.mix.second));
    }
    return sol;
}

double duality_gap(const DiffusionSpec& spec, double x) {
    // dual first: it refuses cheaply outside its range
    const GameSolution dual = dual_solve_original(spec, x);
    const double primal = solve(spec, x).value;
    return std::abs(primal - dual.value);
}

} // namespace varstop
