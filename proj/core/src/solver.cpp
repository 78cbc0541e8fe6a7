#include "varstop/solver.hpp"

#include "varstop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace varstop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
} // namespace

StoppingRule StoppingRule::immediate() {
    StoppingRule r;
    r.kind = Kind::Immediate;
    return r;
}

StoppingRule StoppingRule::exit_interval(double a, double b) {
    StoppingRule r;
    r.kind = Kind::ExitInterval;
    r.a = a;
    r.b = b;
    return r;
}

StoppingRule StoppingRule::whole_interval(double a, double b) {
    StoppingRule r;
    r.kind = Kind::WholeInterval;
    r.a = a;
    r.b = b;
    return r;
}

StoppingRule StoppingRule::mix(double p, StoppingRule r1, StoppingRule r2) {
    StoppingRule r;
    r.kind = Kind::BernoulliMix;
    r.p = p;
    r.first = std::make_shared<const StoppingRule>(std::move(r1));
    r.second = std::make_shared<const StoppingRule>(std::move(r2));
    return r;
}

StoppingRule
StoppingRule::epsilon_family(std::function<StoppingRule(double)> b) {
    StoppingRule r;
    r.kind = Kind::EpsilonFamily;
    r.epsilon_builder = std::move(b);
    return r;
}

std::string StoppingRule::kind_name() const {
    switch (kind) {
    case Kind::Immediate: return "immediate";
    case Kind::ExitInterval: return "exit";
    case Kind::BernoulliMix: return "mix";
    case Kind::WholeInterval: return "whole_interval";
    case Kind::EpsilonFamily: return "epsilon_family";
    }
    return "?";
}

double rule_mean(const DiffusionSpec& spec, double x, const StoppingRule& rule) {
    switch (rule.kind) {
    case StoppingRule::Kind::Immediate: return x;
    case StoppingRule::Kind::ExitInterval:
    case StoppingRule::Kind::WholeInterval:
        if (x <= rule.a || x >= rule.b) return x;
        return exit_mean(spec, x, rule.a, rule.b);
    case StoppingRule::Kind::BernoulliMix:
        return rule.p * rule_mean(spec, x, *rule.first) +
               (1.0 - rule.p) * rule_mean(spec, x, *rule.second);
    case StoppingRule::Kind::EpsilonFamily: return kNaN;
    }
    return kNaN;
}

double rule_variance(const DiffusionSpec& spec, double x,
                     const StoppingRule& rule) {
    switch (rule.kind) {
    case StoppingRule::Kind::Immediate: return 0.0;
    case StoppingRule::Kind::ExitInterval:
    case StoppingRule::Kind::WholeInterval:
        if (x <= rule.a || x >= rule.b) return 0.0;
        return exit_variance(spec, x, rule.a, rule.b);
    case StoppingRule::Kind::BernoulliMix: {
        const double v1 = rule_variance(spec, x, *rule.first);
        const double v2 = rule_variance(spec, x, *rule.second);
        const double m1 = rule_mean(spec, x, *rule.first);
        const double m2 = rule_mean(spec, x, *rule.second);
        const double p = rule.p;
        return p * v1 + (1.0 - p) * v2 + p * (1.0 - p) * (m1 - m2) * (m1 - m2);
    }
    case StoppingRule::Kind::EpsilonFamily: return kNaN;
    }
    return kNaN;
}

namespace {

StoppingRule map_rule(const StoppingRule& r, const AffineMap& back) {
    switch (r.kind) {
    case StoppingRule::Kind::Immediate: return r;
    case StoppingRule::Kind::ExitInterval:
    case StoppingRule::Kind::WholeInterval: {
        StoppingRule out = r;
        const double u = back.apply(r.a);
        const double v = back.apply(r.b);
        out.a = std::min(u, v);
        out.b = std::max(u, v);
        if (out.epsilon_builder) {
            out.epsilon_builder = [inner = r.epsilon_builder,
                                   back](double eps) {
                return map_rule(inner(eps), back);
            };
        }
        return out;
    }
    case StoppingRule::Kind::BernoulliMix:
        return StoppingRule::mix(r.p, map_rule(*r.first, back),
                                 map_rule(*r.second, back));
    case StoppingRule::Kind::EpsilonFamily:
        return StoppingRule::epsilon_family(
            [inner = r.epsilon_builder, back](double eps) {
                return map_rule(inner(eps), back);
            });
    }
    return r;
}

void require_canonical(const DiffusionSpec& spec, const char* who) {
    if (std::isinf(spec.interval.alpha) || spec.scale.s_lower() != 0.0)
        throw DomainError(std::string(who) +
                          ": spec must be canonical (finite alpha, S(alpha)=0)");
}

// Variance of tau_(alpha, z): (z-alpha)^2 r (1-r) with r = S(x)/S(z).
double one_sided_variance(const DiffusionSpec& spec, double x, double z) {
    const double alpha = spec.interval.alpha;
    const double r = spec.scale(x) / spec.scale(z);
    return (z - alpha) * (z - alpha) * r * (1.0 - r);
}

} // namespace

bool monotonicity_check(const DiffusionSpec& spec) {
    require_canonical(spec, "monotonicity_check");
    const auto& iv = spec.interval;
    const auto& S = spec.scale;
    const double alpha = iv.alpha;
    const auto grid = interior_grid(iv, 1024);

    double prev = -kInf;
    bool have_prev = false;
    for (double z : grid) {
        const double h = 1e-6 * std::max(std::abs(z), 1e-6);
        bool near_bp = false;
        for (double bp : S.breakpoints()) {
            if (std::abs(z - bp) <= 4.0 * h) near_bp = true;
        }
        if (near_bp) continue;
        const double s = S(z);
        if (!(s > 0.0) || std::isinf(s)) continue;
        const double m = S.deriv(iv, z) * (z - alpha) / s;
        if (!std::isfinite(m)) continue;
        if (have_prev && m < prev - 1e-9 * std::max(1.0, std::abs(prev)))
            return false;
        prev = m;
        have_prev = true;
    }
    return true;
}

BoundaryResult first_order_boundary(const DiffusionSpec& spec, double x) {
    require_canonical(spec, "first_order_boundary");
    const auto& iv = spec.interval;
    if (!iv.contains(x))
        throw DomainError("first_order_boundary: x outside interval");
    const auto& S = spec.scale;
    const double alpha = iv.alpha;
    const double Sx = S(x);

    if (std::isfinite(S.s_upper()) && 2.0 * Sx >= S.s_upper())
        return {BoundaryResult::Kind::AtBeta, iv.beta};

    const double lo = scale_inverse(spec, 2.0 * Sx);
    if (!std::isfinite(lo))
        throw BracketError("first_order_boundary: left bracket endpoint "
                           "exceeds the numeric ceiling");

    const auto phi = [&](double z) {
        const double s = S(z);
        return (s - Sx) / (0.5 * s - Sx) - S.deriv(iv, z) * (z - alpha) / s;
    };

    // A root must be a genuine sign change: phi can decay to 0 from above
    // when no boundary exists (the at-beta / at-infinity cases), and floating
    // cancellation eventually rounds it to exactly zero.
    auto neg_tol = [&](double z) {
        return -1e-11 * (1.0 + std::abs(S.deriv(iv, z) * (z - alpha) / S(z)));
    };

    double z_prev = alpha + (lo - alpha) * (1.0 + 1e-7);
    double f_prev = phi(z_prev);
    if (f_prev <= neg_tol(z_prev)) return {BoundaryResult::Kind::Root, z_prev};

    const double cap = std::isfinite(iv.beta)
                           ? iv.beta
                           : std::max(1e12, (lo - alpha) * 1e12 + alpha);
    while (true) {
        double z = alpha + (z_prev - alpha) * 1.05;
        bool at_end = false;
        if (std::isfinite(iv.beta) && z >= iv.beta) {
            z = iv.beta - 1e-9 * (iv.beta - iv.alpha);
            at_end = true;
        }
        if (z >= cap) at_end = true;
        const double f = phi(z);
        if (std::isfinite(f) && f <= neg_tol(z)) {
            const double root = bisect_root(phi, z_prev, z, f_prev,
                                            1e-12 * (1.0 + std::abs(z)));
            return {BoundaryResult::Kind::Root, root};
        }
        if (at_end) break;
        z_prev = z;
        f_prev = std::isfinite(f) ? f : f_prev;
    }
    if (std::isfinite(iv.beta)) return {BoundaryResult::Kind::AtBeta, iv.beta};
    return {BoundaryResult::Kind::AtInfinity, kInf};
}

RandomizationRegion randomization_region(const DiffusionSpec& spec,
                                         const EmbeddedGrid& grid,
                                         const TieCenter& tie) {
    require_canonical(spec, "randomization_region");
    const double alpha = spec.interval.alpha;
    RandomizationRegion r;
    r.c = tie.c;
    r.z_lo = tie.z_lo;
    r.z_hi = tie.upper_at_infinity ? kInf : tie.z_hi;
    r.upper_at_infinity = tie.upper_at_infinity;
    r.assumption2 = tie.assumption2;

    r.x_lo = scale_inverse(
        spec, (tie.c - alpha) / (tie.z_lo - alpha) * spec.scale(tie.z_lo));
    if (tie.upper_at_infinity) {
        r.x_hi = kInf;
    } else {
        r.x_hi = scale_inverse(
            spec, (tie.c - alpha) / (tie.z_hi - alpha) * spec.scale(tie.z_hi));
    }
    if (!r.assumption2 && !r.upper_at_infinity && r.x_hi > r.z_lo) {
        const double probe = 0.5 * (r.z_lo + std::min(r.x_hi, r.z_hi));
        r.d_c = stopping_set(spec, grid, tie.c, probe);
    }
    return r;
}

double p_star(const DiffusionSpec& spec, double x,
              const RandomizationRegion& region) {
    require_canonical(spec, "p_star");
    if (!(x > region.x_lo && x < region.x_hi))
        throw OutOfRegion("p_star: x outside (x_lo, x_hi)");
    const double alpha = spec.interval.alpha;
    const auto& S = spec.scale;
    const double c = region.c;

    double p;
    if (!region.assumption2 && region.d_c &&
        x > region.z_lo + 1e-9 * (1.0 + std::abs(region.z_lo))) {
        // mix tau_{D_c} with tau_(alpha, z_hi)
        const double m1 = exit_mean(spec, x, region.d_c->first,
                                    region.d_c->second);
        const double m2 = alpha + (region.z_hi - alpha) * S(x) / S(region.z_hi);
        p = (c - m2) / (m1 - m2);
    } else {
        const double a1 = (region.z_lo - alpha) / S(region.z_lo);
        const double a2 = region.upper_at_infinity
                              ? 0.0
                              : (region.z_hi - alpha) / S(region.z_hi);
        p = ((c - alpha) / S(x) - a2) / (a1 - a2);
    }
    return std::clamp(p, 0.0, 1.0);
}

struct SolverEngine::Ctx {
    DiffusionSpec spec; // canonical
    AffineMap back;
    EmbeddedGrid grid;
    bool monotone = false;
    bool special = false; // quadratic growth limit in (0, inf)
    bool scanned = false;
    ScanResult scan;
    std::vector<RandomizationRegion> regions;
};

namespace {

// Epsilon family witnessing an infinite value: exit rules with variance
// >= 1/eps, built from intervals pushed toward the unbounded side (with
// scale-equalized edges when both scale limits are infinite).
StoppingRule infinite_family(const DiffusionSpec& spec, double x) {
    return StoppingRule::epsilon_family([spec, x](double eps) {
        const auto& iv = spec.interval;
        const auto& S = spec.scale;
        const double target = 1.0 / std::max(eps, 1e-14);
        const bool lo_inf_scale = std::isinf(S.s_lower());
        const bool hi_inf_scale = std::isinf(S.s_upper());
        StoppingRule best = StoppingRule::immediate();
        double best_var = 0.0;
        // fixed interior anchors; an edge with an infinite scale limit
        // carries no exit mass so those edges must stay interior or grow
        const double lo_fix =
            S.s_lower() == 0.0 && std::isfinite(iv.alpha)
                ? iv.alpha
                : (std::isfinite(iv.alpha) ? 0.5 * (iv.alpha + x)
                                           : x - (1.0 + std::abs(x)));
        const double hi_fix =
            std::isfinite(S.s_upper()) && std::isfinite(iv.beta)
                ? iv.beta
                : (std::isfinite(iv.beta) ? 0.5 * (x + iv.beta)
                                          : x + (1.0 + std::abs(x)));
        auto consider = [&](double a, double b) {
            if (!(a < x && x < b) || !std::isfinite(a) || !std::isfinite(b))
                return;
            double var;
            try {
                var = exit_variance(spec, x, a, b);
            } catch (const Error&) {
                return;
            }
            if (var > best_var) {
                best_var = var;
                best = StoppingRule::exit_interval(a, b);
            }
        };
        for (int k = 4; k < 220 && best_var < target; ++k) {
            const double step = (1.0 + std::abs(x)) * std::pow(1.25, k);
            if (std::isinf(iv.beta)) {
                const double b = x + step;
                if (lo_inf_scale && hi_inf_scale) {
                    consider(scale_inverse(spec, 2.0 * S(x) - S(b)), b);
                } else {
                    consider(lo_fix, b);
                }
            }
            if (std::isinf(iv.alpha)) {
                const double a = x - step;
                if (lo_inf_scale && hi_inf_scale) {
                    consider(a, scale_inverse(spec, 2.0 * S(x) - S(a)));
                } else {
                    consider(a, hi_fix);
                }
            }
        }
        return best;
    });
}

// Epsilon family for the recurrent bounded case: scale-equalized exits with
// span^2/4 within eps of the value.
std::function<StoppingRule(double)>
recurrent_family(const DiffusionSpec& spec, double x) {
    return [spec, x](double eps) {
        const auto& iv = spec.interval;
        const auto& S = spec.scale;
        const double v = 0.25 * iv.span() * iv.span();
        StoppingRule out = StoppingRule::exit_interval(iv.alpha, iv.beta);
        for (double t = 0.5; t > 1e-14; t *= 0.5) {
            const double a = iv.alpha + t * (x - iv.alpha);
            const double b = scale_inverse(spec, 2.0 * S(x) - S(a));
            const double var = 0.25 * (b - a) * (b - a);
            if (var >= v - eps) {
                out = StoppingRule::exit_interval(a, b);
                break;
            }
        }
        return out;
    };
}

// Epsilon family under a whole-interval rule with attainable exit law.
std::function<StoppingRule(double)>
shrinking_family(const DiffusionSpec& spec, double x) {
    return [spec, x](double eps) {
        const auto& iv = spec.interval;
        const double v = exit_variance(spec, x, iv.alpha, iv.beta);
        StoppingRule out = StoppingRule::exit_interval(iv.alpha, iv.beta);
        for (double t = 0.25; t > 1e-14; t *= 0.5) {
            const double a = iv.alpha + t * (x - iv.alpha);
            const double b = iv.beta - t * (iv.beta - x);
            if (exit_variance(spec, x, a, b) >= v - eps) {
                out = StoppingRule::exit_interval(a, b);
                break;
            }
        }
        return out;
    };
}

// Epsilon family toward an at-infinity boundary (special transient case):
// one-sided exits with variance -> L S(x).
std::function<StoppingRule(double)>
at_infinity_family(const DiffusionSpec& spec, double x, double value) {
    return [spec, x, value](double eps) {
        const auto& iv = spec.interval;
        double z = std::max(2.0 * std::abs(x), iv.alpha + 1.0);
        StoppingRule out = StoppingRule::exit_interval(iv.alpha, z);
        for (int k = 0; k < 200; ++k) {
            if (one_sided_variance(spec, x, z) >= value - eps) {
                out = StoppingRule::exit_interval(iv.alpha, z);
                break;
            }
            z *= 2.0;
        }
        return out;
    };
}

} // namespace

SolverEngine::SolverEngine(DiffusionSpec spec) : spec_(std::move(spec)) {
    const auto probe = interior_grid(spec_.interval, 3);
    cls_ = classify(spec_, probe[probe.size() / 2]);
}

SolverEngine::Ctx& SolverEngine::lower_ctx() {
    if (!lower_) {
        auto [cspec, back] = translate_to_zero(spec_);
        auto ctx = std::make_shared<Ctx>();
        ctx->spec = std::move(cspec);
        ctx->back = back;
        ctx->grid = build_embedded_grid(ctx->spec);
        ctx->monotone = monotonicity_check(ctx->spec);
        ctx->special = cls_.tag == Regime::SpecialTransientI;
        lower_ = std::move(ctx);
    }
    return *lower_;
}

SolverEngine::Ctx& SolverEngine::upper_ctx() {
    if (!upper_) {
        auto [cspec, back] = reflect(spec_);
        auto ctx = std::make_shared<Ctx>();
        ctx->spec = std::move(cspec);
        ctx->back = back;
        ctx->grid = build_embedded_grid(ctx->spec);
        ctx->monotone = monotonicity_check(ctx->spec);
        ctx->special = cls_.tag == Regime::SpecialTransientII;
        upper_ = std::move(ctx);
    }
    return *upper_;
}

VarianceSolution SolverEngine::solve(double x) {
    if (!spec_.interval.contains(x))
        throw DomainError("solve: x outside (alpha, beta)");
    const auto& iv = spec_.interval;

    switch (cls_.tag) {
    case Regime::InfiniteValue: {
        VarianceSolution out;
        out.x = x;
        out.value = kInf;
        out.rule = infinite_family(spec_, x);
        out.c_star = kNaN;
        out.classification = cls_;
        out.diagnostics.mean_under_rule = kNaN;
        out.diagnostics.used_extrapolated_limits =
            cls_.used_extrapolated_limits;
        return out;
    }
    case Regime::RecurrentBounded: {
        VarianceSolution out;
        out.x = x;
        out.value = 0.25 * iv.span() * iv.span();
        out.rule = StoppingRule::whole_interval(iv.alpha, iv.beta);
        out.rule.epsilon_builder = recurrent_family(spec_, x);
        out.c_star = 0.5 * (iv.alpha + iv.beta);
        out.classification = cls_;
        out.diagnostics.mean_under_rule = kNaN; // exit law unattained
        out.diagnostics.used_extrapolated_limits =
            cls_.used_extrapolated_limits;
        return out;
    }
    case Regime::CaseI:
    case Regime::SpecialTransientI: return solve_lower(lower_ctx(), x);
    case Regime::CaseII:
    case Regime::SpecialTransientII: return solve_lower(upper_ctx(), x);
    case Regime::CaseIII: {
        const double m = exit_mean(spec_, x, iv.alpha, iv.beta);
        if (m <= 0.5 * (iv.alpha + iv.beta)) return solve_lower(lower_ctx(), x);
        return solve_lower(upper_ctx(), x);
    }
    case Regime::UnsupportedMarginal: break;
    }
    throw UnsupportedMarginal("solve: unsupported marginal regime");
}

namespace {

// Centers the inf-player could rationally play against this x never exceed
// 2x + sqrt(sup_tau E_x[(X_tau - 2x)^2]); ties beyond that bound cannot
// carry x's certificate.
double center_bound(SolverEngine::Ctx& ctx, double x) {
    const auto sol = maximizer_set(ctx.spec, ctx.grid, 2.0 * x);
    const double v = embedded_value(ctx.spec, sol, x);
    return 2.0 * x + std::sqrt(std::max(v, 0.0));
}

void ensure_scan(SolverEngine::Ctx& ctx, double c_need) {
    const double alpha = ctx.spec.interval.alpha;
    const double beta = ctx.spec.interval.beta;
    // centers above half the span belong to the mirrored branch
    const double cap = std::isfinite(beta)
                           ? alpha + 0.5 * (beta - alpha)
                           : std::numeric_limits<double>::infinity();
    double c_hi = std::min(c_need, cap);
    if (ctx.scanned) {
        if (ctx.scan.c_hi >= c_hi) return;
        c_hi = std::min(cap, std::max(c_hi, 2.0 * ctx.scan.c_hi));
    }
    const double c_lo = alpha + 1e-6 * (c_hi - alpha);
    ctx.scan = multi_maximizer_scan(ctx.spec, ctx.grid, c_lo, c_hi);
    ctx.regions.clear();
    for (const auto& tie : ctx.scan.ties) {
        if (ctx.special && (!tie.assumption2 || tie.upper_at_infinity)) {
            throw UnsupportedMarginal(
                "transient growth limit in (0,inf) with a maximizer tie "
                "violating the mean inequality; this marginal case is "
                "detected but not solved");
        }
        ctx.regions.push_back(randomization_region(ctx.spec, ctx.grid, tie));
    }
    ctx.scanned = true;
}

RandomizationRegion map_region(const RandomizationRegion& r,
                               const AffineMap& back) {
    RandomizationRegion out = r;
    out.c = back.apply(r.c);
    double zl = back.apply(r.z_lo), zh = back.apply(r.z_hi);
    out.z_lo = std::min(zl, zh);
    out.z_hi = std::max(zl, zh);
    double xl = back.apply(r.x_lo), xh = back.apply(r.x_hi);
    out.x_lo = std::min(xl, xh);
    out.x_hi = std::max(xl, xh);
    if (r.d_c) {
        double a = back.apply(r.d_c->first), b = back.apply(r.d_c->second);
        out.d_c = std::make_pair(std::min(a, b), std::max(a, b));
    }
    return out;
}

} // namespace

VarianceSolution SolverEngine::solve_lower(Ctx& ctx, double x_orig) {
    const double x = ctx.back.invert(x_orig);
    const auto& iv = ctx.spec.interval;
    const auto& S = ctx.spec.scale;
    const double alpha = iv.alpha;

    VarianceSolution out;
    out.x = x_orig;
    out.classification = cls_;
    out.diagnostics.used_extrapolated_limits = cls_.used_extrapolated_limits;

    StoppingRule rule_can;
    double value = 0.0;
    double c_can = 0.0;
    bool mean_exempt = false;

    auto pure_threshold = [&]() {
        // maximize v(x,z) over one-sided thresholds z >= x
        double best_z = x;
        double best_v = 0.0;
        const auto& zs = ctx.grid.z;
        const std::size_t n = zs.size();
        std::size_t start = static_cast<std::size_t>(
            std::lower_bound(zs.begin(), zs.end(), x) - zs.begin());
        auto vf = [&](double z) { return one_sided_variance(ctx.spec, x, z); };
        if (x < ctx.grid.b_max && start < n) {
            std::vector<double> vv(n - start);
            for (std::size_t j = start; j < n; ++j) vv[j - start] = vf(zs[j]);
            for (std::size_t j = 0; j < vv.size(); ++j) {
                const bool up = (j == 0) || vv[j] >= vv[j - 1];
                const bool down = (j + 1 == vv.size()) || vv[j] >= vv[j + 1];
                if (!(up && down)) continue;
                const double lo = j == 0 ? x : zs[start + j - 1];
                const double hi =
                    j + 1 == vv.size() ? zs[start + j] : zs[start + j + 1];
                const double z =
                    lo < hi ? golden_max(vf, lo, hi,
                                         1e-13 * (1.0 + std::abs(hi)), 250)
                            : zs[start + j];
                for (double cand : {z, zs[start + j]}) {
                    const double v = vf(cand);
                    if (v > best_v) {
                        best_v = v;
                        best_z = cand;
                    }
                }
            }
        } else {
            // start point beyond the precomputed grid: geometric probe
            double z = x * 1.0001;
            for (int k = 0; k < 300; ++k) {
                const double v = vf(z);
                if (v > best_v) {
                    best_v = v;
                    best_z = z;
                }
                z *= 1.1;
                if (std::isfinite(iv.beta) && z >= iv.beta) break;
            }
        }
        bool at_beta = false;
        if (ctx.grid.beta_included) {
            const double v = exit_variance(ctx.spec, x, alpha, iv.beta);
            if (v > best_v) {
                best_v = v;
                best_z = iv.beta;
                at_beta = true;
            }
        }
        if (ctx.special) {
            const double v_inf = ctx.grid.asymptote * S(x);
            if (v_inf > best_v) {
                value = v_inf;
                rule_can = StoppingRule::epsilon_family(
                    at_infinity_family(ctx.spec, x, v_inf));
                c_can = alpha;
                mean_exempt = true;
                return;
            }
        }
        value = best_v;
        if (at_beta) {
            rule_can = StoppingRule::whole_interval(alpha, iv.beta);
            rule_can.epsilon_builder = shrinking_family(ctx.spec, x);
        } else {
            rule_can = StoppingRule::exit_interval(alpha, best_z);
        }
        c_can = exit_mean(ctx.spec, x, alpha, best_z);
    };

    if (ctx.monotone) {
        out.diagnostics.monotone_shortcut_used = true;
        const BoundaryResult fo = first_order_boundary(ctx.spec, x);
        switch (fo.kind) {
        case BoundaryResult::Kind::Root: {
            value = one_sided_variance(ctx.spec, x, fo.z);
            rule_can = StoppingRule::exit_interval(alpha, fo.z);
            c_can = exit_mean(ctx.spec, x, alpha, fo.z);
            break;
        }
        case BoundaryResult::Kind::AtBeta: {
            value = exit_variance(ctx.spec, x, alpha, iv.beta);
            rule_can = StoppingRule::whole_interval(alpha, iv.beta);
            rule_can.epsilon_builder = shrinking_family(ctx.spec, x);
            c_can = exit_mean(ctx.spec, x, alpha, iv.beta);
            break;
        }
        case BoundaryResult::Kind::AtInfinity: {
            value = ctx.grid.asymptote * S(x);
            rule_can = StoppingRule::epsilon_family(
                at_infinity_family(ctx.spec, x, value));
            c_can = alpha;
            mean_exempt = true;
            break;
        }
        }
    } else {
        ensure_scan(ctx, 1.05 * center_bound(ctx, x));
        const RandomizationRegion* inside = nullptr;
        double inside_value = kInf;
        for (const auto& r : ctx.regions) {
            if (!(x > r.x_lo && x < r.x_hi)) continue;
            const double rv = ratio(ctx.spec, r.z_lo, r.c);
            const double v = rv * S(x) + (alpha - r.c) * (alpha - r.c);
            if (v < inside_value) {
                inside_value = v;
                inside = &r;
            }
        }
        if (inside) {
            const auto& r = *inside;
            value = inside_value;
            c_can = r.c;
            const double p = p_star(ctx.spec, x, r);
            StoppingRule first =
                (!r.assumption2 && r.d_c &&
                 x > r.z_lo + 1e-9 * (1.0 + std::abs(r.z_lo)))
                    ? StoppingRule::exit_interval(r.d_c->first, r.d_c->second)
                    : StoppingRule::exit_interval(alpha, r.z_lo);
            StoppingRule second = StoppingRule::exit_interval(alpha, r.z_hi);
            if (p >= 1.0 - 1e-12) {
                rule_can = first;
            } else if (p <= 1e-12) {
                rule_can = second;
            } else {
                rule_can = StoppingRule::mix(p, std::move(first),
                                             std::move(second));
            }
            out.region = map_region(r, ctx.back);
        } else {
            pure_threshold();
        }
        out.diagnostics.scan_c_lo = ctx.scan.c_lo;
        out.diagnostics.scan_c_hi = ctx.scan.c_hi;
        out.diagnostics.scan_grid = ctx.scan.grid_points;
        out.diagnostics.scan_resolution_warning = ctx.scan.resolution_warning;
    }

    out.value = value;
    out.rule = map_rule(rule_can, ctx.back);
    out.c_star = std::isnan(c_can) ? kNaN : ctx.back.apply(c_can);
    if (mean_exempt || rule_can.kind == StoppingRule::Kind::EpsilonFamily) {
        out.diagnostics.mean_under_rule = kNaN;
    } else {
        try {
            out.diagnostics.mean_under_rule = rule_mean(spec_, x_orig, out.rule);
        } catch (const Error&) {
            out.diagnostics.mean_under_rule = kNaN;
        }
    }
    return out;
}

VarianceSolution solve(const DiffusionSpec& spec, double x) {
    SolverEngine engine(spec);
    return engine.solve(x);
}

std::vector<ProfileEntry> value_profile(const DiffusionSpec& spec,
                                        const std::vector<double>& xs) {
    std::vector<ProfileEntry> out;
    out.reserve(xs.size());
    if (xs.empty()) return out;
    SolverEngine engine(spec);
    for (double x : xs) {
        ProfileEntry e;
        e.x = x;
        try {
            e.solution = engine.solve(x);
        } catch (const Error& err) {
            e.error = err.what();
        }
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace varstop
