#include "varstop/montecarlo.hpp"

#include "varstop/errors.hpp"
#include "varstop/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

namespace varstop {

namespace {

constexpr std::uint64_t kBlock = 65536;

struct ExitLaw {
    // two-point law: lower value with prob p_lo, upper value with prob p_up
    double lo = 0.0, hi = 0.0;
    double p_up = 0.0;
    bool lower_is_boundary = false;
    bool upper_is_boundary = false;
};

ExitLaw exit_law(const DiffusionSpec& spec, double x, double a, double b) {
    ExitLaw law;
    const auto [p_lo, p_up] = hit_prob(spec, x, a, b);
    law.p_up = p_up;
    law.lo = a;
    law.hi = b;
    if (p_lo > 0.0 && std::isinf(a))
        throw Unbounded("sample_rule: mass at an infinite endpoint");
    if (p_up > 0.0 && std::isinf(b))
        throw Unbounded("sample_rule: mass at an infinite endpoint");
    law.lower_is_boundary = a == spec.interval.alpha;
    law.upper_is_boundary = b == spec.interval.beta;
    return law;
}

struct Drawn {
    double value = 0.0;
    bool absorbed = false;
};

Drawn draw_rule(const DiffusionSpec& spec, double x, const StoppingRule& rule,
                const CounterRng& rng, std::uint64_t i, std::uint64_t& k) {
    switch (rule.kind) {
    case StoppingRule::Kind::Immediate: return {x, false};
    case StoppingRule::Kind::ExitInterval:
    case StoppingRule::Kind::WholeInterval: {
        if (x <= rule.a || x >= rule.b) return {x, false};
        const ExitLaw law = exit_law(spec, x, rule.a, rule.b);
        const double u = rng.uniform(i, k++);
        if (u < law.p_up) return {law.hi, law.upper_is_boundary};
        return {law.lo, law.lower_is_boundary};
    }
    case StoppingRule::Kind::BernoulliMix: {
        const double u = rng.uniform(i, k++);
        const StoppingRule& branch = (u < rule.p) ? *rule.first : *rule.second;
        return draw_rule(spec, x, branch, rng, i, k);
    }
    case StoppingRule::Kind::EpsilonFamily:
        throw UnsupportedRule("sample_rule: instantiate the epsilon family "
                              "at a chosen tolerance first");
    }
    throw UnsupportedRule("sample_rule: unknown rule kind");
}

struct BlockSums {
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    double absorbed = 0;
};

} // namespace

EstimatorResult sample_rule(const DiffusionSpec& spec, double x,
                            const StoppingRule& rule, const SampleConfig& cfg) {
    if (cfg.n == 0) throw DomainError("sample_rule: n must be positive");
    // validate the rule once up-front so worker threads cannot throw
    {
        CounterRng probe{cfg.seed};
        std::uint64_t k = 0;
        (void)draw_rule(spec, x, rule, probe, 0, k);
    }

    const std::uint64_t nblocks = (cfg.n + kBlock - 1) / kBlock;
    std::vector<BlockSums> blocks(nblocks);
    const CounterRng rng{cfg.seed};

    auto run_block = [&](std::uint64_t bi) {
        const std::uint64_t lo = bi * kBlock;
        const std::uint64_t hi = std::min(cfg.n, lo + kBlock);
        BlockSums s;
        for (std::uint64_t i = lo; i < hi; ++i) {
            std::uint64_t k = 0;
            const Drawn d = draw_rule(spec, x, rule, rng, i, k);
            const double y = d.value - x; // shift for accumulation stability
            const double y2 = y * y;
            s.s1 += y;
            s.s2 += y2;
            s.s3 += y2 * y;
            s.s4 += y2 * y2;
            if (d.absorbed) s.absorbed += 1.0;
        }
        blocks[bi] = s;
    };

    const int workers =
        std::max(1, std::min<int>(cfg.workers, static_cast<int>(nblocks)));
    if (workers == 1) {
        for (std::uint64_t bi = 0; bi < nblocks; ++bi) run_block(bi);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (std::uint64_t bi = static_cast<std::uint64_t>(w);
                     bi < nblocks; bi += static_cast<std::uint64_t>(workers))
                    run_block(bi);
            });
        }
        for (auto& t : pool) t.join();
    }

    // deterministic fixed-order pairwise reduction
    std::vector<double> v1(nblocks), v2(nblocks), v3(nblocks), v4(nblocks),
        va(nblocks);
    for (std::uint64_t b = 0; b < nblocks; ++b) {
        v1[b] = blocks[b].s1;
        v2[b] = blocks[b].s2;
        v3[b] = blocks[b].s3;
        v4[b] = blocks[b].s4;
        va[b] = blocks[b].absorbed;
    }
    const double n = static_cast<double>(cfg.n);
    const double s1 = pairwise_sum(v1);
    const double s2 = pairwise_sum(v2);
    const double s3 = pairwise_sum(v3);
    const double s4 = pairwise_sum(v4);
    const double m = s1 / n; // mean of shifted values

    EstimatorResult out;
    out.n_effective = cfg.n;
    out.mean = m + x;
    const double ss = s2 - n * m * m; // sum of squared deviations
    out.variance = cfg.n > 1 ? ss / (n - 1.0) : 0.0;
    const double mu4 =
        (s4 - 4.0 * m * s3 + 6.0 * m * m * s2 - 3.0 * n * m * m * m * m) / n;
    const double var_pop = ss / n;
    out.std_error_of_variance =
        std::sqrt(std::max(0.0, mu4 - var_pop * var_pop) / n);
    out.absorbed_fraction = pairwise_sum(va) / n;
    return out;
}

namespace {

struct HitCounts {
    double lower = 0, upper = 0, censored = 0;
};

HitCounts run_paths(const DiffusionSpec& spec, double x, double a, double b,
                    double step, const SampleConfig& cfg,
                    std::uint64_t seed_salt) {
    const RealFn& drift = *spec.drift;
    const RealFn& vol = *spec.vol;
    const CounterRng rng{cfg.seed ^ seed_salt};
    const std::uint64_t max_steps =
        static_cast<std::uint64_t>(std::min(2e8, 200.0 / step));

    const std::uint64_t nblocks = (cfg.n + kBlock - 1) / kBlock;
    std::vector<HitCounts> blocks(nblocks);

    auto run_block = [&](std::uint64_t bi) {
        const std::uint64_t lo = bi * kBlock;
        const std::uint64_t hi = std::min(cfg.n, lo + kBlock);
        HitCounts hc;
        const double sqh = std::sqrt(step);
        for (std::uint64_t i = lo; i < hi; ++i) {
            double xt = x;
            bool done = false;
            for (std::uint64_t k = 0; k < max_steps && !done; ++k) {
                const std::uint64_t base = 4 * k;
                const double u1 = rng.uniform(i, base);
                const double u2 = rng.uniform(i, base + 1);
                const double z =
                    std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
                const double sig = vol(xt);
                double xn = xt + drift(xt) * step + sig * sqh * z;
                if (xn <= a) {
                    hc.lower += 1;
                    done = true;
                    break;
                }
                if (xn >= b) {
                    hc.upper += 1;
                    done = true;
                    break;
                }
                // Brownian-bridge crossing probabilities inside the step
                const double den = sig * sig * step;
                if (den > 0.0) {
                    const double pa =
                        std::exp(-2.0 * (xt - a) * (xn - a) / den);
                    if (rng.uniform(i, base + 2) < pa) {
                        hc.lower += 1;
                        done = true;
                        break;
                    }
                    const double pb =
                        std::exp(-2.0 * (b - xt) * (b - xn) / den);
                    if (rng.uniform(i, base + 3) < pb) {
                        hc.upper += 1;
                        done = true;
                        break;
                    }
                }
                xt = xn;
            }
            if (!done) hc.censored += 1;
        }
        blocks[bi] = hc;
    };

    const int workers =
        std::max(1, std::min<int>(cfg.workers, static_cast<int>(nblocks)));
    if (workers == 1) {
        for (std::uint64_t bi = 0; bi < nblocks; ++bi) run_block(bi);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (std::uint64_t bi = static_cast<std::uint64_t>(w);
                     bi < nblocks; bi += static_cast<std::uint64_t>(workers))
                    run_block(bi);
            });
        }
        for (auto& t : pool) t.join();
    }

    HitCounts total;
    std::vector<double> lows(nblocks), ups(nblocks), cens(nblocks);
    for (std::uint64_t bi = 0; bi < nblocks; ++bi) {
        lows[bi] = blocks[bi].lower;
        ups[bi] = blocks[bi].upper;
        cens[bi] = blocks[bi].censored;
    }
    total.lower = pairwise_sum(lows);
    total.upper = pairwise_sum(ups);
    total.censored = pairwise_sum(cens);
    return total;
}

} // namespace

SdePathsResult sde_paths(const DiffusionSpec& spec, double x, double a,
                         double b, double step, const SampleConfig& cfg) {
    if (!spec.drift || !spec.vol)
        throw DomainError("sde_paths: drift and vol must both be present");
    if (!(a < x && x < b))
        throw DomainError("sde_paths: need a < x < b");
    if (!(a > spec.interval.alpha && b < spec.interval.beta))
        throw DomainError("sde_paths: [a,b] must be interior");
    if (!(step > 0.0)) throw DomainError("sde_paths: step must be positive");
    if (cfg.n == 0) throw DomainError("sde_paths: n must be positive");

    const double n = static_cast<double>(cfg.n);
    auto summarize = [&](const HitCounts& hc) {
        SdePathsResult r;
        r.n = cfg.n;
        r.p_lower = hc.lower / n;
        r.p_upper = hc.upper / n;
        r.ci_lower = 1.96 * std::sqrt(r.p_lower * (1.0 - r.p_lower) / n);
        r.ci_upper = 1.96 * std::sqrt(r.p_upper * (1.0 - r.p_upper) / n);
        r.censored_fraction = hc.censored / n;
        return r;
    };

    const SdePathsResult coarse = summarize(run_paths(spec, x, a, b, step, cfg, 0));
    const SdePathsResult fine =
        summarize(run_paths(spec, x, a, b, 0.5 * step, cfg, 0x5DEECE66Dull));

    const double shift = std::abs(coarse.p_upper - fine.p_upper);
    const double width = coarse.ci_upper + fine.ci_upper;
    if (shift > 2.0 * std::max(width, 1e-12))
        throw StepTooCoarse("sde_paths: halving the step moved the estimate "
                            "beyond twice the CI width");
    return fine;
}

} // namespace varstop
