#pragma once

#include "varstop/diffusion.hpp"
#include "varstop/solver.hpp"

#include <cstdint>

namespace varstop {

// Counter-based uniform stream: draw j of sample i depends only on
// (seed, i, j), so any partition across workers reproduces bit-identical
// results.
struct CounterRng {
    std::uint64_t seed = 0;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in (0,1)
    double uniform(std::uint64_t sample, std::uint64_t draw) const {
        const std::uint64_t key =
            mix(seed + 0x9E3779B97F4A7C15ull * (sample + 1));
        const std::uint64_t v = mix(key + 0xD1B54A32D192ED03ull * (draw + 1));
        return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
    }
};

struct SampleConfig {
    std::uint64_t seed = 12345;
    std::uint64_t n = 100000;
    int workers = 1;
};

struct EstimatorResult {
    double mean = 0.0;
    double variance = 0.0;              // sample variance (n-1)
    double std_error_of_variance = 0.0; // sqrt((m4 - var^2)/n)
    std::uint64_t n_effective = 0;
    double absorbed_fraction = 0.0;     // outcomes at a state-space endpoint
};

// Sample the exact exit distribution implied by the scale function (two-point
// laws, Bernoulli mixing). EpsilonFamily rules must be instantiated by the
// caller first.
EstimatorResult sample_rule(const DiffusionSpec& spec, double x,
                            const StoppingRule& rule, const SampleConfig& cfg);

struct SdePathsResult {
    double p_lower = 0.0, p_upper = 0.0;
    double ci_lower = 0.0, ci_upper = 0.0; // 1.96 * binomial std error
    std::uint64_t n = 0;
    double censored_fraction = 0.0;
};

// Euler-Maruyama first-exit cross-check with Brownian-bridge crossing
// correction; throws StepTooCoarse when halving the step moves an estimate by
// more than twice the combined CI width.
SdePathsResult sde_paths(const DiffusionSpec& spec, double x, double a,
                         double b, double step, const SampleConfig& cfg);

} // namespace varstop
