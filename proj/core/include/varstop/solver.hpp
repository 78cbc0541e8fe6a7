#pragma once

#include "varstop/diffusion.hpp"
#include "varstop/embedded.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace varstop {

// Executable stopping rule in original (untransformed) coordinates.
struct StoppingRule {
    enum class Kind {
        Immediate,
        ExitInterval,
        BernoulliMix,
        WholeInterval,
        EpsilonFamily,
    };
    Kind kind = Kind::Immediate;
    double a = 0.0, b = 0.0; // ExitInterval / WholeInterval edges
    double p = 1.0;          // BernoulliMix weight on `first`
    std::shared_ptr<const StoppingRule> first, second;
    // For EpsilonFamily: tolerance -> almost-surely-finite rule within eps of
    // the value (for an infinite value, a rule with variance >= 1/eps).
    // WholeInterval rules carry the same builder when one exists.
    std::function<StoppingRule(double)> epsilon_builder;

    static StoppingRule immediate();
    static StoppingRule exit_interval(double a, double b);
    static StoppingRule whole_interval(double a, double b);
    static StoppingRule mix(double p, StoppingRule r1, StoppingRule r2);
    static StoppingRule epsilon_family(std::function<StoppingRule(double)> b);

    std::string kind_name() const;
};

// Closed-form mean / variance of a rule started at x (exit-law algebra; NaN
// for a bare EpsilonFamily).
double rule_mean(const DiffusionSpec& spec, double x, const StoppingRule& rule);
double rule_variance(const DiffusionSpec& spec, double x,
                     const StoppingRule& rule);

struct RandomizationRegion {
    double c = 0.0;
    double z_lo = 0.0, z_hi = 0.0; // tie maximizers (z_hi may be +inf)
    double x_lo = 0.0, x_hi = 0.0; // region endpoints
    bool assumption2 = false;
    std::optional<std::pair<double, double>> d_c; // present when !assumption2
    bool upper_at_infinity = false;
};

struct SolveDiagnostics {
    double mean_under_rule = 0.0; // NaN for epsilon families
    std::optional<double> duality_gap; // filled by the game module
    bool monotone_shortcut_used = false;
    bool used_extrapolated_limits = false;
    double scan_c_lo = 0.0, scan_c_hi = 0.0;
    int scan_grid = 0;
    bool scan_resolution_warning = false;
};

struct VarianceSolution {
    double x = 0.0;
    double value = 0.0; // +inf allowed
    StoppingRule rule;
    double c_star = 0.0;
    std::optional<RandomizationRegion> region;
    Classification classification;
    SolveDiagnostics diagnostics;
};

// True iff z -> S'(z)(z - alpha)/S(z) is non-decreasing on the sampling grid
// (canonical coordinates; breakpoint samples skipped).
bool monotonicity_check(const DiffusionSpec& spec);

struct BoundaryResult {
    enum class Kind { Root, AtBeta, AtInfinity };
    Kind kind = Kind::Root;
    double z = 0.0;
};

// Solve (S(z)-S(x)) / (S(z)/2 - S(x)) = S'(z)(z-alpha)/S(z) on
// (S^{-1}(2 S(x)), beta) by bracketed bisection. Requires canonical
// coordinates and the monotone shortcut.
BoundaryResult first_order_boundary(const DiffusionSpec& spec, double x);

RandomizationRegion randomization_region(const DiffusionSpec& spec,
                                         const EmbeddedGrid& grid,
                                         const TieCenter& tie);

// Mixing weight solving the mean condition E_x[X] = c inside a region.
double p_star(const DiffusionSpec& spec, double x,
              const RandomizationRegion& region);

class SolverEngine {
public:
    struct Ctx; // canonical sub-problem state (implementation detail)

    explicit SolverEngine(DiffusionSpec spec);
    VarianceSolution solve(double x);
    const Classification& classification() const { return cls_; }

private:
    Ctx& lower_ctx();
    Ctx& upper_ctx();
    VarianceSolution solve_lower(Ctx& ctx, double x_orig);

    DiffusionSpec spec_;
    Classification cls_;
    std::shared_ptr<Ctx> lower_, upper_;
};

VarianceSolution solve(const DiffusionSpec& spec, double x);

struct ProfileEntry {
    double x = 0.0;
    std::optional<VarianceSolution> solution;
    std::string error; // non-empty when the point failed
};

// Per-point solve with the classification, scan and regions computed once.
std::vector<ProfileEntry> value_profile(const DiffusionSpec& spec,
                                        const std::vector<double>& xs);

} // namespace varstop
