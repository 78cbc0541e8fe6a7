#pragma once

#include "varstop/embedded.hpp"
#include "varstop/solver.hpp"

#include <vector>

namespace varstop {

// Compactified strategy bounds for the zero-sum formulation
// sup_tau inf_c E_x[(X_tau - c)^2].
struct StrategyBounds {
    double c_hat = 0.0; // inf{c : z_c > x} (clamped at the scanned floor)
    double m_x = 0.0;   // 2x + sqrt(sup_tau E_x[(X_tau-2x)^2])
    double n_x = 0.0;   // sup{z_c : c in [c_hat, m_x]}
    bool c_hat_clamped = false;
};

struct GameSolution {
    double c_star = 0.0;
    double value = 0.0;
    std::vector<double> essential; // thresholds achieving the value at c_star
    StoppingRule mix;              // pure or Bernoulli mix of two essentials
    double gap = 0.0;              // |primal - dual|, filled by duality_gap
};

// Exit payoff A(tau_(alpha,z), c) for z >= x; z == x means stopping at once.
double payoff(const DiffusionSpec& spec, double x, double z, double c);

StrategyBounds strategy_bounds(const DiffusionSpec& spec,
                               const EmbeddedGrid& grid, double x);

// Inf-player solve: minimize g(c) = sup_{z >= x} A(tau_(alpha,z), c) over the
// compact center range, splitting at scan-detected kinks. Refuses (throws
// AssumptionViolated) when a failing tie makes threshold strategies
// insufficient for this x.
std::pair<double, double> dual_value(const DiffusionSpec& spec,
                                     const EmbeddedGrid& grid, double x);

std::vector<double> essential_strategies(const DiffusionSpec& spec,
                                         const EmbeddedGrid& grid, double x,
                                         double c_star);

StoppingRule mixed_from_essentials(const DiffusionSpec& spec, double x,
                                   double c_star,
                                   const std::vector<double>& essentials);

// Full dual solve on a canonical Case-I spec.
GameSolution dual_solve(const DiffusionSpec& spec, const EmbeddedGrid& grid,
                        double x);

// Convenience on an arbitrary spec: canonicalize, solve both routes, return
// |primal - dual|. Throws AssumptionViolated where the dual refuses.
double duality_gap(const DiffusionSpec& spec, double x);

// Dual solve on an arbitrary Case-I spec (translated internally).
GameSolution dual_solve_original(const DiffusionSpec& spec, double x);

} // namespace varstop
