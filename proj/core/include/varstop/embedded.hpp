#pragma once

#include "varstop/diffusion.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace varstop {

// Shared evaluation grid for the quadratic-problem machinery. Built once per
// canonical spec (S(alpha) = 0) and reused by scans, the solver and the game
// module. `asymptote` is lim (z^2-...)/S(z) toward an unbounded beta, which
// equals the quadratic growth limit and is independent of the center.
struct EmbeddedGrid {
    std::vector<double> z;
    std::vector<double> s; // S(z) on the grid
    double b_max = 0.0;
    double asymptote = 0.0;     // 0 in Case I, L in the special transient case
    bool beta_included = false; // finite beta with finite S(beta) in the grid
};

EmbeddedGrid build_embedded_grid(const DiffusionSpec& spec, int n = 2048);

// Solution data of sup_tau E_x[(X_tau - c)^2] for one center c.
struct EmbeddedSolution {
    double c = 0.0;
    std::vector<double> maximizers; // finite global maximizers, ascending
    bool at_infinity = false;       // the z->inf asymptote attains the sup
    double ratio_value = 0.0;       // the attained sup of the ratio
    std::optional<std::pair<double, double>> stopping_interval;

    double z_lo() const { return maximizers.front(); }
    double z_hi_finite() const { return maximizers.back(); }
    bool multiple() const { return maximizers.size() > 1 || at_infinity; }
};

// (z^2 - alpha^2 - 2c(z-alpha)) / S(z); requires canonical coordinates.
double ratio(const DiffusionSpec& spec, double z, double c);

// Refined location of a local maximizer of the ratio inside [lo, hi]
// (golden pass plus derivative-sign bisection; exact on kinks).
double refine_ratio_maximizer(const DiffusionSpec& spec, double c, double lo,
                              double hi);

EmbeddedSolution maximizer_set(const DiffusionSpec& spec,
                               const EmbeddedGrid& grid, double c);

// maximizer_set plus the stopping-set component relevant to x (attached when
// x lies above the smallest maximizer, where the one-sided rule stops being
// the whole story).
EmbeddedSolution analyze_center(const DiffusionSpec& spec,
                                const EmbeddedGrid& grid, double c, double x);

// V^c(x) = ratio_value * S(x) + (alpha-c)^2, valid for x up to the greatest
// maximizer; throws StartAboveMaximizer beyond it.
double embedded_value(const DiffusionSpec& spec, const EmbeddedSolution& sol,
                      double x);
double embedded_value(const DiffusionSpec& spec, const EmbeddedGrid& grid,
                      double x, double c);

// The component of the embedded stopping set D_c relevant to x, read off the
// least concave majorant of the payoff in natural scale. Returns the
// continuation gap (a,b) around x (so tau_{D_c} = tau_{(a,b)}), or the
// degenerate (x,x) when x already lies in D_c.
std::pair<double, double> stopping_set(const DiffusionSpec& spec,
                                       const EmbeddedGrid& grid, double c,
                                       double x);

// E_{z_lo}[X at exit of (alpha, z_hi)] > c, defined when |Z(c)| >= 2.
bool assumption2_holds(const DiffusionSpec& spec, const EmbeddedSolution& sol);

struct TieCenter {
    double c = 0.0;
    double z_lo = 0.0;
    double z_hi = 0.0;          // finite tie partner; ignored when at infinity
    bool upper_at_infinity = false;
    bool assumption2 = false;
    double ratio_value = 0.0;
};

struct ScanResult {
    std::vector<TieCenter> ties;
    double c_lo = 0.0, c_hi = 0.0;
    int grid_points = 0;
    bool resolution_warning = false;
};

// Detect the centers where the greatest maximizer jumps, bracket each jump
// and bisect down to the tie. Scans c over (c_lo, c_hi).
ScanResult multi_maximizer_scan(const DiffusionSpec& spec,
                                const EmbeddedGrid& grid, double c_lo,
                                double c_hi, int n_c = 512);

} // namespace varstop
