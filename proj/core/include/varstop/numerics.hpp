#pragma once

#include <functional>
#include <span>
#include <vector>

namespace varstop {

using RealFn = std::function<double(double)>;

// Bisection on a bracketed sign change. `flo` is f(lo); the caller supplies it
// when already known to avoid re-evaluation. Stops at |hi-lo| <= xtol or
// max_iter halvings, returning the midpoint.
double bisect_root(const RealFn& f, double lo, double hi, double flo,
                   double xtol, int max_iter = 64);

// Golden-section minimization of a unimodal function on [a,b].
double golden_min(const RealFn& f, double a, double b, double xtol,
                  int max_iter = 200);

// Golden-section maximization on [a,b].
double golden_max(const RealFn& f, double a, double b, double xtol,
                  int max_iter = 200);

// Tanh-sinh (double-exponential) quadrature of f over the finite interval
// (a,b). Handles integrable endpoint singularities; levels are refined until
// successive estimates agree to rtol or max_level is reached.
double integrate_tanh_sinh(const RealFn& f, double a, double b,
                           double rtol = 1e-12, int max_level = 12);

// Deterministic pairwise summation (fixed reduction tree, independent of
// chunking by callers).
double pairwise_sum(std::span<const double> xs);

// Outcome of extrapolating a function value along a sequence approaching a
// limit point.
struct LimitEstimate {
    enum class Kind { Finite, PlusInfinity, MinusInfinity, Undetermined };
    Kind kind = Kind::Undetermined;
    double value = 0.0; // meaningful for Kind::Finite
};

// Classify lim f(t_k) from samples taken along a geometric approach sequence.
// Convergent tails are accelerated with Aitken's delta-squared; non-decaying
// same-sign increments are read as divergence. Mixed signals give
// Undetermined.
LimitEstimate extrapolate_limit(std::span<const double> values);

// Convenience: geometric approach to a finite endpoint from inside,
// t_k = endpoint -/+ d0 * ratio^k (sign chosen by `from_above`).
LimitEstimate limit_at_finite(const RealFn& f, double endpoint, bool from_above,
                              double d0, int samples = 24, double ratio = 0.5);

// Geometric approach to +infinity, t_k = t0 * growth^k.
LimitEstimate limit_at_infinity(const RealFn& f, double t0, int samples = 40,
                                double growth = 2.0);

// Geometric approach to -infinity, t_k = -t0 * growth^k.
LimitEstimate limit_at_minus_infinity(const RealFn& f, double t0,
                                      int samples = 40, double growth = 2.0);

} // namespace varstop
