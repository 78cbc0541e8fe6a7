#pragma once

#include "varstop/expression.hpp"
#include "varstop/numerics.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace varstop {

enum class BoundaryKind { Natural, Exit, Entrance, Killing, Absorbing };

// Open state interval (alpha, beta); either endpoint may be infinite. The
// behaviour tags are metadata only; no computation branches on them.
struct StateInterval {
    double alpha = 0.0;
    double beta = 1.0;
    BoundaryKind lower_behavior = BoundaryKind::Natural;
    BoundaryKind upper_behavior = BoundaryKind::Natural;

    double span() const { return beta - alpha; }
    bool contains(double x) const { return x > alpha && x < beta; }
};

enum class ScaleKind { ClosedForm, PiecewiseAnalytic, Tabulated };

// Optional analytic endpoint data for a scale function, in the raw (not yet
// normalized) scale. Declared values win over extrapolation.
struct ScaleLimits {
    std::optional<double> s_lower;      // lim S at alpha (finite or -inf)
    std::optional<double> s_upper;      // lim S at beta (finite or +inf)
    std::optional<double> upper_growth; // lim b^2 / S(b), beta = +inf only
    std::optional<double> lower_growth; // lim a^2 / (-S(a)), alpha = -inf only
};

// A strictly increasing continuous scale function, normalized so that either
// S(alpha) = 0 or S(alpha) = -inf. Construction screens monotonicity on a
// grid and resolves the endpoint limits (declared values win, otherwise
// extrapolation along a geometric approach).
class ScaleModel {
public:
    ScaleModel() = default;

    static ScaleModel make(const StateInterval& iv, RealFn eval, RealFn deriv,
                           ScaleKind kind, std::vector<double> breakpoints,
                           ScaleLimits declared);

    // Construction bypassing screening/extrapolation, for transforms of an
    // already-validated scale. `resolved` must be fully populated.
    static ScaleModel trusted(RealFn eval, RealFn deriv, ScaleKind kind,
                              std::vector<double> breakpoints,
                              double s_lower, double s_upper,
                              std::optional<double> upper_growth,
                              std::optional<double> lower_growth);

    // Normalized scale value.
    double operator()(double x) const;

    // Closed-form derivative when available, otherwise a central finite
    // difference (one-sided near breakpoints).
    double deriv(const StateInterval& iv, double x) const;
    bool has_closed_deriv() const { return static_cast<bool>(deriv_); }

    ScaleKind kind() const { return kind_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    // Resolved, normalized endpoint limits.
    double s_lower() const { return s_lower_; }        // 0 or -inf
    double s_upper() const { return s_upper_; }        // finite or +inf
    double upper_growth() const { return upper_growth_; }
    double lower_growth() const { return lower_growth_; }
    bool used_extrapolation() const { return used_extrapolation_; }

private:
    RealFn raw_;
    RealFn deriv_;
    ScaleKind kind_ = ScaleKind::ClosedForm;
    std::vector<double> breakpoints_;
    double offset_ = 0.0;
    double s_lower_ = 0.0;
    double s_upper_ = 0.0;
    double upper_growth_ = 0.0;
    double lower_growth_ = 0.0;
    bool used_extrapolation_ = false;
};

// A regular linear diffusion described by its scale function. Drift/vol are
// optional and only feed the SDE cross-check sampler; the speed measure is
// carried along by the transforms but never read by the solver.
struct DiffusionSpec {
    StateInterval interval;
    ScaleModel scale;
    std::optional<RealFn> drift;
    std::optional<RealFn> vol;
    std::optional<RealFn> speed;
};

enum class Regime {
    InfiniteValue,
    RecurrentBounded,
    CaseI,
    CaseII,
    CaseIII,
    SpecialTransientI,
    SpecialTransientII,
    UnsupportedMarginal,
};

std::string regime_name(Regime r);

struct Classification {
    Regime tag = Regime::InfiniteValue;
    // lim a^2 P_x(tau_a < inf) and lim b^2 P_x(tau_b < inf)
    double limit_lower = 0.0;
    double limit_upper = 0.0;
    bool attractive_lower = false;
    bool attractive_upper = false;
    bool used_extrapolated_limits = false;
};

Classification classify(const DiffusionSpec& spec, double x);

// Exit-side probabilities for tau_(a,b) started at x: (p_lower, p_upper).
// Passing a == alpha or b == beta uses the corresponding scale limit; mass
// that never exits a side is folded into the opposite entry.
std::pair<double, double> hit_prob(const DiffusionSpec& spec, double x,
                                   double a, double b);

// E_x[X at exit of (a,b)]; degenerate a == x or b == x means immediate stop.
double exit_mean(const DiffusionSpec& spec, double x, double a, double b);

// Var_x[X at exit of (a,b)] = (b-a)^2 p (1-p).
double exit_variance(const DiffusionSpec& spec, double x, double a, double b);

// Affine state map x_original = scale * x_transformed + shift.
struct AffineMap {
    double scale = 1.0;
    double shift = 0.0;
    double apply(double x) const { return scale * x + shift; }
    double invert(double x) const { return (x - shift) / scale; }
    AffineMap compose_outer(const AffineMap& outer) const {
        // outer(apply(x))
        return {outer.scale * scale, outer.scale * shift + outer.shift};
    }
};

// Shift so the lower endpoint sits at 0; returns the spec on (0, beta-alpha)
// and the map back to original coordinates. Requires finite alpha.
std::pair<DiffusionSpec, AffineMap> translate_to_zero(const DiffusionSpec& spec);

// Mirror the state space so the (finite) upper endpoint becomes a lower
// endpoint at 0 with vanishing scale; boundary behaviours swap sides.
std::pair<DiffusionSpec, AffineMap> reflect(const DiffusionSpec& spec);

// Inverse of the normalized scale by bisection on (alpha, beta).
double scale_inverse(const DiffusionSpec& spec, double s);

// Compactified interior sampling grid (n points, strictly increasing).
std::vector<double> interior_grid(const StateInterval& iv, int n);

// Builtin diffusions.
DiffusionSpec gbm(double mu, double sigma);
DiffusionSpec jacobi(double a, double b, double sigma);
DiffusionSpec natural_scale(double alpha, double beta);

// Piecewise-rational scale on (0, inf) engineered so the embedded problem
// develops a two-point maximizer tie (forces a genuinely randomized rule).
DiffusionSpec tie_diffusion();

struct ScalePiece {
    double upto; // strict upper edge of the piece (+inf allowed on the last)
    Expression expr;
};

DiffusionSpec custom_scale(StateInterval iv, std::vector<ScalePiece> pieces,
                           ScaleLimits declared,
                           std::optional<Expression> drift = std::nullopt,
                           std::optional<Expression> vol = std::nullopt);

} // namespace varstop
