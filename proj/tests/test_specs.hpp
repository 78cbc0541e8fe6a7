#pragma once

// Shared constructions used across the test suites.

#include "varstop/diffusion.hpp"
#include "varstop/expression.hpp"

#include <cmath>
#include <optional>

namespace varstop::testspec {

// Mirror image of gbm(-1,1) on (-inf, 0): upper endpoint attractive, lower
// not, quadratic tail decaying. A genuine Case II input.
inline DiffusionSpec mirrored_gbm_case2() {
    StateInterval iv{-std::numeric_limits<double>::infinity(), 0.0,
                     BoundaryKind::Natural, BoundaryKind::Natural};
    ScaleLimits lim;
    lim.s_lower = -std::numeric_limits<double>::infinity();
    lim.s_upper = 0.0;
    lim.lower_growth = 0.0; // a^2 / (-S(a)) = 3/|a| -> 0
    return {iv,
            ScaleModel::make(
                iv, [](double x) { return -std::pow(-x, 3.0) / 3.0; },
                [](double x) { return std::pow(-x, 2.0); },
                ScaleKind::ClosedForm, {}, lim),
            std::nullopt, std::nullopt, std::nullopt};
}

// Mirror image of gbm(-1/2, 1): special transient geometry from above.
inline DiffusionSpec mirrored_marginal_case2() {
    StateInterval iv{-std::numeric_limits<double>::infinity(), 0.0,
                     BoundaryKind::Natural, BoundaryKind::Natural};
    ScaleLimits lim;
    lim.s_lower = -std::numeric_limits<double>::infinity();
    lim.s_upper = 0.0;
    lim.lower_growth = 2.0; // a^2 / (x^2/2)
    return {iv,
            ScaleModel::make(
                iv, [](double x) { return -0.5 * x * x; },
                [](double x) { return -x; }, ScaleKind::ClosedForm, {}, lim),
            std::nullopt, std::nullopt, std::nullopt};
}

// Recurrent diffusion on (0,1): S = log(x/(1-x)).
inline DiffusionSpec logit_recurrent() {
    StateInterval iv{0.0, 1.0, BoundaryKind::Natural, BoundaryKind::Natural};
    ScaleLimits lim;
    lim.s_lower = -std::numeric_limits<double>::infinity();
    lim.s_upper = std::numeric_limits<double>::infinity();
    return {iv,
            ScaleModel::make(
                iv, [](double x) { return std::log(x / (1.0 - x)); },
                [](double x) { return 1.0 / (x * (1.0 - x)); },
                ScaleKind::ClosedForm, {}, lim),
            std::nullopt, std::nullopt, std::nullopt};
}

// Piecewise scale with a maximizer tie {2, 2.8} at c = 0.75 whose exit-mean
// inequality HOLDS (contrast with tie_diffusion where it fails):
//   (0,2]      S = x/4
//   (2,2.13]   S = (x^2-1.5x)/(2-9.3077(x-2))      (ratio dips to ~0.79)
//   (2.13,2.8] S linear, chosen so the ratio climbs back to 2 at 2.8
//   (2.8,inf)  S = (x^2-1.5x) e^{x-2.8}/2          (ratio decays)
inline DiffusionSpec tie_holds_diffusion() {
    const double b1 = 2.0, b2 = 2.13, b3 = 2.8;
    const double s_b2 = (b2 * b2 - 1.5 * b2) / 0.79; // = n(2.13)/0.79
    const double s_b3 = (b3 * b3 - 1.5 * b3) / 2.0;  // ratio 2 at 2.8
    const double slope = (s_b3 - s_b2) / (b3 - b2);
    StateInterval iv{0.0, std::numeric_limits<double>::infinity(),
                     BoundaryKind::Natural, BoundaryKind::Natural};
    ScaleLimits lim;
    lim.s_lower = 0.0;
    lim.s_upper = std::numeric_limits<double>::infinity();
    lim.upper_growth = 0.0;
    auto eval = [=](double x) {
        const double n = x * x - 1.5 * x;
        if (x < b1) return 0.25 * x;
        if (x < b2) return n / (2.0 - 9.3077 * (x - 2.0));
        if (x < b3) return s_b2 + slope * (x - b2);
        return n * std::exp(x - b3) / 2.0;
    };
    return {iv,
            ScaleModel::make(iv, eval, nullptr, ScaleKind::PiecewiseAnalytic,
                             {b1, b2, b3}, lim),
            std::nullopt, std::nullopt, std::nullopt};
}

// tie_diffusion with the final branch replaced by (x^2-1.5x)/(1+12/x), so
// z^2/S(z) -> 1 while the failing {2,12} tie survives: the marginal case the
// solver must refuse.
inline DiffusionSpec marginal_refused_diffusion() {
    const double b1 = 2.0;
    const double b2 = 21.2 / 10.1;
    const double b3 = 12.0;
    StateInterval iv{0.0, std::numeric_limits<double>::infinity(),
                     BoundaryKind::Natural, BoundaryKind::Natural};
    ScaleLimits lim;
    lim.s_lower = 0.0;
    lim.s_upper = std::numeric_limits<double>::infinity();
    lim.upper_growth = 1.0;
    auto eval = [=](double x) {
        const double n = x * x - 1.5 * x;
        if (x < b1) return 0.25 * x;
        if (x < b2) return n / (-10.0 * x + 22.0);
        if (x < b3) return n / (0.1 * x + 0.8);
        return n / (1.0 + 12.0 / x);
    };
    return {iv,
            ScaleModel::make(iv, eval, nullptr, ScaleKind::PiecewiseAnalytic,
                             {b1, b2, b3}, lim),
            std::nullopt, std::nullopt, std::nullopt};
}

// Scale multiplied by a positive constant (limits rescaled accordingly).
inline DiffusionSpec scaled_copy(const DiffusionSpec& spec, double lambda) {
    const ScaleModel& S = spec.scale;
    ScaleLimits lim;
    lim.s_lower = S.s_lower() * lambda;
    lim.s_upper = S.s_upper() * lambda;
    lim.upper_growth = std::isinf(S.upper_growth())
                           ? S.upper_growth()
                           : S.upper_growth() / lambda;
    lim.lower_growth = std::isinf(S.lower_growth())
                           ? S.lower_growth()
                           : S.lower_growth() / lambda;
    DiffusionSpec out = spec;
    RealFn deriv;
    if (S.has_closed_deriv())
        deriv = [S, lambda, iv = spec.interval](double x) {
            return lambda * S.deriv(iv, x);
        };
    out.scale = ScaleModel::make(
        spec.interval, [S, lambda](double x) { return lambda * S(x); }, deriv,
        S.kind(), S.breakpoints(), lim);
    return out;
}

} // namespace varstop::testspec
