#include "varstop/diffusion.hpp"

#include "varstop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace varstop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double compactify(const StateInterval& iv, double u) {
    // u in (0,1) -> state in (alpha, beta)
    const bool lo_inf = std::isinf(iv.alpha);
    const bool hi_inf = std::isinf(iv.beta);
    if (!lo_inf && !hi_inf) return iv.alpha + u * (iv.beta - iv.alpha);
    if (lo_inf && hi_inf) {
        const double t = std::tan(M_PI * (u - 0.5));
        return 10.0 * t;
    }
    if (hi_inf) {
        const double s = 1.0 + std::abs(iv.alpha);
        return iv.alpha + s * u / (1.0 - u);
    }
    const double s = 1.0 + std::abs(iv.beta);
    return iv.beta - s * (1.0 - u) / u;
}

} // namespace

std::vector<double> interior_grid(const StateInterval& iv, int n) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        const double u = static_cast<double>(i) / (n + 1);
        g.push_back(compactify(iv, u));
    }
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

namespace {

// 1024-point strict-increase screen with refinement around near-ties. A
// violation is re-examined on fresh sample points before concluding, so an
// isolated unevaluable point (a removable singularity of a piecewise
// expression) does not condemn an otherwise increasing scale.
void screen_monotone(const RealFn& f, const StateInterval& iv) {
    const auto grid = interior_grid(iv, 1024);
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = f(grid[i]);

    auto pair_ok = [&](double v0, double v1) {
        if (std::isnan(v0) || std::isnan(v1)) return false;
        if (std::isinf(v0) || std::isinf(v1)) return true; // out of range
        const double tol = 1e-12 * std::max({std::abs(v0), std::abs(v1), 1e-30});
        return v1 - v0 > tol;
    };

    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (pair_ok(vals[i], vals[i + 1])) continue;
        const double lo = grid[i > 0 ? i - 1 : 0];
        const double hi = grid[std::min(i + 2, grid.size() - 1)];
        double prev = -std::numeric_limits<double>::infinity();
        bool fresh_ok = true;
        bool have_prev = false;
        for (int k = 0; k <= 48; ++k) {
            const double x = lo + (hi - lo) * (k + 0.371) / 49.0;
            const double v = f(x);
            if (std::isnan(v)) {
                fresh_ok = false;
                break;
            }
            if (std::isinf(v)) continue;
            if (have_prev && !(v > prev)) {
                fresh_ok = false;
                break;
            }
            prev = v;
            have_prev = true;
        }
        if (!fresh_ok) {
            std::ostringstream os;
            os << "scale is not strictly increasing near x in [" << lo << ", "
               << hi << "]";
            throw NonMonotoneScale(os.str());
        }
    }
}

double require_declared_or(const std::optional<double>& declared,
                           const LimitEstimate& est, const char* what,
                           bool& used_extrapolation) {
    if (declared) return *declared;
    used_extrapolation = true;
    switch (est.kind) {
    case LimitEstimate::Kind::Finite: return est.value;
    case LimitEstimate::Kind::PlusInfinity: return kInf;
    case LimitEstimate::Kind::MinusInfinity: return -kInf;
    case LimitEstimate::Kind::Undetermined: break;
    }
    throw LimitUndetermined(std::string("endpoint limit undetermined: ") + what);
}

// Growth limits b^2/S(b) and a^2/(-S(a)) are nonnegative by construction;
// an extrapolation that drifts negative is a slow decay and is only accepted
// when the samples themselves have decayed convincingly.
double resolve_growth(const std::optional<double>& declared, const RealFn& g,
                      bool toward_minus, bool& used_extrapolation,
                      const char* what) {
    if (declared) return *declared;
    used_extrapolation = true;

    std::vector<double> samples;
    double running_max = 0.0;
    const int n = 44;
    for (int k = 0; k < n; ++k) {
        const double t = (toward_minus ? -1.0 : 1.0) * 8.0 * std::pow(2.0, k);
        const double v = g(t);
        if (std::isnan(v)) break;
        samples.push_back(v);
        running_max = std::max(running_max, v);
        if (std::isinf(v)) break;
    }
    if (samples.empty())
        throw LimitUndetermined(std::string("growth limit unsampleable: ") + what);
    if (std::isinf(samples.back())) return kInf;

    const LimitEstimate est = extrapolate_limit(samples);
    if (est.kind == LimitEstimate::Kind::PlusInfinity) return kInf;
    if (est.kind == LimitEstimate::Kind::Finite) {
        if (est.value <= 1e-9 * std::max(running_max, 1e-30)) return 0.0;
        if (est.value > 0.0) return est.value;
        return 0.0;
    }
    // Undetermined or drifted negative: accept zero only on decisive decay.
    if (samples.back() <= 1e-9 * std::max(running_max, 1e-30)) return 0.0;
    throw LimitUndetermined(std::string("growth limit undetermined: ") + what);
}

} // namespace

ScaleModel ScaleModel::make(const StateInterval& iv, RealFn eval, RealFn deriv,
                            ScaleKind kind, std::vector<double> breakpoints,
                            ScaleLimits declared) {
    if (!(iv.alpha < iv.beta)) throw DomainError("empty state interval");
    ScaleModel m;
    m.raw_ = std::move(eval);
    m.deriv_ = std::move(deriv);
    m.kind_ = kind;
    m.breakpoints_ = std::move(breakpoints);
    std::sort(m.breakpoints_.begin(), m.breakpoints_.end());

    screen_monotone(m.raw_, iv);

    bool extrapolated = false;

    // Lower endpoint: finite limit normalizes to zero.
    double s_lower_raw;
    if (declared.s_lower) {
        s_lower_raw = *declared.s_lower;
    } else {
        LimitEstimate est;
        if (std::isinf(iv.alpha)) {
            est = limit_at_minus_infinity(m.raw_, 8.0);
        } else {
            est = limit_at_finite(m.raw_, iv.alpha, true,
                                  0.05 * std::min(1.0, iv.beta - iv.alpha));
        }
        s_lower_raw = require_declared_or(std::nullopt, est, "S(alpha)",
                                          extrapolated);
    }
    if (s_lower_raw == kInf)
        throw NonMonotoneScale("S(alpha) = +inf contradicts monotonicity");
    if (std::isfinite(s_lower_raw)) {
        m.offset_ = s_lower_raw;
        m.s_lower_ = 0.0;
    } else {
        m.offset_ = 0.0;
        m.s_lower_ = -kInf;
    }

    const RealFn norm = [raw = m.raw_, off = m.offset_](double x) {
        return raw(x) - off;
    };

    // Upper endpoint.
    double s_upper_raw;
    if (declared.s_upper) {
        s_upper_raw = *declared.s_upper;
    } else {
        LimitEstimate est;
        if (std::isinf(iv.beta)) {
            est = limit_at_infinity(m.raw_, std::max(8.0, 2.0 * std::abs(iv.alpha)));
        } else {
            est = limit_at_finite(m.raw_, iv.beta, false,
                                  0.05 * std::min(1.0, iv.beta - iv.alpha));
        }
        s_upper_raw = require_declared_or(std::nullopt, est, "S(beta)",
                                          extrapolated);
    }
    if (s_upper_raw == -kInf)
        throw NonMonotoneScale("S(beta) = -inf contradicts monotonicity");
    m.s_upper_ = std::isfinite(s_upper_raw) ? s_upper_raw - m.offset_ : kInf;
    if (m.s_upper_ <= 0.0 && std::isfinite(m.s_upper_) && m.s_lower_ == 0.0)
        throw NonMonotoneScale("S(beta) <= S(alpha)");

    // Quadratic growth limits, only meaningful toward an unbounded,
    // non-attractive endpoint.
    m.upper_growth_ = 0.0;
    if (std::isinf(iv.beta) && m.s_upper_ == kInf) {
        m.upper_growth_ = resolve_growth(
            declared.upper_growth,
            [&](double b) { return b * b / norm(b); }, false, extrapolated,
            "b^2/S(b)");
    }
    m.lower_growth_ = 0.0;
    if (std::isinf(iv.alpha) && m.s_lower_ == -kInf) {
        m.lower_growth_ = resolve_growth(
            declared.lower_growth,
            [&](double a) { return a * a / (-norm(a)); }, true, extrapolated,
            "a^2/(-S(a))");
    }

    m.used_extrapolation_ = extrapolated;
    return m;
}

ScaleModel ScaleModel::trusted(RealFn eval, RealFn deriv, ScaleKind kind,
                               std::vector<double> breakpoints, double s_lower,
                               double s_upper,
                               std::optional<double> upper_growth,
                               std::optional<double> lower_growth) {
    ScaleModel m;
    m.raw_ = std::move(eval);
    m.deriv_ = std::move(deriv);
    m.kind_ = kind;
    m.breakpoints_ = std::move(breakpoints);
    std::sort(m.breakpoints_.begin(), m.breakpoints_.end());
    m.offset_ = 0.0;
    m.s_lower_ = s_lower;
    m.s_upper_ = s_upper;
    m.upper_growth_ = upper_growth.value_or(0.0);
    m.lower_growth_ = lower_growth.value_or(0.0);
    return m;
}

double ScaleModel::operator()(double x) const { return raw_(x) - offset_; }

double ScaleModel::deriv(const StateInterval& iv, double x) const {
    if (deriv_) return deriv_(x);
    const double h = 1e-6 * std::max(std::abs(x), 1e-6);
    // one-sided away from the nearest breakpoint
    for (double bp : breakpoints_) {
        if (std::abs(x - bp) <= 2.0 * h) {
            if (x >= bp && x + 2.0 * h < iv.beta) {
                return (-3.0 * raw_(x) + 4.0 * raw_(x + h) - raw_(x + 2.0 * h)) /
                       (2.0 * h);
            }
            if (x - 2.0 * h > iv.alpha) {
                return (3.0 * raw_(x) - 4.0 * raw_(x - h) + raw_(x - 2.0 * h)) /
                       (2.0 * h);
            }
        }
    }
    const double lo = std::max(x - h, iv.alpha);
    const double hi = std::min(x + h, iv.beta);
    return (raw_(hi) - raw_(lo)) / (hi - lo);
}

std::string regime_name(Regime r) {
    switch (r) {
    case Regime::InfiniteValue: return "InfiniteValue";
    case Regime::RecurrentBounded: return "RecurrentBounded";
    case Regime::CaseI: return "CaseI";
    case Regime::CaseII: return "CaseII";
    case Regime::CaseIII: return "CaseIII";
    case Regime::SpecialTransientI: return "SpecialTransientI";
    case Regime::SpecialTransientII: return "SpecialTransientII";
    case Regime::UnsupportedMarginal: return "UnsupportedMarginal";
    }
    return "?";
}

Classification classify(const DiffusionSpec& spec, double x) {
    const auto& iv = spec.interval;
    if (!iv.contains(x)) throw DomainError("classify: x outside (alpha, beta)");
    const auto& S = spec.scale;

    Classification cls;
    cls.attractive_lower = S.s_lower() == 0.0;
    cls.attractive_upper = std::isfinite(S.s_upper());
    cls.used_extrapolated_limits = S.used_extrapolation();

    const double Sx = S(x);

    // limit of b^2 P_x(tau_b < inf) toward the upper endpoint
    const double p_up_lim = cls.attractive_lower
                                ? (cls.attractive_upper ? Sx / S.s_upper() : 0.0)
                                : 1.0;
    if (std::isinf(iv.beta)) {
        if (cls.attractive_upper || !cls.attractive_lower) {
            cls.limit_upper = kInf; // positive limit probability at b = inf
        } else {
            cls.limit_upper = S.upper_growth() * Sx; // S(x) * lim b^2/S(b)
        }
    } else {
        cls.limit_upper =
            cls.attractive_upper ? iv.beta * iv.beta * p_up_lim : 0.0;
    }

    // lim_{a->alpha} P_x(tau_a < inf) = (S(beta)-S(x))/(S(beta)-S(alpha))
    const double p_lo_lim =
        cls.attractive_upper
            ? (cls.attractive_lower ? 1.0 - Sx / S.s_upper() : 0.0)
            : 1.0;
    if (std::isinf(iv.alpha)) {
        if (cls.attractive_lower || !cls.attractive_upper) {
            cls.limit_lower = kInf;
        } else {
            cls.limit_lower = S.lower_growth() * (S.s_upper() - Sx);
        }
    } else {
        cls.limit_lower =
            cls.attractive_lower ? iv.alpha * iv.alpha * p_lo_lim : 0.0;
    }

    // Regime decision tree.
    if (!cls.attractive_lower && !cls.attractive_upper) {
        cls.tag = (std::isinf(iv.alpha) || std::isinf(iv.beta))
                      ? Regime::InfiniteValue
                      : Regime::RecurrentBounded;
        return cls;
    }
    if ((cls.attractive_lower && std::isinf(iv.alpha)) ||
        (cls.attractive_upper && std::isinf(iv.beta))) {
        cls.tag = Regime::InfiniteValue; // attractive unbounded endpoint
        return cls;
    }
    if (cls.attractive_lower && cls.attractive_upper) {
        cls.tag = Regime::CaseIII;
        return cls;
    }
    if (cls.attractive_lower) {
        if (!std::isinf(iv.beta)) {
            cls.tag = Regime::CaseI;
        } else if (S.upper_growth() == 0.0) {
            cls.tag = Regime::CaseI;
        } else if (std::isinf(S.upper_growth())) {
            cls.tag = Regime::InfiniteValue;
        } else {
            cls.tag = Regime::SpecialTransientI;
        }
        return cls;
    }
    // attractive upper only
    if (!std::isinf(iv.alpha)) {
        cls.tag = Regime::CaseII;
    } else if (S.lower_growth() == 0.0) {
        cls.tag = Regime::CaseII;
    } else if (std::isinf(S.lower_growth())) {
        cls.tag = Regime::InfiniteValue;
    } else {
        cls.tag = Regime::SpecialTransientII;
    }
    return cls;
}

std::pair<double, double> hit_prob(const DiffusionSpec& spec, double x,
                                   double a, double b) {
    const auto& iv = spec.interval;
    if (!(a < x && x < b) || a < iv.alpha || b > iv.beta)
        throw DomainError("hit_prob: need alpha <= a < x < b <= beta");
    const auto& S = spec.scale;
    const double Sa = (a == iv.alpha) ? S.s_lower() : S(a);
    const double Sb = (b == iv.beta) ? S.s_upper() : S(b);
    const double Sx = S(x);
    if (std::isinf(Sa) && std::isinf(Sb)) {
        throw Unbounded("hit_prob: both scale limits infinite (recurrent span)");
    }
    if (std::isinf(Sb)) return {1.0, 0.0};
    if (std::isinf(Sa)) return {0.0, 1.0};
    const double den = Sb - Sa;
    double p_up = (Sx - Sa) / den;
    p_up = std::clamp(p_up, 0.0, 1.0);
    return {1.0 - p_up, p_up};
}

double exit_mean(const DiffusionSpec& spec, double x, double a, double b) {
    if (a == x || b == x) return x; // immediate absorption
    const auto [p_lo, p_up] = hit_prob(spec, x, a, b);
    if (p_lo > 0.0 && std::isinf(a))
        throw Unbounded("exit_mean: mass at an infinite lower endpoint");
    if (p_up > 0.0 && std::isinf(b))
        throw Unbounded("exit_mean: mass at an infinite upper endpoint");
    const double lo = p_lo > 0.0 ? a : 0.0;
    const double hi = p_up > 0.0 ? b : 0.0;
    return lo * p_lo + hi * p_up;
}

double exit_variance(const DiffusionSpec& spec, double x, double a, double b) {
    if (a == x || b == x) return 0.0;
    const auto [p_lo, p_up] = hit_prob(spec, x, a, b);
    if (p_lo > 0.0 && std::isinf(a))
        throw Unbounded("exit_variance: mass at an infinite lower endpoint");
    if (p_up > 0.0 && std::isinf(b))
        throw Unbounded("exit_variance: mass at an infinite upper endpoint");
    if (p_lo == 0.0 || p_up == 0.0) return 0.0;
    return (b - a) * (b - a) * p_lo * p_up;
}

std::pair<DiffusionSpec, AffineMap> translate_to_zero(const DiffusionSpec& spec) {
    const auto& iv = spec.interval;
    if (std::isinf(iv.alpha))
        throw DomainError("translate_to_zero: alpha must be finite");
    const AffineMap back{1.0, iv.alpha};
    if (iv.alpha == 0.0) return {spec, back};

    const double alpha = iv.alpha;
    const ScaleModel& S = spec.scale;
    std::vector<double> bps;
    for (double bp : S.breakpoints()) bps.push_back(bp - alpha);

    DiffusionSpec out;
    out.interval = {0.0, iv.beta - alpha, iv.lower_behavior, iv.upper_behavior};
    RealFn deriv;
    if (S.has_closed_deriv()) {
        deriv = [S, alpha, iv](double y) { return S.deriv(iv, y + alpha); };
    }
    out.scale = ScaleModel::trusted(
        [S, alpha](double y) { return S(y + alpha); }, deriv, S.kind(),
        std::move(bps), S.s_lower(), S.s_upper(), S.upper_growth(),
        S.lower_growth());
    if (spec.drift)
        out.drift = [f = *spec.drift, alpha](double y) { return f(y + alpha); };
    if (spec.vol)
        out.vol = [f = *spec.vol, alpha](double y) { return f(y + alpha); };
    if (spec.speed)
        out.speed = [f = *spec.speed, alpha](double y) { return f(y + alpha); };
    return {std::move(out), back};
}

std::pair<DiffusionSpec, AffineMap> reflect(const DiffusionSpec& spec) {
    const auto& iv = spec.interval;
    if (std::isinf(iv.beta)) throw DomainError("reflect: beta must be finite");
    const double beta = iv.beta;
    const ScaleModel& S = spec.scale;
    const double s_beta = S.s_upper();
    if (!std::isfinite(s_beta))
        throw DomainError("reflect: S(beta) must be finite");

    const AffineMap back{-1.0, beta}; // x = beta - z

    std::vector<double> bps;
    for (double bp : S.breakpoints()) bps.push_back(beta - bp);

    // Reflected scale vanishes at its lower boundary.
    const double new_s_upper =
        std::isinf(S.s_lower()) ? kInf : s_beta - S.s_lower();

    DiffusionSpec out;
    out.interval = {0.0, beta - iv.alpha, iv.upper_behavior, iv.lower_behavior};
    RealFn deriv;
    if (S.has_closed_deriv()) {
        deriv = [S, beta, iv](double z) { return S.deriv(iv, beta - z); };
    }
    out.scale = ScaleModel::trusted(
        [S, beta, s_beta](double z) { return s_beta - S(beta - z); }, deriv,
        S.kind(), std::move(bps), 0.0, new_s_upper, S.lower_growth(),
        std::nullopt);
    if (spec.drift)
        out.drift = [f = *spec.drift, beta](double z) { return -f(beta - z); };
    if (spec.vol)
        out.vol = [f = *spec.vol, beta](double z) {
            return std::abs(f(beta - z));
        };
    if (spec.speed)
        out.speed = [f = *spec.speed, beta](double z) { return f(beta - z); };
    return {std::move(out), back};
}

double scale_inverse(const DiffusionSpec& spec, double s) {
    const auto& iv = spec.interval;
    const auto& S = spec.scale;
    if (s <= S.s_lower() || s >= S.s_upper())
        throw DomainError("scale_inverse: value outside the scale range");

    // Bracket the target.
    double lo, hi;
    if (std::isinf(iv.alpha)) {
        lo = std::isinf(iv.beta) ? -1.0 : iv.beta - 1.0;
        while (S(lo) > s) lo = std::isinf(iv.beta) ? 2.0 * lo - 1.0
                                                   : iv.beta - 2.0 * (iv.beta - lo);
    } else {
        lo = iv.alpha;
    }
    if (std::isinf(iv.beta)) {
        hi = std::max(1.0, lo + 1.0);
        while (S(hi) < s) hi *= 2.0;
    } else {
        hi = iv.beta;
    }

    const double span = hi - lo;
    double a = lo, b = hi;
    for (int i = 0; i < 64 && (b - a) > 1e-12 * span; ++i) {
        const double m = 0.5 * (a + b);
        const double v =
            (m <= iv.alpha) ? S.s_lower() : (m >= iv.beta ? S.s_upper() : S(m));
        if (v < s)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

DiffusionSpec gbm(double mu, double sigma) {
    if (sigma <= 0.0) throw DomainError("gbm: sigma must be positive");
    const double kappa = 1.0 - 2.0 * mu / (sigma * sigma);
    DiffusionSpec spec;
    spec.interval = {0.0, kInf, BoundaryKind::Natural, BoundaryKind::Natural};

    ScaleLimits lim;
    RealFn eval, deriv;
    if (kappa == 0.0) {
        eval = [](double x) { return std::log(x); };
        deriv = [](double x) { return 1.0 / x; };
        lim.s_lower = -kInf;
        lim.s_upper = kInf;
    } else {
        eval = [kappa](double x) { return std::pow(x, kappa) / kappa; };
        deriv = [kappa](double x) { return std::pow(x, kappa - 1.0); };
        if (kappa > 0.0) {
            lim.s_lower = 0.0;
            lim.s_upper = kInf;
            if (kappa > 2.0)
                lim.upper_growth = 0.0;
            else if (kappa == 2.0)
                lim.upper_growth = 2.0;
            else
                lim.upper_growth = kInf;
        } else {
            lim.s_lower = -kInf;
            lim.s_upper = 0.0;
        }
    }
    spec.scale = ScaleModel::make(spec.interval, eval, deriv,
                                  ScaleKind::ClosedForm, {}, lim);
    spec.drift = [mu](double x) { return mu * x; };
    spec.vol = [sigma](double x) { return sigma * x; };
    return spec;
}

DiffusionSpec jacobi(double a, double b, double sigma) {
    const double s2 = sigma * sigma;
    if (!(a > 0.0 && b > a) || sigma <= 0.0)
        throw DomainError("jacobi: require 0 < a < b and sigma > 0");
    if (!(2.0 * a < s2 && 2.0 * (b - a) < s2))
        throw DomainError("jacobi: require 2a < sigma^2 and 2(b-a) < sigma^2 "
                          "for the explicit scale");
    const double p = 1.0 - 2.0 * a / s2;          // -B
    const double q = 1.0 - 2.0 * (b - a) / s2;    // -A
    const RealFn density = [p, q](double t) {
        return std::pow(t, p - 1.0) * std::pow(1.0 - t, q - 1.0);
    };
    // Integrate so that every piece is singular at its left endpoint only;
    // the quadrature samples left-endpoint offsets at full precision. The
    // upper half is substituted u = 1 - t.
    const RealFn mirrored = [p, q](double u) {
        return std::pow(u, q - 1.0) * std::pow(1.0 - u, p - 1.0);
    };
    const double s_half = integrate_tanh_sinh(density, 0.0, 0.5);
    const double s_total = s_half + integrate_tanh_sinh(mirrored, 0.0, 0.5);
    const RealFn eval = [density, mirrored, s_total](double x) {
        if (x <= 0.5) return integrate_tanh_sinh(density, 0.0, x);
        return s_total - integrate_tanh_sinh(mirrored, 0.0, 1.0 - x);
    };

    DiffusionSpec spec;
    spec.interval = {0.0, 1.0, BoundaryKind::Natural, BoundaryKind::Natural};
    ScaleLimits lim;
    lim.s_lower = 0.0;
    lim.s_upper = s_total;
    spec.scale = ScaleModel::make(spec.interval, eval, density,
                                  ScaleKind::ClosedForm, {}, lim);
    spec.drift = [a, b](double x) { return a - b * x; };
    spec.vol = [sigma](double x) {
        return sigma * std::sqrt(std::max(x * (1.0 - x), 0.0));
    };
    return spec;
}

DiffusionSpec natural_scale(double alpha, double beta) {
    DiffusionSpec spec;
    spec.interval = {alpha, beta, BoundaryKind::Natural, BoundaryKind::Natural};
    ScaleLimits lim;
    lim.s_lower = std::isinf(alpha) ? -kInf : alpha;
    lim.s_upper = std::isinf(beta) ? kInf : beta;
    if (std::isinf(beta)) lim.upper_growth = kInf; // b^2/b
    if (std::isinf(alpha)) lim.lower_growth = kInf;
    spec.scale =
        ScaleModel::make(spec.interval, [](double x) { return x; },
                         [](double) { return 1.0; }, ScaleKind::ClosedForm, {},
                         lim);
    return spec;
}

DiffusionSpec tie_diffusion() {
    // Four rational/exponential pieces sharing the numerator x^2 - 1.5x; the
    // denominator's dip-and-recovery creates two ratio maximizers. The first
    // branch reduces algebraically to x/4. The middle breakpoint sits at the
    // denominators' crossing 21.2/10.1 so the scale stays strictly increasing.
    const double b1 = 2.0;
    const double b2 = 21.2 / 10.1;
    const double b3 = 12.0;
    const RealFn eval = [=](double x) {
        const double n = x * x - 1.5 * x;
        if (x < b1) return 0.25 * x;
        if (x < b2) return n / (-10.0 * x + 22.0);
        if (x < b3) return n / (0.1 * x + 0.8);
        return n / (2.0 * std::exp(12.0 - x));
    };
    const RealFn deriv = [=](double x) {
        const double n = x * x - 1.5 * x;
        const double np = 2.0 * x - 1.5;
        if (x < b1) return 0.25;
        if (x < b2) {
            const double d = -10.0 * x + 22.0;
            return (np * d + 10.0 * n) / (d * d);
        }
        if (x < b3) {
            const double d = 0.1 * x + 0.8;
            return (np * d - 0.1 * n) / (d * d);
        }
        const double d = 2.0 * std::exp(12.0 - x);
        return (np + n) / d;
    };

    DiffusionSpec spec;
    spec.interval = {0.0, kInf, BoundaryKind::Natural, BoundaryKind::Natural};
    ScaleLimits lim;
    lim.s_lower = 0.0;
    lim.s_upper = kInf;
    lim.upper_growth = 0.0;
    spec.scale = ScaleModel::make(spec.interval, eval, deriv,
                                  ScaleKind::PiecewiseAnalytic, {b1, b2, b3},
                                  lim);
    return spec;
}

DiffusionSpec custom_scale(StateInterval iv, std::vector<ScalePiece> pieces,
                           ScaleLimits declared,
                           std::optional<Expression> drift,
                           std::optional<Expression> vol) {
    if (pieces.empty()) throw ConfigError("custom scale: no pieces");
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        if (!(pieces[i].upto < pieces[i + 1].upto))
            throw ConfigError("custom scale: breakpoints must be increasing");
    }
    if (pieces.back().upto < iv.beta)
        throw ConfigError("custom scale: pieces do not cover the interval");

    std::vector<double> bps;
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
        bps.push_back(pieces[i].upto);

    auto shared = std::make_shared<std::vector<ScalePiece>>(std::move(pieces));
    const RealFn eval = [shared](double x) {
        for (const auto& p : *shared) {
            if (x < p.upto) return p.expr(x);
        }
        return shared->back().expr(x);
    };

    DiffusionSpec spec;
    spec.interval = iv;
    spec.scale = ScaleModel::make(iv, eval, nullptr,
                                  ScaleKind::PiecewiseAnalytic, std::move(bps),
                                  declared);
    if (drift) spec.drift = [e = *drift](double x) { return e(x); };
    if (vol) spec.vol = [e = *vol](double x) { return e(x); };
    return spec;
}

} // namespace varstop
