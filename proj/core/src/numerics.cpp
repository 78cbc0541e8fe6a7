#include "varstop/numerics.hpp"

#include "varstop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace varstop {

double bisect_root(const RealFn& f, double lo, double hi, double flo,
                   double xtol, int max_iter) {
    if (!(lo < hi)) throw DomainError("bisect_root: empty bracket");
    double a = lo, b = hi, fa = flo;
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa < 0.0) == (fm < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

namespace {
constexpr double kInvPhi = 0.6180339887498949;  // 1/phi
constexpr double kInvPhi2 = 0.3819660112501051; // 1/phi^2
} // namespace

double golden_min(const RealFn& f, double a, double b, double xtol,
                  int max_iter) {
    double lo = a, hi = b;
    double c = lo + kInvPhi2 * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = lo + kInvPhi2 * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + kInvPhi * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

double golden_max(const RealFn& f, double a, double b, double xtol,
                  int max_iter) {
    return golden_min([&](double x) { return -f(x); }, a, b, xtol, max_iter);
}

double integrate_tanh_sinh(const RealFn& f, double a, double b, double rtol,
                           int max_level) {
    if (!(a < b)) return 0.0;
    // Substitution x = mid + r*tanh(pi/2 * sinh(t)), integrate over t. The
    // abscissa is carried as a distance from the nearer endpoint so that
    // integrable endpoint singularities are sampled at full precision.
    const double r = 0.5 * (b - a);
    const double tmax = 3.8; // tanh(pi/2*sinh(3.8)) saturates double precision

    auto node = [&](double t, double& x, double& w) {
        const double u = 0.5 * M_PI * std::sinh(t);
        const double ch = std::cosh(u);
        w = r * 0.5 * M_PI * std::cosh(t) / (ch * ch);
        // 1 - tanh(|u|) = 2 / (1 + exp(2|u|)), accurate near saturation
        const double d = 2.0 * r / (1.0 + std::exp(2.0 * std::abs(u)));
        x = (t >= 0.0) ? b - d : a + d;
    };

    auto eval = [&](double x, double w) -> double {
        if (x <= a || x >= b) return 0.0; // clamp roundoff at the endpoints
        const double v = f(x);
        if (!std::isfinite(v)) return 0.0; // integrable singularity touched
        return w * v;
    };

    double h = tmax;
    double x0, w0;
    node(0.0, x0, w0);
    double sum = eval(x0, w0);
    {
        double xp, wp;
        node(tmax, xp, wp);
        sum += eval(xp, wp);
        node(-tmax, xp, wp);
        sum += eval(xp, wp);
    }
    double estimate = h * sum;

    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        double add = 0.0;
        // new nodes are the odd multiples of h
        for (double t = h; t < tmax; t += 2.0 * h) {
            double x, w;
            node(t, x, w);
            add += eval(x, w);
            node(-t, x, w);
            add += eval(x, w);
        }
        sum += add;
        const double next = h * sum;
        const double scale = std::max(std::abs(next), 1e-300);
        if (level >= 4 && std::abs(next - estimate) <= rtol * scale) {
            return next;
        }
        estimate = next;
    }
    return estimate;
}

double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

LimitEstimate extrapolate_limit(std::span<const double> values) {
    LimitEstimate out;
    const std::size_t n = values.size();
    if (n < 4) return out;

    // Work on the most converged tail.
    const std::size_t tail = std::min<std::size_t>(n, 12);
    const double* v = values.data() + (n - tail);

    // Increments along the tail.
    std::vector<double> d(tail - 1);
    for (std::size_t i = 0; i + 1 < tail; ++i) d[i] = v[i + 1] - v[i];

    const double last = v[tail - 1];
    const double scale = std::max({std::abs(last), std::abs(v[0]), 1e-30});

    // Already flat at working precision.
    bool flat = true;
    for (std::size_t i = d.size() >= 4 ? d.size() - 4 : 0; i < d.size(); ++i) {
        if (std::abs(d[i]) > 1e-13 * scale) flat = false;
    }
    if (flat) {
        out.kind = LimitEstimate::Kind::Finite;
        out.value = last;
        return out;
    }

    // Ratio of successive increments decides convergence vs divergence.
    double ratio_acc = 0.0;
    int ratio_cnt = 0;
    bool same_sign = true;
    for (std::size_t i = d.size() >= 5 ? d.size() - 5 : 0; i + 1 < d.size();
         ++i) {
        if (d[i] == 0.0) continue;
        const double rho = d[i + 1] / d[i];
        ratio_acc += rho;
        ++ratio_cnt;
        if (rho < 0.0) same_sign = false;
    }
    if (ratio_cnt == 0) {
        out.kind = LimitEstimate::Kind::Finite;
        out.value = last;
        return out;
    }
    const double rho = ratio_acc / ratio_cnt;

    if (!std::isfinite(last)) {
        out.kind = last > 0 ? LimitEstimate::Kind::PlusInfinity
                            : LimitEstimate::Kind::MinusInfinity;
        return out;
    }

    if (same_sign && rho >= 0.95) {
        // Increments are not decaying: divergence in the increment direction.
        out.kind = d.back() > 0.0 ? LimitEstimate::Kind::PlusInfinity
                                  : LimitEstimate::Kind::MinusInfinity;
        return out;
    }
    if (rho > -0.95 && rho < 0.95) {
        // Geometric convergence; Aitken delta-squared on the last two windows
        // must agree for the result to count.
        auto aitken = [&](std::size_t i) {
            const double x0 = v[i], x1 = v[i + 1], x2 = v[i + 2];
            const double den = (x2 - x1) - (x1 - x0);
            if (std::abs(den) < 1e-300) return x2;
            return x2 - (x2 - x1) * (x2 - x1) / den;
        };
        const double e1 = aitken(tail - 3);
        const double e2 = aitken(tail - 4);
        const double e_scale = std::max({std::abs(e1), std::abs(e2), 1e-30});
        if (std::abs(e1 - e2) <= 1e-6 * e_scale + 1e-14 * scale) {
            out.kind = LimitEstimate::Kind::Finite;
            out.value = e1;
            return out;
        }
        // Slow but definite one-sided convergence still reads as finite when
        // increments shrink monotonically.
        bool shrinking = true;
        for (std::size_t i = 0; i + 1 < d.size(); ++i) {
            if (std::abs(d[i + 1]) > std::abs(d[i]) * 0.98) shrinking = false;
        }
        if (shrinking && same_sign) {
            out.kind = LimitEstimate::Kind::Finite;
            out.value = e1;
            return out;
        }
    }
    out.kind = LimitEstimate::Kind::Undetermined;
    return out;
}

namespace {

LimitEstimate sample_and_extrapolate(const std::function<double(int)>& point,
                                     const RealFn& f, int samples) {
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        const double v = f(point(k));
        if (std::isnan(v)) break;
        vals.push_back(v);
        if (std::isinf(v)) break;
    }
    if (!vals.empty() && std::isinf(vals.back())) {
        LimitEstimate out;
        out.kind = vals.back() > 0 ? LimitEstimate::Kind::PlusInfinity
                                   : LimitEstimate::Kind::MinusInfinity;
        return out;
    }
    return extrapolate_limit(vals);
}

} // namespace

LimitEstimate limit_at_finite(const RealFn& f, double endpoint, bool from_above,
                              double d0, int samples, double ratio) {
    const double sign = from_above ? 1.0 : -1.0;
    return sample_and_extrapolate(
        [&](int k) { return endpoint + sign * d0 * std::pow(ratio, k); }, f,
        samples);
}

LimitEstimate limit_at_infinity(const RealFn& f, double t0, int samples,
                                double growth) {
    return sample_and_extrapolate(
        [&](int k) { return t0 * std::pow(growth, k); }, f, samples);
}

LimitEstimate limit_at_minus_infinity(const RealFn& f, double t0, int samples,
                                      double growth) {
    return sample_and_extrapolate(
        [&](int k) { return -t0 * std::pow(growth, k); }, f, samples);
}

} // namespace varstop
