#include "varstop/embedded.hpp"

#include "varstop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace varstop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPlateauRel = 1e-10; // two maximizers tie within this

void require_canonical(const DiffusionSpec& spec) {
    if (std::isinf(spec.interval.alpha) || spec.scale.s_lower() != 0.0)
        throw DomainError("embedded: spec must be canonical (finite alpha, "
                          "S(alpha) = 0)");
}

double local_spacing(const EmbeddedGrid& grid, double z) {
    auto it = std::lower_bound(grid.z.begin(), grid.z.end(), z);
    if (it == grid.z.begin()) ++it;
    if (it == grid.z.end()) --it;
    const std::size_t j = static_cast<std::size_t>(it - grid.z.begin());
    return grid.z[j] - grid.z[j - 1];
}

} // namespace

double ratio(const DiffusionSpec& spec, double z, double c) {
    require_canonical(spec);
    const double alpha = spec.interval.alpha;
    if (!(z > alpha) || z >= spec.interval.beta)
        throw DomainError("ratio: z outside (alpha, beta)");
    const double s = spec.scale(z);
    return (z - alpha) * ((z + alpha) - 2.0 * c) / s;
}

EmbeddedGrid build_embedded_grid(const DiffusionSpec& spec, int n) {
    require_canonical(spec);
    const auto& iv = spec.interval;
    const auto& S = spec.scale;
    EmbeddedGrid grid;
    grid.asymptote = std::isinf(iv.beta) ? S.upper_growth() : 0.0;

    if (std::isfinite(iv.beta)) {
        grid.b_max = iv.beta;
        grid.z = interior_grid(iv, n);
        if (std::isfinite(S.s_upper())) {
            grid.z.push_back(iv.beta);
            grid.beta_included = true;
        }
    } else {
        // Grow until the growth ratio has decayed (Case I) or stabilized at
        // its positive limit (special transient case).
        const double alpha = iv.alpha;
        double b = std::max(10.0 * (1.0 + std::abs(alpha)), alpha + 10.0);
        double gmax = 0.0;
        double prev = kInf;
        const double L = grid.asymptote;
        for (int k = 0; k < 48; ++k) {
            const double g = (b - alpha) * (b - alpha) / S(b);
            gmax = std::max(gmax, g);
            if (L == 0.0) {
                if (g < 1e-6 * gmax && k > 2) break;
            } else {
                if (std::abs(g - L) < 1e-6 * L && std::abs(prev - g) < 1e-9 * L)
                    break;
                prev = g;
            }
            b *= 2.0;
        }
        grid.b_max = b;
        // log-spaced offsets from alpha; the floor must stay well below the
        // unit scale of the problem even when b_max grew very large
        const double span = grid.b_max - alpha;
        const double d_lo =
            std::min(span * 1e-8, 1e-4 * (1.0 + std::abs(alpha)));
        const double lo = std::log(d_lo);
        const double hi = std::log(span);
        grid.z.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double t = lo + (hi - lo) * (i + 0.5) / n;
            grid.z.push_back(alpha + std::exp(t));
        }
    }

    for (double bp : S.breakpoints()) {
        if (bp > iv.alpha && bp < grid.b_max) grid.z.push_back(bp);
    }
    std::sort(grid.z.begin(), grid.z.end());
    grid.z.erase(std::unique(grid.z.begin(), grid.z.end()), grid.z.end());

    grid.s.resize(grid.z.size());
    std::size_t keep = 0;
    for (std::size_t j = 0; j < grid.z.size(); ++j) {
        const double s = S(grid.z[j]);
        if (s > 0.0 || std::isinf(s)) { // drop roundoff-zero scale values
            grid.z[keep] = grid.z[j];
            grid.s[keep] = s;
            ++keep;
        }
    }
    grid.z.resize(keep);
    grid.s.resize(keep);
    if (grid.z.size() < 16)
        throw DomainError("embedded grid: too few usable points");
    return grid;
}

namespace {

struct Peak {
    double z = 0.0;
    double value = -kInf;
    bool at_infinity = false;
};

double ratio_on(const DiffusionSpec& spec, double alpha, double z, double c) {
    const double s = spec.scale(z);
    if (!(s > 0.0)) return -kInf;
    return (z - alpha) * ((z + alpha) - 2.0 * c) / s;
}

// Golden refinement of a local maximum of the ratio inside [lo, hi], with a
// derivative-sign polish: comparisons of nearly equal ratio values limit
// golden to ~sqrt(eps) at smooth maxima, while the sign of d(ratio)/dz stays
// informative down to machine precision (and lands exactly on kinks).
Peak refine_peak(const DiffusionSpec& spec, double c, double lo, double hi) {
    const double alpha = spec.interval.alpha;
    const auto f = [&](double z) { return ratio_on(spec, alpha, z, c); };
    const double xtol = 1e-13 * (1.0 + std::abs(hi));
    double z = golden_max(f, lo, hi, xtol, 250);

    auto dsign = [&](double zz) {
        const double s = spec.scale(zz);
        const double sp = spec.scale.deriv(spec.interval, zz);
        const double num = (zz - alpha) * ((zz + alpha) - 2.0 * c);
        return (2.0 * zz - 2.0 * c) * s - num * sp;
    };
    const double w = 1e-5 * (1.0 + std::abs(z));
    double plo = std::max(lo, z - w);
    double phi = std::min(hi, z + w);
    if (plo < phi && dsign(plo) > 0.0 && dsign(phi) < 0.0) {
        for (int it = 0; it < 80 && (phi - plo) > 1e-16 * (1.0 + phi); ++it) {
            const double m = 0.5 * (plo + phi);
            if (dsign(m) > 0.0)
                plo = m;
            else
                phi = m;
        }
        const double zp = 0.5 * (plo + phi);
        if (f(zp) >= f(z)) z = zp;
    }

    Peak p;
    p.z = z;
    p.value = f(z);
    // a bracket edge (grid kink) can beat the interior point
    for (double cand : {lo, hi}) {
        const double v = f(cand);
        if (v > p.value) {
            p.z = cand;
            p.value = v;
        }
    }
    return p;
}

} // namespace

double refine_ratio_maximizer(const DiffusionSpec& spec, double c, double lo,
                              double hi) {
    return refine_peak(spec, c, lo, hi).z;
}

namespace {

std::vector<Peak> local_peaks(const DiffusionSpec& spec,
                              const EmbeddedGrid& grid, double c) {
    const double alpha = spec.interval.alpha;
    const std::size_t n = grid.z.size();
    std::vector<double> r(n);
    for (std::size_t j = 0; j < n; ++j) {
        r[j] = std::isinf(grid.s[j])
                   ? 0.0
                   : (grid.z[j] - alpha) * ((grid.z[j] + alpha) - 2.0 * c) /
                         grid.s[j];
    }
    std::vector<Peak> peaks;
    for (std::size_t j = 0; j < n; ++j) {
        const bool up = (j == 0) || r[j] >= r[j - 1];
        const bool down = (j + 1 == n) || r[j] >= r[j + 1];
        if (!(up && down)) continue;
        const double lo = grid.z[j == 0 ? 0 : j - 1];
        const double hi = grid.z[j + 1 == n ? j : j + 1];
        if (lo == hi) {
            peaks.push_back({grid.z[j], r[j], false});
        } else {
            peaks.push_back(refine_peak(spec, c, lo, hi));
        }
    }
    // grid endpoint of a finite attractive beta is a legitimate maximizer
    if (grid.beta_included && !peaks.empty()) {
        const double rb = r[n - 1];
        if (rb >= peaks.back().value) peaks.push_back({grid.z[n - 1], rb, false});
    }
    return peaks;
}

} // namespace

EmbeddedSolution maximizer_set(const DiffusionSpec& spec,
                               const EmbeddedGrid& grid, double c) {
    require_canonical(spec);
    EmbeddedSolution sol;
    sol.c = c;

    auto peaks = local_peaks(spec, grid, c);
    double best = -kInf;
    for (const auto& p : peaks) best = std::max(best, p.value);
    const bool has_asym = std::isinf(spec.interval.beta) && grid.asymptote > 0.0;
    if (has_asym) best = std::max(best, grid.asymptote);

    const double tol = kPlateauRel * std::max(std::abs(best), 1e-30);
    std::vector<double> zs;
    for (const auto& p : peaks) {
        if (best - p.value <= tol) zs.push_back(p.z);
    }
    std::sort(zs.begin(), zs.end());
    // merge refinement duplicates
    std::vector<double> merged;
    for (double z : zs) {
        if (merged.empty() || z - merged.back() > 1e-7 * (1.0 + std::abs(z)))
            merged.push_back(z);
    }
    sol.maximizers = std::move(merged);
    sol.at_infinity = has_asym && (best - grid.asymptote <= tol);
    sol.ratio_value = best;
    if (sol.maximizers.empty() && !sol.at_infinity)
        throw NoMaximizer("maximizer_set: no maximizer located");
    return sol;
}

EmbeddedSolution analyze_center(const DiffusionSpec& spec,
                                const EmbeddedGrid& grid, double c, double x) {
    EmbeddedSolution sol = maximizer_set(spec, grid, c);
    if (!sol.maximizers.empty() && x > sol.z_lo()) {
        sol.stopping_interval = stopping_set(spec, grid, c, x);
    }
    return sol;
}

double embedded_value(const DiffusionSpec& spec, const EmbeddedSolution& sol,
                      double x) {
    require_canonical(spec);
    const double alpha = spec.interval.alpha;
    const double z_top =
        sol.at_infinity ? kInf
                        : (sol.maximizers.empty() ? -kInf : sol.maximizers.back());
    if (x > z_top * (1.0 + 1e-12) + 1e-300)
        throw StartAboveMaximizer("embedded_value: x above the greatest "
                                  "maximizer; use the stopping-set path");
    return sol.ratio_value * spec.scale(x) + (alpha - sol.c) * (alpha - sol.c);
}

double embedded_value(const DiffusionSpec& spec, const EmbeddedGrid& grid,
                      double x, double c) {
    return embedded_value(spec, maximizer_set(spec, grid, c), x);
}

std::pair<double, double> stopping_set(const DiffusionSpec& spec,
                                       const EmbeddedGrid& grid, double c,
                                       double x) {
    require_canonical(spec);
    const auto& iv = spec.interval;
    if (!iv.contains(x)) throw DomainError("stopping_set: x outside interval");
    const double alpha = iv.alpha;

    const EmbeddedSolution sol = maximizer_set(spec, grid, c);
    const double z_top = sol.at_infinity ? grid.b_max : sol.maximizers.back();
    auto payoff = [&](double z) { return (z - c) * (z - c); };

    // Up to the greatest maximizer the majorant is the line through
    // (0, (alpha-c)^2) with slope ratio_value, so the contact set there is
    // read off as the zero set of phi = majorant - payoff.
    auto phi = [&](double z) {
        if (z <= alpha) return 0.0;
        return sol.ratio_value * spec.scale(z) +
               (alpha - c) * (alpha - c) - payoff(z);
    };
    const double hscale = std::max(payoff(alpha), payoff(z_top));
    const double ctol = 1e-11 * std::max(hscale, 1e-30);

    if (x <= z_top && phi(x) > ctol) {
        // Inside a continuation gap of the line segment. Contacts are touch
        // points of phi >= 0, located as refined local minima with phi ~ 0.
        const int kScan = 4000;
        auto probe = [&](int i) {
            return alpha + (z_top - alpha) * i / static_cast<double>(kScan);
        };
        std::vector<double> pv(kScan + 1);
        for (int i = 0; i <= kScan; ++i) pv[i] = phi(probe(i));
        const int ix = static_cast<int>(
            std::floor((x - alpha) / (z_top - alpha) * kScan));

        auto refined_contact = [&](int i, double& where) {
            const double lo = probe(std::max(i - 1, 0));
            const double hi = probe(std::min(i + 1, kScan));
            const double z =
                golden_min(phi, lo, hi, 1e-13 * (1.0 + std::abs(hi)), 250);
            const double v = std::min(phi(z), pv[i]);
            where = phi(z) <= pv[i] ? z : probe(i);
            return v <= ctol;
        };

        double a = alpha;
        for (int i = std::min(ix, kScan - 1); i >= 1; --i) {
            const bool is_min = pv[i] <= pv[i - 1] && pv[i] <= pv[i + 1];
            if (!is_min) continue;
            double where;
            if (refined_contact(i, where)) {
                a = where;
                break;
            }
        }
        double b = z_top;
        for (int i = ix + 1; i < kScan; ++i) {
            const bool is_min = pv[i] <= pv[i - 1] && pv[i] <= pv[i + 1];
            if (!is_min) continue;
            double where;
            if (refined_contact(i, where)) {
                b = where;
                break;
            }
        }
        return {a, b};
    }
    if (x <= z_top) return {x, x}; // already in the stopping set

    // Beyond the greatest maximizer: concavify the payoff tail in natural
    // scale (monotone-chain upper hull, anchored at the maximizer) and read
    // the contact run around x.
    const int kDense = 10000;
    struct Pt {
        double s, h, z;
    };
    std::vector<double> zs;
    zs.reserve(kDense + 8);
    const double tail_hi = grid.beta_included ? iv.beta : grid.b_max;
    if (!(x < tail_hi))
        throw TruncationError("stopping_set: x beyond the grid ceiling");
    for (int i = 0; i <= kDense; ++i) {
        zs.push_back(z_top + (tail_hi - z_top) * i / kDense);
    }
    for (double bp : spec.scale.breakpoints())
        if (bp > z_top && bp < tail_hi) zs.push_back(bp);
    zs.push_back(x);
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());

    std::vector<Pt> pts;
    pts.reserve(zs.size());
    for (double z : zs) {
        const double s = z >= iv.beta ? spec.scale.s_upper() : spec.scale(z);
        if (!std::isfinite(s)) continue;
        if (!pts.empty() && s <= pts.back().s) continue;
        pts.push_back({s, payoff(z), z});
    }
    const std::size_t n = pts.size();
    if (n < 8) throw TruncationError("stopping_set: degenerate payoff sample");

    std::vector<std::size_t> hull;
    auto cross = [&](std::size_t a, std::size_t b, std::size_t q) {
        return (pts[b].s - pts[a].s) * (pts[q].h - pts[a].h) -
               (pts[b].h - pts[a].h) * (pts[q].s - pts[a].s);
    };
    for (std::size_t i = 0; i < n; ++i) {
        while (hull.size() >= 2 &&
               cross(hull[hull.size() - 2], hull[hull.size() - 1], i) > 0.0)
            hull.pop_back();
        hull.push_back(i);
    }

    // contact flags against the hull
    double tail_scale = 0.0;
    for (const auto& p : pts) tail_scale = std::max(tail_scale, std::abs(p.h));
    const double tail_tol = 1e-9 * std::max(tail_scale, 1e-30);
    std::vector<bool> contact(n, false);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (seg + 1 < hull.size() && pts[hull[seg + 1]].s < pts[i].s) ++seg;
        double hv;
        if (seg + 1 >= hull.size()) {
            hv = pts[hull.back()].h;
        } else {
            const Pt& pa = pts[hull[seg]];
            const Pt& pb = pts[hull[seg + 1]];
            const double t = (pts[i].s - pa.s) / (pb.s - pa.s);
            hv = pa.h + t * (pb.h - pa.h);
        }
        contact[i] = (hv - pts[i].h) <= tail_tol;
    }

    std::size_t ix = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (pts[i].z == x) ix = i;

    if (contact[ix]) {
        // x lies in the stopping set: report its contact run
        std::size_t lo = ix, hi = ix;
        while (lo > 0 && contact[lo - 1]) --lo;
        while (hi + 1 < n && contact[hi + 1]) ++hi;
        double a = lo == 0 ? sol.maximizers.back() : pts[lo].z;
        double b = (hi + 1 == n && !grid.beta_included)
                       ? std::numeric_limits<double>::infinity()
                       : pts[hi].z;
        return {a, b};
    }
    std::size_t ia = ix, ib = ix;
    while (ia > 0 && !contact[ia]) --ia;
    while (ib + 1 < n && !contact[ib]) ++ib;
    if (!contact[ib])
        throw TruncationError("stopping_set: majorant still changing at the "
                              "grid ceiling");
    return {pts[ia].z, pts[ib].z};
}

bool assumption2_holds(const DiffusionSpec& spec, const EmbeddedSolution& sol) {
    require_canonical(spec);
    if (!sol.multiple())
        throw DomainError("assumption2_holds: needs multiple maximizers");
    const double alpha = spec.interval.alpha;
    if (sol.at_infinity) {
        // E_{z_lo}[X at exit of (alpha, z->inf)] -> alpha < c.
        return false;
    }
    const double z_lo = sol.z_lo();
    const double z_hi = sol.z_hi_finite();
    const double mean = exit_mean(spec, z_lo, alpha, z_hi);
    return mean > sol.c;
}

namespace {

struct Argmax {
    double z = 0.0;
    double value = -kInf;
    bool at_infinity = false;
};

Argmax greatest_maximizer(const DiffusionSpec& spec, const EmbeddedGrid& grid,
                          double c) {
    const double alpha = spec.interval.alpha;
    const std::size_t n = grid.z.size();
    double best = -kInf;
    std::size_t jbest = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double r =
            std::isinf(grid.s[j])
                ? 0.0
                : (grid.z[j] - alpha) * ((grid.z[j] + alpha) - 2.0 * c) /
                      grid.s[j];
        if (r > best) {
            best = r;
            jbest = j;
        }
    }
    // pick the greatest grid point attaining the max within tolerance
    const double tol = 1e-9 * std::max(std::abs(best), 1e-30);
    for (std::size_t j = n; j-- > 0;) {
        const double r =
            std::isinf(grid.s[j])
                ? 0.0
                : (grid.z[j] - alpha) * ((grid.z[j] + alpha) - 2.0 * c) /
                      grid.s[j];
        if (best - r <= tol) {
            jbest = j;
            break;
        }
    }
    const double lo = grid.z[jbest == 0 ? 0 : jbest - 1];
    const double hi = grid.z[jbest + 1 >= n ? n - 1 : jbest + 1];
    Argmax out;
    if (lo == hi) {
        out.z = grid.z[jbest];
        out.value = best;
    } else {
        const Peak p = refine_peak(spec, c, lo, hi);
        out.z = p.z;
        out.value = p.value;
    }
    if (grid.beta_included) {
        const double rb = ratio_on(spec, alpha, grid.z[n - 1], c);
        if (rb >= out.value) {
            out.z = grid.z[n - 1];
            out.value = rb;
        }
    }
    if (std::isinf(spec.interval.beta) && grid.asymptote > 0.0 &&
        grid.asymptote >= out.value - 1e-12 * std::abs(out.value)) {
        out.at_infinity = true;
        out.value = std::max(out.value, grid.asymptote);
    }
    return out;
}

} // namespace

ScanResult multi_maximizer_scan(const DiffusionSpec& spec,
                                const EmbeddedGrid& grid, double c_lo,
                                double c_hi, int n_c) {
    require_canonical(spec);
    ScanResult out;
    out.c_lo = c_lo;
    out.c_hi = c_hi;
    out.grid_points = n_c;
    if (!(c_lo < c_hi)) return out;

    std::vector<double> cs(static_cast<std::size_t>(n_c));
    for (int i = 0; i < n_c; ++i)
        cs[static_cast<std::size_t>(i)] = c_lo + (c_hi - c_lo) * i / (n_c - 1.0);

    std::vector<Argmax> zc(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i)
        zc[i] = greatest_maximizer(spec, grid, cs[i]);

    // Candidate jumps are screened generously; bisection plus the tie
    // validation below discards smooth drift of the maximizer curve.
    auto is_jump = [&](const Argmax& a, const Argmax& b) {
        if (a.at_infinity != b.at_infinity) return true;
        if (a.at_infinity) return false;
        const double spacing = local_spacing(grid, std::max(a.z, b.z));
        const double thr = std::max(0.01 * std::max(a.z, b.z), 6.0 * spacing);
        return std::abs(b.z - a.z) > thr;
    };
    auto near_jump = [&](const Argmax& a, const Argmax& b) {
        if (a.at_infinity || b.at_infinity) return false;
        const double spacing = local_spacing(grid, std::max(a.z, b.z));
        const double thr = std::max(0.01 * std::max(a.z, b.z), 6.0 * spacing);
        const double d = std::abs(b.z - a.z);
        return d > 0.5 * thr && d <= thr;
    };

    const double alpha = spec.interval.alpha;
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
        if (near_jump(zc[i], zc[i + 1])) out.resolution_warning = true;
        if (!is_jump(zc[i], zc[i + 1])) continue;

        double cl = cs[i], cr = cs[i + 1];
        Argmax left = zc[i], right = zc[i + 1];
        // bisect on the sign of (left peak value - right peak value); the
        // difference is linear in c with nonzero slope, so the tie center
        // resolves to machine precision
        auto peak_near = [&](double z0, double c) {
            const double spacing = local_spacing(grid, z0);
            const double lo =
                std::max(alpha + 0.25 * spacing, z0 - 2.0 * spacing);
            return refine_peak(spec, c, lo, z0 + 2.0 * spacing);
        };
        double zl_track = left.z;
        double zr_track = right.at_infinity ? 0.0 : right.z;
        for (int it = 0; it < 80 && (cr - cl) > 1e-16 * std::max(1.0, cr);
             ++it) {
            const double cm = 0.5 * (cl + cr);
            const Peak pl = peak_near(zl_track, cm);
            const double right_value =
                right.at_infinity ? grid.asymptote
                                  : peak_near(zr_track, cm).value;
            const bool left_side = pl.value > right_value;
            if (left_side) {
                cl = cm;
                zl_track = pl.z;
            } else {
                cr = cm;
                if (!right.at_infinity) zr_track = peak_near(zr_track, cm).z;
            }
        }
        const double cbar = 0.5 * (cl + cr);

        TieCenter tie;
        tie.c = cbar;
        tie.upper_at_infinity = right.at_infinity;
        // re-refine both competing peaks at the tie center
        auto polish = [&](double z0) {
            const double spacing = local_spacing(grid, z0);
            const double lo = std::max(alpha + 0.25 * spacing, z0 - 2.0 * spacing);
            const double hi = z0 + 2.0 * spacing;
            return refine_peak(spec, cbar, lo, hi);
        };
        const Peak pl = polish(zl_track);
        tie.z_lo = pl.z;
        tie.ratio_value = pl.value;
        if (right.at_infinity) {
            tie.z_hi = kInf;
            tie.ratio_value = std::max(tie.ratio_value, grid.asymptote);
            // a genuine tie dips strictly between the peak and the tail
            const double probe =
                ratio_on(spec, alpha, 4.0 * (tie.z_lo - alpha) + alpha, cbar);
            if (!(probe < tie.ratio_value * (1.0 - 1e-9))) continue;
            tie.assumption2 = false;
        } else {
            const Peak pr = polish(zr_track);
            tie.z_hi = pr.z;
            tie.ratio_value = std::max(tie.ratio_value, pr.value);
            // smooth drift collapses onto a single peak: not a tie
            const double sep_tol =
                std::max(6.0 * local_spacing(grid, tie.z_hi),
                         1e-3 * std::abs(tie.z_hi));
            if (!(tie.z_hi - tie.z_lo > sep_tol)) continue;
            // require a genuine dip of the ratio between the two maximizers;
            // a drifting single maximizer has its crest inside instead
            const double floor = std::min(pl.value, pr.value);
            double interior_max = -kInf;
            double dip = kInf;
            for (int j = 1; j < 32; ++j) {
                const double z = tie.z_lo + (tie.z_hi - tie.z_lo) * j / 32.0;
                const double r = ratio_on(spec, alpha, z, cbar);
                interior_max = std::max(interior_max, r);
                dip = std::min(dip, r);
            }
            const double vtol = 1e-10 * std::max(std::abs(floor), 1e-30);
            if (interior_max > floor + vtol) continue; // crest, not a tie
            if (!(dip < floor - vtol)) continue;       // no dip, not a tie
            tie.assumption2 =
                exit_mean(spec, tie.z_lo, alpha, tie.z_hi) > tie.c;
        }
        out.ties.push_back(tie);
    }
    std::sort(out.ties.begin(), out.ties.end(),
              [](const TieCenter& a, const TieCenter& b) { return a.c < b.c; });
    return out;
}

} // namespace varstop
