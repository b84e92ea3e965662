#include "netrate/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace netrate {

namespace {

double halley_step(double w, double x) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    return w - f / denom;
}

}  // namespace

double lambert_w(double x) {
    if (!std::isfinite(x) || x < 0.0)
        throw std::invalid_argument("lambert_w: requires finite x >= 0");
    if (x == 0.0) return 0.0;

    // log-based seed: tight for large x, adequate everywhere on [0, inf)
    double w;
    if (x > 2.5) {
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    } else {
        w = std::log1p(x) * 0.7;
    }

    const double target = 1e-13 * std::max(1.0, x);
    for (int it = 0; it < 60; ++it) {
        const double next = halley_step(w, x);
        if (!std::isfinite(next)) break;
        const double resid = std::abs(next * std::exp(next) - x);
        w = next;
        if (resid <= target) return w;
    }

    // bisection fallback: g(w) = w e^w - x is strictly increasing for w >= 0
    double lo = 0.0;
    double hi = std::max(1.0, std::log1p(x) + 1.0);
    while (hi * std::exp(hi) < x) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid * std::exp(mid) < x)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

struct SimpsonCtx {
    const std::function<double(double)>& f;
};

double adaptive_simpson(const SimpsonCtx& ctx, double a, double b, double fa,
                        double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = ctx.f(lm);
    const double frm = ctx.f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0)
        throw std::runtime_error("integrate: refinement depth exhausted");
    return adaptive_simpson(ctx, a, m, fa, flm, fm, left, 0.5 * tol,
                            depth - 1) +
           adaptive_simpson(ctx, m, b, fm, frm, fb, right, 0.5 * tol,
                            depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, RealInterval iv,
                 double tol, double decay_scale) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || !std::isfinite(iv.lo))
        throw std::invalid_argument("integrate: bad interval");
    if (tol <= 0.0) throw std::invalid_argument("integrate: tol must be > 0");

    double hi = iv.hi;
    if (std::isinf(hi)) {
        if (decay_scale <= 0.0)
            throw std::invalid_argument(
                "integrate: infinite interval requires a decay hint");
        // truncate where the decay envelope is ~1e-20 of tol
        hi = iv.lo + decay_scale * (std::log(1.0 / tol) + 46.0);
    }
    if (hi < iv.lo) throw std::invalid_argument("integrate: hi < lo");
    if (hi == iv.lo) return 0.0;

    // seed with a uniform split so a bulge between the three Simpson points
    // of a single panel cannot be mistaken for a zero integrand
    const SimpsonCtx ctx{f};
    const int panels = 16;
    const double width = (hi - iv.lo) / panels;
    const double panel_tol = tol / panels;
    double total = 0.0;
    double a = iv.lo;
    double fa = f(a);
    for (int k = 1; k <= panels; ++k) {
        const double b = k == panels ? hi : iv.lo + width * k;
        const double fb = f(b);
        const double fm = f(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += adaptive_simpson(ctx, a, b, fa, fm, fb, whole, panel_tol, 56);
        a = b;
        fa = fb;
    }
    return total;
}

MaxResult maximize_1d(const std::function<double(double)>& f, RealInterval iv,
                      int coarse_points, int refinements) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.hi < iv.lo)
        throw std::invalid_argument("maximize_1d: bad interval");
    if (coarse_points < 2)
        throw std::invalid_argument("maximize_1d: need at least 2 points");
    if (iv.hi == iv.lo) return {iv.lo, f(iv.lo)};

    double lo = iv.lo;
    double hi = iv.hi;
    MaxResult best{lo, -std::numeric_limits<double>::infinity()};
    for (int pass = 0; pass <= refinements; ++pass) {
        const int n = coarse_points;
        int best_i = 0;
        double best_v = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= n; ++i) {
            const double x = lo + (hi - lo) * static_cast<double>(i) / n;
            const double v = f(x);
            if (v > best_v) {
                best_v = v;
                best_i = i;
            }
        }
        const double step = (hi - lo) / n;
        const double x_best = lo + step * best_i;
        if (best_v > best.value) best = {x_best, best_v};
        const double new_lo = std::max(iv.lo, x_best - step);
        const double new_hi = std::min(iv.hi, x_best + step);
        lo = new_lo;
        hi = new_hi;
    }
    return best;
}

}
