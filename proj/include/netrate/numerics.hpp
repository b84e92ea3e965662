#pragma once

#include <functional>

namespace netrate {

// Interval for integration/search. hi may be +infinity; operations that
// accept an infinite hi require an exponential decay hint (see integrate).
struct RealInterval {
    double lo;
    double hi;
};

// Principal-branch Lambert W for x >= 0.
// Guarantees |w*e^w - x| <= 1e-12 * max(1, x). Throws std::invalid_argument
// for negative or non-finite input.
double lambert_w(double x);

// Adaptive Simpson quadrature with absolute tolerance tol.
// For an infinite upper limit the caller must pass decay_scale > 0, promising
// |f(x)| falls off at least like exp(-x/decay_scale); the tail is truncated
// where that envelope drops far below tol. Throws std::runtime_error if the
// refinement depth is exhausted, std::invalid_argument on a bad interval.
double integrate(const std::function<double(double)>& f, RealInterval iv,
                 double tol, double decay_scale = 0.0);

struct MaxResult {
    double arg;
    double value;
};

// Grid-plus-refinement 1-D maximization on a bounded interval: a coarse
// uniform grid, then repeated re-gridding of the bracket around the best
// sample. Makes no unimodality assumption; returns the best sample seen.
MaxResult maximize_1d(const std::function<double(double)>& f, RealInterval iv,
                      int coarse_points = 256, int refinements = 4);

}
