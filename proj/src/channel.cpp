#include "netrate/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "netrate/numerics.hpp"

namespace netrate {

namespace {

void require_finite_positive(double v, const char* what) {
    if (!std::isfinite(v) || v <= 0.0)
        throw std::invalid_argument(std::string(what) + " must be finite and > 0");
}

}  // namespace

double success_prob(double R, double P, double sigma2) {
    if (!std::isfinite(R) || R < 0.0)
        throw std::invalid_argument("success_prob: rate must be finite and >= 0");
    require_finite_positive(P, "success_prob: power");
    require_finite_positive(sigma2, "success_prob: sigma2");
    return std::exp(-std::expm1(kTwoLn2 * R) / (P * sigma2));
}

double erasure_prob(double R, double P, double sigma2) {
    return 1.0 - success_prob(R, P, sigma2);
}

double ergodic_capacity_csir(double P, double sigma2, double tol) {
    if (!std::isfinite(P) || P < 0.0)
        throw std::invalid_argument("ergodic_capacity_csir: power must be >= 0");
    require_finite_positive(sigma2, "ergodic_capacity_csir: sigma2");
    if (P == 0.0) return 0.0;
    const auto f = [P, sigma2](double h) {
        return 0.5 * std::log2(1.0 + h * P) * std::exp(-h / sigma2) / sigma2;
    };
    return integrate(f, {0.0, std::numeric_limits<double>::infinity()}, tol,
                     sigma2);
}

namespace {

double expint_e1(double x) { return -std::expint(-x); }

// E[[1/lambda - 1/h]+] under the exponential gain law.
double mean_allocated_power(double lambda, double sigma2) {
    const double a = lambda / sigma2;
    return std::exp(-a) / lambda - expint_e1(a) / sigma2;
}

}  // namespace

double waterfilling_capacity(double P, double sigma2, double tol) {
    require_finite_positive(P, "waterfilling_capacity: power");
    require_finite_positive(sigma2, "waterfilling_capacity: sigma2");

    double lo = 1e-12, hi = 1e12;  // mean power decreases in lambda
    double lambda = 0.0, used = 0.0;
    bool ok = false;
    for (int it = 0; it < 200; ++it) {
        lambda = std::sqrt(lo * hi);  // geometric: the bracket spans 24 decades
        used = mean_allocated_power(lambda, sigma2);
        if (std::abs(used - P) <= tol) {
            ok = true;
            break;
        }
        if (used > P)
            lo = lambda;
        else
            hi = lambda;
    }
    if (!ok && std::abs(used - P) > std::max(tol, 1e-9 * P))
        throw std::runtime_error("waterfilling_capacity: bisection did not converge");

    // E[log2(h/lambda); h >= lambda] collapses to E1 by parts
    return expint_e1(lambda / sigma2) / kTwoLn2;
}

}
