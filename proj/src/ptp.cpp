#include "netrate/ptp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "netrate/channel.hpp"
#include "netrate/numerics.hpp"

namespace netrate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
    if (!std::isfinite(v) || v <= 0.0)
        throw std::invalid_argument(std::string(what) + " must be finite and > 0");
}


// (1 + 2t - sqrt(1 + 4t)) / t^2 with t = sigma2 * z, written against its
// conjugate so small t cancels exactly instead of catastrophically.
double marginal_core(double t) {
    return 4.0 / (1.0 + 2.0 * t + std::sqrt(1.0 + 4.0 * t));
}

}  // namespace

double fixed_rate_throughput(double R, double P, double sigma2) {
    return R * success_prob(R, P, sigma2);
}

RateOptimum fixed_rate_optimum(double P, double sigma2) {
    require_positive(P, "fixed_rate_optimum: power");
    require_positive(sigma2, "fixed_rate_optimum: sigma2");
    const double R = lambert_w(P * sigma2) / kTwoLn2;
    return {R, fixed_rate_throughput(R, P, sigma2)};
}

double rate_search_cap(double P, double sigma2) {
    return 0.5 * std::log2(1.0 + std::log(1e6) * P * sigma2);
}

void validate_layered_scheme(const LayeredScheme& s, double P) {
    const auto& z = s.breakpoints;
    const auto& R = s.layer_rates;
    if (z.size() < 2 || R.size() + 1 != z.size())
        throw std::invalid_argument("layered scheme: need K rates and K+1 breakpoints");
    if (z.front() != 0.0)
        throw std::invalid_argument("layered scheme: breakpoints must start at 0");
    if (std::abs(z.back() - P) > 1e-12 * std::max(1.0, P))
        throw std::invalid_argument("layered scheme: breakpoints must end at P");
    for (size_t k = 1; k < z.size(); ++k)
        if (!(z[k] > z[k - 1]))
            throw std::invalid_argument("layered scheme: breakpoints must increase");
    for (size_t k = 0; k < R.size(); ++k) {
        if (!std::isfinite(R[k]) || R[k] < 0.0)
            throw std::invalid_argument("layered scheme: rates must be finite and >= 0");
        if (k > 0 && R[k] > R[k - 1] + 1e-12)
            throw std::invalid_argument(
                "layered scheme: cumulative rates must be non-increasing");
    }
}

double layer_rate(double R, double P, double z_hi, double z_lo) {
    if (R <= 0.0) return 0.0;
    const double b = P / std::expm1(kTwoLn2 * R);
    return 0.5 * std::log2((b + z_hi) / (b + z_lo));
}

double layered_throughput(const LayeredScheme& scheme, double P, double sigma2) {
    require_positive(P, "layered_throughput: power");
    require_positive(sigma2, "layered_throughput: sigma2");
    validate_layered_scheme(scheme, P);
    double total = 0.0;
    for (size_t k = 0; k < scheme.layer_rates.size(); ++k) {
        const double R = scheme.layer_rates[k];
        if (R <= 0.0) continue;
        const double rk =
            layer_rate(R, P, scheme.breakpoints[k + 1], scheme.breakpoints[k]);
        total += rk * success_prob(R, P, sigma2);
    }
    return total;
}

namespace {

// The two summands of the two-layer throughput; each depends on one rate only.
double two_layer_term1(double R1, double alpha, double P, double sigma2) {
    if (R1 <= 0.0) return 0.0;
    return layer_rate(R1, P, alpha * P, 0.0) * success_prob(R1, P, sigma2);
}

double two_layer_term2(double R2, double alpha, double P, double sigma2) {
    if (R2 <= 0.0) return 0.0;
    return layer_rate(R2, P, P, alpha * P) * success_prob(R2, P, sigma2);
}

}  // namespace

TwoLayerOptimum optimize_two_layer(double P, double sigma2) {
    require_positive(P, "optimize_two_layer: power");
    require_positive(sigma2, "optimize_two_layer: sigma2");
    const double cap = rate_search_cap(P, sigma2);

    const auto eval_alpha = [&](double alpha) -> TwoLayerOptimum {
        const auto t1 = [&](double R) { return two_layer_term1(R, alpha, P, sigma2); };
        const auto t2 = [&](double R) { return two_layer_term2(R, alpha, P, sigma2); };
        const MaxResult m1 = maximize_1d(t1, {0.0, cap});
        MaxResult m2 = maximize_1d(t2, {0.0, cap});
        double R2 = m2.arg;
        if (R2 > m1.arg) R2 = m1.arg;  // keep cumulative rates non-increasing
        return {m1.arg, R2, alpha, m1.value + t2(R2)};
    };

    const int n = 200;
    TwoLayerOptimum best{0.0, 0.0, 0.0, -kInf};
    double lo = 0.0, hi = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
        int best_i = 1;
        TwoLayerOptimum pass_best{0.0, 0.0, 0.0, -kInf};
        for (int i = 1; i <= n; ++i) {
            const double alpha = lo + (hi - lo) * static_cast<double>(i) / (n + 1);
            const TwoLayerOptimum cand = eval_alpha(alpha);
            if (cand.F > pass_best.F) {  // strict: ties go to the smaller alpha
                pass_best = cand;
                best_i = i;
            }
        }
        if (pass_best.F > best.F) best = pass_best;
        const double step = (hi - lo) / (n + 1);
        const double center = lo + step * best_i;
        lo = std::max(0.0, center - step);
        hi = std::min(1.0, center + step);
    }
    return best;
}

double optimal_marginal_rate(double z, double sigma2) {
    if (!std::isfinite(z) || z < 0.0)
        throw std::invalid_argument("optimal_marginal_rate: z must be >= 0");
    require_positive(sigma2, "optimal_marginal_rate: sigma2");
    const double t = sigma2 * z;
    return sigma2 * marginal_core(t) / kTwoLn2;
}

double self_consistent_marginal_rate(double z, double sigma2) {
    return 0.5 * optimal_marginal_rate(z, sigma2);
}

double decode_threshold(double r, double z) {
    if (!std::isfinite(r) || r < 0.0)
        throw std::invalid_argument("decode_threshold: rate must be >= 0");
    if (!std::isfinite(z) || z < 0.0)
        throw std::invalid_argument("decode_threshold: z must be >= 0");
    const double u = kTwoLn2 * r;
    const double denom = 1.0 - u * z;
    if (denom <= 0.0) return kInf;
    return u / denom;
}

double decode_prob(double r, double z, double sigma2) {
    require_positive(sigma2, "decode_prob: sigma2");
    const double th = decode_threshold(r, z);
    if (std::isinf(th)) return 0.0;
    return std::exp(-th / sigma2);
}

double marginal_functional(const MarginalRateFn& r, double P, double sigma2,
                           double tol) {
    require_positive(P, "marginal_functional: power");
    require_positive(sigma2, "marginal_functional: sigma2");
    const auto integrand = [&](double z) {
        const double rz = r(z);
        if (rz <= 0.0) return 0.0;
        return decode_prob(rz, z, sigma2) * rz;
    };
    return integrate(integrand, {0.0, P}, tol);
}

double infinite_layer_throughput(double P, double sigma2, double tol) {
    const auto r = [sigma2](double z) {
        return self_consistent_marginal_rate(z, sigma2);
    };
    return marginal_functional(r, P, sigma2, tol);
}

MarginalRateFn fixed_rate_marginal(double R, double P) {
    if (!std::isfinite(R) || R < 0.0)
        throw std::invalid_argument("fixed_rate_marginal: rate must be >= 0");
    require_positive(P, "fixed_rate_marginal: power");
    if (R == 0.0)
        return [](double) { return 0.0; };
    const double b = P / std::expm1(kTwoLn2 * R);
    return [b](double z) { return 1.0 / (kTwoLn2 * (b + z)); };
}

double total_physical_rate(const MarginalRateFn& r, double P, double tol) {
    require_positive(P, "total_physical_rate: power");
    return integrate(r, {0.0, P}, tol);
}

double total_physical_rate(const LayeredScheme& scheme, double P) {
    require_positive(P, "total_physical_rate: power");
    validate_layered_scheme(scheme, P);
    double total = 0.0;
    for (size_t k = 0; k < scheme.layer_rates.size(); ++k)
        total += layer_rate(scheme.layer_rates[k], P, scheme.breakpoints[k + 1],
                            scheme.breakpoints[k]);
    return total;
}

bool check_threshold_monotone(const MarginalRateFn& r, double P, int samples) {
    require_positive(P, "check_threshold_monotone: power");
    if (samples < 2)
        throw std::invalid_argument("check_threshold_monotone: need >= 2 samples");
    double prev = kInf;
    for (int i = 0; i < samples; ++i) {
        const double z = P * static_cast<double>(i) / (samples - 1);
        const double rz = r(z);
        if (!std::isfinite(rz) || rz < 0.0) return false;
        const double th = decode_threshold(rz, z);
        if (i > 0) {
            if (std::isinf(th) && !std::isinf(prev)) return false;
            if (th > prev * (1.0 + 1e-9) + 1e-15) return false;
        }
        prev = th;
    }
    return true;
}

}
