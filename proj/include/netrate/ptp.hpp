#pragma once

#include <functional>
#include <vector>

namespace netrate {

// Superposition power split in the cumulative-rate parameterization:
// breakpoints 0 = z_0 < z_1 < ... < z_K = P are interference levels, and
// layer_rates R_1 >= R_2 >= ... >= R_K >= 0 are the cumulative decode rates
// at those levels. Layer k spans (z_{k-1}, z_k].
struct LayeredScheme {
    std::vector<double> breakpoints;
    std::vector<double> layer_rates;
};

// Marginal rate density r(z) over interference level z in [0, P].
using MarginalRateFn = std::function<double(double)>;

struct RateOptimum {
    double R_star;
    double F_star;
};

struct TwoLayerOptimum {
    double R1;
    double R2;
    double alpha;
    double F;
};

// R * success_prob(R, P, sigma2): physical rate discounted by outage.
double fixed_rate_throughput(double R, double P, double sigma2);

// Closed-form optimum of the fixed-rate throughput: R* = W(P sigma2)/(2 ln 2).
RateOptimum fixed_rate_optimum(double P, double sigma2);

// Sum over layers of the per-layer rate log((b_k + z_k)/(b_k + z_{k-1}))/2
// weighted by that layer's survival probability, b_k = P/(2^{2R_k}-1).
// Throws std::invalid_argument if the scheme violates its invariants.
double layered_throughput(const LayeredScheme& scheme, double P, double sigma2);

// Throws std::invalid_argument unless breakpoints run 0 -> P strictly
// increasing with exactly one more entry than layer_rates, and the rates are
// finite, >= 0, non-increasing.
void validate_layered_scheme(const LayeredScheme& scheme, double P);

// Physical rate carried by the layer spanning (z_lo, z_hi] at cumulative
// decode rate R: log2((b + z_hi)/(b + z_lo))/2, b = P/(2^{2R}-1); 0 if R <= 0.
double layer_rate(double R, double P, double z_hi, double z_lo);

// Line search over the split point alpha (200-point grid on (0,1) plus one
// refinement pass); per alpha the two summands are maximized independently,
// then R2 is clamped to R1 if the unconstrained optima cross.
TwoLayerOptimum optimize_two_layer(double P, double sigma2);

// The closed-form marginal rate density (1 + 2 s z - sqrt(1 + 4 s z)) /
// (2 ln2 s z^2), s = sigma2, with a series expansion below z = 1e-6/sigma2.
// Note: under this artifact's decode convention this form is NOT the
// pointwise maximizer (see self_consistent_marginal_rate); both are exposed.
double optimal_marginal_rate(double z, double sigma2);

// Pointwise maximizer of P_d(r, z) * r under the decode rule below: exactly
// half of optimal_marginal_rate, from the stationary condition
// sigma2 * (1 - u z)^2 = u with u = 2 ln2 * r.
double self_consistent_marginal_rate(double z, double sigma2);

// Fade threshold for decoding rate r at interference level z:
// h >= u/(1 - u z) with u = 2 ln2 * r; +infinity when u z >= 1.
double decode_threshold(double r, double z);

// P(h >= decode_threshold) = exp(-decode_threshold/sigma2) for the
// exponential gain law (0 when the threshold is infinite).
double decode_prob(double r, double z, double sigma2);

// Integral over z in [0, P] of decode_prob(r(z), z) * r(z).
double marginal_functional(const MarginalRateFn& r, double P, double sigma2,
                           double tol = 1e-10);

// marginal_functional evaluated at self_consistent_marginal_rate.
double infinite_layer_throughput(double P, double sigma2, double tol = 1e-10);

// The marginal whose decode threshold is the constant (2^{2R}-1)/P:
// r(z) = 1 / (2 ln2 (b + z)), b = P/(2^{2R}-1). Substituting it into
// marginal_functional reproduces fixed_rate_throughput exactly.
MarginalRateFn fixed_rate_marginal(double R, double P);

// Total physical-layer rate: the integral of a marginal over [0, P], or the
// sum of per-layer rates of a scheme.
double total_physical_rate(const MarginalRateFn& r, double P,
                           double tol = 1e-10);
double total_physical_rate(const LayeredScheme& scheme, double P);

// True iff the decode threshold of r is non-increasing on a uniform grid of
// `samples` points over [0, P] (decoding at z then implies decoding at every
// z' >= z, so per-level survival probabilities are well defined).
bool check_threshold_monotone(const MarginalRateFn& r, double P, int samples);

// Upper end of any line search over a single-link rate: the smallest R with
// success_prob(R, P, sigma2) < 1e-6, i.e. log2(1 + ln(1e6) P sigma2)/2.
double rate_search_cap(double P, double sigma2);

}
