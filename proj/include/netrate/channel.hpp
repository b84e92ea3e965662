#pragma once

#include <string>

namespace netrate {

// Rates are bits per channel use throughout; the 1/2 log is log base 2
// (real-valued channel). Power gains are exponential with mean sigma2.

inline constexpr double kLn2 = 0.6931471805599453;
inline constexpr double kTwoLn2 = 2.0 * kLn2;

struct NodeConfig {
    std::string id;
    double power = 0.0;  // transmit power, linear scale
};

struct Link {
    std::string from;
    std::string to;
    double sigma2 = 1.0;  // variance of the power gain, in (0, 1]
};

// Probability that a rate-R codeword survives the fade on a link:
// exp(-(2^{2R}-1)/(P*sigma2)).
double success_prob(double R, double P, double sigma2);

// 1 - success_prob.
double erasure_prob(double R, double P, double sigma2);

// E[1/2 log2(1 + h P)] over the exponential gain law, by quadrature.
double ergodic_capacity_csir(double P, double sigma2, double tol = 1e-10);

// Capacity with transmitter-side state: power allocation [1/lambda - 1/h]+,
// lambda found by bisection so E[p(h)] = P within tol.
double waterfilling_capacity(double P, double sigma2, double tol = 1e-10);

}
