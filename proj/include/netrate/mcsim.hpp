#pragma once

#include <cstdint>
#include <vector>

#include "netrate/graph.hpp"
#include "netrate/netmodel.hpp"
#include "netrate/ptp.hpp"

namespace netrate {

struct SimConfig {
    long long packets = 100000;  // slot count, >= 1000
    std::uint64_t seed = 1;
    bool report_stderr = true;
};

// per_link_delivery[e] is the raw decode fraction of edge e (for the
// point-to-point runs the entries are per layer instead);
// per_link_retention[e] is the fraction of slots where e's receiver decoded
// AND no higher-priority neighbor of the sender did.
struct SimReport {
    double empirical_rate = 0.0;
    double stderr_est = 0.0;
    std::vector<double> per_link_delivery;
    std::vector<double> per_link_retention;
    long long slots_run = 0;
};

// Per slot draws one fade and credits R bits when log2(1+hP)/2 >= R.
SimReport simulate_ptp_fixed(double R, double P, double sigma2,
                             const SimConfig& cfg);

// Same fade stream as simulate_ptp_fixed; every layer whose cumulative rate
// clears its threshold is credited its physical layer rate.
SimReport simulate_ptp_layered(const LayeredScheme& scheme, double P,
                               double sigma2, const SimConfig& cfg);

// Slotted unicast run: independent per-link fades each slot, every node
// transmits at its assigned rate, and of the out-neighbors that decode only
// the highest-priority one keeps the message. priorities[i] must order the
// out-edge indices of node i. The empirical rate is the max-flow over
// capacities rate_i * retention fraction; stderr comes from 10 contiguous
// slot batches.
SimReport simulate_network_unicast(const IndexedGraph& g,
                                   const RateAssignment& rates,
                                   const std::vector<std::vector<int>>& priorities,
                                   const SimConfig& cfg);

}
