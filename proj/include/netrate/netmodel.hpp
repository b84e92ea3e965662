#pragma once

#include <cstdint>
#include <vector>

#include "netrate/graph.hpp"

namespace netrate {

// Partition of the node set: source_side contains the source and excludes at
// least one destination; boundary holds the source-side nodes with an
// out-edge crossing into the complement.
struct Cut {
    uint32_t side_mask = 0;  // bit i set <=> node i on the source side
    std::vector<int> source_side;
    std::vector<int> boundary;
};

// Per-node physical-layer rate assignment, indexed like IndexedGraph nodes.
using RateAssignment = std::vector<double>;

// All cuts of the graph (subsets containing the source and excluding at
// least one destination). Guarded at 24 nodes; beyond that the enumeration
// is infeasible and callers must use the flow solver instead.
std::vector<Cut> enumerate_cuts(const IndexedGraph& g);

// Sum over boundary nodes i of R_i * (1 - prod over cross-cut out-links of
// the erasure probability at R_i).
double cut_value(const Cut& cut, const RateAssignment& rates,
                 const IndexedGraph& g);

struct CutsetResult {
    double C = 0.0;
    RateAssignment rates;
    std::vector<double> per_cut_values;  // aligned with enumerate_cuts order
};

// Max over per-node rates of (min over cuts of cut_value), by coordinate
// ascent in topological order (8 sweeps), multi-started from `restarts`
// random rate vectors plus a warm start at each node's best-out-link
// fixed-rate optimum. Deterministic for fixed arguments.
CutsetResult cutset_rate_fixed(const IndexedGraph& g, int grid = 256,
                               int restarts = 4, uint64_t seed = 12345);

struct BoundResult {
    double C_ub = 0.0;
    double stderr_est = 0.0;
    std::vector<double> per_cut;         // aligned with enumerate_cuts order
    std::vector<double> per_cut_stderr;
};

// Monte Carlo estimate, per cut, of the boundary sum of
// E[1/2 log2(1 + P_i * sum of cross-link gains)]; returns the minimum cut
// estimate and its standard error. Per-cut substreams keep results
// independent of evaluation order.
BoundResult capacity_upper_bound(const IndexedGraph& g, int mc_samples,
                                 uint64_t seed);

// Additive constant bounding the gap between the cut-set value and the
// capacity upper bound: |D| |V| (log2(|V| * s) / 2 + 0.7588), where s is the
// largest ratio of out-link gain variances at any node (1 if no node has
// two out-links).
double capacity_gap_constant(const IndexedGraph& g);

// Exact maximum end-to-end rate toward `dest` for a fixed rate assignment,
// over flows respecting every broadcast constraint: through an expansion
// with one auxiliary node per nonempty reception pattern, the constraint
// "flow into any neighbor subset Z <= R_i (1 - prod erasures over Z)" is
// enforced exactly, and a max-flow gives the LP value. Equals the min over
// enumerated cuts of cut_value (strong duality); used as its oracle.
double polymatroid_max_flow(const IndexedGraph& g, const RateAssignment& rates,
                            int dest);

}
