#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "netrate/graph.hpp"

namespace netrate {

// Per-destination queue lengths; q[d][i] prices the flow-conservation
// constraint of node i for destination index d (order of g.destinations).
// q is identically 0 at each destination's own node.
struct DualState {
    std::vector<std::vector<double>> q;
    int iteration = 0;
};

// Out-links of one node ordered by non-increasing weight w = [q_i - q_j]+,
// ties broken by ascending node id; weights aligned with edges.
struct PriorityList {
    std::vector<int> edges;
    std::vector<double> weights;
};

enum class StepMode { diminishing, constant };

struct SolverOptions {
    int max_iters = 20000;
    double gamma0 = -1.0;  // <= 0 picks the default 0.5/|D|
    double eta0 = -1.0;    // <= 0 picks the default 0.5/|D|
    StepMode step_mode = StepMode::diminishing;
    double averaging_window = 0.5;  // trailing fraction of iterations averaged
    int rate_grid = 128;
    int rate_refinements = 3;
    double tolerance = 1e-3;  // max flow-conservation residual target
    std::uint64_t seed = 12345;
    int trace_stride = 0;  // > 0 records one history point per stride
    std::optional<std::vector<double>> fixed_rates;  // pin node rates per index
};

struct TracePoint {
    int iter;
    double c_avg;
    double max_residual;
};

// All per-destination containers are indexed by position in g.destinations;
// flow and residual values are trailing-window averages (time sharing).
struct FlowSolution {
    double multicast_rate = 0.0;
    std::vector<double> node_rates;              // averaged R*_i
    std::vector<std::vector<double>> flows;      // [dest][edge]
    std::vector<std::vector<std::vector<int>>> priorities;  // [dest][node] -> edges
    std::vector<std::vector<double>> residuals;  // [dest][node]
    double max_residual = 0.0;
    bool converged = false;
    int iterations_run = 0;
    // std/mean of the running trailing-average multicast rate over the last
    // 10% of iterations; small values indicate a settled trend.
    double c_tail_rel_std = 0.0;
    std::vector<TracePoint> history;
};

PriorityList neighbor_priorities(const DualState& state, int node,
                                 int dest_index, const IndexedGraph& g);

// Flow put on each out-link when the node transmits at `rate` and lower
// priority receivers drop what a higher one already holds:
// x_k = rate * (prod_{j<k} eps_j) * (1 - eps_k) in priority order.
// Returned values align with pi.edges.
std::vector<double> assign_flows(double rate, const PriorityList& pi, int node,
                                 const IndexedGraph& g);

// Line-search maximizer of rate * sum_d sum_j (w_j - w_{j+1})(1 - prod_{k<=j}
// eps_k) over [0, rate_search_cap]; returns 0 when every weight is zero.
double select_rate(int node, const std::vector<PriorityList>& per_dest,
                   const IndexedGraph& g, int grid, int refinements);
double select_rate(int node, const DualState& state, const IndexedGraph& g,
                   const SolverOptions& opts);

// [C + gamma (1 - sum_d q_source^d)]+
double update_source_rate(double C, const DualState& state, double gamma,
                          const IndexedGraph& g);

// Per destination d and node i: source  q <- [q - eta (out - in - C)]+,
// destination of d  q <- 0, otherwise  q <- [q - eta (out - in)]+.
// flows is indexed [dest][edge]. Increments the iteration counter.
DualState update_duals(const DualState& state,
                       const std::vector<std::vector<double>>& flows, double C,
                       double eta, const IndexedGraph& g);

// Primal-dual subgradient loop: per iteration, priorities, per-node rates,
// flows, source-rate step, then dual step (which sees the fresh source rate).
// Reports trailing-window averages; a run whose averaged residuals stay above
// tolerance is returned with converged = false rather than thrown.
FlowSolution solve(const IndexedGraph& g, const SolverOptions& opts);
FlowSolution solve(const NetworkGraph& g, const SolverOptions& opts);

}
