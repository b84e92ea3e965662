#pragma once

#include <vector>

namespace netrate {

// Dinic's algorithm on double capacities. Capacities below kFlowEps are
// treated as saturated when building level graphs.
class FlowNetwork {
  public:
    static constexpr double kFlowEps = 1e-12;

    explicit FlowNetwork(int node_count);

    // Adds a directed edge and returns its handle for flow queries.
    int add_edge(int from, int to, double capacity);

    double max_flow(int source, int sink);

    // Flow currently assigned to the edge handle (after max_flow).
    double flow_on(int handle) const;

  private:
    struct Arc {
        int to;
        int rev;
        double cap;
    };

    bool build_levels(int source, int sink);
    double push(int u, int sink, double limit);

    std::vector<std::vector<Arc>> adj_;
    std::vector<std::pair<int, int>> handles_;  // (node, arc index)
    std::vector<double> original_cap_;
    std::vector<int> level_;
    std::vector<size_t> iter_;
};

}
