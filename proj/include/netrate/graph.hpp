#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "netrate/channel.hpp"

namespace netrate {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an operation limited to small graphs is handed a large one.
struct SizeGuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// User-facing graph description, as parsed from JSON.
struct NetworkGraph {
    std::vector<NodeConfig> nodes;
    std::vector<Link> links;
    std::string source;
    std::vector<std::string> destinations;
};

// Validated, index-compiled form used by every algorithm. Node order follows
// the declaration order of `nodes`; edges keep their declaration order.
struct IndexedGraph {
    struct Edge {
        int from;
        int to;
        double sigma2;
    };

    std::vector<std::string> ids;
    std::vector<double> power;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> out;  // edge indices per node
    std::vector<std::vector<int>> in;
    int source = -1;
    std::vector<int> destinations;
    std::vector<bool> is_destination;
    std::vector<int> topo_order;
    std::vector<int> id_rank;  // rank of each node's id in lexicographic order

    int node_count() const { return static_cast<int>(ids.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    int node_index(const std::string& id) const;
};

// Checks every structural invariant (unique ids, link endpoints, sigma2 in
// (0,1], acyclicity, reachability of each destination, ...) and compiles the
// index form. Error messages name the offending node or link.
IndexedGraph validate_graph(const NetworkGraph& g);

// JSON ingestion: {"nodes":[{"id","power"}...], "links":[{"from","to",
// "sigma2"}...], "source": "...", "destinations": ["..."]}.
// Parse/schema errors are reported as ValidationError naming the JSON path.
NetworkGraph graph_from_json_text(const std::string& text);
NetworkGraph load_graph_file(const std::string& path);

}
