#include "netrate/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace netrate {

int IndexedGraph::node_index(const std::string& id) const {
    for (int i = 0; i < node_count(); ++i)
        if (ids[i] == id) return i;
    throw ValidationError("unknown node id '" + id + "'");
}

IndexedGraph validate_graph(const NetworkGraph& g) {
    if (g.nodes.empty()) throw ValidationError("graph has no nodes");

    IndexedGraph ig;
    std::map<std::string, int> index;
    for (const auto& n : g.nodes) {
        if (n.id.empty()) throw ValidationError("node with empty id");
        if (index.count(n.id))
            throw ValidationError("duplicate node id '" + n.id + "'");
        if (!std::isfinite(n.power) || n.power < 0.0)
            throw ValidationError("node '" + n.id + "' has invalid power");
        index[n.id] = static_cast<int>(ig.ids.size());
        ig.ids.push_back(n.id);
        ig.power.push_back(n.power);
    }

    const int n = ig.node_count();
    ig.out.resize(n);
    ig.in.resize(n);
    std::set<std::pair<int, int>> seen;
    for (const auto& l : g.links) {
        const std::string name = "link " + l.from + "->" + l.to;
        const auto fi = index.find(l.from);
        if (fi == index.end())
            throw ValidationError(name + " references unknown node '" + l.from + "'");
        const auto ti = index.find(l.to);
        if (ti == index.end())
            throw ValidationError(name + " references unknown node '" + l.to + "'");
        if (fi->second == ti->second)
            throw ValidationError(name + " is a self-loop");
        if (!seen.insert({fi->second, ti->second}).second)
            throw ValidationError("duplicate " + name);
        if (!std::isfinite(l.sigma2) || l.sigma2 <= 0.0 || l.sigma2 > 1.0)
            throw ValidationError(name + " has sigma2 outside (0, 1]");
        const int e = ig.edge_count();
        ig.edges.push_back({fi->second, ti->second, l.sigma2});
        ig.out[fi->second].push_back(e);
        ig.in[ti->second].push_back(e);
    }

    const auto si = index.find(g.source);
    if (si == index.end())
        throw ValidationError("source '" + g.source + "' is not a node");
    ig.source = si->second;

    if (g.destinations.empty()) throw ValidationError("no destinations given");
    ig.is_destination.assign(n, false);
    for (const auto& d : g.destinations) {
        const auto di = index.find(d);
        if (di == index.end())
            throw ValidationError("destination '" + d + "' is not a node");
        if (di->second == ig.source)
            throw ValidationError("source '" + d + "' cannot be a destination");
        if (ig.is_destination[di->second])
            throw ValidationError("duplicate destination '" + d + "'");
        ig.is_destination[di->second] = true;
        ig.destinations.push_back(di->second);
    }

    // Kahn's algorithm: topological order, or a named node on a cycle.
    std::vector<int> indeg(n, 0);
    for (const auto& e : ig.edges) ++indeg[e.to];
    std::vector<int> queue;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) queue.push_back(i);
    for (size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        ig.topo_order.push_back(u);
        for (const int e : ig.out[u])
            if (--indeg[ig.edges[e].to] == 0) queue.push_back(ig.edges[e].to);
    }
    if (static_cast<int>(ig.topo_order.size()) != n) {
        for (int i = 0; i < n; ++i)
            if (indeg[i] > 0)
                throw ValidationError("graph has a cycle through node '" +
                                      ig.ids[i] + "'");
    }

    // reachability from the source
    std::vector<bool> reach(n, false);
    std::vector<int> stack{ig.source};
    reach[ig.source] = true;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const int e : ig.out[u])
            if (!reach[ig.edges[e].to]) {
                reach[ig.edges[e].to] = true;
                stack.push_back(ig.edges[e].to);
            }
    }
    for (const int d : ig.destinations)
        if (!reach[d])
            throw ValidationError("destination '" + ig.ids[d] +
                                  "' is unreachable from the source");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return ig.ids[a] < ig.ids[b]; });
    ig.id_rank.assign(n, 0);
    for (int r = 0; r < n; ++r) ig.id_rank[order[r]] = r;

    return ig;
}

namespace {

using nlohmann::json;

double number_at(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key))
        throw ValidationError(where + ": missing '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number())
        throw ValidationError(where + ": '" + key + "' must be a number");
    return v.get<double>();
}

std::string string_at(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key))
        throw ValidationError(where + ": missing '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_string())
        throw ValidationError(where + ": '" + key + "' must be a string");
    return v.get<std::string>();
}

}  // namespace

NetworkGraph graph_from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("graph JSON parse error: ") + e.what());
    }
    if (!root.is_object()) throw ValidationError("graph JSON root must be an object");
    if (!root.contains("nodes") || !root["nodes"].is_array())
        throw ValidationError("graph JSON: 'nodes' must be an array");
    if (!root.contains("links") || !root["links"].is_array())
        throw ValidationError("graph JSON: 'links' must be an array");
    if (!root.contains("destinations") || !root["destinations"].is_array())
        throw ValidationError("graph JSON: 'destinations' must be an array");

    NetworkGraph g;
    int i = 0;
    for (const auto& n : root["nodes"]) {
        const std::string where = "nodes[" + std::to_string(i++) + "]";
        if (!n.is_object()) throw ValidationError(where + " must be an object");
        g.nodes.push_back({string_at(n, "id", where), number_at(n, "power", where)});
    }
    i = 0;
    for (const auto& l : root["links"]) {
        const std::string where = "links[" + std::to_string(i++) + "]";
        if (!l.is_object()) throw ValidationError(where + " must be an object");
        g.links.push_back({string_at(l, "from", where), string_at(l, "to", where),
                           number_at(l, "sigma2", where)});
    }
    g.source = string_at(root, "source", "graph JSON");
    i = 0;
    for (const auto& d : root["destinations"]) {
        const std::string where = "destinations[" + std::to_string(i++) + "]";
        if (!d.is_string()) throw ValidationError(where + " must be a string");
        g.destinations.push_back(d.get<std::string>());
    }
    return g;
}

NetworkGraph load_graph_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open graph file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return graph_from_json_text(ss.str());
}

}
