#include "netrate/maxflow.hpp"

#include <limits>
#include <queue>
#include <stdexcept>

namespace netrate {

FlowNetwork::FlowNetwork(int node_count)
    : adj_(node_count), level_(node_count), iter_(node_count) {}

int FlowNetwork::add_edge(int from, int to, double capacity) {
    const int n = static_cast<int>(adj_.size());
    if (from < 0 || from >= n || to < 0 || to >= n)
        throw std::invalid_argument("FlowNetwork::add_edge: node out of range");
    if (capacity < 0.0)
        throw std::invalid_argument("FlowNetwork::add_edge: negative capacity");
    adj_[from].push_back({to, static_cast<int>(adj_[to].size()), capacity});
    adj_[to].push_back({from, static_cast<int>(adj_[from].size()) - 1, 0.0});
    handles_.emplace_back(from, static_cast<int>(adj_[from].size()) - 1);
    original_cap_.push_back(capacity);
    return static_cast<int>(handles_.size()) - 1;
}

bool FlowNetwork::build_levels(int source, int sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    q.push(source);
    level_[source] = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (const Arc& a : adj_[u]) {
            if (a.cap > kFlowEps && level_[a.to] < 0) {
                level_[a.to] = level_[u] + 1;
                q.push(a.to);
            }
        }
    }
    return level_[sink] >= 0;
}

double FlowNetwork::push(int u, int sink, double limit) {
    if (u == sink) return limit;
    for (size_t& i = iter_[u]; i < adj_[u].size(); ++i) {
        Arc& a = adj_[u][i];
        if (a.cap > kFlowEps && level_[a.to] == level_[u] + 1) {
            const double got = push(a.to, sink, std::min(limit, a.cap));
            if (got > kFlowEps) {
                a.cap -= got;
                adj_[a.to][a.rev].cap += got;
                return got;
            }
        }
    }
    return 0.0;
}

double FlowNetwork::max_flow(int source, int sink) {
    if (source == sink)
        throw std::invalid_argument("FlowNetwork::max_flow: source == sink");
    double total = 0.0;
    while (build_levels(source, sink)) {
        std::fill(iter_.begin(), iter_.end(), 0);
        while (true) {
            const double got =
                push(source, sink, std::numeric_limits<double>::infinity());
            if (got <= kFlowEps) break;
            total += got;
        }
    }
    return total;
}

double FlowNetwork::flow_on(int handle) const {
    const auto& [node, idx] = handles_.at(handle);
    const Arc& a = adj_[node][idx];
    return original_cap_[handle] - a.cap;
}

}
