#include "netrate/flowopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "netrate/numerics.hpp"
#include "netrate/ptp.hpp"

namespace netrate {

PriorityList neighbor_priorities(const DualState& state, int node,
                                 int dest_index, const IndexedGraph& g) {
    if (node < 0 || node >= g.node_count() || g.out[node].empty())
        throw std::invalid_argument(
            "neighbor_priorities: node must have out-neighbors");
    if (dest_index < 0 ||
        dest_index >= static_cast<int>(g.destinations.size()))
        throw std::invalid_argument("neighbor_priorities: bad destination");
    const auto& q = state.q[dest_index];

    PriorityList pl;
    pl.edges = g.out[node];
    std::sort(pl.edges.begin(), pl.edges.end(), [&](int a, int b) {
        const double wa = std::max(q[node] - q[g.edges[a].to], 0.0);
        const double wb = std::max(q[node] - q[g.edges[b].to], 0.0);
        if (wa != wb) return wa > wb;
        return g.id_rank[g.edges[a].to] < g.id_rank[g.edges[b].to];
    });
    pl.weights.reserve(pl.edges.size());
    for (const int e : pl.edges)
        pl.weights.push_back(std::max(q[node] - q[g.edges[e].to], 0.0));
    return pl;
}

std::vector<double> assign_flows(double rate, const PriorityList& pi, int node,
                                 const IndexedGraph& g) {
    if (rate < 0.0 || !std::isfinite(rate))
        throw std::invalid_argument("assign_flows: rate must be finite, >= 0");
    std::vector<double> xs(pi.edges.size(), 0.0);
    if (rate == 0.0) return xs;
    double survive = 1.0;  // probability no higher-priority neighbor decoded
    for (size_t k = 0; k < pi.edges.size(); ++k) {
        const double eps =
            erasure_prob(rate, g.power[node], g.edges[pi.edges[k]].sigma2);
        xs[k] = rate * survive * (1.0 - eps);
        survive *= eps;
    }
    return xs;
}

double select_rate(int node, const std::vector<PriorityList>& per_dest,
                   const IndexedGraph& g, int grid, int refinements) {
    if (g.out[node].empty())
        throw std::invalid_argument("select_rate: node has no out-neighbors");
    double weight_total = 0.0;
    for (const auto& pl : per_dest)
        weight_total = std::accumulate(pl.weights.begin(), pl.weights.end(),
                                       weight_total);
    if (weight_total <= 0.0) return 0.0;

    double s2max = 0.0;
    for (const int e : g.out[node])
        s2max = std::max(s2max, g.edges[e].sigma2);
    const double cap = rate_search_cap(g.power[node], s2max);
    if (!(cap > 0.0)) return 0.0;

    const auto objective = [&](double R) {
        if (R <= 0.0) return 0.0;
        double total = 0.0;
        for (const auto& pl : per_dest) {
            double prod_eps = 1.0;
            for (size_t j = 0; j < pl.edges.size(); ++j) {
                prod_eps *= erasure_prob(R, g.power[node],
                                         g.edges[pl.edges[j]].sigma2);
                const double w_next =
                    j + 1 < pl.weights.size() ? pl.weights[j + 1] : 0.0;
                total += (pl.weights[j] - w_next) * (1.0 - prod_eps);
            }
        }
        return R * total;
    };
    return maximize_1d(objective, {0.0, cap}, grid, refinements).arg;
}

double select_rate(int node, const DualState& state, const IndexedGraph& g,
                   const SolverOptions& opts) {
    std::vector<PriorityList> per_dest;
    per_dest.reserve(g.destinations.size());
    for (size_t d = 0; d < g.destinations.size(); ++d)
        per_dest.push_back(
            neighbor_priorities(state, node, static_cast<int>(d), g));
    return select_rate(node, per_dest, g, opts.rate_grid,
                       opts.rate_refinements);
}

double update_source_rate(double C, const DualState& state, double gamma,
                          const IndexedGraph& g) {
    if (!(gamma > 0.0))
        throw std::invalid_argument("update_source_rate: gamma must be > 0");
    double q_sum = 0.0;
    for (const auto& row : state.q) q_sum += row[g.source];
    return std::max(C + gamma * (1.0 - q_sum), 0.0);
}

DualState update_duals(const DualState& state,
                       const std::vector<std::vector<double>>& flows, double C,
                       double eta, const IndexedGraph& g) {
    if (!(eta > 0.0))
        throw std::invalid_argument("update_duals: eta must be > 0");
    if (flows.size() != state.q.size())
        throw std::invalid_argument("update_duals: flows/destinations mismatch");
    DualState next = state;
    next.iteration = state.iteration + 1;
    for (size_t d = 0; d < state.q.size(); ++d) {
        const int dest_node = g.destinations[d];
        const auto& x = flows[d];
        for (int i = 0; i < g.node_count(); ++i) {
            if (i == dest_node) {
                next.q[d][i] = 0.0;
                continue;
            }
            double out = 0.0, in = 0.0;
            for (const int e : g.out[i]) out += x[e];
            for (const int e : g.in[i]) in += x[e];
            const double excess =
                i == g.source ? out - in - C : out - in;
            next.q[d][i] = std::max(state.q[d][i] - eta * excess, 0.0);
        }
    }
    return next;
}

namespace {

void conservation_residuals(const IndexedGraph& g,
                            const std::vector<std::vector<double>>& flows,
                            double C,
                            std::vector<std::vector<double>>& residuals,
                            double& max_abs) {
    max_abs = 0.0;
    for (size_t d = 0; d < flows.size(); ++d) {
        const int dest_node = g.destinations[d];
        const auto& x = flows[d];
        for (int i = 0; i < g.node_count(); ++i) {
            double out = 0.0, in = 0.0;
            for (const int e : g.out[i]) out += x[e];
            for (const int e : g.in[i]) in += x[e];
            double r;
            if (i == dest_node)
                r = (in - out) - C;
            else if (i == g.source)
                r = out - in - C;
            else
                r = out - in;
            residuals[d][i] = r;
            max_abs = std::max(max_abs, std::abs(r));
        }
    }
}

void check_options(const SolverOptions& opts, const IndexedGraph& g) {
    if (opts.max_iters < 1)
        throw std::invalid_argument("solve: max_iters must be >= 1");
    if (!(opts.averaging_window > 0.0) || opts.averaging_window > 1.0)
        throw std::invalid_argument("solve: averaging_window must be in (0,1]");
    if (opts.rate_grid < 2)
        throw std::invalid_argument("solve: rate_grid must be >= 2");
    if (opts.rate_refinements < 0)
        throw std::invalid_argument("solve: rate_refinements must be >= 0");
    if (!(opts.tolerance > 0.0))
        throw std::invalid_argument("solve: tolerance must be > 0");
    if (opts.fixed_rates) {
        if (static_cast<int>(opts.fixed_rates->size()) != g.node_count())
            throw std::invalid_argument("solve: fixed_rates size mismatch");
        for (const double r : *opts.fixed_rates)
            if (!std::isfinite(r) || r < 0.0)
                throw std::invalid_argument(
                    "solve: fixed_rates must be finite and >= 0");
    }
}

}  // namespace

FlowSolution solve(const IndexedGraph& g, const SolverOptions& opts) {
    check_options(opts, g);
    const int n = g.node_count();
    const int m = g.edge_count();
    const int n_dest = static_cast<int>(g.destinations.size());
    const double gamma0 = opts.gamma0 > 0.0 ? opts.gamma0 : 0.5 / n_dest;
    const double eta0 = opts.eta0 > 0.0 ? opts.eta0 : 0.5 / n_dest;

    DualState state;
    state.q.assign(n_dest, std::vector<double>(n, 0.0));
    double C = 0.0;

    // trailing-window snapshots: [C, rates..., flows (dest-major)...]
    const int slot_len = 1 + n + n_dest * m;
    const int window_cap = std::max(
        1, static_cast<int>(std::ceil(opts.averaging_window * opts.max_iters)));
    std::vector<double> ring(static_cast<size_t>(window_cap) * slot_len, 0.0);
    std::vector<double> window_sum(slot_len, 0.0);
    int filled = 0;

    std::vector<double> c_hist;
    c_hist.reserve(opts.max_iters);

    std::vector<std::vector<PriorityList>> pls(
        n_dest, std::vector<PriorityList>(n));
    std::vector<double> rates(n, 0.0);
    std::vector<std::vector<double>> flows(n_dest, std::vector<double>(m, 0.0));
    std::vector<PriorityList> node_pls(n_dest);

    FlowSolution sol;
    sol.residuals.assign(n_dest, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> avg_flows(n_dest,
                                               std::vector<double>(m, 0.0));

    const auto window_average = [&](double& c_avg,
                                    std::vector<double>& r_avg,
                                    std::vector<std::vector<double>>& x_avg) {
        c_avg = window_sum[0] / filled;
        for (int i = 0; i < n; ++i) r_avg[i] = window_sum[1 + i] / filled;
        for (int d = 0; d < n_dest; ++d)
            for (int e = 0; e < m; ++e)
                x_avg[d][e] = window_sum[1 + n + d * m + e] / filled;
    };

    std::vector<double> avg_rates(n, 0.0);
    int t = 0;
    bool stopped_early = false;
    while (t < opts.max_iters && !stopped_early) {
        ++t;
        for (int d = 0; d < n_dest; ++d)
            for (int i = 0; i < n; ++i)
                if (!g.out[i].empty())
                    pls[d][i] = neighbor_priorities(state, i, d, g);

        for (int i = 0; i < n; ++i) {
            if (g.out[i].empty()) {
                rates[i] = 0.0;
                continue;
            }
            if (opts.fixed_rates) {
                rates[i] = (*opts.fixed_rates)[i];
                continue;
            }
            for (int d = 0; d < n_dest; ++d) node_pls[d] = pls[d][i];
            rates[i] = select_rate(i, node_pls, g, opts.rate_grid,
                                   opts.rate_refinements);
        }

        for (int d = 0; d < n_dest; ++d) {
            std::fill(flows[d].begin(), flows[d].end(), 0.0);
            for (int i = 0; i < n; ++i) {
                if (g.out[i].empty()) continue;
                const auto xs = assign_flows(rates[i], pls[d][i], i, g);
                for (size_t k = 0; k < xs.size(); ++k)
                    flows[d][pls[d][i].edges[k]] = xs[k];
            }
        }

        const double scale = opts.step_mode == StepMode::diminishing
                                 ? 1.0 / std::sqrt(static_cast<double>(t))
                                 : 1.0;
        C = update_source_rate(C, state, gamma0 * scale, g);
        state = update_duals(state, flows, C, eta0 * scale, g);

        const size_t slot =
            static_cast<size_t>((t - 1) % window_cap) * slot_len;
        if (filled == window_cap) {
            for (int k = 0; k < slot_len; ++k) window_sum[k] -= ring[slot + k];
        } else {
            ++filled;
        }
        ring[slot] = C;
        for (int i = 0; i < n; ++i) ring[slot + 1 + i] = rates[i];
        for (int d = 0; d < n_dest; ++d)
            for (int e = 0; e < m; ++e)
                ring[slot + 1 + n + d * m + e] = flows[d][e];
        for (int k = 0; k < slot_len; ++k) window_sum[k] += ring[slot + k];
        c_hist.push_back(C);

        const bool checkpoint = (t % 500 == 0) || t == opts.max_iters;
        const bool trace_point =
            opts.trace_stride > 0 && (t % opts.trace_stride == 0);
        if (checkpoint || trace_point) {
            double c_avg, max_res;
            window_average(c_avg, avg_rates, avg_flows);
            conservation_residuals(g, avg_flows, c_avg, sol.residuals, max_res);
            if (trace_point) sol.history.push_back({t, c_avg, max_res});
            if (checkpoint && max_res < opts.tolerance) stopped_early = true;
        }
    }
    sol.iterations_run = t;

    // exact trailing window for the reported solution
    const int w_final = std::min(
        t, std::max(1, static_cast<int>(std::ceil(opts.averaging_window * t))));
    std::fill(window_sum.begin(), window_sum.end(), 0.0);
    for (int back = 0; back < w_final; ++back) {
        const size_t slot =
            static_cast<size_t>((t - 1 - back) % window_cap) * slot_len;
        for (int k = 0; k < slot_len; ++k) window_sum[k] += ring[slot + k];
    }
    filled = w_final;
    window_average(sol.multicast_rate, avg_rates, avg_flows);
    sol.node_rates = avg_rates;
    sol.flows = avg_flows;
    conservation_residuals(g, sol.flows, sol.multicast_rate, sol.residuals,
                           sol.max_residual);
    sol.converged = sol.max_residual < opts.tolerance;

    sol.priorities.assign(n_dest, std::vector<std::vector<int>>(n));
    for (int d = 0; d < n_dest; ++d)
        for (int i = 0; i < n; ++i) sol.priorities[d][i] = pls[d][i].edges;

    // spread of the running trailing average over the last 10% of iterations
    std::vector<double> prefix(t + 1, 0.0);
    for (int i = 0; i < t; ++i) prefix[i + 1] = prefix[i] + c_hist[i];
    const int tail_start = std::max(1, t - t / 10 + 1);
    double sum = 0.0, sumsq = 0.0;
    int count = 0;
    for (int tt = tail_start; tt <= t; ++tt) {
        const int w = std::min(
            tt,
            std::max(1, static_cast<int>(std::ceil(opts.averaging_window * tt))));
        const double avg = (prefix[tt] - prefix[tt - w]) / w;
        sum += avg;
        sumsq += avg * avg;
        ++count;
    }
    if (count >= 2 && sum > 0.0) {
        const double mean = sum / count;
        const double var =
            std::max(0.0, (sumsq - sum * sum / count) / (count - 1));
        sol.c_tail_rel_std = std::sqrt(var) / mean;
    }
    return sol;
}

FlowSolution solve(const NetworkGraph& g, const SolverOptions& opts) {
    return solve(validate_graph(g), opts);
}

}
