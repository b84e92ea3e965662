#include "netrate/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "netrate/maxflow.hpp"
#include "netrate/numerics.hpp"
#include "netrate/ptp.hpp"
#include "netrate/rng.hpp"

namespace netrate {

std::vector<Cut> enumerate_cuts(const IndexedGraph& g) {
    const int n = g.node_count();
    if (n > 24)
        throw SizeGuardError(
            "cut enumeration is limited to 24 nodes; use the flow solver");

    uint32_t dest_mask = 0;
    for (const int d : g.destinations) dest_mask |= (1u << d);
    const uint32_t all = (n == 32) ? ~0u : ((1u << n) - 1u);

    std::vector<Cut> cuts;
    for (uint32_t side = 0; side <= all; ++side) {
        if (!(side & (1u << g.source))) continue;
        if ((side & dest_mask) == dest_mask) continue;  // no destination cut off
        Cut c;
        c.side_mask = side;
        for (int i = 0; i < n; ++i) {
            if (!(side & (1u << i))) continue;
            c.source_side.push_back(i);
            for (const int e : g.out[i]) {
                if (!(side & (1u << g.edges[e].to))) {
                    c.boundary.push_back(i);
                    break;
                }
            }
        }
        cuts.push_back(std::move(c));
    }
    return cuts;
}

double cut_value(const Cut& cut, const RateAssignment& rates,
                 const IndexedGraph& g) {
    if (static_cast<int>(rates.size()) != g.node_count())
        throw std::invalid_argument("cut_value: rate assignment size mismatch");
    if (cut.boundary.empty())
        throw std::invalid_argument("cut_value: cut has an empty boundary");
    double total = 0.0;
    for (const int i : cut.boundary) {
        const double R = rates[i];
        if (R <= 0.0) continue;
        double erasure_all = 1.0;
        for (const int e : g.out[i]) {
            if (cut.side_mask & (1u << g.edges[e].to)) continue;
            erasure_all *= erasure_prob(R, g.power[i], g.edges[e].sigma2);
        }
        total += R * (1.0 - erasure_all);
    }
    return total;
}

namespace {

double node_rate_cap(const IndexedGraph& g, int node) {
    double s2max = 0.0;
    for (const int e : g.out[node]) s2max = std::max(s2max, g.edges[e].sigma2);
    if (s2max == 0.0 || g.power[node] <= 0.0) return 0.0;
    return rate_search_cap(g.power[node], s2max);
}

double min_cut_value(const std::vector<Cut>& cuts, const RateAssignment& rates,
                     const IndexedGraph& g) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cuts) best = std::min(best, cut_value(c, rates, g));
    return best;
}

}  // namespace

CutsetResult cutset_rate_fixed(const IndexedGraph& g, int grid, int restarts,
                               uint64_t seed) {
    const auto cuts = enumerate_cuts(g);
    if (cuts.empty())
        throw ValidationError("cutset_rate_fixed: graph admits no cuts");
    const int n = g.node_count();

    std::vector<double> caps(n);
    RateAssignment warm(n, 0.0);
    for (int i = 0; i < n; ++i) {
        caps[i] = node_rate_cap(g, i);
        if (g.out[i].empty() || g.power[i] <= 0.0) continue;
        double s2best = 0.0;
        for (const int e : g.out[i]) s2best = std::max(s2best, g.edges[e].sigma2);
        warm[i] = fixed_rate_optimum(g.power[i], s2best).R_star;
    }

    std::vector<RateAssignment> starts{warm};
    SplitMix64 rng(seed);
    for (int r = 0; r < restarts; ++r) {
        RateAssignment s(n, 0.0);
        for (int i = 0; i < n; ++i)
            if (caps[i] > 0.0) s[i] = caps[i] * rng.uniform01();
        starts.push_back(std::move(s));
    }

    CutsetResult best;
    best.C = -1.0;
    for (const auto& start : starts) {
        RateAssignment rates = start;
        double value = min_cut_value(cuts, rates, g);
        for (int sweep = 0; sweep < 8; ++sweep) {
            double improved = 0.0;
            for (const int i : g.topo_order) {
                if (caps[i] <= 0.0) continue;
                const auto objective = [&](double R) {
                    RateAssignment trial = rates;
                    trial[i] = R;
                    return min_cut_value(cuts, trial, g);
                };
                const MaxResult m =
                    maximize_1d(objective, {0.0, caps[i]}, grid, 3);
                if (m.value > value) {
                    improved += m.value - value;
                    value = m.value;
                    rates[i] = m.arg;
                }
            }
            if (improved < 1e-12) break;
        }
        if (value > best.C) {
            best.C = value;
            best.rates = rates;
        }
    }

    best.per_cut_values.reserve(cuts.size());
    for (const auto& c : cuts)
        best.per_cut_values.push_back(cut_value(c, best.rates, g));
    return best;
}

BoundResult capacity_upper_bound(const IndexedGraph& g, int mc_samples,
                                 uint64_t seed) {
    if (mc_samples < 10000)
        throw std::invalid_argument("capacity_upper_bound: need >= 1e4 samples");
    const auto cuts = enumerate_cuts(g);
    if (cuts.empty())
        throw ValidationError("capacity_upper_bound: graph admits no cuts");

    BoundResult out;
    out.per_cut.resize(cuts.size());
    out.per_cut_stderr.resize(cuts.size());
    int best = -1;
    for (size_t k = 0; k < cuts.size(); ++k) {
        const Cut& c = cuts[k];
        SplitMix64 rng = substream(seed, k);
        double sum = 0.0, sumsq = 0.0;
        for (int s = 0; s < mc_samples; ++s) {
            double sample = 0.0;
            for (const int i : c.boundary) {
                double gain = 0.0;
                for (const int e : g.out[i]) {
                    if (c.side_mask & (1u << g.edges[e].to)) continue;
                    gain += rng.exponential(g.edges[e].sigma2);
                }
                sample += 0.5 * std::log2(1.0 + g.power[i] * gain);
            }
            sum += sample;
            sumsq += sample * sample;
        }
        const double mean = sum / mc_samples;
        const double var =
            std::max(0.0, (sumsq - sum * sum / mc_samples) / (mc_samples - 1));
        out.per_cut[k] = mean;
        out.per_cut_stderr[k] = std::sqrt(var / mc_samples);
        if (best < 0 || mean < out.per_cut[best]) best = static_cast<int>(k);
    }
    out.C_ub = out.per_cut[best];
    out.stderr_est = out.per_cut_stderr[best];
    return out;
}

double capacity_gap_constant(const IndexedGraph& g) {
    const double V = g.node_count();
    const double D = static_cast<double>(g.destinations.size());
    double varsigma = 1.0;
    for (int i = 0; i < g.node_count(); ++i) {
        if (g.out[i].size() < 2) continue;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const int e : g.out[i]) {
            lo = std::min(lo, g.edges[e].sigma2);
            hi = std::max(hi, g.edges[e].sigma2);
        }
        varsigma = std::max(varsigma, hi / lo);
    }
    return 0.5 * D * V * std::log2(V * varsigma) + 0.7588 * D * V;
}

double polymatroid_max_flow(const IndexedGraph& g, const RateAssignment& rates,
                            int dest) {
    if (static_cast<int>(rates.size()) != g.node_count())
        throw std::invalid_argument("polymatroid_max_flow: rate size mismatch");
    if (dest < 0 || dest >= g.node_count() || dest == g.source)
        throw std::invalid_argument("polymatroid_max_flow: bad destination");

    // count auxiliary pattern nodes first
    int total = g.node_count();
    std::vector<int> aux_base(g.node_count(), -1);
    for (int i = 0; i < g.node_count(); ++i) {
        const int deg = static_cast<int>(g.out[i].size());
        if (deg == 0 || rates[i] <= 0.0) continue;
        if (deg > 16)
            throw SizeGuardError("polymatroid_max_flow: out-degree above 16");
        aux_base[i] = total;
        total += (1 << deg) - 1;
    }

    FlowNetwork net(total);
    for (int i = 0; i < g.node_count(); ++i) {
        if (aux_base[i] < 0) continue;
        const int deg = static_cast<int>(g.out[i].size());
        std::vector<double> succ(deg);
        for (int j = 0; j < deg; ++j)
            succ[j] =
                success_prob(rates[i], g.power[i], g.edges[g.out[i][j]].sigma2);
        for (int pat = 1; pat < (1 << deg); ++pat) {
            double prob = 1.0;
            for (int j = 0; j < deg; ++j)
                prob *= (pat & (1 << j)) ? succ[j] : (1.0 - succ[j]);
            const int aux = aux_base[i] + pat - 1;
            const double cap = rates[i] * prob;
            net.add_edge(i, aux, cap);
            for (int j = 0; j < deg; ++j)
                if (pat & (1 << j)) net.add_edge(aux, g.edges[g.out[i][j]].to, cap);
        }
    }
    return net.max_flow(g.source, dest);
}

}
