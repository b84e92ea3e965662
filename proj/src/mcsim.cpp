#include "netrate/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "netrate/maxflow.hpp"
#include "netrate/rng.hpp"

namespace netrate {

namespace {

void check_config(const SimConfig& cfg) {
    if (cfg.packets < 1000)
        throw std::invalid_argument("simulation needs at least 1000 packets");
}

void check_channel(double P, double sigma2) {
    if (!std::isfinite(P) || P <= 0.0)
        throw std::invalid_argument("simulation: power must be finite and > 0");
    if (!std::isfinite(sigma2) || sigma2 <= 0.0)
        throw std::invalid_argument("simulation: sigma2 must be finite and > 0");
}

double decode_gain_threshold(double R, double P) {
    if (R <= 0.0) return 0.0;
    return std::expm1(kTwoLn2 * R) / P;
}

}  // namespace

SimReport simulate_ptp_fixed(double R, double P, double sigma2,
                             const SimConfig& cfg) {
    check_config(cfg);
    check_channel(P, sigma2);
    if (R < 0.0 || !std::isfinite(R))
        throw std::invalid_argument("simulate_ptp_fixed: bad rate");
    const double threshold = decode_gain_threshold(R, P);

    SplitMix64 rng = substream(cfg.seed, 0);
    long long decoded = 0;
    for (long long s = 0; s < cfg.packets; ++s) {
        const double h = rng.exponential(sigma2);
        if (h >= threshold) ++decoded;
    }

    SimReport rep;
    rep.slots_run = cfg.packets;
    const double frac = static_cast<double>(decoded) / cfg.packets;
    rep.per_link_delivery.push_back(frac);
    rep.per_link_retention.push_back(frac);
    rep.empirical_rate = R * frac;
    if (cfg.report_stderr)
        rep.stderr_est = R * std::sqrt(frac * (1.0 - frac) / cfg.packets);
    return rep;
}

SimReport simulate_ptp_layered(const LayeredScheme& scheme, double P,
                               double sigma2, const SimConfig& cfg) {
    check_config(cfg);
    check_channel(P, sigma2);
    validate_layered_scheme(scheme, P);
    const size_t K = scheme.layer_rates.size();
    std::vector<double> thresholds(K), phys(K);
    for (size_t k = 0; k < K; ++k) {
        const double R = scheme.layer_rates[k];
        thresholds[k] = R > 0.0 ? decode_gain_threshold(R, P)
                                : 0.0;
        phys[k] = layer_rate(R, P, scheme.breakpoints[k + 1],
                             scheme.breakpoints[k]);
    }

    SplitMix64 rng = substream(cfg.seed, 0);
    std::vector<long long> layer_decoded(K, 0);
    double sum = 0.0, sumsq = 0.0;
    for (long long s = 0; s < cfg.packets; ++s) {
        const double h = rng.exponential(sigma2);
        double credited = 0.0;
        for (size_t k = 0; k < K; ++k) {
            if (scheme.layer_rates[k] <= 0.0) continue;
            if (h >= thresholds[k]) {
                credited += phys[k];
                ++layer_decoded[k];
            }
        }
        sum += credited;
        sumsq += credited * credited;
    }

    SimReport rep;
    rep.slots_run = cfg.packets;
    rep.empirical_rate = sum / cfg.packets;
    for (size_t k = 0; k < K; ++k) {
        const double frac = static_cast<double>(layer_decoded[k]) / cfg.packets;
        rep.per_link_delivery.push_back(frac);
        rep.per_link_retention.push_back(frac);
    }
    if (cfg.report_stderr && cfg.packets > 1) {
        const double var = std::max(
            0.0, (sumsq - sum * sum / cfg.packets) / (cfg.packets - 1));
        rep.stderr_est = std::sqrt(var / cfg.packets);
    }
    return rep;
}

SimReport simulate_network_unicast(const IndexedGraph& g,
                                   const RateAssignment& rates,
                                   const std::vector<std::vector<int>>& priorities,
                                   const SimConfig& cfg) {
    check_config(cfg);
    if (g.destinations.size() != 1)
        throw std::invalid_argument(
            "simulate_network_unicast: exactly one destination supported");
    const int n = g.node_count();
    const int m = g.edge_count();
    if (static_cast<int>(rates.size()) != n)
        throw std::invalid_argument("simulate_network_unicast: rate size");
    if (static_cast<int>(priorities.size()) != n)
        throw std::invalid_argument("simulate_network_unicast: priority size");
    for (int i = 0; i < n; ++i) {
        auto sorted = priorities[i];
        std::sort(sorted.begin(), sorted.end());
        auto expected = g.out[i];
        std::sort(expected.begin(), expected.end());
        if (sorted != expected)
            throw std::invalid_argument(
                "simulate_network_unicast: priorities[" + g.ids[i] +
                "] is not a permutation of its out-links");
    }

    std::vector<SplitMix64> edge_rng;
    edge_rng.reserve(m);
    for (int e = 0; e < m; ++e) edge_rng.push_back(substream(cfg.seed, 1 + e));

    std::vector<double> thresholds(n, 0.0);
    for (int i = 0; i < n; ++i)
        if (!g.out[i].empty())
            thresholds[i] = decode_gain_threshold(rates[i], g.power[i]);

    const int batches = 10;
    std::vector<long long> decoded(m, 0), retained(m, 0);
    std::vector<std::vector<long long>> retained_batch(
        batches, std::vector<long long>(m, 0));
    std::vector<char> slot_decoded(m, 0);

    int b = 0;
    long long batch_end = cfg.packets / batches;
    for (long long s = 0; s < cfg.packets; ++s) {
        while (s >= batch_end) {
            ++b;
            batch_end = cfg.packets * (b + 1) / batches;
        }
        for (int e = 0; e < m; ++e) {
            const double h = edge_rng[e].exponential(g.edges[e].sigma2);
            const int from = g.edges[e].from;
            slot_decoded[e] = h >= thresholds[from] ? 1 : 0;
            if (slot_decoded[e]) ++decoded[e];
        }
        for (int i = 0; i < n; ++i) {
            for (const int e : priorities[i]) {
                if (!slot_decoded[e]) continue;
                ++retained[e];
                ++retained_batch[b][e];
                break;
            }
        }
    }

    const auto end_to_end = [&](const std::vector<double>& caps) {
        FlowNetwork net(n);
        for (int e = 0; e < m; ++e)
            net.add_edge(g.edges[e].from, g.edges[e].to, caps[e]);
        return net.max_flow(g.source, g.destinations[0]);
    };

    SimReport rep;
    rep.slots_run = cfg.packets;
    rep.per_link_delivery.resize(m);
    rep.per_link_retention.resize(m);
    std::vector<double> caps(m);
    for (int e = 0; e < m; ++e) {
        rep.per_link_delivery[e] = static_cast<double>(decoded[e]) / cfg.packets;
        rep.per_link_retention[e] =
            static_cast<double>(retained[e]) / cfg.packets;
        caps[e] = rates[g.edges[e].from] * rep.per_link_retention[e];
    }
    rep.empirical_rate = end_to_end(caps);

    if (cfg.report_stderr) {
        double sum = 0.0, sumsq = 0.0;
        for (int k = 0; k < batches; ++k) {
            const long long lo = cfg.packets * k / batches;
            const long long hi = cfg.packets * (k + 1) / batches;
            const long long width = hi - lo;
            std::vector<double> bcaps(m);
            for (int e = 0; e < m; ++e)
                bcaps[e] = rates[g.edges[e].from] * retained_batch[k][e] / width;
            const double v = end_to_end(bcaps);
            sum += v;
            sumsq += v * v;
        }
        const double var =
            std::max(0.0, (sumsq - sum * sum / batches) / (batches - 1));
        rep.stderr_est = std::sqrt(var / batches);
    }
    return rep;
}

}
