#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netrate/channel.hpp"
#include "netrate/flowopt.hpp"
#include "netrate/graph.hpp"
#include "netrate/mcsim.hpp"
#include "netrate/netmodel.hpp"
#include "netrate/ptp.hpp"
#include "netrate/version.hpp"

namespace {

using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write output file '" + path + "'");
    out << content;
    if (!out.good()) throw UsageError("failed while writing '" + path + "'");
}

std::string comment_line(const std::string& invocation) {
    return std::string("# netrate v") + netrate::kVersion + " -- " + invocation +
           "\n";
}

std::string link_key(const netrate::IndexedGraph& g, int e) {
    return g.ids[g.edges[e].from] + "->" + g.ids[g.edges[e].to];
}

struct SolverFlags {
    int iters = 20000;
    double gamma0 = -1.0;
    double eta0 = -1.0;
    std::string step_mode = "diminishing";
    double window = 0.5;
    int grid = 128;
    double tolerance = 1e-3;
    std::uint64_t seed = 12345;
    int trace = 0;
};

netrate::SolverOptions to_options(const SolverFlags& f) {
    netrate::SolverOptions o;
    o.max_iters = f.iters;
    o.gamma0 = f.gamma0;
    o.eta0 = f.eta0;
    if (f.step_mode == "diminishing")
        o.step_mode = netrate::StepMode::diminishing;
    else if (f.step_mode == "constant")
        o.step_mode = netrate::StepMode::constant;
    else
        throw UsageError("--step-mode must be 'diminishing' or 'constant'");
    o.averaging_window = f.window;
    o.rate_grid = f.grid;
    o.tolerance = f.tolerance;
    o.seed = f.seed;
    o.trace_stride = f.trace;
    return o;
}

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--iters", f.iters, "iteration budget");
    cmd->add_option("--gamma0", f.gamma0,
                    "source-rate step scale (<=0: 0.5/|destinations|)");
    cmd->add_option("--eta0", f.eta0,
                    "queue step scale (<=0: 0.5/|destinations|)");
    cmd->add_option("--step-mode", f.step_mode, "diminishing or constant");
    cmd->add_option("--window", f.window, "trailing averaging fraction (0,1]");
    cmd->add_option("--grid", f.grid, "rate line-search grid points");
    cmd->add_option("--tolerance", f.tolerance, "residual target");
    cmd->add_option("--trace", f.trace, "record history every N iterations");
}

ordered_json solution_to_json(const netrate::IndexedGraph& g,
                              const netrate::FlowSolution& sol) {
    ordered_json j;
    j["C"] = sol.multicast_rate;
    j["converged"] = sol.converged;
    j["iterations"] = sol.iterations_run;
    j["max_residual"] = sol.max_residual;
    j["c_tail_rel_std"] = sol.c_tail_rel_std;
    ordered_json rates;
    for (int i = 0; i < g.node_count(); ++i)
        rates[g.ids[i]] = sol.node_rates[i];
    j["node_rates"] = rates;

    ordered_json flows, prios, residuals;
    for (size_t d = 0; d < g.destinations.size(); ++d) {
        const std::string dest = g.ids[g.destinations[d]];
        ordered_json f;
        for (int e = 0; e < g.edge_count(); ++e)
            f[link_key(g, e)] = sol.flows[d][e];
        flows[dest] = f;
        ordered_json p;
        for (int i = 0; i < g.node_count(); ++i) {
            if (g.out[i].empty()) continue;
            ordered_json order = ordered_json::array();
            for (const int e : sol.priorities[d][i])
                order.push_back(g.ids[g.edges[e].to]);
            p[g.ids[i]] = order;
        }
        prios[dest] = p;
        ordered_json r;
        for (int i = 0; i < g.node_count(); ++i)
            r[g.ids[i]] = sol.residuals[d][i];
        residuals[dest] = r;
    }
    j["flows"] = flows;
    j["priorities"] = prios;
    j["residuals"] = residuals;

    if (!sol.history.empty()) {
        ordered_json h = ordered_json::array();
        for (const auto& pt : sol.history) {
            ordered_json row;
            row["iter"] = pt.iter;
            row["C_avg"] = pt.c_avg;
            row["max_residual"] = pt.max_residual;
            h.push_back(row);
        }
        j["history"] = h;
    }
    return j;
}

int run_ptp_sweep(double snr_lo, double snr_hi, int points,
                  std::vector<std::string> schemes, const std::string& out,
                  const std::string& invocation) {
    if (points < 2) throw UsageError("--points must be >= 2");
    if (!(snr_lo < snr_hi)) throw UsageError("--snr-lo must be below --snr-hi");
    if (schemes.empty())
        schemes = {"one-rate", "two-rate", "infinite-rate", "csir-capacity",
                   "csirt-waterfilling"};

    const std::vector<std::string> known = {"one-rate", "two-rate",
                                            "infinite-rate", "csir-capacity",
                                            "csirt-waterfilling"};
    std::vector<bool> use(known.size(), false);
    for (const auto& s : schemes) {
        bool found = false;
        for (size_t k = 0; k < known.size(); ++k)
            if (s == known[k]) {
                use[k] = true;
                found = true;
            }
        if (!found)
            throw UsageError("unknown scheme '" + s +
                             "' (choose from one-rate, two-rate, infinite-rate,"
                             " csir-capacity, csirt-waterfilling)");
    }

    std::string csv = comment_line(invocation);
    csv += "snr_db";
    const std::vector<std::string> cols = {"one_rate", "two_rate",
                                           "infinite_rate", "csir_capacity",
                                           "csirt_waterfilling"};
    for (size_t k = 0; k < cols.size(); ++k)
        if (use[k]) csv += "," + cols[k];
    csv += "\n";

    for (int i = 0; i < points; ++i) {
        const double snr = snr_lo + (snr_hi - snr_lo) * i / (points - 1);
        const double P = std::pow(10.0, snr / 10.0);
        csv += fmt(snr);
        if (use[0]) csv += "," + fmt(netrate::fixed_rate_optimum(P, 1.0).F_star);
        if (use[1]) csv += "," + fmt(netrate::optimize_two_layer(P, 1.0).F);
        if (use[2]) csv += "," + fmt(netrate::infinite_layer_throughput(P, 1.0));
        if (use[3]) csv += "," + fmt(netrate::ergodic_capacity_csir(P, 1.0));
        if (use[4]) csv += "," + fmt(netrate::waterfilling_capacity(P, 1.0));
        csv += "\n";
    }
    write_file(out, csv);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int run_net_optimize(const std::string& graph_path, const SolverFlags& flags,
                     const std::string& out, const std::string& invocation) {
    const netrate::IndexedGraph g =
        netrate::validate_graph(netrate::load_graph_file(graph_path));
    const netrate::FlowSolution sol = netrate::solve(g, to_options(flags));

    ordered_json j;
    j["version"] = netrate::kVersion;
    j["invocation"] = invocation;
    j.update(solution_to_json(g, sol));
    write_file(out, j.dump(2) + "\n");
    std::cout << "C = " << fmt(sol.multicast_rate)
              << (sol.converged ? " (converged)" : " (residuals above tolerance)")
              << ", wrote " << out << "\n";
    return sol.converged ? 0 : 3;
}

int run_net_cutset(const std::string& graph_path, int grid, int restarts,
                   std::uint64_t seed, const std::string& out,
                   const std::string& invocation) {
    const netrate::IndexedGraph g =
        netrate::validate_graph(netrate::load_graph_file(graph_path));
    netrate::CutsetResult res;
    try {
        res = netrate::cutset_rate_fixed(g, grid, restarts, seed);
    } catch (const netrate::SizeGuardError& e) {
        std::cerr << "error: " << e.what()
                  << " (run `netrate net optimize` instead)\n";
        return 2;
    }

    ordered_json j;
    j["version"] = netrate::kVersion;
    j["invocation"] = invocation;
    j["C"] = res.C;
    ordered_json rates;
    for (int i = 0; i < g.node_count(); ++i) rates[g.ids[i]] = res.rates[i];
    j["rates"] = rates;
    j["per_cut_values"] = res.per_cut_values;
    ordered_json cuts = ordered_json::array();
    for (const auto& cut : netrate::enumerate_cuts(g)) {
        ordered_json side = ordered_json::array();
        for (const int i : cut.source_side) side.push_back(g.ids[i]);
        cuts.push_back(side);
    }
    j["cuts"] = cuts;
    write_file(out, j.dump(2) + "\n");
    std::cout << "C = " << fmt(res.C) << ", wrote " << out << "\n";
    return 0;
}

int run_net_bound(const std::string& graph_path, int samples,
                  std::uint64_t seed, const std::string& out,
                  const std::string& invocation) {
    const netrate::IndexedGraph g =
        netrate::validate_graph(netrate::load_graph_file(graph_path));
    const netrate::BoundResult res =
        netrate::capacity_upper_bound(g, samples, seed);

    ordered_json j;
    j["version"] = netrate::kVersion;
    j["invocation"] = invocation;
    j["C_ub"] = res.C_ub;
    j["stderr"] = res.stderr_est;
    j["per_cut"] = res.per_cut;
    j["per_cut_stderr"] = res.per_cut_stderr;
    j["samples"] = samples;
    write_file(out, j.dump(2) + "\n");
    std::cout << "C_ub = " << fmt(res.C_ub) << " +/- " << fmt(res.stderr_est)
              << ", wrote " << out << "\n";
    return 0;
}

int run_net_gap(const std::string& graph_path, std::vector<double> powers,
                int samples, const SolverFlags& flags, const std::string& out,
                const std::string& invocation) {
    if (powers.empty()) throw UsageError("--powers must list at least one value");
    for (const double p : powers)
        if (!(p > 0.0)) throw UsageError("--powers entries must be > 0");
    netrate::NetworkGraph base = netrate::load_graph_file(graph_path);

    std::string csv = comment_line(invocation);
    csv += "P,C,C_ub,ratio,gap_constant\n";
    bool all_converged = true;
    for (size_t k = 0; k < powers.size(); ++k) {
        netrate::NetworkGraph ng = base;
        for (auto& node : ng.nodes) node.power = powers[k];
        const netrate::IndexedGraph g = netrate::validate_graph(ng);
        const netrate::FlowSolution sol = netrate::solve(g, to_options(flags));
        all_converged = all_converged && sol.converged;
        const netrate::BoundResult bound = netrate::capacity_upper_bound(
            g, samples, flags.seed + static_cast<std::uint64_t>(k));
        csv += fmt(powers[k]) + "," + fmt(sol.multicast_rate) + "," +
               fmt(bound.C_ub) + "," + fmt(bound.C_ub / sol.multicast_rate) +
               "," + fmt(netrate::capacity_gap_constant(g)) + "\n";
    }
    write_file(out, csv);
    std::cout << "wrote " << out << "\n";
    return all_converged ? 0 : 3;
}

int run_simulate_ptp(double rate, double power, double sigma2,
                     long long packets, std::uint64_t seed,
                     const std::string& out, const std::string& invocation) {
    netrate::SimConfig cfg;
    cfg.packets = packets;
    cfg.seed = seed;
    const netrate::SimReport rep =
        netrate::simulate_ptp_fixed(rate, power, sigma2, cfg);

    ordered_json j;
    j["version"] = netrate::kVersion;
    j["invocation"] = invocation;
    j["mode"] = "ptp";
    j["rate"] = rate;
    j["power"] = power;
    j["sigma2"] = sigma2;
    j["slots"] = rep.slots_run;
    j["empirical_rate"] = rep.empirical_rate;
    j["stderr"] = rep.stderr_est;
    j["delivery_fraction"] = rep.per_link_delivery[0];
    j["analytic_rate"] = netrate::fixed_rate_throughput(rate, power, sigma2);
    write_file(out, j.dump(2) + "\n");
    std::cout << "empirical " << fmt(rep.empirical_rate) << " vs analytic "
              << fmt(netrate::fixed_rate_throughput(rate, power, sigma2))
              << ", wrote " << out << "\n";
    return 0;
}

int run_simulate_network(const std::string& graph_path, long long packets,
                         std::uint64_t seed, const SolverFlags& flags,
                         const std::string& out,
                         const std::string& invocation) {
    const netrate::IndexedGraph g =
        netrate::validate_graph(netrate::load_graph_file(graph_path));
    const netrate::FlowSolution sol = netrate::solve(g, to_options(flags));

    netrate::SimConfig cfg;
    cfg.packets = packets;
    cfg.seed = seed;
    const netrate::SimReport rep = netrate::simulate_network_unicast(
        g, sol.node_rates, sol.priorities[0], cfg);

    ordered_json j;
    j["version"] = netrate::kVersion;
    j["invocation"] = invocation;
    j["mode"] = "network";
    j["slots"] = rep.slots_run;
    j["empirical_rate"] = rep.empirical_rate;
    j["stderr"] = rep.stderr_est;
    j["solver_rate"] = sol.multicast_rate;
    ordered_json rates;
    for (int i = 0; i < g.node_count(); ++i) rates[g.ids[i]] = sol.node_rates[i];
    j["rates_used"] = rates;
    ordered_json delivery, retention;
    for (int e = 0; e < g.edge_count(); ++e) {
        delivery[link_key(g, e)] = rep.per_link_delivery[e];
        retention[link_key(g, e)] = rep.per_link_retention[e];
    }
    j["per_link_delivery"] = delivery;
    j["per_link_retention"] = retention;
    write_file(out, j.dump(2) + "\n");
    std::cout << "empirical " << fmt(rep.empirical_rate) << " vs solver "
              << fmt(sol.multicast_rate) << ", wrote " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string invocation = join_args(argc, argv);
    CLI::App app{"achievable-rate tools for fading multihop networks"};
    app.require_subcommand(1);

    // ptp-sweep
    double snr_lo = -10.0, snr_hi = 30.0;
    int points = 9;
    std::vector<std::string> schemes;
    std::string sweep_out;
    CLI::App* sweep = app.add_subcommand(
        "ptp-sweep", "tabulate single-link rates across an SNR range");
    sweep->add_option("--snr-lo", snr_lo, "lowest 10*log10(P*sigma2), dB");
    sweep->add_option("--snr-hi", snr_hi, "highest 10*log10(P*sigma2), dB");
    sweep->add_option("--points", points, "grid points (>= 2)");
    sweep->add_option("--schemes", schemes,
                      "subset of one-rate,two-rate,infinite-rate,"
                      "csir-capacity,csirt-waterfilling (default: all)")
        ->delimiter(',');
    sweep->add_option("--out", sweep_out, "output CSV path")->required();

    // net
    CLI::App* net = app.add_subcommand("net", "network-level computations");
    net->require_subcommand(1);

    std::string opt_graph, opt_out;
    SolverFlags opt_flags;
    CLI::App* optimize = net->add_subcommand(
        "optimize", "maximize the multicast rate with the flow solver");
    optimize->add_option("--graph", opt_graph, "graph JSON path")->required();
    optimize->add_option("--out", opt_out, "output JSON path")->required();
    optimize->add_option("--seed", opt_flags.seed, "solver seed");
    add_solver_flags(optimize, opt_flags);

    std::string cut_graph, cut_out;
    int cut_grid = 256, cut_restarts = 4;
    std::uint64_t cut_seed = 12345;
    CLI::App* cutset = net->add_subcommand(
        "cutset", "fixed-rate cut-set optimum by enumeration");
    cutset->add_option("--graph", cut_graph, "graph JSON path")->required();
    cutset->add_option("--out", cut_out, "output JSON path")->required();
    cutset->add_option("--grid", cut_grid, "line-search grid points");
    cutset->add_option("--restarts", cut_restarts, "random restarts");
    cutset->add_option("--seed", cut_seed, "restart seed");

    std::string bound_graph, bound_out;
    int bound_samples = 50000;
    std::uint64_t bound_seed = 12345;
    CLI::App* bound = net->add_subcommand(
        "bound", "Monte Carlo cut upper bound on the capacity");
    bound->add_option("--graph", bound_graph, "graph JSON path")->required();
    bound->add_option("--out", bound_out, "output JSON path")->required();
    bound->add_option("--samples", bound_samples, "Monte Carlo samples (>= 1e4)");
    bound->add_option("--seed", bound_seed, "sampling seed");

    std::string gap_graph, gap_out;
    std::vector<double> gap_powers;
    int gap_samples = 50000;
    SolverFlags gap_flags;
    CLI::App* gap = net->add_subcommand(
        "gap", "achievable rate vs upper bound across powers");
    gap->add_option("--graph", gap_graph, "graph JSON path")->required();
    gap->add_option("--out", gap_out, "output CSV path")->required();
    gap->add_option("--powers", gap_powers, "power values applied to all nodes")
        ->required()
        ->delimiter(',');
    gap->add_option("--samples", gap_samples, "Monte Carlo samples per bound");
    gap->add_option("--seed", gap_flags.seed, "sampling / solver seed");
    add_solver_flags(gap, gap_flags);

    // simulate
    std::string sim_graph, sim_out;
    bool sim_ptp = false;
    double sim_rate = 0.0, sim_power = 0.0, sim_sigma2 = 1.0;
    long long sim_packets = 100000;
    std::uint64_t sim_seed = 1;
    SolverFlags sim_flags;
    CLI::App* sim = app.add_subcommand(
        "simulate", "packet-level Monte Carlo check of the analytic rates");
    sim->add_option("--graph", sim_graph, "graph JSON path (network mode)");
    sim->add_flag("--ptp", sim_ptp, "single-link fixed-rate mode");
    CLI::Option* rate_opt =
        sim->add_option("--rate", sim_rate, "transmission rate (ptp mode)");
    CLI::Option* power_opt =
        sim->add_option("--power", sim_power, "transmit power (ptp mode)");
    sim->add_option("--sigma2", sim_sigma2, "mean channel power gain");
    sim->add_option("--packets", sim_packets, "slots to simulate (>= 1000)");
    CLI::Option* seed_opt = sim->add_option("--seed", sim_seed, "master seed");
    sim->add_option("--out", sim_out, "output JSON path")->required();
    sim->add_option("--iters", sim_flags.iters,
                    "solver iterations (network mode)");
    sim->add_option("--gamma0", sim_flags.gamma0, "solver step scale");
    sim->add_option("--eta0", sim_flags.eta0, "solver step scale");
    sim->add_option("--step-mode", sim_flags.step_mode,
                    "diminishing or constant");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sweep->parsed())
            return run_ptp_sweep(snr_lo, snr_hi, points, schemes, sweep_out,
                                 invocation);
        if (optimize->parsed())
            return run_net_optimize(opt_graph, opt_flags, opt_out, invocation);
        if (cutset->parsed())
            return run_net_cutset(cut_graph, cut_grid, cut_restarts, cut_seed,
                                  cut_out, invocation);
        if (bound->parsed())
            return run_net_bound(bound_graph, bound_samples, bound_seed,
                                 bound_out, invocation);
        if (gap->parsed())
            return run_net_gap(gap_graph, gap_powers, gap_samples, gap_flags,
                               gap_out, invocation);
        if (sim->parsed()) {
            const bool has_graph = !sim_graph.empty();
            if (has_graph == sim_ptp)
                throw UsageError("pass exactly one of --graph or --ptp");
            if (sim_ptp) {
                if (rate_opt->count() == 0 || power_opt->count() == 0)
                    throw UsageError("ptp mode requires --rate and --power");
                return run_simulate_ptp(sim_rate, sim_power, sim_sigma2,
                                        sim_packets, sim_seed, sim_out,
                                        invocation);
            }
            if (seed_opt->count() == 0)
                throw UsageError("network simulation requires --seed");
            return run_simulate_network(sim_graph, sim_packets, sim_seed,
                                        sim_flags, sim_out, invocation);
        }
        throw UsageError("no command selected");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const netrate::SizeGuardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const netrate::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
