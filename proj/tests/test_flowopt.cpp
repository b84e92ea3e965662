#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "netrate/channel.hpp"
#include "netrate/flowopt.hpp"
#include "netrate/graph.hpp"
#include "netrate/netmodel.hpp"
#include "netrate/ptp.hpp"
#include "netrate/rng.hpp"

using namespace netrate;

namespace {

IndexedGraph diamond(double P) {
    NetworkGraph g;
    g.nodes = {{"s", P}, {"r1", P}, {"r2", P}, {"d", P}};
    g.links = {{"s", "r1", 1.0}, {"s", "r2", 1.0}, {"r1", "d", 1.0},
               {"r2", "d", 1.0}};
    g.source = "s";
    g.destinations = {"d"};
    return validate_graph(g);
}

IndexedGraph single_link(double P) {
    NetworkGraph g;
    g.nodes = {{"s", P}, {"d", P}};
    g.links = {{"s", "d", 1.0}};
    g.source = "s";
    g.destinations = {"d"};
    return validate_graph(g);
}

IndexedGraph fork(double P_a, double P_b) {
    // a -> {b, c}, both -> d; out-link variances differ at the source
    NetworkGraph g;
    g.nodes = {{"a", P_a}, {"b", P_b}, {"c", P_b}, {"d", P_b}};
    g.links = {{"a", "b", 1.0}, {"a", "c", 0.5}, {"b", "d", 1.0},
               {"c", "d", 1.0}};
    g.source = "a";
    g.destinations = {"d"};
    return validate_graph(g);
}

DualState zero_state(const IndexedGraph& g) {
    DualState st;
    st.q.assign(g.destinations.size(),
                std::vector<double>(g.node_count(), 0.0));
    return st;
}

double min_cut_of(const IndexedGraph& g, const RateAssignment& rates) {
    double best = std::numeric_limits<double>::infinity();
    for (const Cut& c : enumerate_cuts(g))
        best = std::min(best, cut_value(c, rates, g));
    return best;
}

}  // namespace

TEST_CASE("neighbor priorities order by clamped queue drop") {
    const IndexedGraph g = diamond(1.0);
    DualState st = zero_state(g);
    st.q[0] = {5.0, 3.0, 1.0, 0.0};
    const PriorityList pi = neighbor_priorities(st, 0, 0, g);
    REQUIRE(pi.edges.size() == 2);
    CHECK(g.edges[pi.edges[0]].to == 2);  // r2 first: weight 4
    CHECK(g.edges[pi.edges[1]].to == 1);  // r1 second: weight 2
    CHECK(pi.weights[0] == 4.0);
    CHECK(pi.weights[1] == 2.0);

    // equal queues: weights zero, ties broken by ascending id
    st.q[0] = {2.0, 2.0, 2.0, 0.0};
    const PriorityList tie = neighbor_priorities(st, 0, 0, g);
    CHECK(g.edges[tie.edges[0]].to == 1);  // "r1" < "r2"
    CHECK(tie.weights[0] == 0.0);
    CHECK(tie.weights[1] == 0.0);

    // negative drop clamps to zero
    st.q[0] = {2.0, 7.0, 1.0, 0.0};
    const PriorityList cl = neighbor_priorities(st, 0, 0, g);
    CHECK(cl.weights[0] == 1.0);
    CHECK(cl.weights[1] == 0.0);
    CHECK(g.edges[cl.edges[1]].to == 1);
}

TEST_CASE("flow assignment cascades by priority") {
    const IndexedGraph g = diamond(1.0);
    DualState st = zero_state(g);
    st.q[0] = {5.0, 3.0, 1.0, 0.0};
    const PriorityList pi = neighbor_priorities(st, 0, 0, g);
    const std::vector<double> x = assign_flows(0.5, pi, 0, g);
    REQUIRE(x.size() == 2);
    const double eps = erasure_prob(0.5, 1.0, 1.0);
    CHECK(x[0] == doctest::Approx(0.5 * (1.0 - eps)).epsilon(1e-13));
    CHECK(x[1] == doctest::Approx(0.5 * eps * (1.0 - eps)).epsilon(1e-13));
    CHECK(x[0] == doctest::Approx(0.18393972).epsilon(1e-7));
    CHECK(x[1] == doctest::Approx(0.11627281).epsilon(1e-6));
    // prefix sums hit the broadcast bound exactly
    CHECK(x[0] + x[1] ==
          doctest::Approx(0.5 * (1.0 - eps * eps)).epsilon(1e-13));

    // zero-weight links still carry their formula value
    st.q[0] = {2.0, 2.0, 2.0, 0.0};
    const PriorityList tie = neighbor_priorities(st, 0, 0, g);
    const std::vector<double> xt = assign_flows(0.5, tie, 0, g);
    CHECK(xt[0] > 0.0);
    CHECK(xt[1] > 0.0);
}

TEST_CASE("single-neighbor rate choice recovers the fixed-rate optimum") {
    const IndexedGraph g = single_link(10.0);
    DualState st = zero_state(g);
    st.q[0] = {1.0, 0.0};
    const std::vector<PriorityList> pls{neighbor_priorities(st, 0, 0, g)};
    const double R = select_rate(0, pls, g, 512, 4);
    CHECK(R == doctest::Approx(fixed_rate_optimum(10.0, 1.0).R_star)
                   .epsilon(1e-4));
}

TEST_CASE("rate choice weighs two neighbors against a dense grid") {
    const IndexedGraph g = fork(10.0, 1.0);
    DualState st = zero_state(g);
    st.q[0] = {3.0, 1.0, 2.0, 0.0};  // weights: b -> 2, c -> 1
    const std::vector<PriorityList> pls{neighbor_priorities(st, 0, 0, g)};
    REQUIRE(pls[0].weights[0] == 2.0);
    REQUIRE(pls[0].weights[1] == 1.0);

    const auto objective = [&](double R) {
        const double e1 = erasure_prob(R, 10.0, 1.0);
        const double e2 = erasure_prob(R, 10.0, 0.5);
        return R * ((2.0 - 1.0) * (1.0 - e1) + 1.0 * (1.0 - e1 * e2));
    };
    double best_val = 0.0;
    const double cap = rate_search_cap(10.0, 1.0);
    for (int i = 0; i <= 10000; ++i)
        best_val = std::max(best_val, objective(cap * i / 10000.0));

    const double R = select_rate(0, pls, g, 128, 3);
    CHECK(R == doctest::Approx(1.287330).epsilon(1e-3));
    CHECK(objective(R) >= best_val - 1e-7);
    CHECK(best_val == doctest::Approx(1.7549901328).epsilon(1e-6));
}

TEST_CASE("rate choice is zero when no queue pulls") {
    const IndexedGraph g = diamond(10.0);
    const DualState st = zero_state(g);
    const std::vector<PriorityList> pls{neighbor_priorities(st, 0, 0, g)};
    CHECK(select_rate(0, pls, g, 128, 3) == 0.0);
}

TEST_CASE("source rate update") {
    const IndexedGraph g = single_link(1.0);
    DualState st = zero_state(g);
    st.q[0] = {1.0, 0.0};
    CHECK(update_source_rate(0.7, st, 0.1, g) ==
          doctest::Approx(0.7).epsilon(1e-15));
    st.q[0] = {2.0, 0.0};
    CHECK(update_source_rate(0.0, st, 0.1, g) == 0.0);
    st.q[0] = {0.0, 0.0};
    CHECK(update_source_rate(1.0, st, 0.1, g) ==
          doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("dual update cases") {
    const IndexedGraph g = single_link(1.0);
    DualState st = zero_state(g);
    st.q[0] = {2.0, 9.0};
    // source: out 0.5, in 0, C = 1 -> q = [2 - 0.1 (0.5 - 1)]+ = 2.05
    const std::vector<std::vector<double>> flows{{0.5}};
    const DualState nx = update_duals(st, flows, 1.0, 0.1, g);
    CHECK(nx.q[0][0] == doctest::Approx(2.05).epsilon(1e-15));
    CHECK(nx.q[0][1] == 0.0);  // destination queue stays pinned at zero
    CHECK(nx.iteration == st.iteration + 1);

    // relay conservation: three-node chain, out exceeds in
    NetworkGraph cg;
    cg.nodes = {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}};
    cg.links = {{"a", "b", 1.0}, {"b", "c", 1.0}};
    cg.source = "a";
    cg.destinations = {"c"};
    const IndexedGraph chain = validate_graph(cg);
    DualState cs = zero_state(chain);
    cs.q[0] = {1.0, 3.0, 7.0};
    const std::vector<std::vector<double>> cf{{0.2, 0.6}};
    const DualState cn = update_duals(cs, cf, 0.5, 0.25, chain);
    // b: q = [3 - 0.25 (0.6 - 0.2)]+ = 2.9
    CHECK(cn.q[0][1] == doctest::Approx(2.9).epsilon(1e-14));
    // a: q = [1 - 0.25 (0.2 - 0.5)]+ = 1.075
    CHECK(cn.q[0][0] == doctest::Approx(1.075).epsilon(1e-14));
    CHECK(cn.q[0][2] == 0.0);

    // clamp at zero
    DualState lo = zero_state(chain);
    lo.q[0] = {0.0, 0.1, 0.0};
    const std::vector<std::vector<double>> lf{{0.0, 3.0}};
    CHECK(update_duals(lo, lf, 0.0, 0.25, chain).q[0][1] == 0.0);
}

TEST_CASE("broadcast feasibility of assigned flows") {
    // prefix sums are tight; arbitrary subsets never exceed their bound
    SplitMix64 rng(404);
    const IndexedGraph g = fork(10.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        DualState st = zero_state(g);
        for (int i = 0; i < g.node_count(); ++i)
            st.q[0][i] = 5.0 * rng.uniform01();
        st.q[0][3] = 0.0;
        const PriorityList pi = neighbor_priorities(st, 0, 0, g);
        const double R = 3.0 * rng.uniform01();
        const std::vector<double> x = assign_flows(R, pi, 0, g);

        double prefix = 0.0, surv = 1.0;
        for (size_t k = 0; k < x.size(); ++k) {
            const int e = pi.edges[k];
            prefix += x[k];
            surv *= erasure_prob(R, 10.0, g.edges[e].sigma2);
            CHECK(prefix == doctest::Approx(R * (1.0 - surv)).epsilon(1e-12));
        }
        // singleton subsets: x_k <= R (1 - eps_k)
        for (size_t k = 0; k < x.size(); ++k) {
            const int e = pi.edges[k];
            CHECK(x[k] <=
                  R * (1.0 - erasure_prob(R, 10.0, g.edges[e].sigma2)) + 1e-12);
        }
    }
}

TEST_CASE("selected rate maximizes the sum of weighted flows") {
    // the line-search objective and sum_j w_j x_j agree identically
    SplitMix64 rng(11);
    const IndexedGraph g = fork(10.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        DualState st = zero_state(g);
        for (int i = 0; i < 3; ++i) st.q[0][i] = 4.0 * rng.uniform01();
        const PriorityList pi = neighbor_priorities(st, 0, 0, g);
        const std::vector<PriorityList> pls{pi};
        for (const double R : {0.4, 1.3, 2.2}) {
            const std::vector<double> x = assign_flows(R, pi, 0, g);
            double dot = 0.0;
            for (size_t k = 0; k < x.size(); ++k) dot += pi.weights[k] * x[k];
            // telescoped form
            double tel = 0.0, surv = 1.0;
            for (size_t k = 0; k < x.size(); ++k) {
                surv *= erasure_prob(R, 10.0, g.edges[pi.edges[k]].sigma2);
                const double w_next =
                    k + 1 < x.size() ? pi.weights[k + 1] : 0.0;
                tel += (pi.weights[k] - w_next) * R * (1.0 - surv);
            }
            CHECK(dot == doctest::Approx(tel).epsilon(1e-9));
        }
    }
}

TEST_CASE("solver options are validated") {
    const IndexedGraph g = single_link(1.0);
    SolverOptions bad;
    bad.max_iters = 0;
    CHECK_THROWS_AS(solve(g, bad), std::invalid_argument);
    bad = SolverOptions{};
    bad.averaging_window = 0.0;
    CHECK_THROWS_AS(solve(g, bad), std::invalid_argument);
    bad = SolverOptions{};
    bad.averaging_window = 1.5;
    CHECK_THROWS_AS(solve(g, bad), std::invalid_argument);
    bad = SolverOptions{};
    bad.tolerance = 0.0;
    CHECK_THROWS_AS(solve(g, bad), std::invalid_argument);
    bad = SolverOptions{};
    bad.fixed_rates = std::vector<double>{1.0};
    CHECK_THROWS_AS(solve(g, bad), std::invalid_argument);
}

TEST_CASE("single link converges to the fixed-rate optimum") {
    const IndexedGraph g = single_link(10.0);
    SolverOptions opts;
    const FlowSolution sol = solve(g, opts);
    const double target = fixed_rate_optimum(10.0, 1.0).F_star;
    CHECK(std::abs(sol.multicast_rate - target) / target < 0.01);
    CHECK(sol.iterations_run <= opts.max_iters);
    REQUIRE(sol.flows.size() == 1);
    REQUIRE(sol.flows[0].size() == 1);
    CHECK(sol.flows[0][0] == doctest::Approx(sol.multicast_rate).epsilon(0.05));
}

TEST_CASE("diamond converges to the cut-set rate") {
    SolverOptions opts;
    opts.gamma0 = 1.0;
    opts.eta0 = 1.0;
    opts.averaging_window = 0.25;
    for (const double P : {1.0, 10.0}) {
        const IndexedGraph g = diamond(P);
        const FlowSolution sol = solve(g, opts);
        const double target = cutset_rate_fixed(g).C;
        CHECK(std::abs(sol.multicast_rate - target) / target < 0.01);
        CHECK(sol.c_tail_rel_std < 0.05);
    }
}

TEST_CASE("two disjoint relay paths double the single-path rate") {
    NetworkGraph g;
    g.nodes = {{"s", 1000.0}, {"r1", 10.0}, {"r2", 10.0}, {"d", 10.0}};
    g.links = {{"s", "r1", 1.0}, {"s", "r2", 1.0}, {"r1", "d", 1.0},
               {"r2", "d", 1.0}};
    g.source = "s";
    g.destinations = {"d"};
    SolverOptions opts;
    opts.gamma0 = 1.0;
    opts.eta0 = 1.0;
    opts.averaging_window = 0.25;
    const FlowSolution sol = solve(validate_graph(g), opts);
    const double target = 2.0 * fixed_rate_optimum(10.0, 1.0).F_star;
    CHECK(std::abs(sol.multicast_rate - target) / target < 0.01);
}

TEST_CASE("solution stays under the information-theoretic ceiling") {
    SolverOptions opts;
    opts.gamma0 = 1.0;
    opts.eta0 = 1.0;
    opts.averaging_window = 0.25;
    const IndexedGraph g = diamond(10.0);
    const FlowSolution sol = solve(g, opts);
    const BoundResult ub = capacity_upper_bound(g, 100000, 3);
    CHECK(sol.multicast_rate <= ub.C_ub + 3.0 * ub.stderr_est);
}

TEST_CASE("pinned rates recover the min cut by duality") {
    const IndexedGraph g = diamond(10.0);
    const RateAssignment rates{1.2, 0.8, 0.8, 0.0};
    SolverOptions opts;
    opts.fixed_rates = rates;
    opts.step_mode = StepMode::constant;
    opts.gamma0 = 0.05;
    opts.eta0 = 0.2;
    opts.max_iters = 100000;
    const FlowSolution sol = solve(g, opts);
    CHECK(std::abs(sol.multicast_rate - min_cut_of(g, rates)) < 1e-3);

    const IndexedGraph sl = single_link(1.0);
    SolverOptions so;
    so.fixed_rates = std::vector<double>{0.5, 0.0};
    so.step_mode = StepMode::constant;
    so.gamma0 = 0.05;
    so.eta0 = 0.2;
    so.max_iters = 100000;
    const FlowSolution ss = solve(sl, so);
    CHECK(std::abs(ss.multicast_rate - fixed_rate_throughput(0.5, 1.0, 1.0)) <
          1e-3);
}

TEST_CASE("runs are deterministic") {
    const IndexedGraph g = diamond(10.0);
    SolverOptions opts;
    opts.max_iters = 3000;
    const FlowSolution a = solve(g, opts);
    const FlowSolution b = solve(g, opts);
    CHECK(a.multicast_rate == b.multicast_rate);
    CHECK(a.node_rates == b.node_rates);
    CHECK(a.max_residual == b.max_residual);
}

TEST_CASE("short runs report non-convergence instead of throwing") {
    const IndexedGraph g = diamond(10.0);
    SolverOptions opts;
    opts.max_iters = 40;
    opts.tolerance = 1e-9;
    const FlowSolution sol = solve(g, opts);
    CHECK_FALSE(sol.converged);
    CHECK(sol.iterations_run == 40);
    CHECK(sol.max_residual > 1e-9);
}

TEST_CASE("trace records the requested stride") {
    const IndexedGraph g = single_link(10.0);
    SolverOptions opts;
    opts.max_iters = 1000;
    opts.trace_stride = 100;
    const FlowSolution sol = solve(g, opts);
    CHECK(sol.history.size() == 10);
    CHECK(sol.history.front().iter == 100);
    CHECK(sol.history.back().iter == 1000);
    for (const TracePoint& tp : sol.history) CHECK(tp.c_avg >= 0.0);
}
