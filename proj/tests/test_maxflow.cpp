#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netrate/maxflow.hpp"

using namespace netrate;

TEST_CASE("single edge saturates") {
    FlowNetwork net(2);
    const int e = net.add_edge(0, 1, 3.0);
    CHECK(net.max_flow(0, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(net.flow_on(e) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("two disjoint paths") {
    // 0 -> 1 -> 3 and 0 -> 2 -> 3
    FlowNetwork net(4);
    const int a = net.add_edge(0, 1, 1.0);
    const int b = net.add_edge(0, 2, 2.0);
    net.add_edge(1, 3, 2.0);
    net.add_edge(2, 3, 1.0);
    CHECK(net.max_flow(0, 3) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(net.flow_on(a) + net.flow_on(b) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("cross edge reroutes flow") {
    // min cut is {0,1,2} with value 4; the direct paths alone carry only 3
    FlowNetwork net(4);
    net.add_edge(0, 1, 2.0);
    net.add_edge(0, 2, 2.0);
    net.add_edge(1, 3, 1.0);
    net.add_edge(2, 3, 3.0);
    net.add_edge(1, 2, 2.0);
    CHECK(net.max_flow(0, 3) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("unused cross edge") {
    FlowNetwork net(4);
    net.add_edge(0, 1, 10.0);
    net.add_edge(0, 2, 10.0);
    net.add_edge(1, 2, 1.0);
    net.add_edge(1, 3, 10.0);
    net.add_edge(2, 3, 10.0);
    CHECK(net.max_flow(0, 3) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("disconnected sink gets zero flow") {
    FlowNetwork net(3);
    net.add_edge(0, 1, 5.0);
    CHECK(net.max_flow(0, 2) == 0.0);
}

TEST_CASE("zero capacity carries nothing") {
    FlowNetwork net(2);
    const int e = net.add_edge(0, 1, 0.0);
    CHECK(net.max_flow(0, 1) == 0.0);
    CHECK(net.flow_on(e) == 0.0);
}

TEST_CASE("fractional capacities") {
    FlowNetwork net(4);
    net.add_edge(0, 1, 0.25);
    net.add_edge(0, 2, 0.5);
    net.add_edge(1, 3, 1.0);
    net.add_edge(2, 3, 0.125);
    CHECK(net.max_flow(0, 3) == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("flow conservation at interior nodes") {
    FlowNetwork net(5);
    const int e01 = net.add_edge(0, 1, 1.5);
    const int e02 = net.add_edge(0, 2, 1.0);
    const int e13 = net.add_edge(1, 3, 1.0);
    const int e12 = net.add_edge(1, 2, 1.0);
    const int e23 = net.add_edge(2, 3, 0.75);
    const int e34 = net.add_edge(3, 4, 2.0);
    const int e24 = net.add_edge(2, 4, 0.5);
    const double F = net.max_flow(0, 4);
    CHECK(F == doctest::Approx(net.flow_on(e01) + net.flow_on(e02)).epsilon(1e-12));
    CHECK(net.flow_on(e01) ==
          doctest::Approx(net.flow_on(e13) + net.flow_on(e12)).epsilon(1e-12));
    CHECK(net.flow_on(e02) + net.flow_on(e12) ==
          doctest::Approx(net.flow_on(e23) + net.flow_on(e24)).epsilon(1e-12));
    CHECK(net.flow_on(e34) == doctest::Approx(net.flow_on(e13) + net.flow_on(e23))
                                  .epsilon(1e-12));
}
