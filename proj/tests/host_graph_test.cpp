#include "doctest.h"

#include <cmath>
#include <set>

#include "ipm/host_graph.hpp"

using namespace ipm;

namespace {

std::size_t product_cross_edges(const HostGraph& g) {
    std::size_t count = 0;
    for (const auto& e : g.edges())
        if (g.coords()[e.u].layer != g.coords()[e.v].layer) ++count;
    return count;
}

}  // namespace

TEST_CASE("complete graph sizes") {
    CHECK(complete_graph(3).edge_count() == 3);
    CHECK(complete_graph(1).vertex_count() == 1);
    CHECK(complete_graph(1).edge_count() == 0);
    CHECK(complete_graph(6).edge_count() == 15);
    CHECK(complete_graph(6).kind() == GraphKind::complete);
    CHECK(complete_graph(6).q_meta() == 1.0);
    CHECK_THROWS_AS((void)complete_graph(0), std::invalid_argument);
}

TEST_CASE("erdos-renyi extremes and determinism") {
    CHECK(erdos_renyi(40, 0.0, 7).edge_count() == 0);
    CHECK(erdos_renyi(40, 1.0, 7).edge_count() == 780);
    const auto a = erdos_renyi(100, 0.5, 11);
    const auto b = erdos_renyi(100, 0.5, 11);
    CHECK(a.edges() == b.edges());
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(a.q_meta() == 0.5);
    CHECK(erdos_renyi(100, 0.5, 12).edges() != a.edges());
    CHECK_THROWS((void)erdos_renyi(10, 1.5, 1));
}

TEST_CASE("erdos-renyi edge count plausibility is a warning only") {
    const double pairs = 4950.0;
    const double mean = pairs * 0.5;
    const double slack = 3.0 * std::sqrt(pairs * 0.25) + 1.0;
    int plausible = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = erdos_renyi(100, 0.5, seed);
        const bool inside = std::abs(static_cast<double>(g.edge_count()) - mean) <= slack;
        CHECK(erdos_renyi_count_plausible(g, 0.5) == inside);
        plausible += inside ? 1 : 0;
    }
    CHECK(plausible >= 18);
}

TEST_CASE("hypercube sizes") {
    CHECK(hypercube(3).vertex_count() == 8);
    CHECK(hypercube(3).edge_count() == 12);
    CHECK(hypercube(0).vertex_count() == 1);
    CHECK(hypercube(0).edge_count() == 0);
    CHECK(hypercube(10).vertex_count() == 1024);
    CHECK(hypercube(10).edge_count() == 5120);
    CHECK_THROWS((void)hypercube(25));
}

TEST_CASE("grid sizes and boundaries") {
    CHECK(grid_2d(2, 2, Boundary::open).edge_count() == 4);
    CHECK(grid_2d(3, 3, Boundary::torus).edge_count() == 18);
    CHECK(grid_2d(1, 5, Boundary::open).edge_count() == 4);
    for (std::size_t w = 1; w <= 6; ++w)
        for (std::size_t h = 1; h <= 6; ++h) {
            CHECK(grid_2d(w, h, Boundary::open).edge_count() == 2 * w * h - w - h);
            if (w >= 3 && h >= 3) CHECK(grid_2d(w, h, Boundary::torus).edge_count() == 2 * w * h);
        }
    CHECK_THROWS((void)grid_2d(2, 5, Boundary::torus));
    CHECK_THROWS((void)grid_2d(0, 5, Boundary::open));
}

TEST_CASE("grid coordinates are centered") {
    const auto g = grid_2d(5, 5, Boundary::open);
    std::multiset<std::int32_t> annuli;
    for (VertexId v = 0; v < g.vertex_count(); ++v) annuli.insert(g.annulus(v));
    CHECK(annuli.count(0) == 1);
    CHECK(annuli.count(1) == 8);
    CHECK(annuli.count(2) == 16);

    CHECK(centered_coordinate(0, 4) == -1);
    CHECK(centered_coordinate(1, 4) == 0);
    CHECK(centered_coordinate(3, 4) == 2);
    CHECK(centered_coordinate(2, 5) == 0);

    const auto strip = grid_2d(7, 1, Boundary::open);
    for (VertexId v = 0; v < strip.vertex_count(); ++v) CHECK(strip.annulus(v) == std::abs(strip.coords()[v].x));
    CHECK_THROWS((void)complete_graph(3).annulus(0));
}

TEST_CASE("cartesian products") {
    const auto k2k3 = cartesian_product(complete_graph(2), complete_graph(3));
    CHECK(k2k3.vertex_count() == 6);
    CHECK(k2k3.edge_count() == 9);
    CHECK(k2k3.kind() == GraphKind::product);
    CHECK(product_cross_edges(k2k3) == 3);

    const auto square = cartesian_product(complete_graph(2), complete_graph(2));
    CHECK(square.edge_count() == 4);
    for (VertexId v = 0; v < 4; ++v) CHECK(square.degree(v) == 2);

    const auto g = erdos_renyi(30, 0.3, 5);
    const auto k1g = cartesian_product(complete_graph(1), g);
    CHECK(k1g.edges() == g.edges());

    const auto h = grid_2d(3, 4, Boundary::open);
    const auto hg = cartesian_product(h, g);
    CHECK(hg.vertex_count() == h.vertex_count() * g.vertex_count());
    CHECK(hg.edge_count() == h.vertex_count() * g.edge_count() + g.vertex_count() * h.edge_count());
    CHECK(hg.check_consistency());
    const auto& shape = *hg.product();
    for (std::size_t j = 0; j < h.edge_count(); ++j)
        for (std::size_t f = 0; f < g.vertex_count(); ++f) {
            const auto e = hg.edge(shape.cross_edge(j, f));
            const auto lu = static_cast<std::size_t>(hg.coords()[e.u].layer);
            const auto lv = static_cast<std::size_t>(hg.coords()[e.v].layer);
            CHECK(std::set<std::size_t>{lu, lv} == std::set<std::size_t>{h.edge(j).u, h.edge(j).v});
            CHECK(hg.coords()[e.u].fiber == static_cast<std::int32_t>(f));
        }
    CHECK(hg.has_grid());
    CHECK(hg.annulus(shape.vertex(0, 0)) == h.annulus(0));

    const auto k2g = cartesian_product(complete_graph(2), erdos_renyi(40, 0.2, 3));
    CHECK(product_cross_edges(k2g) == 40);
}

TEST_CASE("every builder passes the full consistency scan") {
    const std::size_t parts[] = {2, 3, 4};
    for (const auto& g : {complete_graph(9), erdos_renyi(60, 0.2, 1), hypercube(5), grid_2d(4, 6, Boundary::open),
                          grid_2d(4, 6, Boundary::torus), path_graph(7), cycle_graph(7), empty_graph(5),
                          complete_multipartite(parts),
                          cartesian_product(grid_2d(3, 3, Boundary::open), complete_graph(5))})
        CHECK(g.check_consistency());
}

TEST_CASE("constructor rejects loops and out-of-range endpoints") {
    CHECK_THROWS((void)HostGraph(3, {{0, 0}}, GraphKind::custom));
    CHECK_THROWS((void)HostGraph(3, {{0, 3}}, GraphKind::custom));
}

TEST_CASE("json round trip") {
    for (const auto& g : {erdos_renyi(20, 0.4, 9), cartesian_product(grid_2d(3, 3, Boundary::open), complete_graph(4))}) {
        const auto doc = to_json(g);
        const auto back = graph_from_json(doc);
        CHECK(back.edges() == g.edges());
        CHECK(back.coords() == g.coords());
        CHECK(back.fingerprint() == g.fingerprint());
        CHECK(to_json(back).dump() == doc.dump());
    }
}

TEST_CASE("pseudorandomness audit") {
    const auto k = complete_graph(100);
    const auto full = pseudorandomness_deviation(k, 1.0, 1000, 3);
    CHECK(full.samples_tested == 1000);
    CHECK(full.max_abs_deviation <= 50.0);
    CHECK(full.max_abs_deviation > 0.0);

    const auto none = pseudorandomness_deviation(empty_graph(50), 0.0, 200, 3);
    CHECK(none.max_abs_deviation == 0.0);
    CHECK(none.normalized_deviation == 0.0);

    for (std::uint64_t s = 0; s < 3; ++s) {
        const auto g = erdos_renyi(200, 0.5, s);
        const auto audit = pseudorandomness_deviation(g, 0.5, 500, s);
        CHECK(audit.normalized_deviation >= 0.0);
        CHECK(audit.normalized_deviation < 0.02);
    }
}
