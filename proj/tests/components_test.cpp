#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>

#include "ipm/components.hpp"
#include "ipm/measures.hpp"

using namespace ipm;

namespace {

// Component label per vertex by breadth-first search, labels in order of first vertex.
std::vector<std::uint32_t> bfs_labels(const HostGraph& g, const EdgeSample& s) {
    std::vector<std::uint32_t> label(g.vertex_count(), UINT32_MAX);
    std::uint32_t next = 0;
    for (VertexId root = 0; root < g.vertex_count(); ++root) {
        if (label[root] != UINT32_MAX) continue;
        std::queue<VertexId> todo;
        todo.push(root);
        label[root] = next;
        while (!todo.empty()) {
            const auto v = todo.front();
            todo.pop();
            for (const auto& nb : g.neighbors(v))
                if (s.test(nb.edge) && label[nb.vertex] == UINT32_MAX) {
                    label[nb.vertex] = next;
                    todo.push(nb.vertex);
                }
        }
        ++next;
    }
    return label;
}

EdgeSample random_sample(const HostGraph& g, double density, std::mt19937_64& gen) {
    std::bernoulli_distribution coin(density);
    EdgeSample s(g.fingerprint(), g.edge_count(), 0, 0);
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        if (coin(gen)) s.set(e);
    return s;
}

EdgeId find_edge(const HostGraph& g, VertexId u, VertexId v) {
    for (const auto& nb : g.neighbors(u))
        if (nb.vertex == v) return nb.edge;
    throw std::logic_error("no such edge");
}

}  // namespace

TEST_CASE("component examples") {
    const auto k5 = complete_graph(5);
    const auto none = connected_components(k5, EdgeSample::all_closed(k5));
    CHECK(none.component_count() == 5);
    CHECK(none.largest() == 1);
    const auto all = connected_components(k5, EdgeSample::all_open(k5));
    CHECK(all.component_count() == 1);
    CHECK(all.largest() == 5);

    const auto p4 = path_graph(4);
    EdgeSample s(p4.fingerprint(), p4.edge_count(), 0, 0);
    s.set(find_edge(p4, 0, 1));
    s.set(find_edge(p4, 1, 2));
    const auto summary = connected_components(p4, s);
    CHECK(summary.sizes == std::vector<std::size_t>{3, 1});
    CHECK(summary.component_of[0] == summary.component_of[2]);
    CHECK(summary.component_of[0] != summary.component_of[3]);

    CHECK_THROWS_AS((void)connected_components(k5, EdgeSample::all_open(complete_graph(4))), std::invalid_argument);
    CHECK_THROWS_AS((void)connected_components(complete_graph(4), EdgeSample::all_open(cycle_graph(6))),
                    std::invalid_argument);
}

TEST_CASE("union-find agrees with breadth-first search") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + gen() % 50;
        const auto g = erdos_renyi(n, 0.05 + 0.3 * (trial % 7) / 7.0, gen());
        const auto s = random_sample(g, (trial % 10) / 9.0, gen);
        const auto summary = connected_components(g, s);
        const auto labels = bfs_labels(g, s);
        REQUIRE(summary.component_of == labels);
        CHECK(std::accumulate(summary.sizes.begin(), summary.sizes.end(), std::size_t{0}) == n);
        CHECK(std::is_sorted(summary.sizes.rbegin(), summary.sizes.rend()));
    }
}

TEST_CASE("left meets right") {
    const auto pg = cartesian_product(complete_graph(2), complete_graph(4));
    CHECK(lmr_event(pg, EdgeSample::all_open(pg)));
    CHECK_FALSE(lmr_event(pg, EdgeSample::all_closed(pg)));

    const auto& shape = *pg.product();
    const auto v = [&](std::size_t layer, std::size_t fiber) { return shape.vertex(layer, fiber); };
    EdgeSample s(pg.fingerprint(), pg.edge_count(), 0, 0);
    s.set(find_edge(pg, v(0, 0), v(1, 0)));
    s.set(find_edge(pg, v(0, 0), v(0, 1)));
    s.set(find_edge(pg, v(1, 0), v(1, 1)));
    CHECK_FALSE(lmr_event(pg, s));  // exactly half of each side
    s.set(find_edge(pg, v(0, 1), v(0, 2)));
    CHECK_FALSE(lmr_event(pg, s));  // 3 left, 2 right
    s.set(find_edge(pg, v(1, 1), v(1, 2)));
    CHECK(lmr_event(pg, s));

    CHECK_THROWS((void)lmr_event(complete_graph(8), EdgeSample::all_open(complete_graph(8))));
    const auto k3k2 = cartesian_product(complete_graph(3), complete_graph(2));
    CHECK_THROWS((void)lmr_event(k3k2, EdgeSample::all_open(k3k2)));
}

TEST_CASE("left meets right agrees with component layer counts and is monotone") {
    std::mt19937_64 gen(5);
    const auto pg = cartesian_product(complete_graph(2), erdos_renyi(30, 0.2, 3));
    const std::size_t n = 30;
    for (int trial = 0; trial < 300; ++trial) {
        auto s = random_sample(pg, 0.05 + 0.01 * (trial % 30), gen);
        const auto summary = connected_components(pg, s);
        bool expected = false;
        for (const auto& counts : summary.layer_counts) expected |= 2 * counts[0] > n && 2 * counts[1] > n;
        CHECK(lmr_event(pg, s) == expected);
        // Opening more edges never destroys the event.
        bool before = expected;
        for (int step = 0; step < 10; ++step) {
            s.set(static_cast<EdgeId>(gen() % pg.edge_count()));
            const bool after = lmr_event(pg, s);
            CHECK((!before || after));
            before = after;
        }
    }
}

TEST_CASE("annulus span") {
    const auto pg = cartesian_product(grid_2d(13, 13, Boundary::open), complete_graph(3));
    CHECK(annulus_span(pg, EdgeSample::all_closed(pg)) == 1);
    CHECK(annulus_span(pg, EdgeSample::all_open(pg)) == 7);
    const auto box = grid_2d(5, 5, Boundary::open);
    CHECK(annulus_span(box, EdgeSample::all_open(box)) == 3);
    CHECK_THROWS((void)annulus_span(complete_graph(4), EdgeSample::all_open(complete_graph(4))));
    const auto torus = cartesian_product(grid_2d(5, 5, Boundary::torus), complete_graph(2));
    CHECK_THROWS((void)annulus_span(torus, EdgeSample::all_open(torus)));
}

TEST_CASE("renormalise extremes") {
    const auto h = grid_2d(3, 3, Boundary::open);
    const auto pg = cartesian_product(h, complete_graph(7));
    CHECK(renormalise(pg, EdgeSample::all_open(pg), h) == EdgeSample::all_open(h));
    CHECK(renormalise(pg, EdgeSample::all_closed(pg), h) == EdgeSample::all_closed(h));
    CHECK(lift_consistency_check(h, EdgeSample::all_closed(h), pg, EdgeSample::all_closed(pg)));
    CHECK(lift_consistency_check(h, EdgeSample::all_open(h), pg, EdgeSample::all_open(pg)));
    CHECK_THROWS((void)renormalise(pg, EdgeSample::all_open(pg), grid_2d(3, 4, Boundary::open)));
}

TEST_CASE("renormalise matches a direct per-edge check") {
    std::mt19937_64 gen(99);
    const auto h = cycle_graph(4);
    const auto g = erdos_renyi(12, 0.4, 2);
    const auto pg = cartesian_product(h, g);
    const auto k2g = cartesian_product(complete_graph(2), g);
    const auto& shape = *pg.product();
    const auto& k2 = *k2g.product();
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = random_sample(pg, 0.3 + 0.4 * (trial % 5) / 4.0, gen);
        const auto coarse = renormalise(pg, s, h);
        for (EdgeId j = 0; j < h.edge_count(); ++j) {
            // Copy the two fibers and their matching into a standalone K2 x G sample.
            EdgeSample local(k2g.fingerprint(), k2g.edge_count(), 0, 0);
            for (std::size_t k = 0; k < g.edge_count(); ++k) {
                if (s.test(shape.fiber_edge(h.edge(j).u, k))) local.set(k2.fiber_edge(0, k));
                if (s.test(shape.fiber_edge(h.edge(j).v, k))) local.set(k2.fiber_edge(1, k));
            }
            for (std::size_t f = 0; f < g.vertex_count(); ++f)
                if (s.test(shape.cross_edge(j, f))) local.set(k2.cross_edge(0, f));
            CHECK(coarse.test(j) == lmr_event(k2g, local));
        }
    }
}

TEST_CASE("renormalise commutes with relabelling fibers") {
    const auto h = grid_2d(3, 3, Boundary::open);
    const auto g = erdos_renyi(25, 0.3, 6);
    std::vector<VertexId> perm(g.vertex_count());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 gen(3);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<Edge> relabelled;
    for (const auto& e : g.edges()) relabelled.push_back({perm[e.u], perm[e.v]});
    const HostGraph g2(g.vertex_count(), relabelled, GraphKind::custom);

    const auto pg = cartesian_product(h, g);
    const auto pg2 = cartesian_product(h, g2);
    const auto& shape = *pg.product();
    for (std::uint64_t r = 0; r < 30; ++r) {
        const auto s = sample_edges(build_two_state(0.6), pg, 41, r);
        EdgeSample s2(pg2.fingerprint(), pg2.edge_count(), 0, 0);
        for (std::size_t layer = 0; layer < h.vertex_count(); ++layer)
            for (std::size_t k = 0; k < g.edge_count(); ++k)
                if (s.test(shape.fiber_edge(layer, k))) s2.set(shape.fiber_edge(layer, k));
        for (std::size_t j = 0; j < h.edge_count(); ++j)
            for (std::size_t f = 0; f < g.vertex_count(); ++f)
                if (s.test(shape.cross_edge(j, f))) s2.set(shape.cross_edge(j, perm[f]));
        CHECK(renormalise(pg, s, h) == renormalise(pg2, s2, h));
    }
}

TEST_CASE("lift consistency holds on renormalised samples") {
    const auto h = grid_2d(3, 3, Boundary::open);
    const auto pg = cartesian_product(h, complete_graph(20));
    const auto pg_sparse = cartesian_product(h, erdos_renyi(20, 0.3, 1));
    int checked = 0;
    for (const auto* graph : {&pg, &pg_sparse})
        for (const auto& m : {build_product(0.3), build_product(0.6), build_two_state(0.55), build_two_state(0.8)})
            for (std::uint64_t r = 0; r < 125; ++r) {
                const auto s = sample_edges(m, *graph, 12, r);
                const auto coarse = renormalise(*graph, s, h);
                CHECK(lift_consistency_check(h, coarse, *graph, s));
                ++checked;
            }
    CHECK(checked == 1000);
}

TEST_CASE("lift consistency catches an unsupported coarse edge") {
    const auto h = path_graph(2);
    const auto pg = cartesian_product(h, complete_graph(5));
    EdgeSample coarse(h.fingerprint(), h.edge_count(), 0, 0);
    coarse.set(0);
    CHECK_FALSE(lift_consistency_check(h, coarse, pg, EdgeSample::all_closed(pg)));
}

TEST_CASE("summary json") {
    const auto pg = cartesian_product(complete_graph(2), complete_graph(3));
    const auto s = EdgeSample::all_open(pg);
    const auto doc = to_json(connected_components(pg, s), lmr_event(pg, s), 1);
    CHECK(doc.at("sizes") == nlohmann::json::array({6}));
    CHECK(doc.at("lmr") == true);
    CHECK(doc.at("span") == 1);
    CHECK_FALSE(to_json(connected_components(pg, s)).contains("lmr"));
}
