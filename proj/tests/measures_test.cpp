#include "doctest.h"

#include <array>
#include <cmath>
#include <random>

#include "ipm/components.hpp"
#include "ipm/measures.hpp"

using namespace ipm;

namespace {

const double kSqrt3 = std::sqrt(3.0);

// Cross edges of K2 x G, in id order.
std::vector<EdgeId> cross_edges(const HostGraph& pg) {
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < pg.edge_count(); ++e)
        if (pg.product()->is_cross(e)) out.push_back(e);
    return out;
}

}  // namespace

TEST_CASE("theta examples") {
    CHECK(theta(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(theta(4.0 - 2.0 * kSqrt3) - (3.0 - kSqrt3) / 2.0) < 1e-12);
    const double t = theta(0.6);
    CHECK(std::abs(t - 0.7236067977499790) < 1e-12);
    CHECK(std::abs(t * t + (1 - t) * (1 - t) - 0.6) < 1e-12);
    CHECK_THROWS_AS((void)theta(0.5), std::domain_error);
    CHECK_THROWS_AS((void)theta(0.3), std::domain_error);
    CHECK_THROWS_AS((void)theta(1.1), std::domain_error);
    CHECK(std::abs(kCriticalP - (4.0 - 2.0 * kSqrt3)) < 1e-15);
}

TEST_CASE("theta identities on random p") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double p = 1.0 - 0.5 * unit(gen);  // (1/2, 1]
        const double t = theta(p);
        CHECK(std::abs(t * t + (1 - t) * (1 - t) - p) < 1e-12);
        CHECK(std::abs(2 * t * (1 - t) - (1 - p)) < 1e-12);
        CHECK(t >= p - 1e-15);
        CHECK(t <= 1.0);
    }
}

TEST_CASE("theta sqrt(p) against 1 - p on both sides of the threshold") {
    for (int i = 1; i <= 1000; ++i) {
        const double below = 0.5 + (kCriticalP - 0.5) * i / 1000.0;
        CHECK(theta(below) * std::sqrt(below) <= 1.0 - below + 1e-12);
        const double above = kCriticalP + (1.0 - kCriticalP) * i / 1000.0;
        CHECK(theta(above) * std::sqrt(above) > 1.0 - above);
    }
}

TEST_CASE("product measure") {
    const auto g = complete_graph(12);
    CHECK(sample_edges(build_product(1.0), g, 1, 0) == EdgeSample::all_open(g));
    CHECK(sample_edges(build_product(0.0), g, 1, 0) == EdgeSample::all_closed(g));
    CHECK(edge_marginal(build_product(0.6), g, 5) == 0.6);

    const auto k4 = complete_graph(4);
    const BoundMeasure half(build_product(0.5), k4);
    double total = 0.0;
    const int reps = 40000;
    for (int r = 0; r < reps; ++r) total += static_cast<double>(half.sample(3, r).count_open());
    CHECK(std::abs(total / reps - 3.0) < 0.03);
    CHECK_THROWS((void)build_product(1.5));
}

TEST_CASE("product coupling is monotone in p") {
    const auto g = erdos_renyi(40, 0.3, 2);
    for (std::uint64_t r = 0; r < 20; ++r) {
        const auto lo = sample_edges(build_product(0.4), g, 9, r);
        const auto hi = sample_edges(build_product(0.7), g, 9, r);
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            if (lo.test(e)) CHECK(hi.test(e));
    }
}

TEST_CASE("two-state measure") {
    const auto g = erdos_renyi(30, 0.4, 1);
    CHECK(sample_edges(build_two_state(1.0), g, 4, 0) == EdgeSample::all_open(g));
    for (EdgeId e = 0; e < g.edge_count(); ++e) CHECK(std::abs(edge_marginal(build_two_state(0.6), g, e) - 0.6) < 1e-12);
    CHECK_THROWS((void)build_two_state(0.45));

    // Open edges are exactly the equal-state pairs.
    const BoundMeasure bound(build_two_state(0.6), g);
    const auto states = bound.sample_states(5, 3);
    const auto s = bound.sample(5, 3);
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        CHECK(s.test(e) == (states[g.edge(e).u] == states[g.edge(e).v]));
}

TEST_CASE("two-state per-edge frequencies on K_200") {
    const auto g = complete_graph(200);
    const BoundMeasure bound(build_two_state(0.6), g);
    std::vector<std::uint32_t> hits(g.edge_count(), 0);
    const int reps = 10000;
    for (int r = 0; r < reps; ++r) {
        const auto s = bound.sample(77, r);
        for (EdgeId e = 0; e < g.edge_count(); ++e) hits[e] += s.test(e) ? 1 : 0;
    }
    // 0.015 is about three standard errors per edge, so a few dozen of the
    // 19900 edges land outside it; the max over all edges stays under six.
    const double se = std::sqrt(0.6 * 0.4 / reps);
    double worst = 0.0;
    std::size_t outside = 0;
    for (auto h : hits) {
        const double dev = std::abs(h / static_cast<double>(reps) - 0.6);
        worst = std::max(worst, dev);
        outside += dev >= 0.015 ? 1 : 0;
    }
    CHECK(worst < 6.0 * se);
    CHECK(outside < g.edge_count() / 100);
}

TEST_CASE("multi-state measure") {
    const auto g = erdos_renyi(50, 0.3, 8);
    for (std::uint64_t r = 0; r < 5; ++r)
        CHECK(sample_edges(build_multi_state(1, 0.6), g, 12, r) == sample_edges(build_two_state(0.6), g, 12, r));

    const auto m = build_multi_state(2, 0.4);
    CHECK(std::abs(multi_state_last_mass(2, 0.4) - (1.0 - std::sqrt(0.4)) / 3.0) < 1e-12);
    CHECK(std::abs(multi_state_last_mass(2, 0.4) - 0.12251482) < 1e-7);
    const auto& dist = m.states().distributions.front();
    CHECK(std::abs(*std::max_element(dist.begin(), dist.end()) - (1.0 + std::sqrt(0.1)) / 3.0) < 1e-12);
    CHECK(std::abs(multi_state_last_mass(2, 1.0 / 3.0 + 1e-9) - 1.0 / 3.0) < 1e-4);

    for (EdgeId e = 0; e < g.edge_count(); ++e) CHECK(edge_marginal(m, g, e) >= 0.4 - 1e-12);
    CHECK_THROWS((void)build_multi_state(2, 0.3));
    CHECK_THROWS((void)build_multi_state(2, 0.6));
}

TEST_CASE("lower-bound measure on K2 x G") {
    const auto pg = cartesian_product(complete_graph(2), complete_graph(30));
    const auto m = build_lmr_lower(0.52);
    const BoundMeasure bound(m, pg);
    const double cross = 1.0 - 0.6 * std::sqrt(0.52);
    CHECK(std::abs(cross - 0.5673338) < 1e-7);
    for (EdgeId e = 0; e < pg.edge_count(); ++e) {
        const double want = pg.product()->is_cross(e) ? cross : 0.52;
        CHECK(std::abs(bound.edge_marginal(e) - want) < 1e-12);
    }

    const BoundMeasure tight(build_lmr_lower(kCriticalP), pg);
    for (auto e : cross_edges(pg)) CHECK(std::abs(tight.edge_marginal(e) - kCriticalP) < 1e-12);
    CHECK(tight.min_edge_marginal() >= kCriticalP - 1e-12);

    CHECK_THROWS((void)build_lmr_lower(0.55));
    CHECK_THROWS((void)BoundMeasure(m, complete_graph(10)));
    CHECK_THROWS((void)BoundMeasure(m, cartesian_product(complete_graph(3), complete_graph(4))));
}

TEST_CASE("lower-bound measure separates state-1 left from state-0 right") {
    const auto pg = cartesian_product(complete_graph(2), erdos_renyi(60, 0.3, 4));
    const BoundMeasure bound(build_lmr_lower(0.53), pg);
    for (std::uint64_t r = 0; r < 200; ++r) {
        const auto states = bound.sample_states(31, r);
        const auto summary = connected_components(pg, bound.apply_rule(states, 31, r));
        std::vector<char> has_left_one(summary.component_count(), 0), has_right_zero(summary.component_count(), 0);
        for (VertexId v = 0; v < pg.vertex_count(); ++v) {
            const auto c = summary.component_of[v];
            if (pg.coords()[v].layer == 0 && states[v] == 1) has_left_one[c] = 1;
            if (pg.coords()[v].layer == 1 && states[v] == 0) has_right_zero[c] = 1;
        }
        for (std::size_t c = 0; c < summary.component_count(); ++c) CHECK_FALSE((has_left_one[c] && has_right_zero[c]));
    }
}

TEST_CASE("radial measure") {
    const auto box = grid_2d(13, 13, Boundary::open);
    const auto pg = cartesian_product(box, complete_graph(6));
    const double p = kCriticalP;
    const BoundMeasure bound(build_radial(p), pg);
    CHECK(bound.min_edge_marginal() >= p - 1e-12);

    // Fiber edge inside an annulus of class 1: theta^2 + (1 - theta)^2 = p.
    bool checked = false;
    for (EdgeId e = 0; e < pg.edge_count() && !checked; ++e) {
        const auto [u, v] = pg.edge(e);
        if (pg.annulus(u) == 1 && pg.annulus(v) == 1) {
            CHECK(std::abs(bound.edge_marginal(e) - p) < 1e-12);
            checked = true;
        }
    }
    CHECK(checked);

    for (std::uint64_t r = 0; r < 50; ++r) {
        const auto states = bound.sample_states(8, r);
        const auto summary = connected_components(pg, bound.apply_rule(states, 8, r));
        std::vector<char> zero(summary.component_count(), 0), one(summary.component_count(), 0);
        for (VertexId v = 0; v < pg.vertex_count(); ++v) {
            const auto c = summary.component_of[v];
            const auto expected_class = static_cast<std::size_t>(pg.annulus(v) % 6);
            CHECK(bound.vertex_class(v) == expected_class);
            (states[v] == 0 ? zero : one)[c] |= states[v] != 2;
        }
        for (std::size_t c = 0; c < summary.component_count(); ++c) CHECK_FALSE((zero[c] && one[c]));
    }

    CHECK_THROWS((void)BoundMeasure(build_radial(p), cartesian_product(grid_2d(5, 5, Boundary::torus), complete_graph(3))));
    CHECK_THROWS((void)BoundMeasure(build_radial(p), complete_graph(5)));
    CHECK_THROWS((void)build_radial(0.6));
}

TEST_CASE("sampling is deterministic and hex round-trips") {
    const auto pg = cartesian_product(complete_graph(2), erdos_renyi(25, 0.5, 1));
    for (const auto& m : {build_product(0.6), build_two_state(0.7), build_lmr_lower(0.52)}) {
        const auto a = sample_edges(m, pg, 99, 4);
        const auto b = sample_edges(m, pg, 99, 4);
        CHECK(a == b);
        CHECK(a.to_hex() == b.to_hex());
        CHECK(EdgeSample::from_hex(a.to_hex(), pg.edge_count()) == a);
        CHECK_FALSE(sample_edges(m, pg, 99, 5) == a);
    }
    EdgeSample s(0, 6, 0, 0);
    s.set(0);
    s.set(5);
    CHECK(s.to_hex() == "12");
}

TEST_CASE("independence probe") {
    const auto g = complete_graph(8);
    // Edge ids of K_n follow lexicographic pairs: 0:(0,1) 1:(0,2) ... 7:(1,2)
    const auto id = [&](VertexId u, VertexId v) {
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            if ((g.edge(e).u == u && g.edge(e).v == v) || (g.edge(e).u == v && g.edge(e).v == u)) return e;
        throw std::logic_error("missing edge");
    };
    const std::array<EdgeId, 2> a{id(0, 1), id(1, 2)};
    const std::array<EdgeId, 2> b{id(3, 4), id(5, 6)};

    const auto prod = independence_probe(build_product(0.6), g, a, b, 100000, 1);
    CHECK(prod.vertex_disjoint);
    CHECK(prod.pass);
    const auto two = independence_probe(build_two_state(0.6), g, a, b, 100000, 2);
    CHECK(two.pass);

    // Negative control: edges 01 and 12 share vertex 1. Exact joint over the
    // eight state triples of (0, 1, 2).
    const double t = theta(0.6);
    double both = 0.0;
    for (int mask = 0; mask < 8; ++mask) {
        const int s0 = mask & 1, s1 = (mask >> 1) & 1, s2 = (mask >> 2) & 1;
        double w = 1.0;
        for (int s : {s0, s1, s2}) w *= s ? t : 1.0 - t;
        if (s0 == s1 && s1 == s2) both += w;
    }
    const double exact_tv = 2.0 * std::abs(both - 0.36);
    CHECK(std::abs(exact_tv - 0.08) < 1e-12);
    const std::array<EdgeId, 1> left{id(0, 1)};
    const std::array<EdgeId, 1> right{id(1, 2)};
    const auto shared = independence_probe(build_two_state(0.6), g, left, right, 100000, 3);
    CHECK_FALSE(shared.vertex_disjoint);
    CHECK_FALSE(shared.pass);
    CHECK(std::abs(shared.tv_discrepancy - exact_tv) < 0.01);
    CHECK(independence_probe(build_product(0.6), g, left, right, 100000, 3).pass);

    CHECK_THROWS((void)independence_probe(build_product(0.6), g, left, right, 999, 3));
}

TEST_CASE("measure json round trip") {
    const auto pg = cartesian_product(complete_graph(2), complete_graph(10));
    for (const auto& m : {build_product(0.6), build_two_state(0.6), build_multi_state(3, 0.3), build_lmr_lower(0.53)}) {
        const auto back = measure_from_json(to_json(m));
        CHECK(back.construction() == m.construction());
        CHECK(back.p() == m.p());
        CHECK(sample_edges(back, pg, 5, 1) == sample_edges(m, pg, 5, 1));
    }
}

TEST_CASE("every construction meets its marginal bound") {
    const auto pg2 = cartesian_product(complete_graph(2), erdos_renyi(20, 0.5, 3));
    const auto radial_graph = cartesian_product(grid_2d(9, 9, Boundary::open), complete_graph(3));
    for (double p : {0.51, 0.52, 0.53, kCriticalP}) {
        CHECK(BoundMeasure(build_lmr_lower(p), pg2).min_edge_marginal() >= p - 1e-12);
        CHECK(BoundMeasure(build_radial(p), radial_graph).min_edge_marginal() >= p - 1e-12);
        CHECK(BoundMeasure(build_two_state(p), pg2).min_edge_marginal() >= p - 1e-12);
    }
    for (unsigned r = 1; r <= 4; ++r) {
        const double p = 1.0 / (r + 1) + 0.5 * (1.0 / r - 1.0 / (r + 1));
        CHECK(BoundMeasure(build_multi_state(r, p), pg2).min_edge_marginal() >= p - 1e-12);
    }
}
