#include "ipm/components.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace ipm {

namespace {

void require_match(const HostGraph& g, const EdgeSample& s) {
    if (s.size() != g.edge_count()) throw std::invalid_argument("sample length does not match edge count");
    if (s.graph_fingerprint() != 0 && s.graph_fingerprint() != g.fingerprint())
        throw std::invalid_argument("sample was drawn on a different graph");
}

const ProductShape& require_k2_product(const HostGraph& g) {
    if (!g.product() || g.product()->layers != 2) throw std::invalid_argument("expected a K2 x G product graph");
    return *g.product();
}

}  // namespace

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), VertexId{0});
}

VertexId UnionFind::find(VertexId v) {
    VertexId root = v;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[v] != root) {
        const VertexId next = parent_[v];
        parent_[v] = root;
        v = next;
    }
    return root;
}

VertexId UnionFind::unite(VertexId a, VertexId b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    if (!left_.empty()) {
        left_[a] += left_[b];
        right_[a] += right_[b];
    }
    return a;
}

void UnionFind::track_sides(const std::vector<std::uint8_t>& side) {
    if (side.size() != parent_.size()) throw std::invalid_argument("side labels size mismatch");
    left_.assign(side.size(), 0);
    right_.assign(side.size(), 0);
    for (std::size_t v = 0; v < side.size(); ++v) (side[v] ? right_ : left_)[v] = 1;
}

ComponentSummary connected_components(const HostGraph& g, const EdgeSample& s) {
    require_match(g, s);
    const std::size_t n = g.vertex_count();
    UnionFind uf(n);
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        if (s.test(e)) uf.unite(g.edge(e).u, g.edge(e).v);

    ComponentSummary out;
    out.component_of.assign(n, 0);
    std::vector<std::uint32_t> id_of_root(n, UINT32_MAX);
    for (VertexId v = 0; v < n; ++v) {
        const VertexId root = uf.find(v);
        if (id_of_root[root] == UINT32_MAX) {
            id_of_root[root] = static_cast<std::uint32_t>(out.size_by_id.size());
            out.size_by_id.push_back(uf.size_of_root(root));
        }
        out.component_of[v] = id_of_root[root];
    }
    out.sizes = out.size_by_id;
    std::sort(out.sizes.begin(), out.sizes.end(), std::greater<>());

    const std::size_t k = out.size_by_id.size();
    if (g.product() && g.product()->layers == 2) {
        out.layer_counts.assign(k, {0, 0});
        for (VertexId v = 0; v < n; ++v) ++out.layer_counts[out.component_of[v]][g.coords()[v].layer];
    }
    if (g.has_grid()) {
        std::vector<std::int32_t> lo(k, INT32_MAX), hi(k, INT32_MIN);
        for (VertexId v = 0; v < n; ++v) {
            const auto c = out.component_of[v];
            const auto a = g.annulus(v);
            lo[c] = std::min(lo[c], a);
            hi[c] = std::max(hi[c], a);
        }
        out.annulus_span.resize(k);
        for (std::size_t c = 0; c < k; ++c) out.annulus_span[c] = hi[c] - lo[c] + 1;
    }
    return out;
}

bool lmr_event(const HostGraph& g, const EdgeSample& s) {
    require_match(g, s);
    const auto& shape = require_k2_product(g);
    const std::size_t n = shape.fibers;
    std::vector<std::uint8_t> side(g.vertex_count());
    for (VertexId v = 0; v < side.size(); ++v) side[v] = static_cast<std::uint8_t>(g.coords()[v].layer);
    UnionFind uf(g.vertex_count());
    uf.track_sides(side);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (!s.test(e)) continue;
        const auto root = uf.unite(g.edge(e).u, g.edge(e).v);
        const auto [left, right] = uf.side_counts_of_root(root);
        if (2 * std::size_t{left} > n && 2 * std::size_t{right} > n) return true;
    }
    return false;
}

std::int32_t annulus_span(const HostGraph& g, const EdgeSample& s) {
    if (!g.has_grid()) throw std::invalid_argument("annulus_span needs grid labels");
    if (g.grid_boundary() != Boundary::open) throw std::invalid_argument("annulus_span needs an open boundary");
    const auto summary = connected_components(g, s);
    return summary.annulus_span.empty() ? 0 : *std::max_element(summary.annulus_span.begin(), summary.annulus_span.end());
}

EdgeSample renormalise(const HostGraph& product_graph, const EdgeSample& s, const HostGraph& h) {
    require_match(product_graph, s);
    if (!product_graph.product()) throw std::invalid_argument("renormalise needs a product graph");
    const auto& shape = *product_graph.product();
    if (shape.layers != h.vertex_count() || shape.layer_edges != h.edges())
        throw std::invalid_argument("product graph was not built over this H");

    const std::size_t n = shape.fibers;
    const auto& edges = product_graph.edges();
    EdgeSample out(h.fingerprint(), h.edge_count(), s.seed(), s.replica());
    std::vector<std::uint8_t> side(2 * n, 0);
    std::fill(side.begin() + static_cast<std::ptrdiff_t>(n), side.end(), 1);

    for (EdgeId j = 0; j < h.edge_count(); ++j) {
        const auto [a, b] = h.edge(j);
        UnionFind uf(2 * n);
        uf.track_sides(side);
        // Local ids: fiber g of layer a -> g, of layer b -> n + g.
        bool hit = false;
        const auto consider = [&](VertexId x, VertexId y) {
            const auto root = uf.unite(x, y);
            const auto [left, right] = uf.side_counts_of_root(root);
            hit = 2 * std::size_t{left} > n && 2 * std::size_t{right} > n;
        };
        for (std::size_t g = 0; g < n && !hit; ++g)
            if (s.test(shape.cross_edge(j, g))) consider(static_cast<VertexId>(g), static_cast<VertexId>(n + g));
        for (std::size_t k = 0; k < shape.fiber_edges && !hit; ++k) {
            const EdgeId ea = shape.fiber_edge(a, k);
            if (s.test(ea)) consider(static_cast<VertexId>(edges[ea].u - a * n), static_cast<VertexId>(edges[ea].v - a * n));
            if (hit) break;
            const EdgeId eb = shape.fiber_edge(b, k);
            if (s.test(eb)) consider(static_cast<VertexId>(n + edges[eb].u - b * n), static_cast<VertexId>(n + edges[eb].v - b * n));
        }
        if (hit) out.set(j);
    }
    return out;
}

bool lift_consistency_check(const HostGraph& h, const EdgeSample& renormalised, const HostGraph& product_graph,
                            const EdgeSample& s) {
    require_match(h, renormalised);
    require_match(product_graph, s);
    if (!product_graph.product() || product_graph.product()->layers != h.vertex_count())
        throw std::invalid_argument("product graph does not match H");
    const auto& shape = *product_graph.product();
    const auto coarse = connected_components(h, renormalised);
    const auto fine = connected_components(product_graph, s);

    // Fine component ids met by each fiber, sorted.
    std::vector<std::vector<std::uint32_t>> met(h.vertex_count());
    for (std::size_t u = 0; u < h.vertex_count(); ++u) {
        auto& ids = met[u];
        for (std::size_t g = 0; g < shape.fibers; ++g) ids.push_back(fine.component_of[shape.vertex(u, g)]);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
    std::vector<std::vector<VertexId>> members(coarse.component_count());
    for (VertexId u = 0; u < h.vertex_count(); ++u) members[coarse.component_of[u]].push_back(u);

    const auto overlap = [](const std::vector<std::uint32_t>& x, const std::vector<std::uint32_t>& y) {
        auto i = x.begin();
        auto j = y.begin();
        while (i != x.end() && j != y.end()) {
            if (*i == *j) return true;
            if (*i < *j) ++i;
            else ++j;
        }
        return false;
    };
    for (const auto& group : members) {
        for (std::size_t i = 0; i < group.size(); ++i)
            for (std::size_t j = i + 1; j < group.size(); ++j)
                if (!overlap(met[group[i]], met[group[j]])) return false;
    }
    return true;
}

nlohmann::json to_json(const ComponentSummary& summary, std::optional<bool> lmr, std::optional<std::int32_t> span) {
    nlohmann::json doc;
    doc["sizes"] = summary.sizes;
    if (lmr) doc["lmr"] = *lmr;
    if (span) doc["span"] = *span;
    return doc;
}

}  // namespace ipm
