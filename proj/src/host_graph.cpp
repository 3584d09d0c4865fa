#include "ipm/host_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "ipm/rng.hpp"

namespace ipm {

namespace {

constexpr std::size_t kMaxVertices = std::numeric_limits<VertexId>::max();
constexpr std::size_t kMaxEdges = std::numeric_limits<EdgeId>::max();

std::uint64_t pair_key(VertexId a, VertexId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

void require_probability(double q, const char* what) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

std::string to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::complete: return "complete";
        case GraphKind::erdos_renyi: return "erdos_renyi";
        case GraphKind::hypercube: return "hypercube";
        case GraphKind::grid2d: return "grid2d";
        case GraphKind::product: return "product";
        case GraphKind::custom: return "custom";
    }
    return "custom";
}

GraphKind graph_kind_from_string(const std::string& name) {
    for (auto k : {GraphKind::complete, GraphKind::erdos_renyi, GraphKind::hypercube, GraphKind::grid2d,
                   GraphKind::product, GraphKind::custom}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown graph kind: " + name);
}

HostGraph::HostGraph(std::size_t vertex_count, std::vector<Edge> edges, GraphKind kind,
                     std::optional<double> q_meta, GraphLabels labels)
    : vertex_count_(vertex_count),
      edges_(std::move(edges)),
      kind_(kind),
      q_meta_(q_meta),
      coords_(std::move(labels.coords)),
      grid_boundary_(labels.grid_boundary),
      product_(std::move(labels.product)) {
    if (vertex_count_ > kMaxVertices) throw std::length_error("vertex count exceeds 32-bit ids");
    if (edges_.size() > kMaxEdges) throw std::length_error("edge count exceeds 32-bit ids");
    if (!coords_.empty() && coords_.size() != vertex_count_)
        throw std::invalid_argument("coords must have one entry per vertex");
    if (grid_boundary_ && coords_.empty()) throw std::invalid_argument("grid boundary without coords");

    offsets_.assign(vertex_count_ + 1, 0);
    for (const auto& e : edges_) {
        if (e.u >= vertex_count_ || e.v >= vertex_count_) throw std::out_of_range("edge endpoint out of range");
        if (e.u == e.v) throw std::invalid_argument("self-loop");
        ++offsets_[e.u + 1];
        ++offsets_[e.v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adjacency_.resize(2 * edges_.size());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (EdgeId id = 0; id < edges_.size(); ++id) {
        const auto& e = edges_[id];
        adjacency_[cursor[e.u]++] = {e.v, id};
        adjacency_[cursor[e.v]++] = {e.u, id};
    }

    std::uint64_t h = CounterRng::mix(vertex_count_);
    for (const auto& e : edges_) h = CounterRng::mix(h ^ pair_key(e.u, e.v));
    fingerprint_ = h;
}

std::span<const Neighbor> HostGraph::neighbors(VertexId v) const {
    if (v >= vertex_count_) throw std::out_of_range("vertex id out of range");
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

std::size_t HostGraph::degree(VertexId v) const { return neighbors(v).size(); }

std::int32_t HostGraph::annulus(VertexId v) const {
    if (!grid_boundary_) throw std::logic_error("graph has no grid labels");
    const auto& c = coords_.at(v);
    return std::max(std::abs(c.x), std::abs(c.y));
}

bool HostGraph::check_consistency() const {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(edges_.size() * 2);
    for (const auto& e : edges_) {
        if (e.u == e.v || e.u >= vertex_count_ || e.v >= vertex_count_) return false;
        if (!seen.insert(pair_key(e.u, e.v)).second) return false;
    }
    std::size_t total = 0;
    for (VertexId v = 0; v < vertex_count_; ++v) {
        for (const auto& nb : neighbors(v)) {
            if (nb.edge >= edges_.size()) return false;
            const auto& e = edges_[nb.edge];
            const bool ok = (e.u == v && e.v == nb.vertex) || (e.v == v && e.u == nb.vertex);
            if (!ok) return false;
            ++total;
        }
    }
    return total == 2 * edges_.size();
}

HostGraph complete_graph(std::size_t n) {
    if (n == 0) throw std::invalid_argument("complete_graph needs n >= 1");
    std::vector<Edge> edges;
    edges.reserve(n * (n - 1) / 2);
    for (VertexId u = 0; u < n; ++u)
        for (VertexId v = u + 1; v < n; ++v) edges.push_back({u, v});
    return HostGraph(n, std::move(edges), GraphKind::complete, 1.0);
}

HostGraph empty_graph(std::size_t n) { return HostGraph(n, {}, GraphKind::custom, 0.0); }

HostGraph path_graph(std::size_t n) {
    std::vector<Edge> edges;
    for (VertexId v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
    return HostGraph(n, std::move(edges), GraphKind::custom);
}

HostGraph cycle_graph(std::size_t n) {
    if (n < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
    std::vector<Edge> edges;
    for (VertexId v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
    edges.push_back({0, static_cast<VertexId>(n - 1)});
    return HostGraph(n, std::move(edges), GraphKind::custom);
}

HostGraph erdos_renyi(std::size_t n, double q, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("erdos_renyi needs n >= 1");
    require_probability(q, "q");
    const CounterRng rng(seed);
    std::vector<Edge> edges;
    std::uint64_t pair = 0;
    for (VertexId u = 0; u < n; ++u) {
        for (VertexId v = u + 1; v < n; ++v, ++pair) {
            if (rng.uniform(CounterRng::Stream::graph_build, 0, pair) < q) edges.push_back({u, v});
        }
    }
    return HostGraph(n, std::move(edges), GraphKind::erdos_renyi, q);
}

bool erdos_renyi_count_plausible(const HostGraph& g, double q) {
    const double pairs = 0.5 * static_cast<double>(g.vertex_count()) * static_cast<double>(g.vertex_count() - 1);
    const double mean = pairs * q;
    const double slack = 3.0 * std::sqrt(pairs * q * (1.0 - q)) + 1.0;
    return std::abs(static_cast<double>(g.edge_count()) - mean) <= slack;
}

HostGraph hypercube(unsigned dimension) {
    if (dimension > 24) throw std::invalid_argument("hypercube dimension above 24");
    const std::size_t n = std::size_t{1} << dimension;
    std::vector<Edge> edges;
    edges.reserve(dimension * n / 2);
    for (VertexId v = 0; v < n; ++v)
        for (unsigned bit = 0; bit < dimension; ++bit)
            if (!(v & (1u << bit))) edges.push_back({v, v | (1u << bit)});
    return HostGraph(n, std::move(edges), GraphKind::hypercube);
}

std::int32_t centered_coordinate(std::size_t index, std::size_t extent) {
    const auto i = static_cast<std::int32_t>(index);
    const auto w = static_cast<std::int32_t>(extent);
    return (w % 2 == 1) ? i - (w - 1) / 2 : i - (w / 2 - 1);
}

HostGraph grid_2d(std::size_t width, std::size_t height, Boundary boundary) {
    if (width == 0 || height == 0) throw std::invalid_argument("grid needs positive width and height");
    if (boundary == Boundary::torus && (width < 3 || height < 3))
        throw std::invalid_argument("torus needs width and height >= 3");
    if (width * height > kMaxVertices) throw std::length_error("grid too large");

    const auto id = [width](std::size_t x, std::size_t y) { return static_cast<VertexId>(y * width + x); };
    std::vector<Edge> edges;
    std::vector<Coords> coords(width * height);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            coords[id(x, y)] = {0, 0, centered_coordinate(x, width), centered_coordinate(y, height)};
            if (x + 1 < width) edges.push_back({id(x, y), id(x + 1, y)});
            else if (boundary == Boundary::torus) edges.push_back({id(0, y), id(x, y)});
            if (y + 1 < height) edges.push_back({id(x, y), id(x, y + 1)});
            else if (boundary == Boundary::torus) edges.push_back({id(x, 0), id(x, y)});
        }
    }
    return HostGraph(width * height, std::move(edges), GraphKind::grid2d, std::nullopt,
                     GraphLabels{std::move(coords), boundary, std::nullopt});
}

HostGraph complete_multipartite(std::span<const std::size_t> parts) {
    std::vector<std::size_t> part_of;
    for (std::size_t i = 0; i < parts.size(); ++i) part_of.insert(part_of.end(), parts[i], i);
    const std::size_t n = part_of.size();
    std::vector<Edge> edges;
    for (VertexId u = 0; u < n; ++u)
        for (VertexId v = u + 1; v < n; ++v)
            if (part_of[u] != part_of[v]) edges.push_back({u, v});
    return HostGraph(n, std::move(edges), GraphKind::custom);
}

HostGraph cartesian_product(const HostGraph& left, const HostGraph& right) {
    const std::size_t layers = left.vertex_count();
    const std::size_t fibers = right.vertex_count();
    if (layers == 0 || fibers == 0) throw std::invalid_argument("cartesian_product needs nonempty factors");
    if (layers > kMaxVertices / fibers) throw std::length_error("product vertex count overflows 32-bit ids");
    const std::size_t edge_total = layers * right.edge_count() + fibers * left.edge_count();
    if (edge_total > kMaxEdges) throw std::length_error("product edge count overflows 32-bit ids");

    ProductShape shape{layers, fibers, right.edge_count(), left.edges()};
    std::vector<Edge> edges;
    edges.reserve(edge_total);
    for (std::size_t h = 0; h < layers; ++h)
        for (const auto& e : right.edges()) edges.push_back({shape.vertex(h, e.u), shape.vertex(h, e.v)});
    for (const auto& e : left.edges())
        for (std::size_t g = 0; g < fibers; ++g) edges.push_back({shape.vertex(e.u, g), shape.vertex(e.v, g)});

    std::vector<Coords> coords(layers * fibers);
    for (std::size_t h = 0; h < layers; ++h) {
        for (std::size_t g = 0; g < fibers; ++g) {
            Coords c{static_cast<std::int32_t>(h), static_cast<std::int32_t>(g), 0, 0};
            if (left.has_grid()) {
                c.x = left.coords()[h].x;
                c.y = left.coords()[h].y;
            }
            coords[shape.vertex(h, g)] = c;
        }
    }
    return HostGraph(layers * fibers, std::move(edges), GraphKind::product, right.q_meta(),
                     GraphLabels{std::move(coords), left.grid_boundary(), std::move(shape)});
}

PseudorandomAudit pseudorandomness_deviation(const HostGraph& g, double q, std::size_t num_samples,
                                             std::uint64_t seed) {
    if (num_samples == 0) throw std::invalid_argument("num_samples must be >= 1");
    require_probability(q, "q");
    const std::size_t n = g.vertex_count();
    std::mt19937_64 gen(derive_seed(seed, static_cast<std::uint64_t>(CounterRng::Stream::audit)));
    std::vector<VertexId> order(n);
    std::iota(order.begin(), order.end(), VertexId{0});
    std::vector<char> member(n, 0);

    PseudorandomAudit audit;
    audit.samples_tested = num_samples;
    audit.seed = seed;
    for (std::size_t s = 0; s < num_samples && n > 0; ++s) {
        const std::size_t size = std::uniform_int_distribution<std::size_t>(1, n)(gen);
        for (std::size_t i = 0; i < size; ++i) {
            const std::size_t j = std::uniform_int_distribution<std::size_t>(i, n - 1)(gen);
            std::swap(order[i], order[j]);
        }
        std::fill(member.begin(), member.end(), 0);
        for (std::size_t i = 0; i < size; ++i) member[order[i]] = 1;
        std::size_t inside = 0;
        for (const auto& e : g.edges()) inside += (member[e.u] & member[e.v]);
        const double expected = q * static_cast<double>(size) * static_cast<double>(size) / 2.0;
        audit.max_abs_deviation = std::max(audit.max_abs_deviation, std::abs(static_cast<double>(inside) - expected));
    }
    const double scale = static_cast<double>(n) * static_cast<double>(n) * (q > 0.0 ? q : 1.0);
    audit.normalized_deviation = scale > 0.0 ? audit.max_abs_deviation / scale : 0.0;
    return audit;
}

nlohmann::json to_json(const HostGraph& g) {
    nlohmann::json doc;
    doc["n"] = g.vertex_count();
    auto edges = nlohmann::json::array();
    for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
    doc["edges"] = std::move(edges);
    doc["kind"] = to_string(g.kind());
    if (g.q_meta()) doc["q"] = *g.q_meta();
    if (g.has_coords()) {
        auto coords = nlohmann::json::array();
        for (const auto& c : g.coords()) coords.push_back({c.layer, c.fiber, c.x, c.y});
        doc["coords"] = std::move(coords);
    }
    if (g.grid_boundary()) doc["boundary"] = *g.grid_boundary() == Boundary::open ? "open" : "torus";
    if (const auto& shape = g.product()) {
        auto h_edges = nlohmann::json::array();
        for (const auto& e : shape->layer_edges) h_edges.push_back({e.u, e.v});
        doc["product"] = {{"layers", shape->layers},
                          {"fibers", shape->fibers},
                          {"fiber_edges", shape->fiber_edges},
                          {"layer_edges", std::move(h_edges)}};
    }
    return doc;
}

HostGraph graph_from_json(const nlohmann::json& doc) {
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges")) edges.push_back({e.at(0).get<VertexId>(), e.at(1).get<VertexId>()});
    GraphLabels labels;
    if (doc.contains("coords")) {
        for (const auto& c : doc["coords"])
            labels.coords.push_back({c.at(0).get<std::int32_t>(), c.at(1).get<std::int32_t>(),
                                     c.at(2).get<std::int32_t>(), c.at(3).get<std::int32_t>()});
    }
    if (doc.contains("boundary"))
        labels.grid_boundary = doc["boundary"].get<std::string>() == "torus" ? Boundary::torus : Boundary::open;
    if (doc.contains("product")) {
        const auto& p = doc["product"];
        ProductShape shape{p.at("layers").get<std::size_t>(), p.at("fibers").get<std::size_t>(),
                           p.at("fiber_edges").get<std::size_t>(), {}};
        for (const auto& e : p.at("layer_edges"))
            shape.layer_edges.push_back({e.at(0).get<VertexId>(), e.at(1).get<VertexId>()});
        labels.product = std::move(shape);
    }
    std::optional<double> q;
    if (doc.contains("q")) q = doc["q"].get<double>();
    return HostGraph(doc.at("n").get<std::size_t>(), std::move(edges),
                     graph_kind_from_string(doc.value("kind", std::string("custom"))), q, std::move(labels));
}

nlohmann::json to_json(const PseudorandomAudit& audit) {
    return {{"samples_tested", audit.samples_tested},
            {"max_abs_deviation", audit.max_abs_deviation},
            {"normalized_deviation", audit.normalized_deviation},
            {"seed", audit.seed}};
}

}  // namespace ipm
