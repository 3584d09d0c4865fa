#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace ipm {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
    VertexId u;
    VertexId v;
    bool operator==(const Edge&) const = default;
};

struct Neighbor {
    VertexId vertex;
    EdgeId edge;
};

enum class GraphKind { complete, erdos_renyi, hypercube, grid2d, product, custom };
enum class Boundary { open, torus };

[[nodiscard]] std::string to_string(GraphKind kind);
[[nodiscard]] GraphKind graph_kind_from_string(const std::string& name);

/// Per-vertex labels. `layer`/`fiber` are set on Cartesian products (index in
/// the left and right factor); `x`/`y` are centered grid coordinates, present
/// when the grid factor (or the graph itself) is a 2D box.
struct Coords {
    std::int32_t layer = 0;
    std::int32_t fiber = 0;
    std::int32_t x = 0;
    std::int32_t y = 0;
    bool operator==(const Coords&) const = default;
};

/// Shape of a Cartesian product H x G. Vertex (h, g) has id h * fibers + g.
/// Edge ids: first the copies of G's edges, layer by layer
/// (id = h * fiber_edges + k), then the copies of H's edges, fiber by fiber
/// (id = layers * fiber_edges + j * fibers + g).
struct ProductShape {
    std::size_t layers = 0;       // |V(H)|
    std::size_t fibers = 0;       // |V(G)|
    std::size_t fiber_edges = 0;  // e(G)
    std::vector<Edge> layer_edges;  // E(H), in H's edge-id order

    [[nodiscard]] VertexId vertex(std::size_t layer, std::size_t fiber) const {
        return static_cast<VertexId>(layer * fibers + fiber);
    }
    [[nodiscard]] EdgeId fiber_edge(std::size_t layer, std::size_t k) const {
        return static_cast<EdgeId>(layer * fiber_edges + k);
    }
    [[nodiscard]] EdgeId cross_edge(std::size_t h_edge, std::size_t fiber) const {
        return static_cast<EdgeId>(layers * fiber_edges + h_edge * fibers + fiber);
    }
    [[nodiscard]] bool is_cross(EdgeId e) const { return e >= layers * fiber_edges; }
};

/// Optional structure attached to a graph at construction.
struct GraphLabels {
    std::vector<Coords> coords;  // empty, or one entry per vertex
    std::optional<Boundary> grid_boundary;  // set when coords carry grid x/y
    std::optional<ProductShape> product;
};

/// Immutable undirected simple graph with dense, construction-ordered edge ids.
class HostGraph {
public:
    HostGraph(std::size_t vertex_count, std::vector<Edge> edges, GraphKind kind,
              std::optional<double> q_meta = std::nullopt, GraphLabels labels = {});

    [[nodiscard]] std::size_t vertex_count() const noexcept { return vertex_count_; }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const Edge& edge(EdgeId e) const { return edges_.at(e); }
    [[nodiscard]] std::span<const Neighbor> neighbors(VertexId v) const;
    [[nodiscard]] std::size_t degree(VertexId v) const;

    [[nodiscard]] GraphKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::optional<double> q_meta() const noexcept { return q_meta_; }

    [[nodiscard]] bool has_coords() const noexcept { return !coords_.empty(); }
    [[nodiscard]] const std::vector<Coords>& coords() const noexcept { return coords_; }
    [[nodiscard]] bool has_grid() const noexcept { return grid_boundary_.has_value(); }
    [[nodiscard]] std::optional<Boundary> grid_boundary() const noexcept { return grid_boundary_; }
    [[nodiscard]] const std::optional<ProductShape>& product() const noexcept { return product_; }

    /// l-infinity norm of the grid coordinates; requires grid labels.
    [[nodiscard]] std::int32_t annulus(VertexId v) const;

    /// Hash of vertex count and edge list; identifies the graph a sample belongs to.
    [[nodiscard]] std::uint64_t fingerprint() const noexcept { return fingerprint_; }

    /// Full scan: no loops, no duplicates, adjacency agrees with the edge list.
    [[nodiscard]] bool check_consistency() const;

private:
    std::size_t vertex_count_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> adjacency_;
    GraphKind kind_;
    std::optional<double> q_meta_;
    std::vector<Coords> coords_;
    std::optional<Boundary> grid_boundary_;
    std::optional<ProductShape> product_;
    std::uint64_t fingerprint_ = 0;
};

[[nodiscard]] HostGraph complete_graph(std::size_t n);
[[nodiscard]] HostGraph empty_graph(std::size_t n);
[[nodiscard]] HostGraph path_graph(std::size_t n);
[[nodiscard]] HostGraph cycle_graph(std::size_t n);
[[nodiscard]] HostGraph erdos_renyi(std::size_t n, double q, std::uint64_t seed);
[[nodiscard]] HostGraph hypercube(unsigned dimension);
[[nodiscard]] HostGraph grid_2d(std::size_t width, std::size_t height, Boundary boundary);
[[nodiscard]] HostGraph complete_multipartite(std::span<const std::size_t> parts);
[[nodiscard]] HostGraph cartesian_product(const HostGraph& left, const HostGraph& right);

/// Centered coordinate of column/row `index` in a box of the given extent.
/// Odd extents are symmetric about 0; even extents place 0 at the lower-left
/// cell of the central 2x2 block.
[[nodiscard]] std::int32_t centered_coordinate(std::size_t index, std::size_t extent);

/// Within-3-sigma check of an Erdos-Renyi edge count against its binomial mean.
/// Only a diagnostic: returns false when the count is unusual.
[[nodiscard]] bool erdos_renyi_count_plausible(const HostGraph& g, double q);

struct PseudorandomAudit {
    std::size_t samples_tested = 0;
    double max_abs_deviation = 0.0;
    double normalized_deviation = 0.0;
    std::uint64_t seed = 0;
};

/// Samples vertex subsets U (uniform size in [1, n], then a uniform subset of
/// that size) and reports the largest |e(G[U]) - q|U|^2/2| seen. This is a
/// randomized lower estimate of the true maximum over all U.
[[nodiscard]] PseudorandomAudit pseudorandomness_deviation(const HostGraph& g, double q,
                                                          std::size_t num_samples,
                                                          std::uint64_t seed);

[[nodiscard]] nlohmann::json to_json(const HostGraph& g);
[[nodiscard]] HostGraph graph_from_json(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json to_json(const PseudorandomAudit& audit);

}  // namespace ipm
