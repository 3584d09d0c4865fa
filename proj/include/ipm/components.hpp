#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "ipm/host_graph.hpp"
#include "ipm/measures.hpp"

namespace ipm {

/// Disjoint sets with path compression and union by size. Optionally keeps a
/// per-root count of members on each of two sides (layer 0 / layer 1).
class UnionFind {
public:
    explicit UnionFind(std::size_t n);

    VertexId find(VertexId v);
    /// Returns the new root.
    VertexId unite(VertexId a, VertexId b);
    [[nodiscard]] std::size_t size_of_root(VertexId root) const { return size_[root]; }

    void track_sides(const std::vector<std::uint8_t>& side);
    [[nodiscard]] std::array<std::uint32_t, 2> side_counts_of_root(VertexId root) const {
        return {left_[root], right_[root]};
    }

private:
    std::vector<VertexId> parent_;
    std::vector<std::uint32_t> size_;
    std::vector<std::uint32_t> left_;
    std::vector<std::uint32_t> right_;
};

struct ComponentSummary {
    std::vector<std::uint32_t> component_of;  // dense ids, in order of first vertex
    std::vector<std::size_t> size_by_id;
    std::vector<std::size_t> sizes;           // descending: C1 >= C2 >= ...
    /// Vertices per layer for each component id; filled on two-layer products only.
    std::vector<std::array<std::uint32_t, 2>> layer_counts;
    /// max annulus - min annulus + 1 per component id; filled when grid labels exist.
    std::vector<std::int32_t> annulus_span;

    [[nodiscard]] std::size_t component_count() const noexcept { return size_by_id.size(); }
    [[nodiscard]] std::size_t largest() const noexcept { return sizes.empty() ? 0 : sizes.front(); }
};

/// Throws std::invalid_argument when the sample does not belong to the graph.
[[nodiscard]] ComponentSummary connected_components(const HostGraph& g, const EdgeSample& s);

/// Left meets Right on K2 x G: some open component has strictly more than
/// half of each layer (count * 2 > n).
[[nodiscard]] bool lmr_event(const HostGraph& g, const EdgeSample& s);

/// Largest number of consecutive annuli met by one open component.
[[nodiscard]] std::int32_t annulus_span(const HostGraph& g, const EdgeSample& s);

/// Sample on H: uv is open iff the sample restricted to {u,v} x V(G) has Left meets Right.
[[nodiscard]] EdgeSample renormalise(const HostGraph& product_graph, const EdgeSample& s, const HostGraph& h);

/// True iff every pair u, v joined in the renormalised sample has some vertex of
/// fiber u and some vertex of fiber v in one open component of s.
[[nodiscard]] bool lift_consistency_check(const HostGraph& h, const EdgeSample& renormalised,
                                          const HostGraph& product_graph, const EdgeSample& s);

[[nodiscard]] nlohmann::json to_json(const ComponentSummary& summary, std::optional<bool> lmr = std::nullopt,
                                     std::optional<std::int32_t> span = std::nullopt);

}  // namespace ipm
