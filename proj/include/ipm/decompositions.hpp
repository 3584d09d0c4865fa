#pragma once

#include <vector>

#include "json.hpp"
#include "ipm/host_graph.hpp"

namespace ipm {

struct PathDecomposition {
    std::vector<std::vector<VertexId>> paths;
    std::vector<std::vector<EdgeId>> path_edges;  // parallel to `paths`

    [[nodiscard]] std::size_t path_count() const noexcept { return paths.size(); }
};

/// Simple, pairwise edge-disjoint, covering exactly E(G). Throws std::logic_error otherwise.
void verify(const HostGraph& g, const PathDecomposition& d);

/// Greedy: repeatedly grow a maximal simple path in the remaining edges,
/// starting at an odd-degree vertex when one exists (highest remaining degree,
/// ties by lowest id), extending from both ends.
[[nodiscard]] PathDecomposition path_decomposition(const HostGraph& g);

struct MatchingReport {
    std::size_t matching_count = 0;
    std::size_t matching_count_bound = 0;  // 2n
    bool m1 = false;
    std::size_t leftover = 0;
    double leftover_bound = 0.0;  // 2 eps e(G)
    bool m2 = false;
    std::size_t min_matching_size = 0;
    double matching_size_bound = 0.0;  // eps e(G) / (2n)
    bool m3 = false;
    std::size_t path_count = 0;
    std::size_t short_paths = 0;
    std::size_t readmitted_short_paths = 0;
    std::size_t demoted_matchings = 0;
};

struct MatchingDecomposition {
    std::vector<std::vector<EdgeId>> matchings;
    std::vector<EdgeId> leftover;
    double eps = 0.0;
    MatchingReport report;
};

/// Edge-disjoint matchings from a path decomposition: paths with at most
/// 2 eps e(G)/n edges are set aside, the rest are split into alternate-edge
/// matchings. If the set-aside edges exceed 2 eps e(G), the longest set-aside
/// paths whose halves still meet the size bound are split as well. Matchings
/// below eps e(G)/(2n) edges are moved to the leftover.
/// Throws std::invalid_argument unless e(G) >= 2n/eps and eps in (0, 1).
[[nodiscard]] MatchingDecomposition matching_decomposition(const HostGraph& g, double eps);
[[nodiscard]] MatchingDecomposition matching_decomposition(const HostGraph& g, double eps,
                                                           const PathDecomposition& paths);

/// Edge-disjoint matchings covering exactly E(G) minus the leftover; throws std::logic_error otherwise.
void verify(const HostGraph& g, const MatchingDecomposition& d);

[[nodiscard]] nlohmann::json to_json(const PathDecomposition& paths, const MatchingDecomposition& matchings);

}  // namespace ipm
