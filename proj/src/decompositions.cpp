#include "ipm/decompositions.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace ipm {

namespace {

class RemainingEdges {
public:
    explicit RemainingEdges(const HostGraph& g) : g_(g), used_(g.edge_count(), 0), degree_(g.vertex_count()) {
        for (VertexId v = 0; v < g.vertex_count(); ++v) degree_[v] = g.degree(v);
        left_ = g.edge_count();
    }

    [[nodiscard]] std::size_t left() const { return left_; }
    [[nodiscard]] std::size_t degree(VertexId v) const { return degree_[v]; }

    void take(EdgeId e) {
        used_[e] = 1;
        --degree_[g_.edge(e).u];
        --degree_[g_.edge(e).v];
        --left_;
    }

    // Next hop from `v` avoiding vertices already on the path: highest remaining
    // degree, ties by lowest id.
    [[nodiscard]] std::optional<Neighbor> best_step(VertexId v, const std::vector<char>& on_path) const {
        std::optional<Neighbor> best;
        for (const auto& nb : g_.neighbors(v)) {
            if (used_[nb.edge] || on_path[nb.vertex]) continue;
            if (!best || degree_[nb.vertex] > degree_[best->vertex] ||
                (degree_[nb.vertex] == degree_[best->vertex] && nb.vertex < best->vertex))
                best = nb;
        }
        return best;
    }

    [[nodiscard]] VertexId start_vertex() const {
        std::optional<VertexId> odd, any;
        for (VertexId v = 0; v < degree_.size(); ++v) {
            const auto d = degree_[v];
            if (d == 0) continue;
            if (!any || d > degree_[*any]) any = v;
            if (d % 2 == 1 && (!odd || d > degree_[*odd])) odd = v;
        }
        return odd ? *odd : *any;
    }

private:
    const HostGraph& g_;
    std::vector<char> used_;
    std::vector<std::size_t> degree_;
    std::size_t left_ = 0;
};

}  // namespace

PathDecomposition path_decomposition(const HostGraph& g) {
    PathDecomposition out;
    RemainingEdges rest(g);
    std::vector<char> on_path(g.vertex_count(), 0);
    while (rest.left() > 0) {
        const VertexId start = rest.start_vertex();
        std::deque<VertexId> verts{start};
        std::deque<EdgeId> edges;
        on_path[start] = 1;
        // Grow forward, then backward from the start, until neither end can move.
        for (bool forward : {true, false}) {
            while (true) {
                const VertexId end = forward ? verts.back() : verts.front();
                const auto step = rest.best_step(end, on_path);
                if (!step) break;
                rest.take(step->edge);
                on_path[step->vertex] = 1;
                if (forward) {
                    verts.push_back(step->vertex);
                    edges.push_back(step->edge);
                } else {
                    verts.push_front(step->vertex);
                    edges.push_front(step->edge);
                }
            }
        }
        for (auto v : verts) on_path[v] = 0;
        out.paths.emplace_back(verts.begin(), verts.end());
        out.path_edges.emplace_back(edges.begin(), edges.end());
    }
    verify(g, out);
    return out;
}

void verify(const HostGraph& g, const PathDecomposition& d) {
    if (d.paths.size() != d.path_edges.size()) throw std::logic_error("paths and path edges disagree");
    std::vector<char> covered(g.edge_count(), 0);
    std::vector<char> seen(g.vertex_count(), 0);
    for (std::size_t i = 0; i < d.paths.size(); ++i) {
        const auto& verts = d.paths[i];
        const auto& edges = d.path_edges[i];
        if (verts.size() != edges.size() + 1) throw std::logic_error("path length mismatch");
        for (auto v : verts) {
            if (seen[v]) throw std::logic_error("path repeats a vertex");
            seen[v] = 1;
        }
        for (auto v : verts) seen[v] = 0;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const auto& e = g.edge(edges[k]);
            const bool joins = (e.u == verts[k] && e.v == verts[k + 1]) || (e.v == verts[k] && e.u == verts[k + 1]);
            if (!joins) throw std::logic_error("path edge does not join consecutive vertices");
            if (covered[edges[k]]) throw std::logic_error("paths are not edge-disjoint");
            covered[edges[k]] = 1;
        }
    }
    if (std::find(covered.begin(), covered.end(), 0) != covered.end())
        throw std::logic_error("paths do not cover every edge");
}

MatchingDecomposition matching_decomposition(const HostGraph& g, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    const double n = static_cast<double>(g.vertex_count());
    if (static_cast<double>(g.edge_count()) < 2.0 * n / eps) throw std::invalid_argument("needs e(G) >= 2n/eps");
    return matching_decomposition(g, eps, path_decomposition(g));
}

MatchingDecomposition matching_decomposition(const HostGraph& g, double eps, const PathDecomposition& paths) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    const double n = static_cast<double>(g.vertex_count());
    const double e = static_cast<double>(g.edge_count());
    if (e < 2.0 * n / eps) throw std::invalid_argument("needs e(G) >= 2n/eps");

    const double short_length = 2.0 * eps * e / n;
    const double min_size = eps * e / (2.0 * n);
    const double leftover_bound = 2.0 * eps * e;

    MatchingDecomposition out;
    out.eps = eps;
    auto& report = out.report;
    report.path_count = paths.path_count();

    std::vector<std::size_t> kept, set_aside;
    for (std::size_t i = 0; i < paths.path_count(); ++i) {
        const auto len = static_cast<double>(paths.path_edges[i].size());
        (len <= short_length ? set_aside : kept).push_back(i);
    }
    report.short_paths = set_aside.size();

    std::size_t aside_edges = 0;
    for (auto i : set_aside) aside_edges += paths.path_edges[i].size();
    if (static_cast<double>(aside_edges) > leftover_bound) {
        std::stable_sort(set_aside.begin(), set_aside.end(), [&](std::size_t a, std::size_t b) {
            return paths.path_edges[a].size() > paths.path_edges[b].size();
        });
        std::vector<std::size_t> still_aside;
        for (auto i : set_aside) {
            const auto len = paths.path_edges[i].size();
            if (static_cast<double>(aside_edges) > leftover_bound && static_cast<double>(len / 2) >= min_size) {
                kept.push_back(i);
                aside_edges -= len;
                ++report.readmitted_short_paths;
            } else {
                still_aside.push_back(i);
            }
        }
        set_aside = std::move(still_aside);
        std::sort(kept.begin(), kept.end());
    }

    for (auto i : set_aside)
        out.leftover.insert(out.leftover.end(), paths.path_edges[i].begin(), paths.path_edges[i].end());
    for (auto i : kept) {
        const auto& edges = paths.path_edges[i];
        std::vector<EdgeId> even, odd;
        for (std::size_t k = 0; k < edges.size(); ++k) (k % 2 == 0 ? even : odd).push_back(edges[k]);
        for (auto* half : {&even, &odd}) {
            if (half->empty()) continue;
            if (static_cast<double>(half->size()) < min_size) {
                out.leftover.insert(out.leftover.end(), half->begin(), half->end());
                ++report.demoted_matchings;
            } else {
                out.matchings.push_back(std::move(*half));
            }
        }
    }
    std::sort(out.leftover.begin(), out.leftover.end());

    report.matching_count = out.matchings.size();
    report.matching_count_bound = 2 * g.vertex_count();
    report.m1 = report.matching_count <= report.matching_count_bound;
    report.leftover = out.leftover.size();
    report.leftover_bound = leftover_bound;
    report.m2 = static_cast<double>(report.leftover) <= leftover_bound;
    report.matching_size_bound = min_size;
    report.min_matching_size = out.matchings.empty() ? 0 : out.matchings.front().size();
    for (const auto& m : out.matchings) report.min_matching_size = std::min(report.min_matching_size, m.size());
    report.m3 = std::all_of(out.matchings.begin(), out.matchings.end(),
                            [&](const auto& m) { return static_cast<double>(m.size()) >= min_size; });
    verify(g, out);
    return out;
}

void verify(const HostGraph& g, const MatchingDecomposition& d) {
    std::vector<char> covered(g.edge_count(), 0);
    std::vector<char> touched(g.vertex_count(), 0);
    for (const auto& m : d.matchings) {
        for (auto id : m) {
            const auto& e = g.edge(id);
            if (touched[e.u] || touched[e.v]) throw std::logic_error("matching shares a vertex");
            touched[e.u] = touched[e.v] = 1;
            if (covered[id]) throw std::logic_error("matchings are not edge-disjoint");
            covered[id] = 1;
        }
        for (auto id : m) touched[g.edge(id).u] = touched[g.edge(id).v] = 0;
    }
    for (auto id : d.leftover) {
        if (covered[id]) throw std::logic_error("leftover edge also in a matching");
        covered[id] = 1;
    }
    if (std::find(covered.begin(), covered.end(), 0) != covered.end())
        throw std::logic_error("matchings and leftover do not cover every edge");
}

nlohmann::json to_json(const PathDecomposition& paths, const MatchingDecomposition& matchings) {
    const auto& r = matchings.report;
    nlohmann::json doc;
    doc["paths"] = paths.paths;
    doc["matchings"] = matchings.matchings;
    doc["leftover"] = matchings.leftover;
    doc["report"] = {
        {"M1", {{"holds", r.m1}, {"matchings", r.matching_count}, {"bound", r.matching_count_bound}}},
        {"M2", {{"holds", r.m2}, {"leftover", r.leftover}, {"bound", r.leftover_bound}}},
        {"M3", {{"holds", r.m3}, {"min_size", r.min_matching_size}, {"bound", r.matching_size_bound}}},
        {"eps", matchings.eps},
        {"path_count", r.path_count},
        {"short_paths", r.short_paths},
        {"readmitted_short_paths", r.readmitted_short_paths},
        {"demoted_matchings", r.demoted_matchings},
    };
    return doc;
}

}  // namespace ipm
