#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ipm/host_graph.hpp"

namespace ipm {

/// 4 - 2*sqrt(3): the crossing threshold for two copies of a dense graph joined by a matching.
inline constexpr double kCriticalP = 0.53589838486224541294510731698826;

/// theta(p) = (1 + sqrt(2p - 1)) / 2, the root in [1/2, 1] of x^2 + (1-x)^2 = p.
/// Defined for p in (1/2, 1]; throws std::domain_error otherwise.
[[nodiscard]] double theta(double p);

/// Open/closed bit per edge id, tagged with the graph and the randomness that produced it.
class EdgeSample {
public:
    EdgeSample() = default;
    EdgeSample(std::uint64_t graph_fingerprint, std::size_t edge_count, std::uint64_t seed, std::uint64_t replica);

    [[nodiscard]] std::size_t size() const noexcept { return edge_count_; }
    [[nodiscard]] bool test(EdgeId e) const { return (words_[e >> 6] >> (e & 63)) & 1u; }
    void set(EdgeId e, bool open = true);
    [[nodiscard]] std::size_t count_open() const;

    [[nodiscard]] std::uint64_t graph_fingerprint() const noexcept { return graph_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t replica() const noexcept { return replica_; }

    /// One hex digit per 4 edges, lowest edge id first; within a digit edge 4k is bit 0.
    [[nodiscard]] std::string to_hex() const;
    static EdgeSample from_hex(const std::string& hex, std::size_t edge_count, std::uint64_t graph_fingerprint = 0);

    [[nodiscard]] static EdgeSample all_open(const HostGraph& g);
    [[nodiscard]] static EdgeSample all_closed(const HostGraph& g);

    bool operator==(const EdgeSample& other) const {
        return edge_count_ == other.edge_count_ && words_ == other.words_;
    }

private:
    std::uint64_t graph_ = 0;
    std::size_t edge_count_ = 0;
    std::uint64_t seed_ = 0;
    std::uint64_t replica_ = 0;
    std::vector<std::uint64_t> words_;
};

/// How a vertex's state distribution is selected from its labels.
enum class VertexClassing {
    uniform,       // one distribution for every vertex
    layer,         // product layer index (0 or 1 on K2 x G)
    annulus_mod6,  // l-infinity grid norm mod 6
};

/// How an edge's rule table is selected, and which endpoint is "first".
enum class EdgeClassing {
    uniform,     // class 0, endpoints in stored order
    layer_pair,  // 0: inside layer 0, 1: inside layer 1, 2: cross (layer-0 endpoint first)
    annulus,     // 0: same annulus, 1: different annuli (inner endpoint first)
};

struct StateSpec {
    std::vector<std::string> states;
    VertexClassing classing = VertexClassing::uniform;
    std::vector<std::vector<double>> distributions;  // [class][state]

    /// Throws unless every distribution is nonnegative and sums to 1 within 1e-12.
    void validate() const;
};

struct EdgeRule {
    EdgeClassing classing = EdgeClassing::uniform;
    std::size_t class_count = 1;
    std::size_t state_count = 0;
    std::vector<double> open_probability;  // [class][first state][second state]

    EdgeRule() = default;
    EdgeRule(EdgeClassing classing, std::size_t class_count, std::size_t state_count);

    [[nodiscard]] double& at(std::size_t cls, std::size_t first, std::size_t second) {
        return open_probability[(cls * state_count + first) * state_count + second];
    }
    [[nodiscard]] double at(std::size_t cls, std::size_t first, std::size_t second) const {
        return open_probability[(cls * state_count + first) * state_count + second];
    }
    void validate() const;
};

enum class Construction { product, two_state, multi_state, lmr_lower, radial, custom };

[[nodiscard]] std::string to_string(Construction c);
[[nodiscard]] Construction construction_from_string(const std::string& name);

/// A 1-independent edge law: either the product measure, or a state-based
/// measure (iid vertex states, then an edge rule on the pair of end states).
class Measure {
public:
    static Measure product(double p);
    static Measure state_based(Construction construction, double p, StateSpec states, EdgeRule rule,
                               unsigned multi_state_r = 0);

    [[nodiscard]] Construction construction() const noexcept { return construction_; }
    [[nodiscard]] bool is_product() const noexcept { return construction_ == Construction::product; }
    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] unsigned r() const noexcept { return r_; }
    [[nodiscard]] const StateSpec& states() const { return *states_; }
    [[nodiscard]] const EdgeRule& rule() const { return *rule_; }

private:
    Measure() = default;
    Construction construction_ = Construction::product;
    double p_ = 0.0;
    unsigned r_ = 0;
    std::optional<StateSpec> states_;
    std::optional<EdgeRule> rule_;
};

[[nodiscard]] Measure build_product(double p);
[[nodiscard]] Measure build_two_state(double p);
[[nodiscard]] Measure build_multi_state(unsigned r, double p);
/// Lower-bound measure on K2 x G. Layer 0 states {0,1} with P[1] = theta(p);
/// layer 1 states {0,*} with P[0] = sqrt(p).
[[nodiscard]] Measure build_lmr_lower(double p);
/// Radial measure on (open grid) x G with state laws keyed on annulus mod 6.
[[nodiscard]] Measure build_radial(double p);

/// Probability of the distinguished last state r+1 in the (r+1)-state measure.
[[nodiscard]] double multi_state_last_mass(unsigned r, double p);

/// A measure compiled against one graph: vertex classes, edge classes and
/// orientations are resolved once so that sampling is a table lookup per edge.
class BoundMeasure {
public:
    /// Throws std::invalid_argument if the graph lacks the labels the measure
    /// needs, and std::domain_error if some edge marginal falls below p - 1e-12.
    BoundMeasure(const Measure& measure, const HostGraph& graph);

    [[nodiscard]] const Measure& measure() const noexcept { return measure_; }
    [[nodiscard]] const HostGraph& graph() const noexcept { return *graph_; }

    /// State index per vertex (empty for the product measure).
    [[nodiscard]] std::vector<std::uint8_t> sample_states(std::uint64_t seed, std::uint64_t replica) const;
    [[nodiscard]] EdgeSample sample(std::uint64_t seed, std::uint64_t replica) const;
    [[nodiscard]] EdgeSample apply_rule(std::span<const std::uint8_t> states, std::uint64_t seed,
                                        std::uint64_t replica) const;

    [[nodiscard]] double edge_marginal(EdgeId e) const;
    [[nodiscard]] double min_edge_marginal() const noexcept { return min_marginal_; }

    [[nodiscard]] std::size_t vertex_class(VertexId v) const { return vertex_class_[v]; }
    [[nodiscard]] std::size_t edge_class(EdgeId e) const { return edge_class_[e]; }
    /// Endpoints of e in rule order (first, second).
    [[nodiscard]] Edge oriented(EdgeId e) const;

private:
    Measure measure_;
    const HostGraph* graph_;
    std::vector<std::uint8_t> vertex_class_;
    std::vector<std::uint8_t> edge_class_;
    std::vector<std::uint8_t> flipped_;
    std::vector<std::vector<double>> cumulative_;
    double min_marginal_ = 1.0;
};

[[nodiscard]] EdgeSample sample_edges(const Measure& m, const HostGraph& g, std::uint64_t seed,
                                      std::uint64_t replica);
[[nodiscard]] double edge_marginal(const Measure& m, const HostGraph& g, EdgeId e);

struct IndependenceReport {
    double tv_discrepancy = 0.0;
    double threshold = 0.0;
    bool pass = false;
    bool vertex_disjoint = true;
    std::size_t reps = 0;
};

/// Empirical joint law of (pattern on A, pattern on B) against the product of
/// its marginals, in total variation. Shared vertices are allowed (negative control).
[[nodiscard]] IndependenceReport independence_probe(const Measure& m, const HostGraph& g,
                                                    std::span<const EdgeId> a, std::span<const EdgeId> b,
                                                    std::size_t reps, std::uint64_t seed,
                                                    double threshold = 0.01);

[[nodiscard]] nlohmann::json to_json(const Measure& m);
/// {variant, p, r?, construction, params}; variant is "product" or "state_based".
[[nodiscard]] Measure measure_from_json(const nlohmann::json& doc);

}  // namespace ipm
