#include "ipm/measures.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include "ipm/rng.hpp"

namespace ipm {

namespace {

constexpr double kMarginalSlack = 1e-12;

void require_unit_interval(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error(std::string(what) + " must lie in [0, 1]");
}

std::string to_string(VertexClassing c) {
    switch (c) {
        case VertexClassing::uniform: return "uniform";
        case VertexClassing::layer: return "layer";
        case VertexClassing::annulus_mod6: return "annulus_mod6";
    }
    return "uniform";
}

std::string to_string(EdgeClassing c) {
    switch (c) {
        case EdgeClassing::uniform: return "uniform";
        case EdgeClassing::layer_pair: return "layer_pair";
        case EdgeClassing::annulus: return "annulus";
    }
    return "uniform";
}

VertexClassing vertex_classing_from_string(const std::string& s) {
    for (auto c : {VertexClassing::uniform, VertexClassing::layer, VertexClassing::annulus_mod6})
        if (to_string(c) == s) return c;
    throw std::invalid_argument("unknown vertex classing: " + s);
}

EdgeClassing edge_classing_from_string(const std::string& s) {
    for (auto c : {EdgeClassing::uniform, EdgeClassing::layer_pair, EdgeClassing::annulus})
        if (to_string(c) == s) return c;
    throw std::invalid_argument("unknown edge classing: " + s);
}

// Equal-state rule over `k` states, one edge class.
EdgeRule agreement_rule(std::size_t k) {
    EdgeRule rule(EdgeClassing::uniform, 1, k);
    for (std::size_t s = 0; s < k; ++s) rule.at(0, s, s) = 1.0;
    return rule;
}

}  // namespace

double theta(double p) {
    if (!(p > 0.5 && p <= 1.0)) throw std::domain_error("theta(p) needs p in (1/2, 1]");
    return (1.0 + std::sqrt(2.0 * p - 1.0)) / 2.0;
}

// EdgeSample

EdgeSample::EdgeSample(std::uint64_t graph_fingerprint, std::size_t edge_count, std::uint64_t seed,
                       std::uint64_t replica)
    : graph_(graph_fingerprint), edge_count_(edge_count), seed_(seed), replica_(replica),
      words_((edge_count + 63) / 64, 0) {}

void EdgeSample::set(EdgeId e, bool open) {
    if (e >= edge_count_) throw std::out_of_range("edge id out of range");
    const std::uint64_t mask = std::uint64_t{1} << (e & 63);
    if (open) words_[e >> 6] |= mask;
    else words_[e >> 6] &= ~mask;
}

std::size_t EdgeSample::count_open() const {
    std::size_t total = 0;
    for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
}

std::string EdgeSample::to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out((edge_count_ + 3) / 4, '0');
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::size_t bit = 4 * i;
        out[i] = digits[(words_[bit >> 6] >> (bit & 63)) & 0xf];
    }
    return out;
}

EdgeSample EdgeSample::from_hex(const std::string& hex, std::size_t edge_count, std::uint64_t graph_fingerprint) {
    if (hex.size() != (edge_count + 3) / 4) throw std::invalid_argument("hex length does not match edge count");
    EdgeSample s(graph_fingerprint, edge_count, 0, 0);
    for (std::size_t i = 0; i < hex.size(); ++i) {
        const char c = hex[i];
        unsigned value;
        if (c >= '0' && c <= '9') value = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f') value = static_cast<unsigned>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') value = static_cast<unsigned>(c - 'A' + 10);
        else throw std::invalid_argument("bad hex digit");
        for (unsigned b = 0; b < 4; ++b) {
            const std::size_t e = 4 * i + b;
            if (value >> b & 1u) {
                if (e >= edge_count) throw std::invalid_argument("hex sets a bit past the edge count");
                s.set(static_cast<EdgeId>(e));
            }
        }
    }
    return s;
}

EdgeSample EdgeSample::all_open(const HostGraph& g) {
    EdgeSample s(g.fingerprint(), g.edge_count(), 0, 0);
    for (EdgeId e = 0; e < g.edge_count(); ++e) s.set(e);
    return s;
}

EdgeSample EdgeSample::all_closed(const HostGraph& g) { return EdgeSample(g.fingerprint(), g.edge_count(), 0, 0); }

// StateSpec / EdgeRule

void StateSpec::validate() const {
    if (states.empty() || states.size() > 255) throw std::invalid_argument("state count must be in [1, 255]");
    if (distributions.empty()) throw std::invalid_argument("no state distributions");
    for (const auto& dist : distributions) {
        if (dist.size() != states.size()) throw std::invalid_argument("distribution size != state count");
        double sum = 0.0;
        for (double w : dist) {
            if (!(w >= 0.0)) throw std::invalid_argument("negative state probability");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("state distribution does not sum to 1");
    }
}

EdgeRule::EdgeRule(EdgeClassing classing_, std::size_t class_count_, std::size_t state_count_)
    : classing(classing_), class_count(class_count_), state_count(state_count_),
      open_probability(class_count_ * state_count_ * state_count_, 0.0) {}

void EdgeRule::validate() const {
    if (open_probability.size() != class_count * state_count * state_count)
        throw std::invalid_argument("edge rule table has the wrong size");
    for (double w : open_probability)
        if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("edge rule probability outside [0, 1]");
}

std::string to_string(Construction c) {
    switch (c) {
        case Construction::product: return "product";
        case Construction::two_state: return "two_state";
        case Construction::multi_state: return "multi_state";
        case Construction::lmr_lower: return "lmr_lower";
        case Construction::radial: return "radial";
        case Construction::custom: return "custom";
    }
    return "custom";
}

Construction construction_from_string(const std::string& name) {
    for (auto c : {Construction::product, Construction::two_state, Construction::multi_state, Construction::lmr_lower,
                   Construction::radial, Construction::custom})
        if (to_string(c) == name) return c;
    throw std::invalid_argument("unknown measure construction: " + name);
}

// Measure

Measure Measure::product(double p) {
    require_unit_interval(p, "p");
    Measure m;
    m.construction_ = Construction::product;
    m.p_ = p;
    return m;
}

Measure Measure::state_based(Construction construction, double p, StateSpec states, EdgeRule rule,
                             unsigned multi_state_r) {
    require_unit_interval(p, "p");
    states.validate();
    rule.validate();
    if (rule.state_count != states.states.size()) throw std::invalid_argument("rule and state spec disagree on states");
    Measure m;
    m.construction_ = construction;
    m.p_ = p;
    m.r_ = multi_state_r;
    m.states_ = std::move(states);
    m.rule_ = std::move(rule);
    return m;
}

Measure build_product(double p) { return Measure::product(p); }

Measure build_two_state(double p) {
    if (!(p >= 0.5 && p <= 1.0)) throw std::domain_error("two-state measure needs p in [1/2, 1]");
    const double th = (1.0 + std::sqrt(2.0 * p - 1.0)) / 2.0;
    StateSpec spec{{"0", "1"}, VertexClassing::uniform, {{1.0 - th, th}}};
    return Measure::state_based(Construction::two_state, p, std::move(spec), agreement_rule(2));
}

double multi_state_last_mass(unsigned r, double p) {
    if (r == 0) throw std::domain_error("r must be positive");
    const double rd = r;
    if (!(p > 1.0 / (rd + 1.0) && p <= 1.0 / rd)) throw std::domain_error("multi-state measure needs p in (1/(r+1), 1/r]");
    return (1.0 - std::sqrt(rd * ((rd + 1.0) * p - 1.0))) / (rd + 1.0);
}

Measure build_multi_state(unsigned r, double p) {
    const double last = multi_state_last_mass(r, p);
    // State r+1 is listed first so that r = 1 reproduces the two-state sampler exactly.
    StateSpec spec;
    spec.states.push_back(std::to_string(r + 1));
    std::vector<double> dist{last};
    for (unsigned s = 1; s <= r; ++s) {
        spec.states.push_back(std::to_string(s));
        dist.push_back((1.0 - last) / r);
    }
    spec.distributions = {std::move(dist)};
    return Measure::state_based(Construction::multi_state, p, std::move(spec), agreement_rule(r + 1), r);
}

Measure build_lmr_lower(double p) {
    if (!(p > 0.5 && p <= kCriticalP + 1e-12))
        throw std::domain_error("lower-bound measure needs p in (1/2, 4 - 2 sqrt 3]");
    const double th = theta(p);
    const double root = std::sqrt(p);
    enum : std::size_t { zero = 0, one = 1, star = 2 };
    StateSpec spec{{"0", "1", "*"}, VertexClassing::layer, {{1.0 - th, th, 0.0}, {root, 0.0, 1.0 - root}}};
    EdgeRule rule(EdgeClassing::layer_pair, 3, 3);
    rule.at(0, zero, zero) = 1.0;  // left copy: equal states
    rule.at(0, one, one) = 1.0;
    rule.at(1, zero, zero) = 1.0;  // right copy: both 0
    for (std::size_t s : {zero, one, star}) rule.at(2, s, star) = 1.0;  // matching: right end is *
    rule.at(2, zero, zero) = 1.0;                                        // or both 0
    return Measure::state_based(Construction::lmr_lower, p, std::move(spec), std::move(rule));
}

Measure build_radial(double p) {
    if (!(p > 0.5 && p <= kCriticalP + 1e-12)) throw std::domain_error("radial measure needs p in (1/2, 4 - 2 sqrt 3]");
    const double th = theta(p);
    const double root = std::sqrt(p);
    // states: 0, 1, *; class = annulus mod 6
    StateSpec spec{{"0", "1", "*"},
                   VertexClassing::annulus_mod6,
                   {
                       {0.0, 1.0, 0.0},
                       {1.0 - th, th, 0.0},
                       {root, 0.0, 1.0 - root},
                       {1.0, 0.0, 0.0},
                       {th, 1.0 - th, 0.0},
                       {0.0, root, 1.0 - root},
                   }};
    EdgeRule rule(EdgeClassing::annulus, 2, 3);
    for (std::size_t cls : {0u, 1u}) {
        rule.at(cls, 0, 0) = 1.0;
        rule.at(cls, 1, 1) = 1.0;
    }
    for (std::size_t s = 0; s < 3; ++s) rule.at(1, s, 2) = 1.0;  // outward into a * vertex
    return Measure::state_based(Construction::radial, p, std::move(spec), std::move(rule));
}

// BoundMeasure

BoundMeasure::BoundMeasure(const Measure& measure, const HostGraph& graph) : measure_(measure), graph_(&graph) {
    const std::size_t n = graph.vertex_count();
    const std::size_t m = graph.edge_count();
    if (measure.is_product()) {
        min_marginal_ = m == 0 ? 1.0 : measure.p();
        return;
    }
    const auto& spec = measure.states();
    const auto& rule = measure.rule();

    vertex_class_.assign(n, 0);
    switch (spec.classing) {
        case VertexClassing::uniform: break;
        case VertexClassing::layer:
            if (!graph.product() || graph.product()->layers != 2)
                throw std::invalid_argument("layer-classed measure needs a K2 x G product graph");
            for (VertexId v = 0; v < n; ++v) vertex_class_[v] = static_cast<std::uint8_t>(graph.coords()[v].layer);
            break;
        case VertexClassing::annulus_mod6:
            if (graph.grid_boundary() != Boundary::open)
                throw std::invalid_argument("annulus-classed measure needs open-boundary grid labels");
            for (VertexId v = 0; v < n; ++v) vertex_class_[v] = static_cast<std::uint8_t>(graph.annulus(v) % 6);
            break;
    }
    for (auto c : vertex_class_)
        if (c >= spec.distributions.size()) throw std::invalid_argument("vertex class without a distribution");

    edge_class_.assign(m, 0);
    flipped_.assign(m, 0);
    for (EdgeId e = 0; e < m; ++e) {
        const auto [u, v] = graph.edge(e);
        switch (rule.classing) {
            case EdgeClassing::uniform: break;
            case EdgeClassing::layer_pair: {
                if (!graph.product() || graph.product()->layers != 2)
                    throw std::invalid_argument("layer-pair rule needs a K2 x G product graph");
                const auto lu = graph.coords()[u].layer;
                const auto lv = graph.coords()[v].layer;
                if (lu == lv) {
                    edge_class_[e] = static_cast<std::uint8_t>(lu);
                } else {
                    edge_class_[e] = 2;
                    flipped_[e] = lu > lv;
                }
                break;
            }
            case EdgeClassing::annulus: {
                if (graph.grid_boundary() != Boundary::open)
                    throw std::invalid_argument("annulus rule needs open-boundary grid labels");
                const auto au = graph.annulus(u);
                const auto av = graph.annulus(v);
                if (au != av) {
                    edge_class_[e] = 1;
                    flipped_[e] = au > av;
                }
                break;
            }
        }
        if (edge_class_[e] >= rule.class_count) throw std::invalid_argument("edge class outside rule table");
    }

    cumulative_.clear();
    for (const auto& dist : spec.distributions) {
        std::vector<double> cum(dist.size());
        double acc = 0.0;
        for (std::size_t s = 0; s < dist.size(); ++s) cum[s] = (acc += dist[s]);
        cum.back() = 1.0;
        cumulative_.push_back(std::move(cum));
    }

    // Marginals depend only on (first class, second class, edge class).
    std::set<std::tuple<std::uint8_t, std::uint8_t, std::uint8_t>> seen;
    for (EdgeId e = 0; e < m; ++e) {
        const auto [a, b] = oriented(e);
        if (seen.emplace(vertex_class_[a], vertex_class_[b], edge_class_[e]).second)
            min_marginal_ = std::min(min_marginal_, edge_marginal(e));
    }
    if (min_marginal_ < measure.p() - kMarginalSlack)
        throw std::domain_error("measure has an edge marginal below its nominal p on this graph");
}

Edge BoundMeasure::oriented(EdgeId e) const {
    const auto& edge = graph_->edge(e);
    if (!flipped_.empty() && flipped_[e]) return {edge.v, edge.u};
    return edge;
}

double BoundMeasure::edge_marginal(EdgeId e) const {
    if (e >= graph_->edge_count()) throw std::out_of_range("edge id out of range");
    if (measure_.is_product()) return measure_.p();
    const auto& spec = measure_.states();
    const auto& rule = measure_.rule();
    const auto [a, b] = oriented(e);
    const auto& da = spec.distributions[vertex_class_[a]];
    const auto& db = spec.distributions[vertex_class_[b]];
    double total = 0.0;
    for (std::size_t s = 0; s < da.size(); ++s)
        for (std::size_t t = 0; t < db.size(); ++t) total += da[s] * db[t] * rule.at(edge_class_[e], s, t);
    return total;
}

std::vector<std::uint8_t> BoundMeasure::sample_states(std::uint64_t seed, std::uint64_t replica) const {
    if (measure_.is_product()) return {};
    const CounterRng rng(seed);
    std::vector<std::uint8_t> states(graph_->vertex_count());
    for (VertexId v = 0; v < states.size(); ++v) {
        const auto& cum = cumulative_[vertex_class_[v]];
        const double u = rng.uniform(CounterRng::Stream::vertex_state, replica, v);
        std::size_t s = 0;
        while (u >= cum[s]) ++s;
        states[v] = static_cast<std::uint8_t>(s);
    }
    return states;
}

EdgeSample BoundMeasure::apply_rule(std::span<const std::uint8_t> states, std::uint64_t seed,
                                    std::uint64_t replica) const {
    const CounterRng rng(seed);
    EdgeSample sample(graph_->fingerprint(), graph_->edge_count(), seed, replica);
    const std::size_t m = graph_->edge_count();
    if (measure_.is_product()) {
        const double p = measure_.p();
        for (EdgeId e = 0; e < m; ++e)
            if (rng.uniform(CounterRng::Stream::edge_coin, replica, e) < p) sample.set(e);
        return sample;
    }
    if (states.size() != graph_->vertex_count()) throw std::invalid_argument("state vector size != vertex count");
    const auto& rule = measure_.rule();
    const auto& edges = graph_->edges();
    for (EdgeId e = 0; e < m; ++e) {
        VertexId a = edges[e].u, b = edges[e].v;
        if (flipped_[e]) std::swap(a, b);
        const double w = rule.at(edge_class_[e], states[a], states[b]);
        if (w >= 1.0 || (w > 0.0 && rng.uniform(CounterRng::Stream::edge_coin, replica, e) < w)) sample.set(e);
    }
    return sample;
}

EdgeSample BoundMeasure::sample(std::uint64_t seed, std::uint64_t replica) const {
    const auto states = sample_states(seed, replica);
    return apply_rule(states, seed, replica);
}

EdgeSample sample_edges(const Measure& m, const HostGraph& g, std::uint64_t seed, std::uint64_t replica) {
    return BoundMeasure(m, g).sample(seed, replica);
}

double edge_marginal(const Measure& m, const HostGraph& g, EdgeId e) { return BoundMeasure(m, g).edge_marginal(e); }

IndependenceReport independence_probe(const Measure& m, const HostGraph& g, std::span<const EdgeId> a,
                                      std::span<const EdgeId> b, std::size_t reps, std::uint64_t seed,
                                      double threshold) {
    if (reps < 1000) throw std::invalid_argument("independence_probe needs at least 1000 reps");
    if (a.empty() || b.empty() || a.size() > 8 || b.size() > 8)
        throw std::invalid_argument("edge sets must have between 1 and 8 edges");
    for (auto e : a) (void)g.edge(e);
    for (auto e : b) (void)g.edge(e);

    IndependenceReport report;
    report.threshold = threshold;
    report.reps = reps;
    std::set<VertexId> touched;
    for (auto e : a) touched.insert({g.edge(e).u, g.edge(e).v});
    for (auto e : b)
        if (touched.count(g.edge(e).u) || touched.count(g.edge(e).v)) report.vertex_disjoint = false;

    const BoundMeasure bound(m, g);
    const std::size_t na = std::size_t{1} << a.size();
    const std::size_t nb = std::size_t{1} << b.size();
    std::vector<double> joint(na * nb, 0.0);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto s = bound.sample(seed, r);
        std::size_t pa = 0, pb = 0;
        for (std::size_t i = 0; i < a.size(); ++i) pa |= static_cast<std::size_t>(s.test(a[i])) << i;
        for (std::size_t i = 0; i < b.size(); ++i) pb |= static_cast<std::size_t>(s.test(b[i])) << i;
        joint[pa * nb + pb] += 1.0;
    }
    std::vector<double> ma(na, 0.0), mb(nb, 0.0);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            joint[i * nb + j] /= static_cast<double>(reps);
            ma[i] += joint[i * nb + j];
            mb[j] += joint[i * nb + j];
        }
    double tv = 0.0;
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) tv += std::abs(joint[i * nb + j] - ma[i] * mb[j]);
    report.tv_discrepancy = tv / 2.0;
    report.pass = report.tv_discrepancy <= threshold;
    return report;
}

nlohmann::json to_json(const Measure& m) {
    nlohmann::json doc;
    doc["variant"] = m.is_product() ? "product" : "state_based";
    doc["p"] = m.p();
    doc["construction"] = to_string(m.construction());
    if (m.construction() == Construction::multi_state) doc["r"] = m.r();
    nlohmann::json params = nlohmann::json::object();
    if (m.construction() == Construction::custom) {
        const auto& spec = m.states();
        const auto& rule = m.rule();
        params["states"] = spec.states;
        params["vertex_classing"] = to_string(spec.classing);
        params["distributions"] = spec.distributions;
        params["edge_classing"] = to_string(rule.classing);
        params["edge_classes"] = rule.class_count;
        params["open_probability"] = rule.open_probability;
    }
    doc["params"] = std::move(params);
    return doc;
}

Measure measure_from_json(const nlohmann::json& doc) {
    const double p = doc.at("p").get<double>();
    const std::string construction =
        doc.value("construction", doc.value("variant", std::string("product")) == "product" ? "product" : "");
    if (construction == "product") return build_product(p);
    if (construction == "two_state") return build_two_state(p);
    if (construction == "multi_state") return build_multi_state(doc.at("r").get<unsigned>(), p);
    if (construction == "lmr_lower") return build_lmr_lower(p);
    if (construction == "radial") return build_radial(p);
    if (construction == "custom") {
        const auto& params = doc.at("params");
        StateSpec spec{params.at("states").get<std::vector<std::string>>(),
                       vertex_classing_from_string(params.value("vertex_classing", std::string("uniform"))),
                       params.at("distributions").get<std::vector<std::vector<double>>>()};
        EdgeRule rule(edge_classing_from_string(params.value("edge_classing", std::string("uniform"))),
                      params.value("edge_classes", std::size_t{1}), spec.states.size());
        rule.open_probability = params.at("open_probability").get<std::vector<double>>();
        return Measure::state_based(Construction::custom, p, std::move(spec), std::move(rule));
    }
    throw std::invalid_argument("unknown measure construction: " + construction);
}

}  // namespace ipm
