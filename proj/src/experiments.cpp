#include "ipm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "ipm/components.hpp"
#include "ipm/decompositions.hpp"
#include "ipm/parallel.hpp"
#include "ipm/rng.hpp"

namespace ipm {

namespace {

constexpr Experiment kAllExperiments[] = {Experiment::lmr, Experiment::component_fraction, Experiment::annulus,
                                          Experiment::renormalise_density, Experiment::edge_concentration};

template <typename T>
std::vector<T> scalar_or_list(const nlohmann::json& v) {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
}

double min_matching_density(const MatchingDecomposition& d, const EdgeSample& s) {
    double worst = 1.0;
    for (const auto& m : d.matchings) {
        std::size_t open = 0;
        for (auto e : m) open += s.test(e) ? 1 : 0;
        worst = std::min(worst, static_cast<double>(open) / static_cast<double>(m.size()));
    }
    return worst;
}

}  // namespace

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::lmr: return "lmr";
        case Experiment::component_fraction: return "component_fraction";
        case Experiment::annulus: return "annulus";
        case Experiment::renormalise_density: return "renormalise_density";
        case Experiment::edge_concentration: return "edge_concentration";
    }
    return "lmr";
}

Experiment experiment_from_string(const std::string& name) {
    for (auto e : kAllExperiments)
        if (to_string(e) == name) return e;
    throw std::invalid_argument("unknown experiment: " + name);
}

Measure make_measure(const MeasureSpec& spec, double p) {
    switch (spec.construction) {
        case Construction::product: return build_product(p);
        case Construction::two_state: return build_two_state(p);
        case Construction::multi_state: return build_multi_state(spec.r, p);
        case Construction::lmr_lower: return build_lmr_lower(p);
        case Construction::radial: return build_radial(p);
        case Construction::custom: break;
    }
    throw std::invalid_argument("sweeps do not support custom measures");
}

HostGraph make_graph(const GraphSpec& spec, std::size_t n, std::uint64_t seed) {
    switch (spec.kind) {
        case GraphKind::complete: return complete_graph(n);
        case GraphKind::erdos_renyi: return erdos_renyi(n, spec.q, derive_seed(seed, n));
        default: break;
    }
    throw std::invalid_argument("sweep graphs must be complete or erdos_renyi");
}

void SweepConfig::validate() const {
    if (p_values.empty() || n_values.empty()) throw std::invalid_argument("sweep needs at least one p and one n");
    if (replicas == 0) throw std::invalid_argument("replicas must be at least 1");
    if (grid_size == 0) throw std::invalid_argument("grid_size must be positive");
    for (auto n : n_values)
        if (n == 0) throw std::invalid_argument("n must be positive");
    if (experiment == Experiment::edge_concentration && !(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("eps must lie in (0, 1)");
}

SweepConfig sweep_config_from_json(const nlohmann::json& doc) {
    SweepConfig cfg;
    cfg.experiment = experiment_from_string(doc.at("experiment").get<std::string>());
    if (doc.contains("measure")) {
        const auto& m = doc.at("measure");
        if (m.is_string()) {
            cfg.measure.construction = construction_from_string(m.get<std::string>());
        } else {
            cfg.measure.construction = construction_from_string(m.at("construction").get<std::string>());
            cfg.measure.r = m.value("r", 1u);
        }
    }
    if (doc.contains("graph")) {
        const auto& g = doc.at("graph");
        if (g.is_string()) {
            cfg.graph.kind = graph_kind_from_string(g.get<std::string>());
        } else {
            cfg.graph.kind = graph_kind_from_string(g.at("kind").get<std::string>());
            cfg.graph.q = g.value("q", cfg.graph.q);
        }
    }
    cfg.p_values = scalar_or_list<double>(doc.at("p"));
    cfg.n_values = scalar_or_list<std::size_t>(doc.at("n"));
    cfg.replicas = doc.value("replicas", cfg.replicas);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.out = doc.value("out", cfg.out);
    cfg.eps = doc.value("eps", cfg.eps);
    cfg.grid_size = doc.value("grid_size", cfg.grid_size);
    cfg.threads = doc.value("threads", cfg.threads);
    cfg.validate();
    return cfg;
}

nlohmann::json to_json(const SweepConfig& cfg) {
    nlohmann::json doc;
    doc["experiment"] = to_string(cfg.experiment);
    doc["measure"] = {{"construction", to_string(cfg.measure.construction)}, {"r", cfg.measure.r}};
    doc["graph"] = {{"kind", to_string(cfg.graph.kind)}, {"q", cfg.graph.q}};
    doc["p"] = cfg.p_values;
    doc["n"] = cfg.n_values;
    doc["replicas"] = cfg.replicas;
    doc["seed"] = cfg.seed;
    doc["out"] = cfg.out;
    doc["eps"] = cfg.eps;
    doc["grid_size"] = cfg.grid_size;
    doc["threads"] = cfg.threads;
    return doc;
}

std::vector<double> run_cell(const SweepConfig& cfg, double p, std::size_t n) {
    const Measure measure = make_measure(cfg.measure, p);
    const HostGraph fiber = make_graph(cfg.graph, n, cfg.seed);
    std::vector<double> stats(cfg.replicas, 0.0);

    switch (cfg.experiment) {
        case Experiment::lmr: {
            const HostGraph pg = cartesian_product(complete_graph(2), fiber);
            const BoundMeasure bound(measure, pg);
            parallel_for(cfg.replicas, cfg.threads,
                         [&](std::size_t i) { stats[i] = lmr_event(pg, bound.sample(cfg.seed, i)) ? 1.0 : 0.0; });
            break;
        }
        case Experiment::component_fraction: {
            const BoundMeasure bound(measure, fiber);
            parallel_for(cfg.replicas, cfg.threads, [&](std::size_t i) {
                const auto summary = connected_components(fiber, bound.sample(cfg.seed, i));
                stats[i] = static_cast<double>(summary.largest()) / static_cast<double>(n);
            });
            break;
        }
        case Experiment::annulus: {
            const HostGraph box = grid_2d(cfg.grid_size, cfg.grid_size, Boundary::open);
            const HostGraph pg = cartesian_product(box, fiber);
            const BoundMeasure bound(measure, pg);
            parallel_for(cfg.replicas, cfg.threads, [&](std::size_t i) {
                stats[i] = static_cast<double>(annulus_span(pg, bound.sample(cfg.seed, i)));
            });
            break;
        }
        case Experiment::renormalise_density: {
            const HostGraph box = grid_2d(cfg.grid_size, cfg.grid_size, Boundary::open);
            if (box.edge_count() == 0) throw std::invalid_argument("renormalise_density needs grid_size >= 2");
            const HostGraph pg = cartesian_product(box, fiber);
            const BoundMeasure bound(measure, pg);
            parallel_for(cfg.replicas, cfg.threads, [&](std::size_t i) {
                const auto coarse = renormalise(pg, bound.sample(cfg.seed, i), box);
                stats[i] = static_cast<double>(coarse.count_open()) / static_cast<double>(box.edge_count());
            });
            break;
        }
        case Experiment::edge_concentration: {
            const auto decomposition = matching_decomposition(fiber, cfg.eps);
            if (decomposition.matchings.empty()) throw std::invalid_argument("decomposition produced no matchings");
            const BoundMeasure bound(measure, fiber);
            parallel_for(cfg.replicas, cfg.threads, [&](std::size_t i) {
                stats[i] = min_matching_density(decomposition, bound.sample(cfg.seed, i));
            });
            break;
        }
    }
    return stats;
}

MeanStderr mean_stderr(const std::vector<double>& values) {
    MeanStderr out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    const double k = static_cast<double>(values.size());
    out.mean = sum / k;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.stderr_ = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
    }
    return out;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<SweepRow> rows;
    for (double p : cfg.p_values) {
        for (auto n : cfg.n_values) {
            const auto start = std::chrono::steady_clock::now();
            const auto stats = run_cell(cfg, p, n);
            const auto agg = mean_stderr(stats);
            SweepRow row;
            row.experiment = cfg.experiment;
            row.p = p;
            row.n = n;
            row.replicas = cfg.replicas;
            row.mean = agg.mean;
            row.stderr_ = agg.stderr_;
            row.seed = cfg.seed;
            row.elapsed_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            rows.push_back(row);
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = std::string(kSweepHeader) + "\n";
    char line[256];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%s,%.17g,%zu,%zu,%.17g,%.17g,%llu,%.3f\n", to_string(r.experiment).c_str(),
                      r.p, r.n, r.replicas, r.mean, r.stderr_, static_cast<unsigned long long>(r.seed), r.elapsed_ms);
        out += line;
    }
    return out;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    file << sweep_csv(rows);
    if (!file) throw std::runtime_error("failed writing output file: " + path);
}

std::uint64_t chernoff_samples(double eps, double p, double delta) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (delta >= 2.0) return 0;
    const double rate = eps * eps * p / 3.0;
    // Relative slack so that boundary cases computed in floating point count as equal.
    const auto holds = [&](std::uint64_t n) {
        return 2.0 * std::exp(-rate * static_cast<double>(n)) <= delta * (1.0 + 1e-12);
    };
    auto n = static_cast<std::uint64_t>(std::ceil(std::log(2.0 / delta) / rate));
    while (n > 0 && holds(n - 1)) --n;
    while (!holds(n)) ++n;
    return n;
}

ConcentrationReport edge_concentration_check(const HostGraph& g, const Measure& m, double eps,
                                             std::size_t replicas, std::uint64_t seed, unsigned threads) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    if (replicas == 0) throw std::invalid_argument("replicas must be at least 1");
    const double n = static_cast<double>(g.vertex_count());
    const double e = static_cast<double>(g.edge_count());
    if (e < 2.0 * n / eps) throw std::invalid_argument("needs e(G) >= 2n/eps");

    ConcentrationReport out;
    out.replicas = replicas;
    out.threshold = (1.0 - 3.0 * eps) * m.p() * e;
    out.bound = 4.0 * n * std::exp(-eps * eps * eps * m.p() * e / (6.0 * n));
    const BoundMeasure bound(m, g);
    std::vector<char> hit(replicas, 0);
    parallel_for(replicas, threads, [&](std::size_t i) {
        hit[i] = static_cast<double>(bound.sample(seed, i).count_open()) <= out.threshold ? 1 : 0;
    });
    std::size_t hits = 0;
    for (char h : hit) hits += static_cast<std::size_t>(h);
    out.frequency = static_cast<double>(hits) / static_cast<double>(replicas);
    out.within_bound = out.frequency <= out.bound;
    return out;
}

nlohmann::json to_json(const ConcentrationReport& r) {
    return {{"threshold", r.threshold},
            {"frequency", r.frequency},
            {"bound", r.bound},
            {"replicas", r.replicas},
            {"within_bound", r.within_bound}};
}

}  // namespace ipm
