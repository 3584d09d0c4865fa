// ipmlab: command-line front end for sweeps, feasibility search, exact
// formulas, decompositions, pseudorandomness audits and renormalisation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ipm/components.hpp"
#include "ipm/decompositions.hpp"
#include "ipm/exact.hpp"
#include "ipm/experiments.hpp"
#include "ipm/feasibility.hpp"
#include "ipm/host_graph.hpp"
#include "ipm/measures.hpp"

namespace {

using nlohmann::json;

struct GraphOptions {
    std::string file;
    std::string kind = "erdos_renyi";
    std::size_t n = 50;
    double q = 0.5;
    std::uint64_t seed = 1;

    void attach(CLI::App* app) {
        app->add_option("--graph", file, "Graph JSON file (overrides --kind)");
        app->add_option("--kind", kind, "complete | erdos_renyi | hypercube | cycle | path");
        app->add_option("--n", n, "Vertex count (hypercube: dimension)");
        app->add_option("--q", q, "Erdos-Renyi edge probability");
        app->add_option("--seed", seed, "Seed");
    }

    [[nodiscard]] ipm::HostGraph build() const {
        if (!file.empty()) {
            std::ifstream in(file);
            if (!in) throw std::runtime_error("cannot read graph file: " + file);
            return ipm::graph_from_json(json::parse(in));
        }
        if (kind == "complete") return ipm::complete_graph(n);
        if (kind == "erdos_renyi") return ipm::erdos_renyi(n, q, seed);
        if (kind == "hypercube") return ipm::hypercube(static_cast<unsigned>(n));
        if (kind == "cycle") return ipm::cycle_graph(n);
        if (kind == "path") return ipm::path_graph(n);
        throw std::invalid_argument("unknown graph kind: " + kind);
    }
};

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream file(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file: " + out);
    file << text;
}

std::vector<unsigned> parse_parts(const std::string& text) {
    std::vector<unsigned> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        parts.push_back(static_cast<unsigned>(std::stoul(item)));
    }
    return parts;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Percolation laboratory for 1-independent random graph models"};
    app.require_subcommand(1);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run a seeded Monte Carlo sweep and write CSV");
    std::string sweep_config_path, experiment = "lmr", construction = "product", graph_kind = "complete", out;
    std::vector<double> ps;
    std::vector<std::size_t> ns;
    ipm::SweepConfig flags;
    sweep->add_option("--config", sweep_config_path, "JSON config file");
    sweep->add_option("--experiment", experiment, "lmr | component_fraction | annulus | renormalise_density | edge_concentration");
    sweep->add_option("--measure", construction, "product | two_state | multi_state | lmr_lower | radial");
    sweep->add_option("--r", flags.measure.r, "Number of ordinary states for multi_state");
    sweep->add_option("--graph", graph_kind, "complete | erdos_renyi");
    sweep->add_option("--q", flags.graph.q, "Erdos-Renyi edge probability");
    sweep->add_option("--p", ps, "Edge marginal(s)")->delimiter(',');
    sweep->add_option("--n", ns, "Fiber or graph size(s)")->delimiter(',');
    sweep->add_option("--reps", flags.replicas, "Replicas per cell");
    sweep->add_option("--seed", flags.seed, "Seed");
    sweep->add_option("--eps", flags.eps, "eps for edge_concentration");
    sweep->add_option("--grid", flags.grid_size, "Side of the open grid box");
    sweep->add_option("--threads", flags.threads, "Worker threads (0: all cores)");
    sweep->add_option("--out", out, "Output CSV path (default stdout)");

    // feasibility
    auto* feas = app.add_subcommand("feasibility", "Search the 3x3 constraint system for a feasible matrix");
    double feas_p = 0.55;
    ipm::SearchConfig search;
    search.multistarts = 1000;
    feas->add_option("--p", feas_p, "Edge marginal in (1/2, 1]");
    feas->add_option("--starts", search.multistarts, "Multistarts");
    feas->add_option("--iterations", search.iterations, "Pattern-search iterations per start");
    feas->add_option("--tol", search.tol, "Feasibility tolerance on max violation");
    feas->add_option("--seed", search.seed, "Seed");
    feas->add_option("--threads", search.threads, "Worker threads (0: all cores)");
    auto* scan = feas->add_subcommand("scan", "Verdicts on a p grid, as CSV");
    double lo = 0.51, hi = 0.60, step = 0.002;
    std::string scan_out;
    scan->add_option("--lo", lo, "Lowest p");
    scan->add_option("--hi", hi, "Highest p");
    scan->add_option("--step", step, "Grid step");
    scan->add_option("--starts", search.multistarts, "Multistarts per point");
    scan->add_option("--tol", search.tol, "Feasibility tolerance");
    scan->add_option("--seed", search.seed, "Seed");
    scan->add_option("--out", scan_out, "Output CSV path (default stdout)");

    // exact
    auto* exact = app.add_subcommand("exact", "Closed-form combinatorics");
    exact->require_subcommand(1);
    auto* pm = exact->add_subcommand("pm", "Perfect matchings of a complete multipartite graph");
    std::string parts_text;
    pm->add_option("--parts", parts_text, "Comma-separated part sizes")->required();
    auto* prob = exact->add_subcommand("prob", "Minimum probability of a component with more than n vertices on K_2n");
    unsigned prob_n = 2;
    std::string prob_p = "0.6";
    prob->add_option("--n", prob_n, "Half the vertex count")->required();
    prob->add_option("--p", prob_p, "Edge marginal as a decimal or fraction")->required();
    auto* p2n = exact->add_subcommand("p2n", "Lower end of the range of p for K_2n");
    unsigned p2n_n = 2;
    p2n->add_option("--n", p2n_n, "Half the vertex count")->required();

    // decompose
    auto* decompose = app.add_subcommand("decompose", "Path and matching decompositions of a graph");
    GraphOptions decompose_graph;
    double decompose_eps = 0.1;
    decompose_graph.attach(decompose);
    decompose->add_option("--eps", decompose_eps, "eps in (0, 1)");

    // audit
    auto* audit = app.add_subcommand("audit", "Sampled pseudorandomness deviation of a graph");
    GraphOptions audit_graph;
    std::size_t audit_samples = 1000;
    audit_graph.attach(audit);
    audit->add_option("--samples", audit_samples, "Vertex subsets to test");

    // renormalise
    auto* renorm = app.add_subcommand("renormalise", "Renormalise one sample on (grid box) x K_n down to the box");
    std::size_t renorm_grid = 3, renorm_n = 200;
    double renorm_p = 0.6;
    std::string renorm_measure = "product";
    std::uint64_t renorm_seed = 1, renorm_replica = 0;
    renorm->add_option("--grid", renorm_grid, "Side of the open grid box");
    renorm->add_option("--n", renorm_n, "Fiber size");
    renorm->add_option("--p", renorm_p, "Edge marginal");
    renorm->add_option("--measure", renorm_measure, "product | two_state | radial | ...");
    renorm->add_option("--seed", renorm_seed, "Seed");
    renorm->add_option("--replica", renorm_replica, "Replica index");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) {
            ipm::SweepConfig cfg;
            if (!sweep_config_path.empty()) {
                std::ifstream in(sweep_config_path);
                if (!in) throw std::runtime_error("cannot read config: " + sweep_config_path);
                cfg = ipm::sweep_config_from_json(json::parse(in));
                if (!out.empty()) cfg.out = out;
            } else {
                cfg = flags;
                cfg.experiment = ipm::experiment_from_string(experiment);
                cfg.measure.construction = ipm::construction_from_string(construction);
                cfg.graph.kind = ipm::graph_kind_from_string(graph_kind);
                cfg.p_values = ps;
                cfg.n_values = ns;
                cfg.out = out;
            }
            const auto rows = ipm::run_sweep(cfg);
            if (cfg.out.empty()) std::cout << ipm::sweep_csv(rows);
            else ipm::write_sweep_csv(rows, cfg.out);
        } else if (*feas) {
            if (*scan) {
                emit(ipm::scan_csv(ipm::threshold_scan(lo, hi, step, search)), scan_out);
            } else {
                std::cout << ipm::to_json(ipm::search_feasible(feas_p, search), feas_p).dump(2) << "\n";
            }
        } else if (*exact) {
            json doc;
            if (*pm) {
                const auto parts = parse_parts(parts_text);
                doc["parts"] = parts;
                if (parts.size() <= 3) {
                    const auto count = ipm::pm_count_tripartite(parts);
                    doc["count"] = ipm::rational_json(ipm::Rational(count));
                } else {
                    const auto reduced = ipm::pm_count_multipartite_lower_bound(parts);
                    doc["reduced_parts"] = reduced.parts;
                    doc["merges"] = reduced.merges;
                    doc["lower_bound"] = ipm::rational_json(ipm::Rational(reduced.lower_bound));
                }
            } else if (*prob) {
                const auto r = ipm::prob_large_component(prob_n, ipm::parse_rational(prob_p));
                doc = {{"n", prob_n}, {"p", prob_p}, {"value", ipm::rational_json(r.value)},
                       {"below_range", r.below_range}, {"p_lower", ipm::p_lower_threshold(prob_n)}};
                if (r.below_range) std::cerr << "warning: p is below the lower end of the range for this n\n";
            } else {
                doc = {{"n", p2n_n}, {"p2n", ipm::p_lower_threshold(p2n_n)}};
            }
            std::cout << doc.dump(2) << "\n";
        } else if (*decompose) {
            const auto g = decompose_graph.build();
            const auto paths = ipm::path_decomposition(g);
            const auto matchings = ipm::matching_decomposition(g, decompose_eps, paths);
            std::cout << ipm::to_json(paths, matchings).dump() << "\n";
        } else if (*audit) {
            const auto g = audit_graph.build();
            const double q = g.q_meta().value_or(audit_graph.q);
            auto doc = ipm::to_json(ipm::pseudorandomness_deviation(g, q, audit_samples, audit_graph.seed));
            doc["q"] = q;
            std::cout << doc.dump(2) << "\n";
        } else if (*renorm) {
            const auto box = ipm::grid_2d(renorm_grid, renorm_grid, ipm::Boundary::open);
            const auto pg = ipm::cartesian_product(box, ipm::complete_graph(renorm_n));
            const ipm::MeasureSpec spec{ipm::construction_from_string(renorm_measure), 1};
            const auto measure = ipm::make_measure(spec, renorm_p);
            const auto sample = ipm::sample_edges(measure, pg, renorm_seed, renorm_replica);
            const auto coarse = ipm::renormalise(pg, sample, box);
            const json doc = {
                {"grid", renorm_grid},
                {"n", renorm_n},
                {"p", renorm_p},
                {"measure", renorm_measure},
                {"coarse_edges", coarse.to_hex()},
                {"density", static_cast<double>(coarse.count_open()) / static_cast<double>(box.edge_count())},
                {"lift_consistent", ipm::lift_consistency_check(box, coarse, pg, sample)},
            };
            std::cout << doc.dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
