#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "ipm/host_graph.hpp"
#include "ipm/measures.hpp"

namespace ipm {

enum class Experiment { lmr, component_fraction, annulus, renormalise_density, edge_concentration };

[[nodiscard]] std::string to_string(Experiment e);
[[nodiscard]] Experiment experiment_from_string(const std::string& name);

struct MeasureSpec {
    Construction construction = Construction::product;
    unsigned r = 1;  // multi_state only
};

[[nodiscard]] Measure make_measure(const MeasureSpec& spec, double p);

/// Graph on n vertices: the fiber G for lmr/annulus/renormalise_density, the
/// whole host graph for component_fraction/edge_concentration.
struct GraphSpec {
    GraphKind kind = GraphKind::complete;  // complete or erdos_renyi
    double q = 0.5;                        // erdos_renyi edge probability
};

[[nodiscard]] HostGraph make_graph(const GraphSpec& spec, std::size_t n, std::uint64_t seed);

/// Statistic per replica:
///   lmr                  indicator of Left meets Right on K2 x G
///   component_fraction   |C1| / n on G
///   annulus              largest annulus span on (grid_size x grid_size open box) x G
///   renormalise_density  open fraction of renormalised edges on (grid_size x grid_size open box) x G
///   edge_concentration   min over matchings M of |open edges in M| / |M| on G
struct SweepConfig {
    Experiment experiment = Experiment::lmr;
    MeasureSpec measure;
    GraphSpec graph;
    std::vector<double> p_values;
    std::vector<std::size_t> n_values;
    std::size_t replicas = 1;
    std::uint64_t seed = 1;
    std::string out;  // empty: caller decides
    double eps = 0.1;
    std::size_t grid_size = 3;
    unsigned threads = 0;  // 0: hardware concurrency

    /// Throws std::invalid_argument on an empty grid of cells, zero replicas or grid_size 0.
    void validate() const;
};

[[nodiscard]] SweepConfig sweep_config_from_json(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json to_json(const SweepConfig& cfg);

struct SweepRow {
    Experiment experiment = Experiment::lmr;
    double p = 0.0;
    std::size_t n = 0;
    std::size_t replicas = 0;
    double mean = 0.0;
    double stderr_ = 0.0;  // sample standard deviation / sqrt(replicas)
    std::uint64_t seed = 0;
    double elapsed_ms = 0.0;
};

/// One row per (p, n) cell, p-major. Every cell uses the configured seed, so
/// replica i at different p shares its uniforms (coupled in p). Replicas run
/// concurrently and are reduced in replica-index order.
[[nodiscard]] std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

/// Per-replica statistics of one cell, in replica order.
[[nodiscard]] std::vector<double> run_cell(const SweepConfig& cfg, double p, std::size_t n);

inline constexpr const char* kSweepHeader = "experiment,p,n,replicas,mean,stderr,seed,elapsed_ms";

[[nodiscard]] std::string sweep_csv(const std::vector<SweepRow>& rows);
/// Throws std::runtime_error when the file cannot be written.
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

[[nodiscard]] MeanStderr mean_stderr(const std::vector<double>& values);

/// Smallest N with 2 exp(-eps^2 N p / 3) <= delta; 0 when delta >= 2.
[[nodiscard]] std::uint64_t chernoff_samples(double eps, double p, double delta);

struct ConcentrationReport {
    double threshold = 0.0;  // (1 - 3 eps) p e(G)
    double frequency = 0.0;  // of e(sample) <= threshold
    double bound = 0.0;      // 4 n exp(-eps^3 p e(G) / 6n)
    std::size_t replicas = 0;
    bool within_bound = false;
};

/// Throws std::invalid_argument unless e(G) >= 2n/eps, eps in (0, 1) and replicas >= 1.
[[nodiscard]] ConcentrationReport edge_concentration_check(const HostGraph& g, const Measure& m, double eps,
                                                           std::size_t replicas, std::uint64_t seed,
                                                           unsigned threads = 0);

[[nodiscard]] nlohmann::json to_json(const ConcentrationReport& r);

}  // namespace ipm
