#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ipm {

/// 3x3 nonnegative matrix of part sizes (fractions of n). Row index: colour
/// class on the left copy; column index: colour class on the right copy.
struct FeasibilityMatrix {
    std::array<std::array<double, 3>, 3> a{};

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return a[i][j]; }
    [[nodiscard]] double& operator()(std::size_t i, std::size_t j) { return a[i][j]; }
    [[nodiscard]] double total() const;
    [[nodiscard]] FeasibilityMatrix transposed() const;
    [[nodiscard]] FeasibilityMatrix scaled(double factor) const;
};

/// Residual per constraint: <= 0 means satisfied. Fourteen constraints:
///   mass_lower      a11 + a22 + p - sum
///   mass_upper      sum - 1
///   col_giant_j     colsum_j / 2 - a1j               (j = 1..3)
///   row_giant_i     rowsum_i / 2 - ai1               (i = 1..3)
///   col_density_j   p colsum_j^2 - (a1j^2 + a2j^2)   (j = 1..3)
///   row_density_i   p rowsum_i^2 - (ai1^2 + ai2^2)   (i = 1..3)
struct ResidualReport {
    static constexpr std::size_t kCount = 14;
    static const std::array<std::string, kCount> kNames;

    std::array<double, kCount> residuals{};
    double max_violation = 0.0;

    [[nodiscard]] double operator[](const std::string& name) const;
};

/// Throws std::invalid_argument on a negative entry or p outside (0, 1].
[[nodiscard]] ResidualReport constraint_residuals(double p, const FeasibilityMatrix& a);

/// Rank-one matrix (theta, 1-theta, 0) x (sqrt p, 0, 1 - sqrt p). It satisfies
/// every constraint except possibly mass_lower, which holds iff theta sqrt(p) <= 1 - p.
[[nodiscard]] FeasibilityMatrix analytic_candidate(double p);

struct SearchConfig {
    std::size_t multistarts = 200;
    std::size_t iterations = 4000;
    double tol = 1e-9;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct SearchResult {
    bool feasible = false;
    double min_violation = 0.0;
    FeasibilityMatrix best;
    std::size_t starts_run = 0;
};

/// Multistart pattern search minimising max_violation over [0,1]^9, seeded with
/// the analytic candidate, the zero matrix and uniform random starts. An
/// "infeasible" verdict is empirical for the configured start budget.
[[nodiscard]] SearchResult search_feasible(double p, const SearchConfig& cfg);

struct ScanRow {
    double p = 0.0;
    bool feasible = false;
    double min_violation = 0.0;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    std::optional<double> last_feasible;
    std::optional<double> first_infeasible;
};

[[nodiscard]] ScanResult threshold_scan(double p_lo, double p_hi, double step, const SearchConfig& cfg);

[[nodiscard]] nlohmann::json to_json(const SearchResult& r, double p);
[[nodiscard]] std::string scan_csv(const ScanResult& scan);

}  // namespace ipm
