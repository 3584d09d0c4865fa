#include "ipm/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "ipm/measures.hpp"
#include "ipm/parallel.hpp"
#include "ipm/rng.hpp"

namespace ipm {

double FeasibilityMatrix::total() const {
    double s = 0.0;
    for (const auto& row : a)
        for (double x : row) s += x;
    return s;
}

FeasibilityMatrix FeasibilityMatrix::transposed() const {
    FeasibilityMatrix t;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) t.a[j][i] = a[i][j];
    return t;
}

FeasibilityMatrix FeasibilityMatrix::scaled(double factor) const {
    FeasibilityMatrix t = *this;
    for (auto& row : t.a)
        for (double& x : row) x *= factor;
    return t;
}

const std::array<std::string, ResidualReport::kCount> ResidualReport::kNames = {
    "mass_lower",    "mass_upper",    "col_giant_1",   "col_giant_2",   "col_giant_3",
    "row_giant_1",   "row_giant_2",   "row_giant_3",   "col_density_1", "col_density_2",
    "col_density_3", "row_density_1", "row_density_2", "row_density_3",
};

double ResidualReport::operator[](const std::string& name) const {
    for (std::size_t k = 0; k < kCount; ++k)
        if (kNames[k] == name) return residuals[k];
    throw std::out_of_range("unknown residual: " + name);
}

namespace {

std::array<double, ResidualReport::kCount> residuals_unchecked(double p, const FeasibilityMatrix& m) {
    const auto& a = m.a;
    std::array<double, 3> col{}, row{};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            row[i] += a[i][j];
            col[j] += a[i][j];
        }
    const double sum = row[0] + row[1] + row[2];
    std::array<double, ResidualReport::kCount> r{};
    r[0] = a[0][0] + a[1][1] + p - sum;
    r[1] = sum - 1.0;
    for (std::size_t k = 0; k < 3; ++k) {
        r[2 + k] = 0.5 * col[k] - a[0][k];
        r[5 + k] = 0.5 * row[k] - a[k][0];
        r[8 + k] = p * col[k] * col[k] - (a[0][k] * a[0][k] + a[1][k] * a[1][k]);
        r[11 + k] = p * row[k] * row[k] - (a[k][0] * a[k][0] + a[k][1] * a[k][1]);
    }
    return r;
}

double max_violation(const std::array<double, ResidualReport::kCount>& r) {
    double worst = 0.0;
    for (double x : r) worst = std::max(worst, x);
    return worst;
}

double objective(double p, const FeasibilityMatrix& m) { return max_violation(residuals_unchecked(p, m)); }

struct StartResult {
    double violation = 0.0;
    FeasibilityMatrix a;
};

// Poll coordinate directions plus a few random unit directions; shrink the step
// after an unsuccessful poll.
StartResult pattern_search(double p, FeasibilityMatrix x, std::size_t iterations, double tol, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    double fx = objective(p, x);
    double step = 0.25;
    constexpr int kRandomDirections = 6;
    std::array<double, 9> dir{};

    const auto try_move = [&](const std::array<double, 9>& d, double h) {
        FeasibilityMatrix y = x;
        for (std::size_t k = 0; k < 9; ++k) {
            double& v = y.a[k / 3][k % 3];
            v = std::clamp(v + h * d[k], 0.0, 1.0);
        }
        const double fy = objective(p, y);
        if (fy < fx) {
            x = y;
            fx = fy;
            return true;
        }
        return false;
    };

    for (std::size_t it = 0; it < iterations && fx > tol && step > 1e-14; ++it) {
        bool improved = false;
        for (std::size_t k = 0; k < 9 && !improved; ++k) {
            dir.fill(0.0);
            dir[k] = 1.0;
            improved = try_move(dir, step) || try_move(dir, -step);
        }
        for (int r = 0; r < kRandomDirections && !improved; ++r) {
            double norm = 0.0;
            for (double& d : dir) {
                d = normal(gen);
                norm += d * d;
            }
            norm = std::sqrt(norm);
            for (double& d : dir) d /= norm;
            improved = try_move(dir, step) || try_move(dir, -step);
        }
        if (improved) step = std::min(step * 2.0, 0.5);
        else step *= 0.5;
    }
    return {fx, x};
}

}  // namespace

ResidualReport constraint_residuals(double p, const FeasibilityMatrix& a) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
    for (const auto& row : a.a)
        for (double x : row)
            if (!(x >= 0.0)) throw std::invalid_argument("feasibility matrix has a negative entry");
    ResidualReport out;
    out.residuals = residuals_unchecked(p, a);
    out.max_violation = max_violation(out.residuals);
    return out;
}

FeasibilityMatrix analytic_candidate(double p) {
    const double t = theta(p);
    const double sp = std::sqrt(p);
    const std::array<double, 3> u{t, 1.0 - t, 0.0};
    const std::array<double, 3> w{sp, 0.0, 1.0 - sp};
    FeasibilityMatrix m;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) m.a[i][j] = u[i] * w[j];
    return m;
}

SearchResult search_feasible(double p, const SearchConfig& cfg) {
    if (!(p > 0.5 && p <= 1.0)) throw std::invalid_argument("p must lie in (1/2, 1]");
    if (cfg.multistarts == 0) throw std::invalid_argument("search needs at least one start");
    if (cfg.iterations == 0) throw std::invalid_argument("search needs at least one iteration");

    std::vector<StartResult> results(cfg.multistarts);
    const auto run_start = [&](std::size_t s) {
        FeasibilityMatrix start;
        if (s == 0) {
            start = analytic_candidate(p);
        } else if (s >= 2) {
            CounterRng rng(cfg.seed);
            for (std::size_t k = 0; k < 9; ++k)
                start.a[k / 3][k % 3] = rng.uniform(CounterRng::Stream::search, s, k) * (2.0 / 9.0);
        }
        results[s] = pattern_search(p, start, cfg.iterations, cfg.tol, derive_seed(cfg.seed, s));
    };

    parallel_for(cfg.multistarts, cfg.threads, run_start);

    std::size_t best = 0;
    for (std::size_t s = 1; s < results.size(); ++s)
        if (results[s].violation < results[best].violation) best = s;

    SearchResult out;
    out.best = results[best].a;
    out.min_violation = constraint_residuals(p, out.best).max_violation;
    out.feasible = out.min_violation <= cfg.tol;
    out.starts_run = cfg.multistarts;
    return out;
}

ScanResult threshold_scan(double p_lo, double p_hi, double step, const SearchConfig& cfg) {
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    if (!(p_lo > 0.5 && p_lo < p_hi && p_hi <= 1.0)) throw std::invalid_argument("need 1/2 < p_lo < p_hi <= 1");
    ScanResult out;
    const auto count = static_cast<std::size_t>(std::floor((p_hi - p_lo) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) {
        const double p = std::min(p_hi, p_lo + static_cast<double>(k) * step);
        const auto r = search_feasible(p, cfg);
        out.rows.push_back({p, r.feasible, r.min_violation});
        if (r.feasible) out.last_feasible = p;
        else if (!out.first_infeasible) out.first_infeasible = p;
    }
    return out;
}

nlohmann::json to_json(const SearchResult& r, double p) {
    nlohmann::json doc;
    doc["p"] = p;
    doc["verdict"] = r.feasible ? "feasible" : "infeasible";
    doc["min_violation"] = r.min_violation;
    doc["starts"] = r.starts_run;
    doc["A"] = r.best.a;
    return doc;
}

std::string scan_csv(const ScanResult& scan) {
    std::string out = "p,verdict,min_violation\n";
    char line[96];
    for (const auto& row : scan.rows) {
        std::snprintf(line, sizeof line, "%.17g,%s,%.17g\n", row.p, row.feasible ? "feasible" : "infeasible",
                      row.min_violation);
        out += line;
    }
    return out;
}

}  // namespace ipm
