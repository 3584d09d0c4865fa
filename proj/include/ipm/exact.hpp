#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "ipm/host_graph.hpp"

namespace ipm {

using BigInt = boost::multiprecision::cpp_int;
/// Always in reduced form with a positive denominator.
using Rational = boost::multiprecision::cpp_rational;

/// Accepts "3", "0.55", ".5", "3/5". Throws std::invalid_argument otherwise.
[[nodiscard]] Rational parse_rational(const std::string& text);
[[nodiscard]] std::string to_string(const Rational& q);
[[nodiscard]] double to_double(const Rational& q);

[[nodiscard]] BigInt factorial(unsigned k);
[[nodiscard]] BigInt binomial(unsigned n, unsigned k);

/// 1/2 (1 - tan^2(pi / 4n)). Throws std::invalid_argument for n = 0.
[[nodiscard]] double p_lower_threshold(unsigned n);

struct LargeComponentProbability {
    Rational value;      // 1 - C(2n,n) ((1-p)/2)^n
    double real = 0.0;
    bool below_range = false;  // p < p_lower_threshold(n): formula evaluated anyway
};

/// Minimum over 1-independent measures on K_{2n} with edge marginals >= p of
/// P[|C1| > n]. Throws std::invalid_argument for n = 0 or p outside [0, 1].
[[nodiscard]] LargeComponentProbability prob_large_component(unsigned n, const Rational& p);

/// a + b sqrt(d) with rational a, b and a fixed rational radicand d.
struct QuadraticValue {
    Rational a;
    Rational b;
    Rational d;

    QuadraticValue operator+(const QuadraticValue& o) const;
    QuadraticValue operator*(const QuadraticValue& o) const;
    [[nodiscard]] bool is_rational() const { return b == 0; }
};

/// P[|C1| <= n] under the two-state measure on K_{2n}, by enumerating all 2^{2n}
/// state assignments and computing components of the open graph. Exact in
/// Q(sqrt(2p - 1)). Requires 1 <= n <= 10 and p in [1/2, 1].
[[nodiscard]] QuadraticValue two_state_small_component_enumeration(unsigned n, const Rational& p);

/// Perfect matchings of the complete multipartite graph with the given parts
/// (at most three, possibly empty, even total 2n, every part <= n).
/// Throws std::invalid_argument when the preconditions fail.
[[nodiscard]] BigInt pm_count_tripartite(const std::vector<unsigned>& parts);

struct MultipartiteReduction {
    std::vector<unsigned> parts;  // at most three parts after merging
    BigInt lower_bound;           // pm_count_tripartite(parts)
    std::size_t merges = 0;
};

/// While more than three parts remain, merge the two smallest (their sum is at
/// most n). Merging deletes edges, so the result bounds the count from below.
[[nodiscard]] MultipartiteReduction pm_count_multipartite_lower_bound(const std::vector<unsigned>& parts);

/// Perfect matchings by recursive enumeration. Zero for an odd vertex count.
/// Throws std::invalid_argument above 16 vertices.
[[nodiscard]] std::uint64_t pm_count_bruteforce(const HostGraph& g);

[[nodiscard]] nlohmann::json rational_json(const Rational& q);

}  // namespace ipm
