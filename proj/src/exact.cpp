#include "ipm/exact.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "ipm/components.hpp"

namespace ipm {

namespace {

BigInt parse_digits(const std::string& digits) {
    BigInt v = 0;
    for (char c : digits) v = v * 10 + (c - '0');
    return v;
}

bool all_digits(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

Rational parse_rational(const std::string& text) {
    const auto bad = [&] { return std::invalid_argument("not a rational number: '" + text + "'"); };
    if (text.empty()) throw bad();
    if (const auto slash = text.find('/'); slash != std::string::npos) {
        const auto num = text.substr(0, slash);
        const auto den = text.substr(slash + 1);
        if (num.empty() || den.empty() || !all_digits(num) || !all_digits(den)) throw bad();
        const BigInt d = parse_digits(den);
        if (d == 0) throw bad();
        return Rational(parse_digits(num), d);
    }
    const auto dot = text.find('.');
    const auto whole = text.substr(0, dot);
    const auto frac = dot == std::string::npos ? std::string{} : text.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || !all_digits(whole) || !all_digits(frac)) throw bad();
    BigInt scale = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
    return Rational(parse_digits(whole + frac), scale);
}

std::string to_string(const Rational& q) {
    const auto num = boost::multiprecision::numerator(q);
    const auto den = boost::multiprecision::denominator(q);
    return den == 1 ? num.str() : num.str() + "/" + den.str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

BigInt factorial(unsigned k) {
    BigInt f = 1;
    for (unsigned i = 2; i <= k; ++i) f *= i;
    return f;
}

BigInt binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    BigInt c = 1;
    for (unsigned i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

double p_lower_threshold(unsigned n) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    const double t = std::tan(std::numbers::pi / (4.0 * n));
    return 0.5 * (1.0 - t * t);
}

LargeComponentProbability prob_large_component(unsigned n, const Rational& p) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    if (p < 0 || p > 1) throw std::invalid_argument("p must lie in [0, 1]");
    const Rational half_gap = (Rational(1) - p) / 2;
    Rational power = 1;
    for (unsigned k = 0; k < n; ++k) power *= half_gap;
    LargeComponentProbability out;
    out.value = Rational(1) - Rational(binomial(2 * n, n)) * power;
    out.real = to_double(out.value);
    out.below_range = to_double(p) < p_lower_threshold(n);
    return out;
}

QuadraticValue QuadraticValue::operator+(const QuadraticValue& o) const {
    if (d != o.d) throw std::invalid_argument("radicands differ");
    return {a + o.a, b + o.b, d};
}

QuadraticValue QuadraticValue::operator*(const QuadraticValue& o) const {
    if (d != o.d) throw std::invalid_argument("radicands differ");
    return {a * o.a + b * o.b * d, a * o.b + b * o.a, d};
}

QuadraticValue two_state_small_component_enumeration(unsigned n, const Rational& p) {
    if (n == 0 || n > 10) throw std::invalid_argument("n must lie in [1, 10]");
    if (p * 2 < 1 || p > 1) throw std::invalid_argument("p must lie in [1/2, 1]");
    const Rational d = 2 * p - 1;
    const QuadraticValue one_state{Rational(1, 2), Rational(1, 2), d};    // theta
    const QuadraticValue zero_state{Rational(1, 2), Rational(-1, 2), d};  // 1 - theta

    const unsigned vertices = 2 * n;
    const auto g = complete_graph(vertices);
    QuadraticValue total{0, 0, d};
    for (std::uint32_t mask = 0; mask < (1u << vertices); ++mask) {
        EdgeSample s(g.fingerprint(), g.edge_count(), 0, mask);
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            const auto [u, v] = g.edge(e);
            if (((mask >> u) & 1u) == ((mask >> v) & 1u)) s.set(e);
        }
        if (connected_components(g, s).largest() > n) continue;
        QuadraticValue weight{1, 0, d};
        for (unsigned v = 0; v < vertices; ++v) weight = weight * (((mask >> v) & 1u) ? one_state : zero_state);
        total = total + weight;
    }
    return total;
}

BigInt pm_count_tripartite(const std::vector<unsigned>& parts) {
    if (parts.size() > 3) throw std::invalid_argument("at most three parts");
    unsigned total = 0;
    for (auto x : parts) total += x;
    if (total % 2 != 0) throw std::invalid_argument("part sizes must sum to an even number");
    const unsigned n = total / 2;
    BigInt num = 1, den = 1;
    for (std::size_t k = 0; k < 3; ++k) {
        const unsigned size = k < parts.size() ? parts[k] : 0;
        if (size > n) throw std::invalid_argument("every part must be at most half the vertices");
        num *= factorial(size);
        den *= factorial(n - size);
    }
    return num / den;
}

MultipartiteReduction pm_count_multipartite_lower_bound(const std::vector<unsigned>& parts) {
    MultipartiteReduction out;
    out.parts = parts;
    std::sort(out.parts.begin(), out.parts.end(), std::greater<>());
    while (!out.parts.empty() && out.parts.back() == 0) out.parts.pop_back();
    unsigned total = 0;
    for (auto x : out.parts) total += x;
    while (out.parts.size() > 3) {
        const unsigned merged = out.parts[out.parts.size() - 1] + out.parts[out.parts.size() - 2];
        if (2 * merged > total) throw std::logic_error("two smallest parts exceed n");
        out.parts.resize(out.parts.size() - 2);
        out.parts.insert(std::upper_bound(out.parts.begin(), out.parts.end(), merged, std::greater<>()), merged);
        ++out.merges;
    }
    out.lower_bound = pm_count_tripartite(out.parts);
    return out;
}

std::uint64_t pm_count_bruteforce(const HostGraph& g) {
    const std::size_t n = g.vertex_count();
    if (n > 16) throw std::invalid_argument("brute-force matching count supports at most 16 vertices");
    if (n % 2 != 0) return 0;
    std::vector<std::uint32_t> adj(n, 0);
    for (const auto& e : g.edges()) {
        adj[e.u] |= 1u << e.v;
        adj[e.v] |= 1u << e.u;
    }
    const std::uint32_t full = n == 0 ? 0 : (1u << n) - 1;
    std::function<std::uint64_t(std::uint32_t)> count = [&](std::uint32_t free) -> std::uint64_t {
        if (free == 0) return 1;
        const int v = std::countr_zero(free);
        const std::uint32_t rest = free & ~(1u << v);
        std::uint64_t total = 0;
        for (std::uint32_t cand = adj[v] & rest; cand; cand &= cand - 1)
            total += count(rest & ~(1u << std::countr_zero(cand)));
        return total;
    };
    return count(full);
}

nlohmann::json rational_json(const Rational& q) { return {{"rational", to_string(q)}, {"decimal", to_double(q)}}; }

}  // namespace ipm
