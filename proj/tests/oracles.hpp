// Independent reference computations used only by the test suites. Nothing
// here calls into the code paths it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// --- multiset partitions -------------------------------------------------

// Canonical text of a partition given as blocks of raw elements.
inline std::string canonical(std::vector<std::vector<int>> blocks) {
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end());
    std::string s;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i) s += '|';
        for (std::size_t k = 0; k < blocks[i].size(); ++k) {
            if (k) s += ',';
            s += std::to_string(blocks[i][k]);
        }
    }
    return s;
}

// Every set partition of the positions 0..n-1 via restricted growth strings,
// collapsed onto the element values and deduplicated.
inline std::set<std::string> brute_force_partitions(const std::vector<int>& elements) {
    const std::size_t n = elements.size();
    std::set<std::string> out;
    std::vector<int> rgs(n, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int used) {
        if (i == n) {
            std::vector<std::vector<int>> blocks(static_cast<std::size_t>(used));
            for (std::size_t k = 0; k < n; ++k) blocks[static_cast<std::size_t>(rgs[k])].push_back(elements[k]);
            out.insert(canonical(blocks));
            return;
        }
        for (int b = 0; b <= used; ++b) {
            rgs[i] = b;
            rec(i + 1, std::max(used, b + 1));
        }
    };
    if (n > 0) rec(0, 0);
    return out;
}

// Bell numbers from the Bell triangle.
inline std::vector<long> bell_numbers(int count) {
    std::vector<long> bells{1};
    std::vector<long> row{1};
    for (int i = 1; i < count; ++i) {
        std::vector<long> next{row.back()};
        for (long v : row) next.push_back(next.back() + v);
        row = next;
        bells.push_back(row.front());
    }
    return bells;  // B0, B1, ...
}

// --- symbolic polynomials ------------------------------------------------

// Exponent vector -> coefficient.
using SymPoly = std::map<std::vector<int>, double>;

inline int degree(const std::vector<int>& e) {
    int d = 0;
    for (int v : e) d += v;
    return d;
}

inline SymPoly multiply(const SymPoly& a, const SymPoly& b, int max_degree) {
    SymPoly out;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            std::vector<int> e(ea.size());
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            if (degree(e) > max_degree) continue;
            out[e] += ca * cb;
        }
    return out;
}

inline SymPoly constant(int p, double c) { return {{std::vector<int>(static_cast<std::size_t>(p), 0), c}}; }

inline void add_scaled(SymPoly& acc, const SymPoly& x, double s) {
    for (const auto& [e, c] : x) acc[e] += s * c;
}

// sum_n series[n] * u^n, truncated to max_degree.
inline SymPoly substitute(const std::vector<double>& series, const SymPoly& u, int p, int max_degree) {
    SymPoly acc;
    SymPoly power = constant(p, 1.0);
    for (std::size_t n = 0; n < series.size(); ++n) {
        add_scaled(acc, power, series[n]);
        power = multiply(power, u, max_degree);
    }
    return acc;
}

// Hand-derived Maclaurin coefficients g^(n)(0)/n! up to n = 3.
inline std::vector<double> maclaurin(const std::string& act, int q) {
    std::vector<double> c;
    if (act == "tanh") c = {0.0, 1.0, 0.0, -1.0 / 3.0};
    else if (act == "sigmoid") c = {0.5, 0.25, 0.0, -1.0 / 48.0};
    else if (act == "softplus") c = {std::log(2.0), 0.5, 0.125, 0.0};
    else c = {0.0, 1.0, 0.0, 0.0};
    c.resize(static_cast<std::size_t>(q) + 1);
    return c;
}

// Label indices (1-based, sorted) -> exponent vector.
inline std::vector<int> exponents(const std::vector<int>& label, int p) {
    std::vector<int> e(static_cast<std::size_t>(p), 0);
    for (int k : label) e[static_cast<std::size_t>(k - 1)]++;
    return e;
}

// --- finite differences ----------------------------------------------------

// n-th central difference at 0 with step h, in extended precision.
template <class F>
long double central_difference(F f, int n, long double h) {
    long double acc = 0.0L;
    long double binom = 1.0L;
    for (int k = 0; k <= n; ++k) {
        const long double x = (static_cast<long double>(n) / 2.0L - k) * h;
        acc += ((k % 2) ? -1.0L : 1.0L) * binom * f(x);
        binom = binom * (n - k) / (k + 1);
    }
    return acc / std::pow(h, static_cast<long double>(n));
}

// One Richardson step on the O(h^2) central difference.
template <class F>
long double richardson_derivative(F f, int n, long double h) {
    const long double coarse = central_difference(f, n, h);
    const long double fine = central_difference(f, n, h / 2.0L);
    return (4.0L * fine - coarse) / 3.0L;
}

}  // namespace oracle
