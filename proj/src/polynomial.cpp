#include "nn2poly/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "nn2poly/errors.hpp"

namespace nn2poly {

Monomial::Monomial(std::vector<int> indices) : indices_(std::move(indices)) {}

bool Monomial::contains(int variable) const noexcept {
    return std::binary_search(indices_.begin(), indices_.end(), variable);
}

bool operator<(const Monomial& a, const Monomial& b) noexcept {
    if (a.order() != b.order()) return a.order() < b.order();
    return a.indices_ < b.indices_;
}

std::string to_string(const Monomial& m) {
    if (m.is_intercept()) return "1";
    std::ostringstream out;
    const auto& idx = m.indices();
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && idx[j] == idx[i]) ++j;
        if (i > 0) out << '*';
        out << 'x' << idx[i];
        if (j - i > 1) out << '^' << (j - i);
        i = j;
    }
    return out.str();
}

Monomial canonicalize_label(const std::vector<int>& raw, int p) {
    if (raw.size() == 1 && raw[0] == 0) return Monomial{};
    std::vector<int> idx = raw;
    for (int v : idx) {
        if (v == 0) throw ValidationError("label mixes the intercept marker 0 with variable indices");
        if (v < 1 || v > p)
            throw ValidationError("label index " + std::to_string(v) + " out of range [1, " + std::to_string(p) + "]");
    }
    std::sort(idx.begin(), idx.end());
    return Monomial{std::move(idx)};
}

namespace {

// Appends all non-decreasing sequences of length `order` over [first, p].
void extend_labels(std::vector<int>& current, int first, int p, std::size_t order,
                   std::vector<Monomial>& out) {
    if (current.size() == order) {
        out.emplace_back(current);
        return;
    }
    for (int v = first; v <= p; ++v) {
        current.push_back(v);
        extend_labels(current, v, p, order, out);
        current.pop_back();
    }
}

double binomial(long n, long k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (long i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

}  // namespace

std::vector<Monomial> full_labels(int p, int max_order) {
    std::vector<Monomial> out;
    out.reserve(full_label_count(p, max_order));
    std::vector<int> current;
    for (int order = 0; order <= max_order; ++order) extend_labels(current, 1, p, static_cast<std::size_t>(order), out);
    return out;
}

std::size_t full_label_count(int p, int max_order) {
    double total = 0;
    for (int k = 0; k <= max_order; ++k) total += binomial(p + k - 1, k);
    return static_cast<std::size_t>(total);
}

Polynomial::Polynomial(int p, int max_order, std::vector<Monomial> labels, Matrix values)
    : p_(p), max_order_(max_order), labels_(std::move(labels)), values_(std::move(values)) {
    if (p_ < 1) throw ValidationError("polynomial needs p >= 1");
    if (max_order_ < 0) throw ValidationError("polynomial max_order must be non-negative");
    if (values_.rows() != labels_.size())
        throw ValidationError("polynomial has " + std::to_string(labels_.size()) + " labels but " +
                              std::to_string(values_.rows()) + " value rows");
    if (values_.cols() < 1 && !labels_.empty()) throw ValidationError("polynomial needs at least one channel");
    std::set<std::vector<int>> seen;
    for (const auto& m : labels_) {
        const auto& idx = m.indices();
        if (!std::is_sorted(idx.begin(), idx.end()))
            throw ValidationError("label " + to_string(m) + " is not sorted");
        if (!idx.empty() && (idx.front() < 1 || idx.back() > p_))
            throw ValidationError("label " + to_string(m) + " has an index outside [1, p]");
        if (static_cast<int>(m.order()) > max_order_)
            throw ValidationError("label " + to_string(m) + " exceeds max_order " + std::to_string(max_order_));
        if (!seen.insert(idx).second) throw ValidationError("duplicate label " + to_string(m));
    }
}

Polynomial Polynomial::zeros(int p, int max_order, std::size_t channels) {
    auto labels = full_labels(p, max_order);
    Matrix values(labels.size(), channels);
    return Polynomial(p, max_order, std::move(labels), std::move(values));
}

long Polynomial::find(const Monomial& m) const {
    auto it = std::find(labels_.begin(), labels_.end(), m);
    return it == labels_.end() ? -1 : static_cast<long>(it - labels_.begin());
}

double Polynomial::coefficient(const Monomial& m, std::size_t channel) const {
    long r = find(m);
    return r < 0 ? 0.0 : values_(static_cast<std::size_t>(r), channel);
}

Polynomial Polynomial::channel(std::size_t channel) const {
    Matrix v(labels_.size(), 1);
    for (std::size_t r = 0; r < labels_.size(); ++r) v(r, 0) = values_(r, channel);
    return Polynomial(p_, max_order_, labels_, std::move(v));
}

namespace {

void eval_row(const Polynomial& poly, std::span<const double> xrow, std::span<double> out) {
    const auto& labels = poly.labels();
    const auto& values = poly.values();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t r = 0; r < labels.size(); ++r) {
        double term = 1.0;
        for (int k : labels[r].indices()) term *= xrow[static_cast<std::size_t>(k - 1)];
        auto coeffs = values.row(r);
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += coeffs[c] * term;
    }
}

}  // namespace

Matrix eval_poly(const Polynomial& poly, const Matrix& x, Execution exec) {
    if (x.cols() != static_cast<std::size_t>(poly.p()))
        throw ValidationError("data has " + std::to_string(x.cols()) + " columns but the polynomial expects " +
                              std::to_string(poly.p()));
    Matrix out(x.rows(), poly.channels());
    const auto n = static_cast<long>(x.rows());
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) eval_row(poly, x.row(static_cast<std::size_t>(i)), out.row(static_cast<std::size_t>(i)));
    } else {
        for (long i = 0; i < n; ++i) eval_row(poly, x.row(static_cast<std::size_t>(i)), out.row(static_cast<std::size_t>(i)));
    }
    return out;
}

Polynomial linear_combine(const std::vector<Polynomial>& polys, const std::vector<double>& weights) {
    if (weights.size() != polys.size() + 1)
        throw ValidationError("linear_combine expects " + std::to_string(polys.size() + 1) + " weights, got " +
                              std::to_string(weights.size()));
    if (polys.empty()) throw ValidationError("linear_combine needs at least one polynomial");
    const auto& ref = polys.front();
    for (const auto& poly : polys) {
        if (poly.channels() != 1) throw ValidationError("linear_combine expects single-channel polynomials");
        if (poly.p() != ref.p() || poly.labels() != ref.labels())
            throw ValidationError("linear_combine inputs do not share a label space");
    }
    auto labels = ref.labels();
    long icpt = ref.find(Monomial{});
    Matrix values(labels.size() + (icpt < 0 ? 1 : 0), 1);
    std::size_t offset = 0;
    if (icpt < 0) {
        labels.insert(labels.begin(), Monomial{});
        icpt = 0;
        offset = 1;
    }
    for (std::size_t i = 0; i < polys.size(); ++i) {
        const auto& v = polys[i].values();
        for (std::size_t r = 0; r < v.rows(); ++r) values(r + offset, 0) += weights[i + 1] * v(r, 0);
    }
    values(static_cast<std::size_t>(icpt), 0) += weights[0];
    return Polynomial(ref.p(), ref.max_order(), std::move(labels), std::move(values));
}

Polynomial linear_combine(const Polynomial& poly, const Matrix& weights, Execution exec) {
    if (weights.rows() != poly.channels() + 1)
        throw ValidationError("weight matrix has " + std::to_string(weights.rows()) + " rows, expected " +
                              std::to_string(poly.channels() + 1));
    const long icpt = poly.find(Monomial{});
    if (icpt < 0) throw ValidationError("multi-channel linear_combine needs an intercept label");
    const std::size_t rows = poly.size();
    const std::size_t in_ch = poly.channels();
    const std::size_t out_ch = weights.cols();
    const auto& in = poly.values();
    Matrix out(rows, out_ch);
    // Each output row is independent; the per-entry summation order is fixed.
    auto kernel = [&](std::size_t r) {
        auto dst = out.row(r);
        auto src = in.row(r);
        for (std::size_t i = 0; i < in_ch; ++i) {
            const double a = src[i];
            auto w = weights.row(i + 1);
            for (std::size_t j = 0; j < out_ch; ++j) dst[j] += a * w[j];
        }
        if (static_cast<long>(r) == icpt)
            for (std::size_t j = 0; j < out_ch; ++j) dst[j] += weights(0, j);
    };
    const auto n = static_cast<long>(rows);
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (long r = 0; r < n; ++r) kernel(static_cast<std::size_t>(r));
    } else {
        for (long r = 0; r < n; ++r) kernel(static_cast<std::size_t>(r));
    }
    return Polynomial(poly.p(), poly.max_order(), poly.labels(), std::move(out));
}

std::vector<std::vector<RankedTerm>> top_n_coefficients(const Polynomial& poly, std::size_t n) {
    std::vector<std::vector<RankedTerm>> result(poly.channels());
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < poly.size(); ++r)
        if (!poly.labels()[r].is_intercept()) rows.push_back(r);
    for (std::size_t c = 0; c < poly.channels(); ++c) {
        auto order = rows;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = std::abs(poly.values()(a, c));
            const double vb = std::abs(poly.values()(b, c));
            if (va != vb) return va > vb;
            return poly.labels()[a] < poly.labels()[b];
        });
        order.resize(std::min(n, order.size()));
        for (std::size_t r : order) result[c].push_back({poly.labels()[r], poly.values()(r, c)});
    }
    return result;
}

std::vector<std::size_t> label_counts_by_order(const Polynomial& poly) {
    std::size_t top = 1;
    for (const auto& m : poly.labels()) top = std::max(top, m.order());
    std::vector<std::size_t> counts(top, 0);
    for (const auto& m : poly.labels()) counts[m.is_intercept() ? 0 : m.order() - 1]++;
    return counts;
}

nlohmann::json to_json(const Polynomial& poly) {
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& m : poly.labels()) {
        if (m.is_intercept())
            labels.push_back(nlohmann::json::array({0}));
        else
            labels.push_back(m.indices());
    }
    nlohmann::json values = nlohmann::json::array();
    for (std::size_t r = 0; r < poly.size(); ++r) {
        auto row = poly.values().row(r);
        values.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return {{"p", poly.p()}, {"max_order", poly.max_order()}, {"labels", labels}, {"values", values}};
}

Polynomial polynomial_from_json(const nlohmann::json& j) {
    try {
        const int p = j.at("p").get<int>();
        const auto& jl = j.at("labels");
        const auto& jv = j.at("values");
        if (!jl.is_array() || !jv.is_array()) throw ValidationError("polynomial labels and values must be arrays");
        if (jl.size() != jv.size())
            throw ValidationError("polynomial has " + std::to_string(jl.size()) + " labels but " +
                                  std::to_string(jv.size()) + " value rows");
        std::vector<Monomial> labels;
        labels.reserve(jl.size());
        int top = 0;
        for (const auto& l : jl) {
            labels.push_back(canonicalize_label(l.get<std::vector<int>>(), p));
            top = std::max(top, static_cast<int>(labels.back().order()));
        }
        const int max_order = j.contains("max_order") ? j.at("max_order").get<int>() : top;
        std::size_t cols = 0;
        if (!jv.empty()) cols = jv.front().is_array() ? jv.front().size() : 1;
        Matrix values(jv.size(), cols);
        for (std::size_t r = 0; r < jv.size(); ++r) {
            // A bare number is accepted as a one-channel row.
            if (!jv[r].is_array()) {
                if (cols != 1) throw ValidationError("ragged value rows in polynomial");
                values(r, 0) = jv[r].get<double>();
                continue;
            }
            if (jv[r].size() != cols) throw ValidationError("ragged value rows in polynomial");
            for (std::size_t c = 0; c < cols; ++c) values(r, c) = jv[r][c].get<double>();
        }
        return Polynomial(p, max_order, std::move(labels), std::move(values));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed polynomial: ") + e.what());
    }
}

}  // namespace nn2poly
