#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "nn2poly/matrix.hpp"
#include "nn2poly/parallel.hpp"

namespace nn2poly {

/// A product of input variables, stored as its sorted 1-based variable
/// indices with repetition: x1^2*x3 is {1, 1, 3}. The empty monomial is the
/// intercept.
class Monomial {
public:
    Monomial() = default;
    /// Takes already-canonical indices (sorted, >= 1). Use canonicalize_label
    /// for untrusted input.
    explicit Monomial(std::vector<int> indices);

    const std::vector<int>& indices() const noexcept { return indices_; }
    std::size_t order() const noexcept { return indices_.size(); }
    bool is_intercept() const noexcept { return indices_.empty(); }
    bool contains(int variable) const noexcept;

    /// Graded lexicographic: lower order first, then lexicographic indices.
    friend bool operator<(const Monomial& a, const Monomial& b) noexcept;
    friend bool operator==(const Monomial& a, const Monomial& b) noexcept = default;

private:
    std::vector<int> indices_;
};

/// `x1^2*x3`; the intercept renders as `1`.
std::string to_string(const Monomial& m);

/// Sorts and validates a raw label. `[0]` and `[]` both denote the intercept.
/// Throws ValidationError on out-of-range indices or 0 mixed with others.
Monomial canonicalize_label(const std::vector<int>& raw, int p);

/// All monomials of order 0..max_order in p variables, graded-lex order.
std::vector<Monomial> full_labels(int p, int max_order);

/// Number of monomials of order <= max_order in p variables.
std::size_t full_label_count(int p, int max_order);

/// Sparse multi-output polynomial: one row of `values` per label, one
/// column per output channel.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(int p, int max_order, std::vector<Monomial> labels, Matrix values);

    /// Zero polynomial over the full label space of order `max_order`.
    static Polynomial zeros(int p, int max_order, std::size_t channels);

    int p() const noexcept { return p_; }
    int max_order() const noexcept { return max_order_; }
    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t channels() const noexcept { return values_.cols(); }

    const std::vector<Monomial>& labels() const noexcept { return labels_; }
    const Matrix& values() const noexcept { return values_; }
    Matrix& values() noexcept { return values_; }

    /// Row of `m`, or -1 when the label is absent.
    long find(const Monomial& m) const;
    /// Coefficient of `m` in `channel`; 0 when absent.
    double coefficient(const Monomial& m, std::size_t channel = 0) const;

    /// Single-channel view of column `channel`.
    Polynomial channel(std::size_t channel) const;

    bool operator==(const Polynomial&) const = default;

private:
    int p_ = 0;
    int max_order_ = 0;
    std::vector<Monomial> labels_;
    Matrix values_;
};

/// Evaluates every channel at every row of `x` (n x p). Result is n x c.
Matrix eval_poly(const Polynomial& poly, const Matrix& x, Execution exec = Execution::parallel);

/// `weights[0] + sum_i weights[i+1] * polys[i]` over a shared label space.
/// Every input must be single-channel with identical labels.
Polynomial linear_combine(const std::vector<Polynomial>& polys, const std::vector<double>& weights);

/// Multi-channel form used between layers: channel j of the result is
/// `W(0, j) + sum_i W(i+1, j) * poly.channel(i)`. `weights` has
/// 1 + poly.channels() rows.
Polynomial linear_combine(const Polynomial& poly, const Matrix& weights,
                          Execution exec = Execution::parallel);

struct RankedTerm {
    Monomial label;
    double value;
};

/// For each channel, the `n` non-intercept terms with the largest |value|,
/// descending. Ties go to the graded-lex smaller label.
std::vector<std::vector<RankedTerm>> top_n_coefficients(const Polynomial& poly, std::size_t n);

/// Counts of labels grouped by order, with the intercept counted in the
/// order-1 group (the usual run-length display).
std::vector<std::size_t> label_counts_by_order(const Polynomial& poly);

// Serialization. Labels use `[0]` for the intercept.
nlohmann::json to_json(const Polynomial& poly);
Polynomial polynomial_from_json(const nlohmann::json& j);

}  // namespace nn2poly
