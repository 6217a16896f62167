#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nn2poly/activations.hpp"
#include "nn2poly/combinatorics.hpp"
#include "nn2poly/network.hpp"
#include "nn2poly/parallel.hpp"
#include "nn2poly/polynomial.hpp"

namespace nn2poly {

inline constexpr int default_max_order = 3;
inline constexpr int default_hidden_taylor_order = 8;

struct TransformConfig {
    int max_order = default_max_order;
    /// Empty: default_hidden_taylor_order for every nonlinear layer.
    /// One value: used for every nonlinear layer.
    /// Otherwise one value per nonlinear layer, in order.
    std::vector<int> taylor_orders;
    bool keep_layers = false;
    std::size_t partition_ceiling = PartitionCache::default_ceiling;
    Execution execution = Execution::parallel;
};

/// Pre- and post-activation polynomials of one layer, one channel per
/// neuron, sharing a single label list.
struct LayerPolynomials {
    Polynomial input;
    Polynomial output;
};

struct TransformResult {
    Polynomial polynomial;
    /// Filled only when keep_layers is set; one entry per network layer.
    std::vector<LayerPolynomials> layers;
};

/// Taylor order used at each layer: 1 for linear layers.
std::vector<int> resolve_taylor_orders(const TransformConfig& config, const NetworkSpec& net);

/// Effective order reached after each layer: starting from 1, a nonlinear
/// layer with Taylor order q maps Q to min(max_order, Q * q); linear layers
/// keep Q.
std::vector<int> derive_order_schedule(const TransformConfig& config, const NetworkSpec& net);

/// Precomputed, per-label expansion data for one label space. Each output
/// label carries the list of partitions of its multiset into in-polynomial
/// labels, so the activation step reduces to sums of coefficient products.
class ExpansionPlan {
public:
    struct Term {
        std::vector<std::size_t> block_rows;  // label rows of the blocks
        double multinomial;                   // j! / prod(identical block counts)!
        int max_block_order;
    };

    ExpansionPlan(int p, int max_order, const PartitionCache& cache);

    int p() const noexcept { return p_; }
    int max_order() const noexcept { return max_order_; }
    const std::vector<Monomial>& labels() const noexcept { return labels_; }
    /// Row of the intercept label (always 0 in graded-lex order).
    std::size_t intercept_row() const noexcept { return 0; }
    const std::vector<Term>& terms(std::size_t row) const { return terms_[row]; }

private:
    int p_;
    int max_order_;
    std::vector<Monomial> labels_;
    std::vector<std::vector<Term>> terms_;
};

/// Applies the truncated Taylor series of `act` to every channel of
/// `in_poly`, whose monomials have order <= `in_order`. Output keeps the
/// label list; coefficients above `order_cap` are zero.
///
/// Writing the input as b0 + R (intercept b0), each output coefficient of a
/// non-intercept label t is
///   sum over partitions of t into j blocks of order <= in_order of
///     W_j * multinomial * prod(block coefficients),
///   W_j = sum_{n=j..q} a_n * C(n, j) * b0^(n-j),
/// and the intercept becomes sum_n a_n * b0^n.
Polynomial activation_step(const Polynomial& in_poly, Activation act, int q, int in_order,
                           int order_cap, const ExpansionPlan& plan,
                           Execution exec = Execution::parallel);

/// Convenience overload building the expansion plan from `cache`.
Polynomial activation_step(const Polynomial& in_poly, Activation act, int q, int in_order,
                           int order_cap, const PartitionCache& cache);

/// Converts a trained network into its polynomial representation.
TransformResult transform(const NetworkSpec& net, const TransformConfig& config = {});

}  // namespace nn2poly
