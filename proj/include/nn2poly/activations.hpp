#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nn2poly {

enum class Activation { tanh, sigmoid, softplus, linear };

/// Parses the lowercase file-format name. Throws ValidationError for
/// anything else, with a dedicated message for non-differentiable ReLU.
Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation act) noexcept;

bool is_linear(Activation act) noexcept;

/// Evaluates the activation at x.
double apply_activation(Activation act, double x) noexcept;
/// First derivative at x.
double activation_derivative(Activation act, double x) noexcept;

inline constexpr int default_max_taylor_order = 30;

/// Exact n-th derivative at zero.
///
/// tanh and sigmoid satisfy g' = P(g) for a quadratic P, so every
/// derivative is a polynomial in g obtained by the recurrence
/// D_{n+1}(g) = D_n'(g) * P(g), evaluated at g(0). softplus' is sigmoid,
/// and softplus(0) = ln 2.
double derivative_at_zero(Activation act, int n, int max_order = default_max_taylor_order);

struct TaylorCoefficients {
    Activation activation;
    int order;
    std::vector<double> coeffs;  // coeffs[n] = g^(n)(0) / n!
};

TaylorCoefficients taylor_coefficients(Activation act, int q, int max_order = default_max_taylor_order);

}  // namespace nn2poly
