#include "nn2poly/activations.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nn2poly/errors.hpp"

namespace nn2poly {

Activation parse_activation(std::string_view name) {
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "softplus") return Activation::softplus;
    if (name == "linear") return Activation::linear;
    if (name == "relu")
        throw ValidationError("unsupported activation 'relu': cannot handle the non-differentiable ReLU");
    throw ValidationError("unsupported activation '" + std::string(name) + "'");
}

std::string_view activation_name(Activation act) noexcept {
    switch (act) {
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
        case Activation::softplus: return "softplus";
        case Activation::linear: return "linear";
    }
    return "linear";
}

bool is_linear(Activation act) noexcept { return act == Activation::linear; }

namespace {

double sigmoid(double x) noexcept {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// n-th derivative of tanh at 0. With D_0(y) = y and D_{k+1}(y) =
// D_k'(y) * (1 - y^2), tanh^(n)(x) = D_n(tanh x), so the value is D_n(0).
double tanh_derivative(int n) {
    std::vector<double> d{0.0, 1.0};
    for (int k = 0; k < n; ++k) {
        std::vector<double> next(d.size() + 1, 0.0);
        for (std::size_t i = 1; i < d.size(); ++i) {
            const double di = d[i] * static_cast<double>(i);
            next[i - 1] += di;
            next[i + 1] -= di;
        }
        d = std::move(next);
    }
    return d[0];
}

// sigmoid(x) = 1/2 + tanh(x/2)/2.
double sigmoid_derivative(int n) {
    return n == 0 ? 0.5 : std::ldexp(tanh_derivative(n), -(n + 1));
}

}  // namespace

double apply_activation(Activation act, double x) noexcept {
    switch (act) {
        case Activation::tanh: return std::tanh(x);
        case Activation::sigmoid: return sigmoid(x);
        case Activation::softplus: return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
        case Activation::linear: return x;
    }
    return x;
}

double activation_derivative(Activation act, double x) noexcept {
    switch (act) {
        case Activation::tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Activation::sigmoid: {
            const double s = sigmoid(x);
            return s * (1.0 - s);
        }
        case Activation::softplus: return sigmoid(x);
        case Activation::linear: return 1.0;
    }
    return 1.0;
}

double derivative_at_zero(Activation act, int n, int max_order) {
    if (n < 0) throw ValidationError("derivative order must be non-negative");
    if (n > max_order)
        throw ValidationError("derivative order " + std::to_string(n) + " exceeds the cap of " +
                              std::to_string(max_order));
    switch (act) {
        case Activation::tanh: return tanh_derivative(n);
        case Activation::sigmoid: return sigmoid_derivative(n);
        case Activation::softplus: return n == 0 ? std::numbers::ln2 : sigmoid_derivative(n - 1);
        case Activation::linear: return n == 1 ? 1.0 : 0.0;
    }
    return 0.0;
}

TaylorCoefficients taylor_coefficients(Activation act, int q, int max_order) {
    if (q < 0) throw ValidationError("Taylor order must be non-negative");
    TaylorCoefficients tc{act, q, std::vector<double>(static_cast<std::size_t>(q) + 1)};
    double factorial = 1.0;
    for (int n = 0; n <= q; ++n) {
        if (n > 0) factorial *= n;
        tc.coeffs[static_cast<std::size_t>(n)] = derivative_at_zero(act, n, max_order) / factorial;
    }
    return tc;
}

}  // namespace nn2poly
