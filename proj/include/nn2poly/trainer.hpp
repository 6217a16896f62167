#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nn2poly/activations.hpp"
#include "nn2poly/dataset.hpp"
#include "nn2poly/network.hpp"

namespace nn2poly {

enum class NormConstraint { none, l1, l2 };
enum class Loss { mse, softmax_cross_entropy };
enum class Optimizer { sgd, adam };

NormConstraint parse_constraint(const std::string& name);
Loss parse_loss(const std::string& name);
Optimizer parse_optimizer(const std::string& name);

inline constexpr double default_projection_epsilon = 1e-7;

/// w * c(|w|) / (|w| + eps), c(x) = min(x, 1). Vectors with norm above 1
/// land on the unit sphere; the rest are left (almost) unchanged.
std::vector<double> constraint_project(std::vector<double> w, NormConstraint norm,
                                       double epsilon = default_projection_epsilon);

/// Projects every column of a weight matrix (bias first) in place.
void project_columns(Matrix& weights, NormConstraint norm, double epsilon = default_projection_epsilon);

struct LayerShape {
    std::size_t units;
    Activation activation;
};

/// Parses `50:tanh,100:tanh,1:linear`.
std::vector<LayerShape> parse_architecture(const std::string& text);

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::adam;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    Loss loss = Loss::mse;
    NormConstraint constraint = NormConstraint::none;
    double projection_epsilon = default_projection_epsilon;
    std::uint64_t seed = 0;
    double validation_split = 0.0;
};

struct EpochRecord {
    std::size_t epoch;
    double train_loss;
    double val_loss;  // NaN without a validation split
};

struct TrainResult {
    NetworkSpec network;
    std::vector<EpochRecord> history;
};

/// Glorot-uniform kernels, zero biases, seeded.
NetworkSpec initialize_network(std::size_t inputs, const std::vector<LayerShape>& arch, std::uint64_t seed);

/// Mean loss over the rows of x.
double evaluate_loss(const NetworkSpec& net, const Matrix& x, const Matrix& y, Loss loss);

/// Loss and its gradient with respect to every weight matrix.
struct Gradient {
    double loss;
    std::vector<Matrix> weights;
};
Gradient loss_and_gradient(const NetworkSpec& net, const Matrix& x, const Matrix& y, Loss loss);

/// Mini-batch training from a seeded initialization. Hidden-layer columns
/// are projected after every batch update; the output layer never is.
TrainResult train(const DatasetSpec& data, const std::vector<LayerShape>& arch, const TrainConfig& config);

/// Same, continuing from `init`.
TrainResult train(const DatasetSpec& data, NetworkSpec init, const TrainConfig& config);

std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace nn2poly
