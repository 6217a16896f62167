#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "nn2poly/activations.hpp"
#include "nn2poly/matrix.hpp"
#include "nn2poly/parallel.hpp"

namespace nn2poly {

/// One dense layer. `weights` is (1 + inputs) x outputs with the bias in
/// row 0, so column j holds every weight incident on neuron j.
struct Layer {
    Activation activation = Activation::linear;
    Matrix weights;

    std::size_t inputs() const noexcept { return weights.rows() ? weights.rows() - 1 : 0; }
    std::size_t outputs() const noexcept { return weights.cols(); }
    friend bool operator==(const Layer&, const Layer&) = default;
};

/// Feed-forward MLP as an ordered list of layers.
class NetworkSpec {
public:
    NetworkSpec() = default;
    /// Validates the layer chain; throws ValidationError.
    explicit NetworkSpec(std::vector<Layer> layers);

    const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::vector<Layer>& mutable_layers() noexcept { return layers_; }
    std::size_t depth() const noexcept { return layers_.size(); }
    std::size_t input_dim() const noexcept { return layers_.front().inputs(); }
    std::size_t output_dim() const noexcept { return layers_.back().outputs(); }

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;

private:
    std::vector<Layer> layers_;
};

/// Checks chain consistency, non-emptiness and finiteness.
void validate(const std::vector<Layer>& layers);

/// Forward pass for a batch `x` (n x p). Returns n x c.
Matrix forward(const NetworkSpec& net, const Matrix& x, Execution exec = Execution::parallel);

/// Per-column norms of a weight matrix (bias included).
std::vector<double> column_norms(const Matrix& weights, int norm_order);

nlohmann::json to_json(const NetworkSpec& net);
NetworkSpec network_from_json(const nlohmann::json& j);

NetworkSpec load_network(const std::filesystem::path& path);
void save_network(const NetworkSpec& net, const std::filesystem::path& path);

}  // namespace nn2poly
