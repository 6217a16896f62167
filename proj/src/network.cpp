#include "nn2poly/network.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "nn2poly/dataset.hpp"
#include "nn2poly/errors.hpp"

namespace nn2poly {

void validate(const std::vector<Layer>& layers) {
    if (layers.empty()) throw ValidationError("network has no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& w = layers[l].weights;
        if (w.rows() < 2 || w.cols() < 1)
            throw ValidationError("layer " + std::to_string(l + 1) + " weight matrix is " + std::to_string(w.rows()) +
                                  "x" + std::to_string(w.cols()) + "; needs a bias row, at least one input row and one column");
        for (double x : w.flat())
            if (!std::isfinite(x)) throw ValidationError("layer " + std::to_string(l + 1) + " has a non-finite weight");
        if (l > 0 && layers[l - 1].outputs() != layers[l].inputs())
            throw ValidationError("layer chain mismatch: layer " + std::to_string(l) + " has " +
                                  std::to_string(layers[l - 1].outputs()) + " outputs but layer " + std::to_string(l + 1) +
                                  " expects " + std::to_string(layers[l].inputs()) + " inputs (" +
                                  std::to_string(layers[l - 1].outputs()) + " != " + std::to_string(layers[l].inputs()) + ")");
    }
}

NetworkSpec::NetworkSpec(std::vector<Layer> layers) : layers_(std::move(layers)) { validate(layers_); }

namespace {

// out = act(bias + in * W) for a single row.
void dense_row(const Layer& layer, std::span<const double> in, std::span<double> out) {
    const auto& w = layer.weights;
    auto bias = w.row(0);
    std::copy(bias.begin(), bias.end(), out.begin());
    for (std::size_t i = 0; i < in.size(); ++i) {
        const double a = in[i];
        auto wi = w.row(i + 1);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += a * wi[j];
    }
    if (!is_linear(layer.activation))
        for (double& v : out) v = apply_activation(layer.activation, v);
}

void forward_row(const NetworkSpec& net, std::span<const double> x, std::span<double> y,
                 std::vector<double>& a, std::vector<double>& b) {
    a.assign(x.begin(), x.end());
    for (const auto& layer : net.layers()) {
        b.assign(layer.outputs(), 0.0);
        dense_row(layer, a, b);
        std::swap(a, b);
    }
    std::copy(a.begin(), a.end(), y.begin());
}

}  // namespace

Matrix forward(const NetworkSpec& net, const Matrix& x, Execution exec) {
    if (x.cols() != net.input_dim())
        throw ValidationError("data has " + std::to_string(x.cols()) + " columns but the network expects " +
                              std::to_string(net.input_dim()));
    Matrix out(x.rows(), net.output_dim());
    const auto n = static_cast<long>(x.rows());
    if (exec == Execution::parallel) {
#pragma omp parallel
        {
            std::vector<double> a, b;
#pragma omp for schedule(static)
            for (long i = 0; i < n; ++i)
                forward_row(net, x.row(static_cast<std::size_t>(i)), out.row(static_cast<std::size_t>(i)), a, b);
        }
    } else {
        std::vector<double> a, b;
        for (long i = 0; i < n; ++i)
            forward_row(net, x.row(static_cast<std::size_t>(i)), out.row(static_cast<std::size_t>(i)), a, b);
    }
    return out;
}

std::vector<double> column_norms(const Matrix& weights, int norm_order) {
    std::vector<double> norms(weights.cols(), 0.0);
    for (std::size_t r = 0; r < weights.rows(); ++r)
        for (std::size_t c = 0; c < weights.cols(); ++c) {
            const double v = weights(r, c);
            norms[c] += norm_order == 1 ? std::abs(v) : v * v;
        }
    if (norm_order != 1)
        for (double& n : norms) n = std::sqrt(n);
    return norms;
}

nlohmann::json to_json(const NetworkSpec& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : net.layers()) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t r = 0; r < layer.weights.rows(); ++r) {
            auto row = layer.weights.row(r);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
        layers.push_back({{"activation", std::string(activation_name(layer.activation))}, {"weights", rows}});
    }
    return {{"layers", layers}};
}

NetworkSpec network_from_json(const nlohmann::json& j) {
    std::vector<Layer> layers;
    try {
        for (const auto& jl : j.at("layers")) {
            Layer layer;
            layer.activation = parse_activation(jl.at("activation").get<std::string>());
            const auto& jw = jl.at("weights");
            if (!jw.is_array() || jw.empty() || !jw.front().is_array())
                throw ValidationError("layer " + std::to_string(layers.size() + 1) + " weights must be a matrix");
            const std::size_t cols = jw.front().size();
            Matrix w(jw.size(), cols);
            for (std::size_t r = 0; r < jw.size(); ++r) {
                if (jw[r].size() != cols)
                    throw ValidationError("layer " + std::to_string(layers.size() + 1) + " has ragged weight rows");
                for (std::size_t c = 0; c < cols; ++c) {
                    // nlohmann stores overflowing literals and NaN as null
                    if (!jw[r][c].is_number())
                        throw ValidationError("layer " + std::to_string(layers.size() + 1) + " has a non-finite weight");
                    w(r, c) = jw[r][c].get<double>();
                }
            }
            layer.weights = std::move(w);
            layers.push_back(std::move(layer));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed network: ") + e.what());
    }
    return NetworkSpec(std::move(layers));
}

NetworkSpec load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open network file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("cannot parse network file " + path.string() + ": " + e.what());
    }
    return network_from_json(j);
}

void save_network(const NetworkSpec& net, const std::filesystem::path& path) {
    validate(net.layers());
    write_file_atomic(path, to_json(net).dump(1) + "\n");
}

}  // namespace nn2poly
