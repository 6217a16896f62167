#include "nn2poly/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "nn2poly/errors.hpp"

namespace nn2poly {

NormConstraint parse_constraint(const std::string& name) {
    if (name == "none") return NormConstraint::none;
    if (name == "l1" || name == "l1_norm") return NormConstraint::l1;
    if (name == "l2" || name == "l2_norm") return NormConstraint::l2;
    throw ValidationError("unknown constraint '" + name + "' (expected none, l1_norm or l2_norm)");
}

Loss parse_loss(const std::string& name) {
    if (name == "mse") return Loss::mse;
    if (name == "softmax_cross_entropy") return Loss::softmax_cross_entropy;
    throw ValidationError("unknown loss '" + name + "' (expected mse or softmax_cross_entropy)");
}

Optimizer parse_optimizer(const std::string& name) {
    if (name == "sgd") return Optimizer::sgd;
    if (name == "adam") return Optimizer::adam;
    throw ValidationError("unknown optimizer '" + name + "' (expected sgd or adam)");
}

namespace {

double norm_of(std::span<const double> w, NormConstraint norm) {
    double acc = 0.0;
    for (double v : w) acc += norm == NormConstraint::l1 ? std::abs(v) : v * v;
    return norm == NormConstraint::l1 ? acc : std::sqrt(acc);
}

}  // namespace

std::vector<double> constraint_project(std::vector<double> w, NormConstraint norm, double epsilon) {
    if (norm == NormConstraint::none) return w;
    const double n = norm_of(w, norm);
    const double factor = std::min(n, 1.0) / (n + epsilon);
    for (double& v : w) v *= factor;
    return w;
}

void project_columns(Matrix& weights, NormConstraint norm, double epsilon) {
    if (norm == NormConstraint::none) return;
    std::vector<double> col(weights.rows());
    for (std::size_t c = 0; c < weights.cols(); ++c) {
        for (std::size_t r = 0; r < weights.rows(); ++r) col[r] = weights(r, c);
        col = constraint_project(std::move(col), norm, epsilon);
        for (std::size_t r = 0; r < weights.rows(); ++r) weights(r, c) = col[r];
    }
}

std::vector<LayerShape> parse_architecture(const std::string& text) {
    std::vector<LayerShape> arch;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ValidationError("architecture entry '" + item + "' must look like <units>:<activation>");
        const std::string units = item.substr(0, colon);
        char* end = nullptr;
        const long n = std::strtol(units.c_str(), &end, 10);
        if (units.empty() || *end != '\0' || n < 1)
            throw ValidationError("architecture entry '" + item + "' has an invalid unit count");
        arch.push_back({static_cast<std::size_t>(n), parse_activation(item.substr(colon + 1))});
    }
    if (arch.empty()) throw ValidationError("empty architecture");
    return arch;
}

NetworkSpec initialize_network(std::size_t inputs, const std::vector<LayerShape>& arch, std::uint64_t seed) {
    if (inputs == 0 || arch.empty()) throw ValidationError("network needs inputs and at least one layer");
    std::mt19937_64 rng(seed);
    std::vector<Layer> layers;
    std::size_t fan_in = inputs;
    for (const auto& shape : arch) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + shape.units));
        std::uniform_real_distribution<double> dist(-limit, limit);
        Layer layer{shape.activation, Matrix(fan_in + 1, shape.units)};
        for (std::size_t r = 1; r <= fan_in; ++r)
            for (std::size_t c = 0; c < shape.units; ++c) layer.weights(r, c) = dist(rng);
        layers.push_back(std::move(layer));
        fan_in = shape.units;
    }
    return NetworkSpec(std::move(layers));
}

namespace {

// Batch forward pass keeping every layer's activations (acts[0] = x) and
// pre-activations.
struct Trace {
    std::vector<Matrix> acts;
    std::vector<Matrix> pre;
};

void dense_forward(const Matrix& in, const Matrix& w, Matrix& out) {
    const std::size_t n = in.rows(), k = in.cols(), m = w.cols();
    out = Matrix(n, m);
    auto bias = w.row(0);
    for (std::size_t i = 0; i < n; ++i) {
        double* o = out.row(i).data();
        std::copy(bias.begin(), bias.end(), o);
        const double* a = in.row(i).data();
        for (std::size_t t = 0; t < k; ++t) {
            const double av = a[t];
            const double* wr = w.row(t + 1).data();
            for (std::size_t j = 0; j < m; ++j) o[j] += av * wr[j];
        }
    }
}

Trace trace_forward(const NetworkSpec& net, const Matrix& x) {
    Trace tr;
    tr.acts.reserve(net.depth() + 1);
    tr.pre.resize(net.depth());
    tr.acts.push_back(x);
    for (std::size_t l = 0; l < net.depth(); ++l) {
        const auto& layer = net.layers()[l];
        dense_forward(tr.acts.back(), layer.weights, tr.pre[l]);
        Matrix a = tr.pre[l];
        if (!is_linear(layer.activation))
            for (double& v : a.flat()) v = apply_activation(layer.activation, v);
        tr.acts.push_back(std::move(a));
    }
    return tr;
}

// Loss and dLoss/dOutput for a batch.
double loss_and_output_grad(const Matrix& out, const Matrix& y, Loss loss, Matrix& grad) {
    const std::size_t n = out.rows(), c = out.cols();
    grad = Matrix(n, c);
    double total = 0.0;
    if (loss == Loss::mse) {
        if (y.cols() != c) throw ValidationError("response has " + std::to_string(y.cols()) + " columns, network outputs " + std::to_string(c));
        const double scale = 2.0 / static_cast<double>(n * c);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                const double d = out(i, j) - y(i, j);
                total += d * d;
                grad(i, j) = scale * d;
            }
        return total / static_cast<double>(n * c);
    }
    if (y.cols() != 1) throw ValidationError("softmax cross-entropy expects one column of class indices");
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = out.row(i);
        const double mx = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (double v : row) z += std::exp(v - mx);
        const double logz = mx + std::log(z);
        const auto label = static_cast<std::size_t>(y(i, 0));
        if (y(i, 0) < 0 || label >= c || y(i, 0) != std::floor(y(i, 0)))
            throw ValidationError("class index " + std::to_string(y(i, 0)) + " outside 0.." + std::to_string(c - 1));
        total += logz - row[label];
        for (std::size_t j = 0; j < c; ++j)
            grad(i, j) = (std::exp(row[j] - logz) - (j == label ? 1.0 : 0.0)) / static_cast<double>(n);
    }
    return total / static_cast<double>(n);
}

double derivative_from_trace(Activation act, double pre, double post) noexcept {
    switch (act) {
        case Activation::tanh: return 1.0 - post * post;
        case Activation::sigmoid: return post * (1.0 - post);
        default: return activation_derivative(act, pre);
    }
}

Gradient backward(const NetworkSpec& net, const Trace& tr, const Matrix& y, Loss loss) {
    Gradient g;
    Matrix delta;
    g.loss = loss_and_output_grad(tr.acts.back(), y, loss, delta);
    g.weights.resize(net.depth());
    for (std::size_t l = net.depth(); l-- > 0;) {
        const auto& layer = net.layers()[l];
        const Matrix& in = tr.acts[l];
        if (!is_linear(layer.activation)) {
            const Matrix& post = tr.acts[l + 1];
            for (std::size_t i = 0; i < delta.rows(); ++i)
                for (std::size_t j = 0; j < delta.cols(); ++j)
                    delta(i, j) *= derivative_from_trace(layer.activation, tr.pre[l](i, j), post(i, j));
        }
        Matrix gw(layer.weights.rows(), layer.weights.cols());
        for (std::size_t i = 0; i < delta.rows(); ++i) {
            const double* d = delta.row(i).data();
            double* gb = gw.row(0).data();
            for (std::size_t j = 0; j < delta.cols(); ++j) gb[j] += d[j];
            const double* a = in.row(i).data();
            for (std::size_t t = 0; t < in.cols(); ++t) {
                const double av = a[t];
                double* gr = gw.row(t + 1).data();
                for (std::size_t j = 0; j < delta.cols(); ++j) gr[j] += av * d[j];
            }
        }
        g.weights[l] = std::move(gw);
        if (l == 0) break;
        Matrix prev(delta.rows(), in.cols());
        for (std::size_t i = 0; i < delta.rows(); ++i) {
            const double* d = delta.row(i).data();
            double* pr = prev.row(i).data();
            for (std::size_t t = 0; t < in.cols(); ++t) {
                const double* wr = layer.weights.row(t + 1).data();
                double acc = 0.0;
                for (std::size_t j = 0; j < delta.cols(); ++j) acc += wr[j] * d[j];
                pr[t] = acc;
            }
        }
        delta = std::move(prev);
    }
    return g;
}

}  // namespace

double evaluate_loss(const NetworkSpec& net, const Matrix& x, const Matrix& y, Loss loss) {
    const Matrix out = forward(net, x, Execution::serial);
    Matrix grad;
    return loss_and_output_grad(out, y, loss, grad);
}

Gradient loss_and_gradient(const NetworkSpec& net, const Matrix& x, const Matrix& y, Loss loss) {
    if (x.cols() != net.input_dim()) throw ValidationError("data width does not match the network input");
    return backward(net, trace_forward(net, x), y, loss);
}

TrainResult train(const DatasetSpec& data, const std::vector<LayerShape>& arch, const TrainConfig& config) {
    return train(data, initialize_network(data.x.cols(), arch, config.seed), config);
}

TrainResult train(const DatasetSpec& data, NetworkSpec net, const TrainConfig& config) {
    if (data.x.cols() != net.input_dim())
        throw ValidationError("data has " + std::to_string(data.x.cols()) + " features but the network expects " +
                              std::to_string(net.input_dim()));
    if (data.y.rows() != data.x.rows()) throw ValidationError("feature and response row counts differ");
    if (!(config.validation_split >= 0.0 && config.validation_split < 1.0))
        throw ValidationError("validation split must be in [0, 1)");
    if (!(config.learning_rate >= 0.0)) throw ValidationError("learning rate must be non-negative");
    if (config.batch_size == 0) throw ValidationError("batch size must be positive");
    if (config.loss == Loss::softmax_cross_entropy) {
        const auto labels = class_labels(data.y);
        for (int k : labels)
            if (static_cast<std::size_t>(k) >= net.output_dim())
                throw ValidationError("class index " + std::to_string(k) + " needs more than " +
                                      std::to_string(net.output_dim()) + " output units");
    } else if (data.y.cols() != net.output_dim()) {
        throw ValidationError("response has " + std::to_string(data.y.cols()) + " columns but the network outputs " +
                              std::to_string(net.output_dim()));
    }

    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(data.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_val = static_cast<std::size_t>(std::floor(config.validation_split * static_cast<double>(data.rows())));
    const std::size_t n_train = data.rows() - n_val;
    if (n_train == 0) throw ValidationError("training split is empty");
    if (config.batch_size > n_train)
        throw ValidationError("batch size " + std::to_string(config.batch_size) + " exceeds the " +
                              std::to_string(n_train) + " training rows");
    std::vector<std::size_t> train_rows(order.begin(), order.begin() + static_cast<long>(n_train));
    const DatasetSpec val =
        take_rows(data, std::vector<std::size_t>(order.begin() + static_cast<long>(n_train), order.end()));

    const std::size_t depth = net.depth();
    auto& layers = net.mutable_layers();
    std::vector<Matrix> m1, m2;
    for (const auto& layer : layers) {
        m1.emplace_back(layer.weights.rows(), layer.weights.cols());
        m2.emplace_back(layer.weights.rows(), layer.weights.cols());
    }
    double beta1_t = 1.0, beta2_t = 1.0;

    TrainResult result;
    std::vector<std::size_t> batch_rows;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(train_rows.begin(), train_rows.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0, batch = 1; start < n_train; start += config.batch_size, ++batch) {
            const std::size_t stop = std::min(n_train, start + config.batch_size);
            batch_rows.assign(train_rows.begin() + static_cast<long>(start), train_rows.begin() + static_cast<long>(stop));
            const DatasetSpec b = take_rows(data, batch_rows);
            const Gradient g = backward(net, trace_forward(net, b.x), b.y, config.loss);
            if (!std::isfinite(g.loss))
                throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch));
            epoch_loss += g.loss * static_cast<double>(stop - start);

            if (config.optimizer == Optimizer::adam) {
                beta1_t *= config.adam_beta1;
                beta2_t *= config.adam_beta2;
            }
            for (std::size_t l = 0; l < depth; ++l) {
                auto w = layers[l].weights.flat();
                auto gw = g.weights[l].flat();
                if (config.optimizer == Optimizer::sgd) {
                    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= config.learning_rate * gw[i];
                    continue;
                }
                auto ma = m1[l].flat();
                auto va = m2[l].flat();
                for (std::size_t i = 0; i < w.size(); ++i) {
                    ma[i] = config.adam_beta1 * ma[i] + (1.0 - config.adam_beta1) * gw[i];
                    va[i] = config.adam_beta2 * va[i] + (1.0 - config.adam_beta2) * gw[i] * gw[i];
                    const double mhat = ma[i] / (1.0 - beta1_t);
                    const double vhat = va[i] / (1.0 - beta2_t);
                    w[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_epsilon);
                }
            }
            // end-of-batch projection, hidden layers only
            for (std::size_t l = 0; l + 1 < depth; ++l)
                project_columns(layers[l].weights, config.constraint, config.projection_epsilon);
        }
        EpochRecord rec{epoch, epoch_loss / static_cast<double>(n_train), std::numeric_limits<double>::quiet_NaN()};
        if (n_val > 0) rec.val_loss = evaluate_loss(net, val.x, val.y, config.loss);
        result.history.push_back(rec);
    }
    result.network = std::move(net);
    return result;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
    std::ostringstream os;
    os.precision(10);
    os << "epoch,train_loss,val_loss\n";
    for (const auto& r : history) {
        os << r.epoch << ',' << r.train_loss << ',';
        if (std::isnan(r.val_loss)) os << "NA";
        else os << r.val_loss;
        os << '\n';
    }
    return os.str();
}

}  // namespace nn2poly
