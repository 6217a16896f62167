#include "nn2poly/transform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "nn2poly/errors.hpp"

namespace nn2poly {

std::vector<int> resolve_taylor_orders(const TransformConfig& config, const NetworkSpec& net) {
    std::size_t nonlinear = 0;
    for (const auto& layer : net.layers())
        if (!is_linear(layer.activation)) ++nonlinear;
    const auto& given = config.taylor_orders;
    if (given.size() > 1 && given.size() != nonlinear)
        throw ValidationError("got " + std::to_string(given.size()) + " Taylor orders for " + std::to_string(nonlinear) +
                              " nonlinear layers");
    std::vector<int> orders;
    orders.reserve(net.depth());
    std::size_t k = 0;
    for (const auto& layer : net.layers()) {
        if (is_linear(layer.activation)) {
            orders.push_back(1);
            continue;
        }
        int q = default_hidden_taylor_order;
        if (given.size() == 1) q = given.front();
        else if (!given.empty()) q = given[k];
        ++k;
        if (q < 1) throw ValidationError("Taylor order must be at least 1 for nonlinear layers");
        if (q > default_max_taylor_order)
            throw ValidationError("Taylor order " + std::to_string(q) + " exceeds the cap of " +
                                  std::to_string(default_max_taylor_order));
        orders.push_back(q);
    }
    return orders;
}

std::vector<int> derive_order_schedule(const TransformConfig& config, const NetworkSpec& net) {
    if (config.max_order < 1) throw ValidationError("maximum order must be at least 1");
    const auto orders = resolve_taylor_orders(config, net);
    std::vector<int> caps;
    caps.reserve(orders.size());
    long running = 1;
    for (std::size_t l = 0; l < orders.size(); ++l) {
        if (!is_linear(net.layers()[l].activation)) running = std::min<long>(config.max_order, running * orders[l]);
        caps.push_back(static_cast<int>(running));
    }
    return caps;
}

ExpansionPlan::ExpansionPlan(int p, int max_order, const PartitionCache& cache)
    : p_(p), max_order_(max_order), labels_(full_labels(p, max_order)), terms_(labels_.size()) {
    if (cache.p() < p || cache.max_order() < max_order)
        throw ValidationError("partition cache does not cover the requested label space");
    std::map<std::vector<int>, std::size_t> row_of;
    for (std::size_t r = 0; r < labels_.size(); ++r) row_of.emplace(labels_[r].indices(), r);

    for (std::size_t r = 1; r < labels_.size(); ++r) {
        for (const auto& part : partitions_for_label(cache, labels_[r])) {
            Term term;
            term.max_block_order = 0;
            std::vector<std::size_t> rows;
            for (const auto& block : part.blocks) {
                rows.push_back(row_of.at(block.elements()));
                term.max_block_order = std::max(term.max_block_order, block.size());
            }
            // j! / prod over groups of identical blocks of (group size)!
            std::vector<std::size_t> sorted = rows;
            std::sort(sorted.begin(), sorted.end());
            double multinomial = 1.0;
            std::size_t run = 0;
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                run = (i > 0 && sorted[i] == sorted[i - 1]) ? run + 1 : 1;
                multinomial *= static_cast<double>(i + 1) / static_cast<double>(run);
            }
            term.multinomial = multinomial;
            term.block_rows = std::move(rows);
            terms_[r].push_back(std::move(term));
        }
    }
}

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

void activation_channel(const Polynomial& in, Matrix& out, std::size_t ch, const std::vector<double>& a,
                        int in_order, int order_cap, const ExpansionPlan& plan) {
    const int q = static_cast<int>(a.size()) - 1;
    const auto& vin = in.values();
    const double b0 = vin(plan.intercept_row(), ch);

    // weight[j] multiplies every product of exactly j non-intercept blocks.
    std::vector<double> weight(static_cast<std::size_t>(q) + 1, 0.0);
    for (int j = 0; j <= q; ++j) {
        double acc = 0.0;
        double power = 1.0;
        for (int n = j; n <= q; ++n) {
            acc += a[static_cast<std::size_t>(n)] * binomial(n, j) * power;
            power *= b0;
        }
        weight[static_cast<std::size_t>(j)] = acc;
    }

    out(plan.intercept_row(), ch) = weight[0];
    const auto& labels = plan.labels();
    for (std::size_t r = 1; r < labels.size(); ++r) {
        if (static_cast<int>(labels[r].order()) > order_cap) {
            out(r, ch) = 0.0;
            continue;
        }
        double acc = 0.0;
        for (const auto& term : plan.terms(r)) {
            const std::size_t j = term.block_rows.size();
            if (j > static_cast<std::size_t>(q) || term.max_block_order > in_order) continue;
            double prod = term.multinomial * weight[j];
            for (std::size_t br : term.block_rows) prod *= vin(br, ch);
            acc += prod;
        }
        out(r, ch) = acc;
    }
}

}  // namespace

Polynomial activation_step(const Polynomial& in_poly, Activation act, int q, int in_order, int order_cap,
                           const ExpansionPlan& plan, Execution exec) {
    if (in_poly.p() != plan.p() || in_poly.labels() != plan.labels())
        throw ValidationError("activation step input does not use the plan's label space");
    if (order_cap > plan.max_order())
        throw ValidationError("order cap " + std::to_string(order_cap) + " exceeds the label space order " +
                              std::to_string(plan.max_order()));
    if (is_linear(act)) return in_poly;
    if (q < 1) throw ValidationError("Taylor order must be at least 1 for nonlinear activations");
    const auto coeffs = taylor_coefficients(act, q).coeffs;

    Matrix out(in_poly.size(), in_poly.channels());
    const auto channels = static_cast<long>(in_poly.channels());
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long c = 0; c < channels; ++c)
            activation_channel(in_poly, out, static_cast<std::size_t>(c), coeffs, in_order, order_cap, plan);
    } else {
        for (long c = 0; c < channels; ++c)
            activation_channel(in_poly, out, static_cast<std::size_t>(c), coeffs, in_order, order_cap, plan);
    }
    return Polynomial(in_poly.p(), in_poly.max_order(), in_poly.labels(), std::move(out));
}

Polynomial activation_step(const Polynomial& in_poly, Activation act, int q, int in_order, int order_cap,
                           const PartitionCache& cache) {
    const ExpansionPlan plan(in_poly.p(), in_poly.max_order(), cache);
    return activation_step(in_poly, act, q, in_order, order_cap, plan, Execution::serial);
}

TransformResult transform(const NetworkSpec& net, const TransformConfig& config) {
    validate(net.layers());
    const auto taylor = resolve_taylor_orders(config, net);
    const auto caps = derive_order_schedule(config, net);
    const int p = static_cast<int>(net.input_dim());
    const int max_order = config.max_order;

    const auto cache = PartitionCache::build(p, max_order, config.partition_ceiling);
    const ExpansionPlan plan(p, max_order, cache);

    // Layer-1 input: the affine synaptic potentials, orders 0 and 1.
    const auto& w1 = net.layers().front().weights;
    Polynomial in = Polynomial::zeros(p, max_order, w1.cols());
    for (std::size_t r = 0; r <= static_cast<std::size_t>(p); ++r)
        for (std::size_t c = 0; c < w1.cols(); ++c) in.values()(r, c) = w1(r, c);

    TransformResult result;
    int order = 1;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        const auto& layer = net.layers()[l];
        Polynomial out = activation_step(in, layer.activation, taylor[l], order, caps[l], plan, config.execution);
        order = caps[l];
        if (config.keep_layers) result.layers.push_back({in, out});
        if (l + 1 == net.depth()) {
            result.polynomial = std::move(out);
            break;
        }
        in = linear_combine(out, net.layers()[l + 1].weights, config.execution);
    }
    return result;
}

}  // namespace nn2poly
