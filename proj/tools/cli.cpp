#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "nn2poly/dataset.hpp"
#include "nn2poly/errors.hpp"
#include "nn2poly/network.hpp"
#include "nn2poly/trainer.hpp"
#include "nn2poly/transform.hpp"

namespace nn2poly::cli {

namespace {

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("cannot parse " + path + ": " + e.what());
    }
}

std::filesystem::path sibling(const std::string& path, const std::string& suffix) {
    std::filesystem::path p(path);
    auto stem = p.stem().string();
    return p.parent_path() / (stem + suffix + p.extension().string());
}

// First `p` columns of a CSV; trailing response columns are ignored.
Matrix read_features(const std::string& path, std::size_t p) {
    const Matrix all = read_csv(path, 0).x;
    if (all.cols() < p)
        throw ValidationError(path + " has " + std::to_string(all.cols()) + " columns but " + std::to_string(p) +
                              " features are expected");
    Matrix x(all.rows(), p);
    for (std::size_t r = 0; r < all.rows(); ++r)
        for (std::size_t c = 0; c < p; ++c) x(r, c) = all(r, c);
    return x;
}

void print_order_summary(std::ostream& out, const Polynomial& poly) {
    const auto counts = label_counts_by_order(poly);
    out << "terms: " << poly.size() << '\n' << "terms by order:";
    for (std::size_t k = 0; k < counts.size(); ++k) out << ' ' << (k + 1) << '=' << counts[k];
    out << "  (intercept counted with order 1)\n";
}

struct GenerateOptions {
    std::string poly;
    std::size_t blobs = 0;
    std::size_t features = 4;
    std::size_t n = 0;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    bool scale = false;
    bool split = false;
    std::string train_out, test_out;
};

int cmd_generate(const GenerateOptions& o, std::ostream& out) {
    if (o.n == 0) throw ValidationError("--n must be at least 1");
    DatasetSpec data;
    bool classification = false;
    if (o.blobs > 0) {
        data = gen_blob_data(o.n, o.features, o.blobs, o.seed);
        classification = true;
    } else {
        if (o.poly.empty()) throw ValidationError("generate needs --poly or --blobs");
        data = gen_poly_data(load_polynomial(o.poly), o.n, o.noise, o.seed);
    }
    if (o.scale) data = scale_to_unit(data, !classification);
    write_csv(data, o.out);
    out << "wrote " << data.rows() << " rows (" << data.x.cols() << " features, " << data.y.cols()
        << " response) to " << o.out << '\n';
    if (o.split) {
        const auto parts = train_test_split(data, 0.75, o.seed);
        const auto train_path = o.train_out.empty() ? sibling(o.out, "_train") : std::filesystem::path(o.train_out);
        const auto test_path = o.test_out.empty() ? sibling(o.out, "_test") : std::filesystem::path(o.test_out);
        write_csv(parts.train, train_path);
        write_csv(parts.test, test_path);
        out << "split: " << parts.train.rows() << " train rows -> " << train_path.string() << ", "
            << parts.test.rows() << " test rows -> " << test_path.string() << '\n';
    }
    return ok;
}

struct TrainOptions {
    std::string data;
    std::string arch;
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double lr = 1e-3;
    std::string optimizer = "adam";
    std::string loss = "mse";
    std::string constraint = "l1_norm";
    std::uint64_t seed = 0;
    double validation_split = 0.0;
    std::string out;
    std::string history;
};

int cmd_train(const TrainOptions& o, std::ostream& out) {
    TrainConfig cfg;
    cfg.epochs = o.epochs;
    cfg.batch_size = o.batch_size;
    cfg.learning_rate = o.lr;
    cfg.optimizer = parse_optimizer(o.optimizer);
    cfg.loss = parse_loss(o.loss);
    cfg.constraint = parse_constraint(o.constraint);
    cfg.seed = o.seed;
    cfg.validation_split = o.validation_split;
    const auto arch = parse_architecture(o.arch);
    const DatasetSpec data = read_csv(o.data, 1);
    if (data.x.cols() == 0) throw ValidationError(o.data + " has no feature columns");
    if (cfg.loss == Loss::softmax_cross_entropy) class_labels(data.y);
    const auto result = train(data, arch, cfg);
    save_network(result.network, o.out);
    if (!o.history.empty()) write_file_atomic(o.history, history_csv(result.history));
    out << "trained " << result.history.size() << " epochs";
    if (!result.history.empty()) out << ", final train loss " << result.history.back().train_loss;
    out << "\nwrote network to " << o.out << '\n';
    return ok;
}

struct ExtractOptions {
    std::string network;
    int max_order = default_max_order;
    std::vector<int> taylor;
    bool keep_layers = false;
    std::string out;
};

int cmd_extract(const ExtractOptions& o, std::ostream& out) {
    const NetworkSpec net = load_network(o.network);
    TransformConfig cfg;
    cfg.max_order = o.max_order;
    cfg.taylor_orders = o.taylor;
    cfg.keep_layers = o.keep_layers;
    const auto result = transform(net, cfg);
    std::string text;
    if (o.keep_layers) {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t l = 0; l < result.layers.size(); ++l)
            arr.push_back({{"layer", l + 1}, {"input", to_json(result.layers[l].input)},
                           {"output", to_json(result.layers[l].output)}});
        arr.push_back({{"layer", "final"}, {"output", to_json(result.polynomial)}});
        text = arr.dump(1);
    } else {
        text = to_json(result.polynomial).dump(1);
    }
    write_file_atomic(o.out, text + "\n");
    print_order_summary(out, result.polynomial);
    out << "channels: " << result.polynomial.channels() << '\n';
    if (o.keep_layers) out << "layer entries: " << result.layers.size() << " + final\n";
    out << "wrote polynomial to " << o.out << '\n';
    return ok;
}

struct PredictOptions {
    std::string poly;
    std::string data;
    std::string postprocess = "none";
    std::string out;
};

int cmd_predict(const PredictOptions& o, std::ostream& out) {
    const Polynomial poly = load_polynomial(o.poly);
    const Matrix x = read_features(o.data, static_cast<std::size_t>(poly.p()));
    const Matrix pred = eval_poly(poly, x);
    if (o.postprocess == "none") {
        std::vector<std::string> header;
        for (std::size_t c = 0; c < pred.cols(); ++c)
            header.push_back(pred.cols() == 1 ? "prediction" : "prediction" + std::to_string(c + 1));
        write_matrix_csv(pred, header, o.out);
    } else if (o.postprocess == "softmax_argmax") {
        const auto classes = softmax_argmax(pred);
        Matrix m(classes.size(), 1);
        for (std::size_t i = 0; i < classes.size(); ++i) m(i, 0) = classes[i];
        write_matrix_csv(m, {"class"}, o.out);
    } else {
        throw ValidationError("unknown postprocess '" + o.postprocess + "' (expected none or softmax_argmax)");
    }
    out << "wrote " << pred.rows() << " predictions to " << o.out << '\n';
    return ok;
}

double r_squared(const std::vector<double>& ref, const std::vector<double>& est) {
    double mean = 0.0;
    for (double v : ref) mean += v;
    mean /= static_cast<double>(ref.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        ss_res += (ref[i] - est[i]) * (ref[i] - est[i]);
        ss_tot += (ref[i] - mean) * (ref[i] - mean);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
    return 1.0 - ss_res / ss_tot;
}

struct CompareOptions {
    std::string network;
    std::string poly;
    std::string data;
    bool classification = false;
};

int cmd_compare(const CompareOptions& o, std::ostream& out) {
    const Polynomial poly = load_polynomial(o.poly);
    const Matrix x = read_features(o.data, static_cast<std::size_t>(poly.p()));
    Matrix reference;
    if (o.network.empty()) {
        reference = eval_poly(poly, x);
    } else {
        const NetworkSpec net = load_network(o.network);
        if (net.input_dim() != static_cast<std::size_t>(poly.p()) || net.output_dim() != poly.channels())
            throw ValidationError("network and polynomial shapes differ");
        reference = forward(net, x);
    }
    const Matrix est = eval_poly(poly, x);
    const std::size_t c = est.cols();

    out << std::setprecision(10);
    out << "n_test: " << x.rows() << '\n';
    std::vector<double> all_ref(reference.flat().begin(), reference.flat().end());
    std::vector<double> all_est(est.flat().begin(), est.flat().end());
    double mae = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < all_ref.size(); ++i) {
        const double d = std::abs(all_ref[i] - all_est[i]);
        mae += d;
        max_abs = std::max(max_abs, d);
    }
    if (!all_ref.empty()) mae /= static_cast<double>(all_ref.size());
    out << "r_squared: " << (all_ref.empty() ? 1.0 : r_squared(all_ref, all_est)) << '\n';
    out << "mae: " << mae << '\n';
    out << "max_abs_diff: " << max_abs << '\n';
    if (c > 1) {
        for (std::size_t j = 0; j < c; ++j) {
            const auto rc = reference.col(j), ec = est.col(j);
            double m = 0.0, mx = 0.0;
            for (std::size_t i = 0; i < rc.size(); ++i) {
                m += std::abs(rc[i] - ec[i]);
                mx = std::max(mx, std::abs(rc[i] - ec[i]));
            }
            if (!rc.empty()) m /= static_cast<double>(rc.size());
            out << "channel " << j + 1 << ": r_squared: " << (rc.empty() ? 1.0 : r_squared(rc, ec)) << " mae: " << m
                << " max_abs_diff: " << mx << '\n';
        }
    }
    if (o.classification) {
        const auto a = softmax_argmax(reference);
        const auto b = softmax_argmax(est);
        std::vector<std::vector<std::size_t>> confusion(c, std::vector<std::size_t>(c, 0));
        std::size_t agree = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            confusion[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])]++;
            agree += a[i] == b[i];
        }
        out << "agreement: " << (a.empty() ? 1.0 : static_cast<double>(agree) / static_cast<double>(a.size())) << '\n';
        out << "confusion:  # rows: network class, columns: polynomial class\n";
        for (const auto& row : confusion) {
            out << ' ';
            for (std::size_t v : row) out << ' ' << v;
            out << '\n';
        }
    }
    return ok;
}

struct ReportOptions {
    std::string poly;
    std::size_t n = 10;
    std::string csv;
};

int cmd_report(const ReportOptions& o, std::ostream& out) {
    if (o.n < 1) throw ValidationError("--n must be at least 1");
    const Polynomial poly = load_polynomial(o.poly);
    const auto ranked = top_n_coefficients(poly, o.n);
    std::ostringstream csv;
    csv.precision(17);
    csv << "channel,rank,term,value,sign\n";
    for (std::size_t c = 0; c < ranked.size(); ++c) {
        out << "channel " << c + 1 << '\n';
        out << "  rank  term                 value  sign\n";
        for (std::size_t r = 0; r < ranked[c].size(); ++r) {
            const auto& t = ranked[c][r];
            const char sign = t.value < 0 ? '-' : '+';
            out << "  " << std::setw(4) << r + 1 << "  " << std::left << std::setw(16) << to_string(t.label)
                << std::right << std::setw(11) << std::setprecision(5) << t.value << "  " << sign << '\n';
            csv << c + 1 << ',' << r + 1 << ',' << to_string(t.label) << ',' << t.value << ',' << sign << '\n';
        }
    }
    if (!o.csv.empty()) write_file_atomic(o.csv, csv.str());
    return ok;
}

int cmd_inspect(const std::string& path, std::ostream& out) {
    const NetworkSpec net = load_network(path);
    out << "input_dim: " << net.input_dim() << '\n';
    out << std::setprecision(6);
    for (std::size_t l = 0; l < net.depth(); ++l) {
        const auto& layer = net.layers()[l];
        const auto l1 = column_norms(layer.weights, 1);
        const auto l2 = column_norms(layer.weights, 2);
        const double max1 = *std::max_element(l1.begin(), l1.end());
        const double max2 = *std::max_element(l2.begin(), l2.end());
        out << "layer " << l + 1 << ": " << activation_name(layer.activation) << ' ' << layer.weights.rows() << 'x'
            << layer.weights.cols() << " max_l1_norm=" << max1 << " max_l2_norm=" << max2
            << " l1_all_le_1=" << (max1 <= 1.0 ? "TRUE" : "FALSE") << '\n';
    }
    return ok;
}

}  // namespace

Polynomial load_polynomial(const std::string& path) {
    const auto j = read_json(path);
    if (j.is_array()) {
        if (j.empty()) throw ValidationError(path + " holds an empty layer list");
        const auto& last = j.back();
        if (!last.contains("output")) throw ValidationError(path + ": last layer entry has no output polynomial");
        return polynomial_from_json(last.at("output"));
    }
    return polynomial_from_json(j);
}

std::vector<int> softmax_argmax(const Matrix& logits) {
    std::vector<int> out(logits.rows());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        const auto row = logits.row(i);
        const double mx = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (double v : row) z += std::exp(v - mx);
        std::size_t best = 0;
        double best_p = -1.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double prob = std::exp(row[j] - mx) / z;
            if (prob > best_p) {
                best_p = prob;
                best = j;
            }
        }
        out[i] = static_cast<int>(best);
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Convert trained MLPs into equivalent polynomials"};
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* g = app.add_subcommand("generate", "Sample a dataset from a polynomial (or Gaussian blobs)");
    g->add_option("--poly", gen.poly, "Polynomial file");
    g->add_option("--blobs", gen.blobs, "Generate this many Gaussian classes instead");
    g->add_option("--features", gen.features, "Feature count for --blobs");
    g->add_option("--n", gen.n, "Rows")->required();
    g->add_option("--noise", gen.noise, "Noise standard deviation");
    g->add_option("--seed", gen.seed, "RNG seed")->required();
    g->add_option("--out", gen.out, "Output CSV")->required();
    g->add_flag("--scale", gen.scale, "Scale columns to [-1, 1]");
    g->add_flag("--split", gen.split, "Also write a 0.75/0.25 train/test split");
    g->add_option("--train-out", gen.train_out, "Train split path (default <out>_train.csv)");
    g->add_option("--test-out", gen.test_out, "Test split path (default <out>_test.csv)");

    TrainOptions tr;
    auto* t = app.add_subcommand("train", "Train a constrained MLP");
    t->add_option("--data", tr.data, "Training CSV (response last)")->required();
    t->add_option("--arch", tr.arch, "Layers, e.g. 50:tanh,100:tanh,1:linear")->required();
    t->add_option("--epochs", tr.epochs);
    t->add_option("--batch-size", tr.batch_size);
    t->add_option("--lr", tr.lr, "Learning rate");
    t->add_option("--optimizer", tr.optimizer, "adam or sgd");
    t->add_option("--loss", tr.loss, "mse or softmax_cross_entropy");
    t->add_option("--constraint", tr.constraint, "none, l1_norm or l2_norm");
    t->add_option("--seed", tr.seed)->required();
    t->add_option("--validation-split", tr.validation_split);
    t->add_option("--out", tr.out, "Network file")->required();
    t->add_option("--history", tr.history, "Per-epoch loss CSV");

    ExtractOptions ex;
    auto* e = app.add_subcommand("extract", "Compute the polynomial representation of a network");
    e->add_option("--network", ex.network)->required();
    e->add_option("--max-order", ex.max_order);
    e->add_option("--taylor-order", ex.taylor, "One value, or one per nonlinear layer")->delimiter(',');
    e->add_flag("--keep-layers", ex.keep_layers, "Also write every layer's input/output polynomials");
    e->add_option("--out", ex.out)->required();

    PredictOptions pr;
    auto* p = app.add_subcommand("predict", "Evaluate a polynomial on a CSV");
    p->add_option("--poly", pr.poly)->required();
    p->add_option("--data", pr.data, "CSV whose first p columns are the features")->required();
    p->add_option("--postprocess", pr.postprocess, "none or softmax_argmax");
    p->add_option("--out", pr.out)->required();

    CompareOptions co;
    auto* c = app.add_subcommand("compare", "Compare network and polynomial predictions");
    c->add_option("--network", co.network, "Network file (omit to compare the polynomial with itself)");
    c->add_option("--poly", co.poly)->required();
    c->add_option("--data", co.data)->required();
    c->add_flag("--classification", co.classification);

    ReportOptions re;
    auto* r = app.add_subcommand("report", "Rank the largest coefficients");
    r->add_option("--poly", re.poly)->required();
    r->add_option("--n", re.n);
    r->add_option("--csv", re.csv, "Also write the ranking as CSV");

    std::string inspect_path;
    auto* in = app.add_subcommand("inspect", "Print layer shapes and column norms");
    in->add_option("--network", inspect_path)->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& ex) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& ex) {
        err << "error: " << ex.what() << '\n';
        return validation_error;
    }

    try {
        if (*g) return cmd_generate(gen, out);
        if (*t) return cmd_train(tr, out);
        if (*e) return cmd_extract(ex, out);
        if (*p) return cmd_predict(pr, out);
        if (*c) return cmd_compare(co, out);
        if (*r) return cmd_report(re, out);
        if (*in) return cmd_inspect(inspect_path, out);
    } catch (const ValidationError& ex) {
        err << "error: " << ex.what() << '\n';
        return validation_error;
    } catch (const NumericError& ex) {
        err << "numeric failure: " << ex.what() << '\n';
        return numeric_error;
    } catch (const ResourceError& ex) {
        err << "resource limit: " << ex.what() << '\n';
        return resource_error;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return validation_error;
    }
    return ok;
}

}  // namespace nn2poly::cli
