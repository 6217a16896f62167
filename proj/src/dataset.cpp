#include "nn2poly/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "nn2poly/errors.hpp"

namespace nn2poly {

DatasetSpec gen_poly_data(const Polynomial& poly, std::size_t n, double noise_sd, std::uint64_t seed) {
    if (n == 0) throw ValidationError("sample size must be at least 1");
    if (!(noise_sd >= 0.0)) throw ValidationError("noise standard deviation must be non-negative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    DatasetSpec data;
    data.x = Matrix(n, static_cast<std::size_t>(poly.p()));
    for (double& v : data.x.flat()) v = normal(rng);
    data.y = eval_poly(poly, data.x, Execution::serial);
    if (noise_sd > 0.0)
        for (double& v : data.y.flat()) v += noise_sd * normal(rng);
    return data;
}

DatasetSpec gen_blob_data(std::size_t n, std::size_t p, std::size_t classes, std::uint64_t seed, double separation) {
    if (n == 0 || p == 0 || classes < 2) throw ValidationError("blob data needs n >= 1, p >= 1 and at least 2 classes");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    // Centers ~ N(0, separation^2), redrawn until pairwise distances reach
    // `separation`.
    Matrix centers(classes, p);
    for (std::size_t k = 0; k < classes; ++k) {
        for (int attempt = 0;; ++attempt) {
            for (std::size_t d = 0; d < p; ++d) centers(k, d) = separation * normal(rng);
            bool ok = true;
            for (std::size_t o = 0; o < k && ok; ++o) {
                double dist2 = 0;
                for (std::size_t d = 0; d < p; ++d) dist2 += std::pow(centers(k, d) - centers(o, d), 2);
                ok = std::sqrt(dist2) >= separation;
            }
            if (ok || attempt > 1000) break;
        }
    }
    DatasetSpec data;
    data.x = Matrix(n, p);
    data.y = Matrix(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = i % classes;
        data.y(i, 0) = static_cast<double>(k);
        for (std::size_t d = 0; d < p; ++d) data.x(i, d) = centers(k, d) + normal(rng);
    }
    return data;
}

Matrix scale_columns(const Matrix& m, ColumnScaling& record) {
    record.center.assign(m.cols(), 0.0);
    record.scale.assign(m.cols(), 0.0);
    Matrix out(m.rows(), m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            lo = std::min(lo, m(r, c));
            hi = std::max(hi, m(r, c));
        }
        if (!(hi > lo)) throw ValidationError("column " + std::to_string(c + 1) + " is constant and cannot be scaled");
        record.center[c] = lo + (hi - lo) / 2.0;
        record.scale[c] = (hi - lo) / 2.0;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            // clamp the rounding error at the endpoints
            out(r, c) = std::clamp((m(r, c) - record.center[c]) / record.scale[c], -1.0, 1.0);
        }
    }
    return out;
}

DatasetSpec scale_to_unit(const DatasetSpec& data, bool include_response) {
    DatasetSpec out;
    ColumnScaling xs;
    out.x = scale_columns(data.x, xs);
    out.x_scaling = xs;
    if (include_response) {
        ColumnScaling ys;
        out.y = scale_columns(data.y, ys);
        out.y_scaling = ys;
    } else {
        out.y = data.y;
    }
    return out;
}

DatasetSpec take_rows(const DatasetSpec& data, const std::vector<std::size_t>& rows) {
    DatasetSpec out;
    out.x = Matrix(rows.size(), data.x.cols());
    out.y = Matrix(rows.size(), data.y.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto xs = data.x.row(rows[i]);
        std::copy(xs.begin(), xs.end(), out.x.row(i).begin());
        auto ys = data.y.row(rows[i]);
        std::copy(ys.begin(), ys.end(), out.y.row(i).begin());
    }
    out.x_scaling = data.x_scaling;
    out.y_scaling = data.y_scaling;
    return out;
}

Split train_test_split(const DatasetSpec& data, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ValidationError("train fraction must be in (0, 1)");
    std::vector<std::size_t> idx(data.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(data.rows())));
    std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<long>(n_train));
    std::vector<std::size_t> test(idx.begin() + static_cast<long>(n_train), idx.end());
    return {take_rows(data, train), take_rows(data, test)};
}

std::vector<int> class_labels(const Matrix& y) {
    if (y.cols() != 1) throw ValidationError("class labels must be a single response column");
    std::vector<int> labels(y.rows());
    for (std::size_t i = 0; i < y.rows(); ++i) {
        const double v = y(i, 0);
        if (!(v >= 0.0) || v != std::floor(v) || v > 1e6)
            throw ValidationError("response value " + std::to_string(v) + " in row " + std::to_string(i + 1) +
                                  " is not a class index");
        labels[i] = static_cast<int>(v);
    }
    return labels;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

Matrix read_table(const std::filesystem::path& path, std::vector<std::string>* header) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path.string() + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto head = split_line(line);
    const std::size_t cols = head.size();
    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != cols)
            throw ValidationError(path.string() + ": row " + std::to_string(rows + 2) + " has " +
                                  std::to_string(cells.size()) + " fields, expected " + std::to_string(cols));
        for (const auto& cell : cells) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw ValidationError(path.string() + ": cannot parse '" + cell + "' in row " + std::to_string(rows + 2));
            values.push_back(v);
        }
        ++rows;
    }
    Matrix m(rows, cols);
    std::copy(values.begin(), values.end(), m.data());
    if (header) *header = std::move(head);
    return m;
}

}  // namespace

DatasetSpec read_csv(const std::filesystem::path& path, std::size_t responses) {
    const Matrix table = read_table(path, nullptr);
    if (responses >= table.cols())
        throw ValidationError(path.string() + " has " + std::to_string(table.cols()) + " columns; need features plus " +
                              std::to_string(responses) + " response column(s)");
    const std::size_t p = table.cols() - responses;
    DatasetSpec data;
    data.x = Matrix(table.rows(), p);
    data.y = Matrix(table.rows(), responses);
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < p; ++c) data.x(r, c) = table(r, c);
        for (std::size_t c = 0; c < responses; ++c) data.y(r, c) = table(r, p + c);
    }
    return data;
}

namespace {

void append_row(std::ostringstream& os, std::span<const double> row, bool leading_comma) {
    for (std::size_t c = 0; c < row.size(); ++c) {
        if (c > 0 || leading_comma) os << ',';
        os << row[c];
    }
}

}  // namespace

void write_csv(const DatasetSpec& data, const std::filesystem::path& path) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t c = 0; c < data.x.cols(); ++c) os << (c ? "," : "") << 'x' << c + 1;
    if (data.y.cols() == 1) {
        os << ",y";
    } else {
        for (std::size_t c = 0; c < data.y.cols(); ++c) os << ",y" << c + 1;
    }
    os << '\n';
    for (std::size_t r = 0; r < data.rows(); ++r) {
        append_row(os, data.x.row(r), false);
        append_row(os, data.y.row(r), data.x.cols() > 0);
        os << '\n';
    }
    write_file_atomic(path, os.str());
}

void write_matrix_csv(const Matrix& m, const std::vector<std::string>& header, const std::filesystem::path& path) {
    if (header.size() != m.cols()) throw ValidationError("CSV header does not match the column count");
    std::ostringstream os;
    os.precision(17);
    for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
    os << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        append_row(os, m.row(r), false);
        os << '\n';
    }
    write_file_atomic(path, os.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + path.string());
        out << contents;
        out.flush();
        if (!out) throw ValidationError("failed writing " + path.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw ValidationError("cannot move output into place at " + path.string());
    }
}

}  // namespace nn2poly
