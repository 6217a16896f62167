#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nn2poly/matrix.hpp"
#include "nn2poly/polynomial.hpp"

namespace nn2poly {

/// Affine map of each column onto [-1, 1]: scaled = (x - center) / scale.
struct ColumnScaling {
    std::vector<double> center;
    std::vector<double> scale;
};

struct DatasetSpec {
    Matrix x;  // n x p
    Matrix y;  // n x c, or n x 1 of class indices
    std::optional<ColumnScaling> x_scaling;
    std::optional<ColumnScaling> y_scaling;

    std::size_t rows() const noexcept { return x.rows(); }
};

/// X ~ iid N(0, 1), Y = poly(X) + noise_sd * N(0, 1).
DatasetSpec gen_poly_data(const Polynomial& poly, std::size_t n, double noise_sd, std::uint64_t seed);

/// `classes` Gaussian blobs with unit-variance clusters around well
/// separated random centers; Y holds class indices 0..classes-1.
DatasetSpec gen_blob_data(std::size_t n, std::size_t p, std::size_t classes, std::uint64_t seed,
                          double separation = 4.0);

/// Maps every X column (and every Y column when `include_response`) so
/// that min -> -1 and max -> +1. Throws ValidationError on constant columns.
DatasetSpec scale_to_unit(const DatasetSpec& data, bool include_response = true);

/// Column-wise scaling of a single matrix.
Matrix scale_columns(const Matrix& m, ColumnScaling& record);

struct Split {
    DatasetSpec train;
    DatasetSpec test;
};

/// Seeded shuffle, then the first round(fraction * n) rows go to train.
Split train_test_split(const DatasetSpec& data, double train_fraction, std::uint64_t seed);

DatasetSpec take_rows(const DatasetSpec& data, const std::vector<std::size_t>& rows);

/// Class indices in Y (must be integral, non-negative). Throws ValidationError.
std::vector<int> class_labels(const Matrix& y);

// CSV with a header row; the last `responses` columns are Y.
DatasetSpec read_csv(const std::filesystem::path& path, std::size_t responses = 1);
void write_csv(const DatasetSpec& data, const std::filesystem::path& path);
void write_matrix_csv(const Matrix& m, const std::vector<std::string>& header,
                      const std::filesystem::path& path);

/// Writes `contents` to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace nn2poly
