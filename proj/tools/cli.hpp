#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nn2poly/polynomial.hpp"

namespace nn2poly::cli {

enum ExitCode : int {
    ok = 0,
    validation_error = 2,
    numeric_error = 3,
    resource_error = 4,
};

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads a polynomial file; a layered extraction file yields its final
/// polynomial.
Polynomial load_polynomial(const std::string& path);

/// Softmax followed by argmax, per row.
std::vector<int> softmax_argmax(const Matrix& logits);

}  // namespace nn2poly::cli
