#pragma once

namespace nn2poly {

/// Selects between the OpenMP kernels and their serial reference versions.
/// Both produce bit-identical results; the serial path exists for testing
/// and benchmarking.
enum class Execution { serial, parallel };

/// Number of threads the parallel kernels will use (1 without OpenMP).
int max_threads() noexcept;

}  // namespace nn2poly
