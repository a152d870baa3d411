#pragma once

#include "ldr/types.hpp"

#include <cstdint>
#include <vector>

namespace ldr {

/// One benchmark row. Timing columns are volatile (excluded from
/// determinism guarantees); parameter counts are exact.
struct BenchRow {
    const char* family = "circulant";
    Index n = 0;
    Index structured_params = 0;  // n for circulant, 2n for toeplitz
    Index dense_params = 0;       // n^2
    double structured_seconds = 0.0;  // median per matvec
    double dense_seconds = 0.0;       // direct O(n^2) product, no materialization
    Index reps = 0;
};

struct BenchOptions {
    std::uint64_t seed = 1;
    /// Target duration per timing sample; repetitions auto-calibrate.
    double sample_seconds = 2e-3;
    Index samples = 5;
    bool measure_dense = true;
};

/// Median-of-samples matvec timings for circulant and toeplitz kernels at
/// each size, plus definitional parameter counts.
std::vector<BenchRow> run_bench(const std::vector<Index>& sizes, const BenchOptions& options = {});

}  // namespace ldr
