#include "ldr/bench.hpp"

#include "ldr/rng.hpp"
#include "ldr/structured.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ldr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Keeps the optimizer from discarding timed work.
volatile double g_bench_sink = 0.0;

template <typename Fn>
double time_median_per_call(Fn&& fn, double sample_seconds, Index samples) {
    // Calibrate repetitions so one sample is long enough to trust.
    Index reps = 1;
    for (;;) {
        const auto start = Clock::now();
        for (Index i = 0; i < reps; ++i) fn();
        const double elapsed = seconds_since(start);
        if (elapsed >= sample_seconds || reps >= (Index{1} << 24)) break;
        const double factor = elapsed > 0.0 ? sample_seconds / elapsed : 16.0;
        reps = std::max(reps + 1, static_cast<Index>(static_cast<double>(reps) *
                                                     std::min(16.0, factor * 1.2)));
    }
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(samples));
    for (Index s = 0; s < samples; ++s) {
        const auto start = Clock::now();
        for (Index i = 0; i < reps; ++i) fn();
        times.push_back(seconds_since(start) / static_cast<double>(reps));
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

// y_i = sum_j c[(i-j) mod n] x_j without materializing the matrix.
void dense_circulant_product(const Vec& c, const Vec& x, Vec& y) {
    const Index n = c.size();
    for (Index i = 0; i < n; ++i) {
        double acc = 0.0;
        // split at j = i to avoid the mod in the inner loops
        for (Index j = 0; j <= i; ++j) acc += c[i - j] * x[j];
        for (Index j = i + 1; j < n; ++j) acc += c[n + i - j] * x[j];
        y[i] = acc;
    }
}

}  // namespace

std::vector<BenchRow> run_bench(const std::vector<Index>& sizes, const BenchOptions& options) {
    require(!sizes.empty(), "bench: no sizes given");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        require(sizes[i] > sizes[i - 1], "bench: sizes must be sorted ascending");

    std::vector<BenchRow> rows;
    for (Index n : sizes) {
        Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(n)));
        const Vec c = rng.normal_vec(n);
        const Vec x = rng.normal_vec(n);

        double dense_med = 0.0;
        if (options.measure_dense) {
            Vec y(n);
            dense_med = time_median_per_call(
                [&] {
                    dense_circulant_product(c, x, y);
                    g_bench_sink = g_bench_sink + y[0];
                },
                options.sample_seconds, std::min<Index>(options.samples, 3));
        }

        const StructuredMatrix circ = StructuredMatrix::circulant(c);
        BenchRow crow;
        crow.family = "circulant";
        crow.n = n;
        crow.structured_params = n;
        crow.dense_params = n * n;
        crow.dense_seconds = dense_med;
        crow.structured_seconds = time_median_per_call(
            [&] {
                const Vec y = circ.matvec(x);
                g_bench_sink = g_bench_sink + y[0];
            },
            options.sample_seconds, options.samples);
        crow.reps = options.samples;
        rows.push_back(crow);

        Vec col = rng.normal_vec(n);
        Vec trow_vec = rng.normal_vec(n);
        trow_vec[0] = col[0];
        const StructuredMatrix toep = StructuredMatrix::toeplitz(col, trow_vec);
        BenchRow trow;
        trow.family = "toeplitz";
        trow.n = n;
        trow.structured_params = 2 * n;
        trow.dense_params = n * n;
        trow.dense_seconds = dense_med;  // same O(n^2) inner-loop cost
        trow.structured_seconds = time_median_per_call(
            [&] {
                const Vec y = toep.matvec(x);
                g_bench_sink = g_bench_sink + y[0];
            },
            options.sample_seconds, options.samples);
        trow.reps = options.samples;
        rows.push_back(trow);
    }
    return rows;
}

}  // namespace ldr
