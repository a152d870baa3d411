#pragma once

#include "ldr/config.hpp"
#include "ldr/network.hpp"
#include "ldr/rng.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ldr {

/// Scalar target function on the domain ball. Planted targets own the
/// generating model.
class Target {
public:
    Target(std::function<double(const Vec&)> fn, std::string description)
        : fn_(std::move(fn)), description_(std::move(description)) {}

    double operator()(const Vec& x) const { return fn_(x); }
    const std::string& description() const { return description_; }

private:
    std::function<double(const Vec&)> fn_;
    std::string description_;
};

Target make_target(const TargetSpec& spec, Index n, PairPtr pair, Activation activation);

/// Evaluation dataset drawn uniformly from the ball B_radius.
struct Dataset {
    std::vector<Vec> x;
    std::vector<double> y;
};

Dataset sample_dataset(const Target& target, Index count, Index n, double radius,
                       std::uint64_t seed);

double mean_squared_error(const NetworkModel& model, const Dataset& data);

struct FitOptions {
    double learning_rate = 0.05;
    Index epochs = 2000;
    Index batch = 32;
    Index train_samples = 1024;
    double init_scale = 0.3;
    /// Record a loss-history row every this many epochs (plus the last).
    Index history_stride = 20;
};

struct HistoryRow {
    Index epoch;
    double train_mse;
    double val_mse;
};

struct FitResult {
    std::shared_ptr<NetworkModel> model;
    double train_mse = 0.0;
    double val_mse = 0.0;
    std::vector<HistoryRow> history;
    bool ok = false;
    std::string error;
};

/// Plain minibatch SGD on one freshly initialized model. Deterministic for
/// a fixed seed. A non-finite loss aborts the fit (ok = false).
FitResult fit_single(PairPtr pair, Index k, Index r, Activation activation, const Target& target,
                     Index n, double radius, const FitOptions& options, std::uint64_t seed,
                     const Dataset& val_set, const NetworkModel* warm_start = nullptr);

struct BestOfResult {
    FitResult best;
    std::vector<double> restart_val_mse;
    Index best_restart = -1;
};

/// Best of `restarts` independent fits (selected by validation MSE).
BestOfResult fit_best_of(PairPtr pair, Index k, Index r, Activation activation,
                         const Target& target, Index n, double radius, const FitOptions& options,
                         Index restarts, std::uint64_t seed, const Dataset& val_set,
                         const NetworkModel* warm_start = nullptr);

struct DecayRow {
    Index k = 0;
    double best_mse = 0.0;
    double bound = 0.0;  // 4 r^2 C / k with the surrogate C
    bool ok = false;
    std::string note;
};

struct DecayReport {
    std::vector<DecayRow> rows;
    double slope = 0.0;        // log(best_mse) vs log(k) least-squares slope
    double c_surrogate = 0.0;  // Monte-Carlo mean of |x|·|f(x)|
    double radius = 0.0;
};

/// Error-decay experiment: best-of-restarts training at every k in the
/// grid, evaluated by Monte-Carlo integrated squared error on a shared
/// sample of the ball. Failed grid points are flagged, not fatal.
DecayReport run_decay(const ExperimentConfig& config);

/// Training command: fits k = k_grid.front() blocks with the configured
/// budget and returns the best restart plus its loss history.
BestOfResult run_train(const ExperimentConfig& config);

/// Least-squares slope of log(y) against log(x); requires positive values.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ldr
