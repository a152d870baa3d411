#include "ldr/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ldr {

namespace {

constexpr std::uint64_t kEvalStream = 0xe7a1ULL;
constexpr std::uint64_t kDataStream = 0xda7aULL;
constexpr std::uint64_t kInitStream = 0x1712ULL;

NetworkModel random_model(PairPtr pair, Index k, Index r, Activation activation, double scale,
                          Rng& rng) {
    LdrLayer layer(std::move(pair), k, r, activation);
    layer.randomize(rng, scale);
    const Index width = layer.output_dim();
    Readout readout;
    readout.alpha = Vec(width);
    const double alpha_scale = scale * 2.0 / std::sqrt(static_cast<double>(width));
    for (Index i = 0; i < width; ++i) readout.alpha[i] = alpha_scale * rng.normal();
    readout.bias = scale * 0.1 * rng.normal();
    std::vector<LdrLayer> layers;
    layers.push_back(std::move(layer));
    return NetworkModel(std::move(layers), std::move(readout));
}

/// Embed a single-layer model into one with more blocks: old blocks,
/// biases, and readout entries are copied, new generators start tiny with
/// zero readout weight, so the padded model computes the same function.
NetworkModel zero_pad_model(const NetworkModel& prev, const PairPtr& pair, Index k_new,
                            Activation activation, Rng& rng) {
    const LdrLayer& old_layer = prev.layer(0);
    const Index n = old_layer.input_dim();
    const Index k_old = old_layer.block_count();
    const Index r = old_layer.generator_rank();

    LdrLayer layer(pair, k_new, r, activation);
    Vec theta = Vec::Zero(n * k_new);
    for (Index i = 0; i < k_new; ++i) {
        if (i < k_old) {
            layer.set_block(i, old_layer.G(i), old_layer.H(i));
        } else {
            Mat g(n, r), h(n, r);
            for (Index a = 0; a < n; ++a)
                for (Index b = 0; b < r; ++b) {
                    g(a, b) = 1e-3 * rng.normal();
                    h(a, b) = 1e-3 * rng.normal();
                }
            layer.set_block(i, std::move(g), std::move(h));
            for (Index t = 0; t < n; ++t) theta[i * n + t] = 0.1 * rng.normal();
        }
    }
    theta.head(n * k_old) = old_layer.theta();
    layer.set_theta(std::move(theta));

    Readout readout;
    readout.alpha = Vec::Zero(n * k_new);
    readout.alpha.head(n * k_old) = prev.readout().alpha;
    readout.bias = prev.readout().bias;

    std::vector<LdrLayer> layers;
    layers.push_back(std::move(layer));
    return NetworkModel(std::move(layers), std::move(readout));
}

}  // namespace

Target make_target(const TargetSpec& spec, Index n, PairPtr pair, Activation activation) {
    switch (spec.kind) {
        case TargetSpec::Kind::planted_ldr: {
            require(pair != nullptr && pair->size() == n,
                    "make_target: planted_ldr needs an operator pair at the input dimension");
            Rng rng(derive_seed(spec.seed, 0x91a0ULL));
            auto model = std::make_shared<NetworkModel>(
                random_model(std::move(pair), spec.planted_k, spec.planted_r, activation,
                             /*scale=*/1.0, rng));
            std::ostringstream os;
            os << "planted_ldr(seed=" << spec.seed << ", k=" << spec.planted_k
               << ", r=" << spec.planted_r << ")";
            return Target([model](const Vec& x) { return model->forward(x); }, os.str());
        }
        case TargetSpec::Kind::smooth_radial:
            return Target([](const Vec& x) { return std::exp(-x.squaredNorm()); },
                          "smooth_radial");
        case TargetSpec::Kind::sinusoid: {
            const double freq = spec.frequency;
            return Target(
                [freq](const Vec& x) {
                    return std::sin(freq * x.sum() / std::sqrt(static_cast<double>(x.size())));
                },
                "sinusoid(frequency=" + std::to_string(freq) + ")");
        }
        case TargetSpec::Kind::constant: {
            const double v = spec.value;
            return Target([v](const Vec&) { return v; },
                          "constant(" + std::to_string(v) + ")");
        }
    }
    throw ValidationError("make_target: unknown target kind");
}

Dataset sample_dataset(const Target& target, Index count, Index n, double radius,
                       std::uint64_t seed) {
    Rng rng(seed);
    Dataset data;
    data.x.reserve(static_cast<std::size_t>(count));
    data.y.reserve(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) {
        Vec x = rng.ball_point(n, radius);
        data.y.push_back(target(x));
        data.x.push_back(std::move(x));
    }
    return data;
}

double mean_squared_error(const NetworkModel& model, const Dataset& data) {
    if (data.x.empty()) return 0.0;
    NetworkScratch scratch = model.make_scratch();
    double total = 0.0;
    for (std::size_t i = 0; i < data.x.size(); ++i) {
        const double diff = model.forward_scratch(data.x[i], scratch) - data.y[i];
        total += diff * diff;
    }
    return total / static_cast<double>(data.x.size());
}

FitResult fit_single(PairPtr pair, Index k, Index r, Activation activation, const Target& target,
                     Index n, double radius, const FitOptions& options, std::uint64_t seed,
                     const Dataset& val_set, const NetworkModel* warm_start) {
    FitResult result;

    const Dataset train_set =
        sample_dataset(target, options.train_samples, n, radius, derive_seed(seed, kDataStream));

    Rng rng(derive_seed(seed, kInitStream));
    NetworkModel model = warm_start != nullptr
                             ? *warm_start
                             : random_model(pair, k, r, activation, options.init_scale, rng);

    const Index sample_count = static_cast<Index>(train_set.x.size());
    std::vector<Index> order(static_cast<std::size_t>(sample_count));
    std::iota(order.begin(), order.end(), Index{0});

    NetworkGradients grads = model.zero_gradients();
    NetworkScratch scratch = model.make_scratch();

    for (Index epoch = 0; epoch < options.epochs; ++epoch) {
        // Fisher-Yates shuffle from the fit's own stream.
        for (Index i = sample_count - 1; i > 0; --i) {
            const Index j = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
        for (Index start = 0; start < sample_count; start += options.batch) {
            const Index stop = std::min(sample_count, start + options.batch);
            grads.setZero();
            const double scale = 1.0 / static_cast<double>(stop - start);
            for (Index s = start; s < stop; ++s) {
                const Index idx = order[static_cast<std::size_t>(s)];
                const double out =
                    model.forward_scratch(train_set.x[static_cast<std::size_t>(idx)], scratch);
                const double upstream = 2.0 * (out - train_set.y[static_cast<std::size_t>(idx)]);
                if (!std::isfinite(upstream)) {
                    result.error = "non-finite loss at epoch " + std::to_string(epoch);
                    return result;
                }
                model.backward_cached(upstream, scale, grads, scratch);
            }
            model.gradient_step(grads, options.learning_rate);
        }
        if (epoch % options.history_stride == 0 || epoch + 1 == options.epochs) {
            const double train_mse = mean_squared_error(model, train_set);
            if (!std::isfinite(train_mse)) {
                result.error = "non-finite loss at epoch " + std::to_string(epoch);
                return result;
            }
            result.history.push_back(
                HistoryRow{epoch, train_mse, mean_squared_error(model, val_set)});
        }
    }

    result.train_mse = mean_squared_error(model, train_set);
    result.val_mse = mean_squared_error(model, val_set);
    if (!std::isfinite(result.train_mse) || !std::isfinite(result.val_mse)) {
        result.error = "non-finite loss after training";
        return result;
    }
    result.model = std::make_shared<NetworkModel>(std::move(model));
    result.ok = true;
    return result;
}

BestOfResult fit_best_of(PairPtr pair, Index k, Index r, Activation activation,
                         const Target& target, Index n, double radius, const FitOptions& options,
                         Index restarts, std::uint64_t seed, const Dataset& val_set,
                         const NetworkModel* warm_start) {
    BestOfResult best_of;
    for (Index restart = 0; restart < restarts; ++restart) {
        const std::uint64_t restart_seed = derive_seed(seed, 1000 + static_cast<std::uint64_t>(restart));
        // The warm start, when given, replaces the random init of restart 0.
        const NetworkModel* init = (restart == 0) ? warm_start : nullptr;
        FitResult fit = fit_single(pair, k, r, activation, target, n, radius, options,
                                   restart_seed, val_set, init);
        best_of.restart_val_mse.push_back(fit.ok ? fit.val_mse
                                                 : std::numeric_limits<double>::infinity());
        if (!fit.ok) continue;
        if (!best_of.best.ok || fit.val_mse < best_of.best.val_mse) {
            best_of.best = std::move(fit);
            best_of.best_restart = restart;
        }
    }
    if (!best_of.best.ok && !best_of.restart_val_mse.empty())
        best_of.best.error = "all restarts failed";
    return best_of;
}

DecayReport run_decay(const ExperimentConfig& config) {
    config.validate();
    require(config.k_grid.size() >= 3, "decay: k_grid needs at least 3 points");
    const Index n = config.input_dim;
    PairPtr pair = config.build_pair();
    const Target target = make_target(config.target, n, pair, config.activation);

    const Dataset eval_set = sample_dataset(target, config.eval_samples, n, config.domain_radius,
                                            derive_seed(config.seed, kEvalStream));

    DecayReport report;
    report.radius = config.domain_radius;
    double c = 0.0;
    for (std::size_t i = 0; i < eval_set.x.size(); ++i)
        c += eval_set.x[i].norm() * std::abs(eval_set.y[i]);
    report.c_surrogate = c / static_cast<double>(eval_set.x.size());

    FitOptions options;
    options.learning_rate = config.optimizer.learning_rate;
    options.epochs = config.optimizer.epochs;
    options.batch = config.optimizer.batch;
    options.train_samples = config.optimizer.train_samples;
    options.init_scale = config.optimizer.init_scale;

    // The previous grid point's winner embeds into the wider layer with
    // zero readout weight on the new blocks, computing the same function.
    // It seeds the first restart and stays in the candidate set, so the
    // reported error cannot rise when training fails to improve on it.
    std::shared_ptr<NetworkModel> prev_best;
    double prev_mse = std::numeric_limits<double>::infinity();
    for (Index k : config.k_grid) {
        std::shared_ptr<NetworkModel> warm;
        if (config.nested_warm_start && prev_best != nullptr) {
            Rng pad_rng(derive_seed(config.seed, 8800 + static_cast<std::uint64_t>(k)));
            warm = std::make_shared<NetworkModel>(
                zero_pad_model(*prev_best, pair, k, config.activation, pad_rng));
        }
        BestOfResult fit =
            fit_best_of(pair, k, config.rank, config.activation, target, n, config.domain_radius,
                        options, config.optimizer.restarts,
                        derive_seed(config.seed, 7700 + static_cast<std::uint64_t>(k)), eval_set,
                        warm.get());
        DecayRow row;
        row.k = k;
        row.bound = 4.0 * config.domain_radius * config.domain_radius * report.c_surrogate /
                    static_cast<double>(k);
        if (fit.best.ok) {
            row.best_mse = mean_squared_error(*fit.best.model, eval_set);
            row.ok = true;
            if (warm != nullptr && prev_mse < row.best_mse) {
                row.best_mse = prev_mse;
                row.note = "embedded previous model";
            } else {
                prev_best = fit.best.model;
            }
            prev_mse = row.best_mse;
        } else if (warm != nullptr) {
            row.best_mse = prev_mse;
            row.ok = true;
            row.note = "training failed; embedded previous model (" + fit.best.error + ")";
        } else {
            row.best_mse = std::numeric_limits<double>::quiet_NaN();
            row.ok = false;
            row.note = fit.best.error;
        }
        report.rows.push_back(std::move(row));
    }

    std::vector<double> ks, errs;
    for (const DecayRow& row : report.rows) {
        if (row.ok && row.best_mse > 0.0) {
            ks.push_back(static_cast<double>(row.k));
            errs.push_back(row.best_mse);
        }
    }
    report.slope = ks.size() >= 2 ? fit_loglog_slope(ks, errs) : 0.0;
    return report;
}

BestOfResult run_train(const ExperimentConfig& config) {
    config.validate();
    const Index n = config.input_dim;
    const Index k = config.k_grid.front();
    PairPtr pair = config.build_pair();
    const Target target = make_target(config.target, n, pair, config.activation);

    const Dataset val_set = sample_dataset(target, config.val_samples, n, config.domain_radius,
                                           derive_seed(config.seed, kEvalStream));

    FitOptions options;
    options.learning_rate = config.optimizer.learning_rate;
    options.epochs = config.optimizer.epochs;
    options.batch = config.optimizer.batch;
    options.train_samples = config.optimizer.train_samples;
    options.init_scale = config.optimizer.init_scale;

    return fit_best_of(pair, k, config.rank, config.activation, target, n, config.domain_radius,
                       options, config.optimizer.restarts, config.seed, val_set);
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_loglog_slope: need >= 2 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double count = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0.0 && y[i] > 0.0, "fit_loglog_slope: values must be positive");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = count * sxx - sx * sx;
    require(std::abs(denom) > 1e-12, "fit_loglog_slope: degenerate abscissae");
    return (count * sxy - sx * sy) / denom;
}

}  // namespace ldr
