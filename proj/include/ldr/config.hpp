#pragma once

#include "ldr/activation.hpp"
#include "ldr/model_io.hpp"
#include "ldr/operators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ldr {

/// Toy regression targets for the training and error-decay experiments.
struct TargetSpec {
    enum class Kind { planted_ldr, smooth_radial, sinusoid, constant };
    Kind kind = Kind::smooth_radial;
    std::uint64_t seed = 7;      // planted_ldr
    Index planted_k = 2;         // planted_ldr block count
    Index planted_r = 1;         // planted_ldr generator rank
    double frequency = 1.0;      // sinusoid
    double value = 0.0;          // constant
};

struct OptimizerConfig {
    double learning_rate = 0.05;
    Index epochs = 2000;
    Index batch = 32;
    Index restarts = 5;
    Index train_samples = 1024;
    double init_scale = 0.3;
};

/// Configuration of the CLI experiments. Loaded from JSON; every field has
/// a default so a config file only states what it overrides.
struct ExperimentConfig {
    TargetSpec target;
    double domain_radius = 1.0;
    Index input_dim = 8;
    std::vector<Index> k_grid = {1, 2, 4, 8, 16};
    Index rank = 1;
    Index eval_samples = 2000;
    Index val_samples = 512;
    std::uint64_t seed = 1;
    OptimizerConfig optimizer;
    Activation activation = Activation::sigmoid;
    /// Decay experiment: seed the first restart of each grid point with the
    /// previous grid point's best model, zero-padded to the wider layer (a
    /// k-block model embeds in a (k+1)-block model).
    bool nested_warm_start = true;
    /// Operator pair spec (JSON); empty means the default pair
    /// (Z_1, diag(linspace(0.3, 0.7, n))).
    std::optional<Json> pair_spec;

    /// Build the configured operator pair at dimension n.
    PairPtr build_pair(Index n) const;
    PairPtr build_pair() const { return build_pair(input_dim); }

    void validate() const;
};

ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);
Json config_to_json(const ExperimentConfig& config);

TargetSpec target_from_json(const Json& j);

}  // namespace ldr
