#include "ldr/config.hpp"

#include <sstream>

namespace ldr {

namespace {

Vec default_diag(Index n) {
    // Distinct magnitudes in (0, 1), well separated, away from the
    // a·B^q = I singularity.
    Vec d(n);
    for (Index i = 0; i < n; ++i)
        d[i] = n == 1 ? 0.5 : 0.3 + 0.4 * static_cast<double>(i) / static_cast<double>(n - 1);
    return d;
}

}  // namespace

PairPtr ExperimentConfig::build_pair(Index n) const {
    if (pair_spec.has_value()) {
        return std::make_shared<const OperatorPair>(pair_from_json(*pair_spec, n, "pair"));
    }
    return make_pair_ptr(OperatorMatrix::unit_circulant(n, 1.0),
                         OperatorMatrix::diagonal(default_diag(n)));
}

void ExperimentConfig::validate() const {
    require(input_dim >= 1, "config: input_dim must be positive");
    require(domain_radius > 0.0, "config: domain_radius must be positive");
    require(rank >= 1, "config: rank must be >= 1");
    require(eval_samples >= 1 && val_samples >= 1, "config: sample counts must be positive");
    require(!k_grid.empty(), "config: k_grid must be nonempty");
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        require(k_grid[i] >= 1, "config: k_grid entries must be positive");
        if (i > 0) require(k_grid[i] > k_grid[i - 1], "config: k_grid must be increasing");
    }
    require(optimizer.learning_rate > 0.0, "config: learning_rate must be positive");
    require(optimizer.epochs >= 1, "config: epochs must be >= 1");
    require(optimizer.batch >= 1, "config: batch must be >= 1");
    require(optimizer.restarts >= 1, "config: restarts must be >= 1");
    require(optimizer.train_samples >= optimizer.batch,
            "config: train_samples must be >= batch");
    require(optimizer.init_scale > 0.0, "config: init_scale must be positive");
}

TargetSpec target_from_json(const Json& j) {
    TargetSpec t;
    if (!j.is_object() || !j.contains("kind"))
        throw ValidationError("config: target must be an object with a 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "planted_ldr") {
        t.kind = TargetSpec::Kind::planted_ldr;
        t.seed = j.value("seed", std::uint64_t{7});
        t.planted_k = j.value("k", Index{2});
        t.planted_r = j.value("r", Index{1});
    } else if (kind == "smooth_radial") {
        t.kind = TargetSpec::Kind::smooth_radial;
    } else if (kind == "sinusoid") {
        t.kind = TargetSpec::Kind::sinusoid;
        t.frequency = j.value("frequency", 1.0);
    } else if (kind == "constant") {
        t.kind = TargetSpec::Kind::constant;
        t.value = j.value("value", 0.0);
    } else {
        throw ValidationError("config: unknown target kind '" + kind + "'");
    }
    return t;
}

ExperimentConfig config_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("config: top level must be an object");
    ExperimentConfig c;
    if (j.contains("target")) c.target = target_from_json(j.at("target"));
    c.domain_radius = j.value("domain_radius", c.domain_radius);
    c.input_dim = j.value("input_dim", c.input_dim);
    if (j.contains("k_grid")) {
        c.k_grid.clear();
        for (const Json& e : j.at("k_grid")) c.k_grid.push_back(e.get<Index>());
    }
    c.rank = j.value("rank", c.rank);
    c.eval_samples = j.value("eval_samples", c.eval_samples);
    c.val_samples = j.value("val_samples", c.val_samples);
    c.seed = j.value("seed", c.seed);
    if (j.contains("activation"))
        c.activation = activation_from_name(j.at("activation").get<std::string>());
    if (j.contains("optimizer")) {
        const Json& o = j.at("optimizer");
        c.optimizer.learning_rate = o.value("learning_rate", c.optimizer.learning_rate);
        c.optimizer.epochs = o.value("epochs", c.optimizer.epochs);
        c.optimizer.batch = o.value("batch", c.optimizer.batch);
        c.optimizer.restarts = o.value("restarts", c.optimizer.restarts);
        c.optimizer.train_samples = o.value("train_samples", c.optimizer.train_samples);
        c.optimizer.init_scale = o.value("init_scale", c.optimizer.init_scale);
    }
    c.nested_warm_start = j.value("nested_warm_start", c.nested_warm_start);
    if (j.contains("pair")) c.pair_spec = j.at("pair");
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(load_json(path)); }

Json config_to_json(const ExperimentConfig& c) {
    Json j;
    Json t;
    switch (c.target.kind) {
        case TargetSpec::Kind::planted_ldr:
            t["kind"] = "planted_ldr";
            t["seed"] = c.target.seed;
            t["k"] = c.target.planted_k;
            t["r"] = c.target.planted_r;
            break;
        case TargetSpec::Kind::smooth_radial:
            t["kind"] = "smooth_radial";
            break;
        case TargetSpec::Kind::sinusoid:
            t["kind"] = "sinusoid";
            t["frequency"] = c.target.frequency;
            break;
        case TargetSpec::Kind::constant:
            t["kind"] = "constant";
            t["value"] = c.target.value;
            break;
    }
    j["target"] = std::move(t);
    j["domain_radius"] = c.domain_radius;
    j["input_dim"] = c.input_dim;
    j["k_grid"] = c.k_grid;
    j["rank"] = c.rank;
    j["eval_samples"] = c.eval_samples;
    j["val_samples"] = c.val_samples;
    j["seed"] = c.seed;
    j["activation"] = activation_name(c.activation);
    Json o;
    o["learning_rate"] = c.optimizer.learning_rate;
    o["epochs"] = c.optimizer.epochs;
    o["batch"] = c.optimizer.batch;
    o["restarts"] = c.optimizer.restarts;
    o["train_samples"] = c.optimizer.train_samples;
    o["init_scale"] = c.optimizer.init_scale;
    j["optimizer"] = std::move(o);
    j["nested_warm_start"] = c.nested_warm_start;
    if (c.pair_spec.has_value()) j["pair"] = *c.pair_spec;
    return j;
}

}  // namespace ldr
