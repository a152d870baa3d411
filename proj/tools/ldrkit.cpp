// ldrkit — command-line harness for the structured-matrix toolkit:
// SGD training on toy targets, the error-decay experiment, displacement
// rank sweeps, column-embedding construction, and matvec benchmarks.

#include "ldr/bench.hpp"
#include "ldr/config.hpp"
#include "ldr/construct.hpp"
#include "ldr/model_io.hpp"
#include "ldr/rank_sweep.hpp"
#include "ldr/train.hpp"

#include "CLI11.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using ldr::Index;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw ldr::IoError("cannot open '" + path + "' for writing");
    out << body;
    if (!out) throw ldr::IoError("write failed for '" + path + "'");
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ldr::IoError("cannot create output directory '" + out + "': " + ec.message());
    return dir;
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
    auto* c = cmd->add_option("--config", opts.config_path, "experiment config (JSON)");
    if (config_required) c->required();
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--out", opts.out_dir, "output directory (default: out)");
}

ldr::ExperimentConfig load_config_or_default(const CommonOpts& opts) {
    ldr::ExperimentConfig config =
        opts.config_path.empty() ? ldr::ExperimentConfig{} : ldr::load_config(opts.config_path);
    if (opts.seed.has_value()) config.seed = *opts.seed;
    config.validate();
    return config;
}

int cmd_train(const CommonOpts& opts) {
    const ldr::ExperimentConfig config = load_config_or_default(opts);
    const fs::path dir = ensure_out_dir(opts.out_dir);

    const ldr::BestOfResult result = ldr::run_train(config);
    if (!result.best.ok)
        throw ldr::InvariantError("training failed: " + result.best.error);

    ldr::save_model(*result.best.model, (dir / "model.json").string());

    std::ostringstream history;
    history << "epoch,train_mse,val_mse\n";
    for (const ldr::HistoryRow& row : result.best.history)
        history << row.epoch << "," << fmt(row.train_mse) << "," << fmt(row.val_mse) << "\n";
    write_file((dir / "loss_history.csv").string(), history.str());

    std::ostringstream summary;
    summary << "n,k,r,restarts,best_restart,train_mse,val_mse\n";
    summary << config.input_dim << "," << config.k_grid.front() << "," << config.rank << ","
            << config.optimizer.restarts << "," << result.best_restart << ","
            << fmt(result.best.train_mse) << "," << fmt(result.best.val_mse) << "\n";
    write_file((dir / "train_summary.csv").string(), summary.str());

    std::cout << "train: final train_mse=" << fmt(result.best.train_mse)
              << " val_mse=" << fmt(result.best.val_mse) << " (best restart "
              << result.best_restart << ")\n"
              << "wrote " << (dir / "model.json").string() << ", loss_history.csv, "
              << "train_summary.csv\n";
    return 0;
}

int cmd_decay(const CommonOpts& opts) {
    const ldr::ExperimentConfig config = load_config_or_default(opts);
    const fs::path dir = ensure_out_dir(opts.out_dir);

    const ldr::DecayReport report = ldr::run_decay(config);

    std::ostringstream rows;
    rows << "k,best_mse,bound_4r2C_over_k,ok,note\n";
    for (const ldr::DecayRow& row : report.rows)
        rows << row.k << "," << fmt(row.best_mse) << "," << fmt(row.bound) << ","
             << (row.ok ? 1 : 0) << "," << row.note << "\n";
    write_file((dir / "decay.csv").string(), rows.str());

    std::ostringstream summary;
    summary << "slope,c_surrogate,radius\n";
    summary << fmt(report.slope) << "," << fmt(report.c_surrogate) << "," << fmt(report.radius)
            << "\n";
    write_file((dir / "decay_summary.csv").string(), summary.str());

    std::cout << "decay: " << report.rows.size() << " grid points, log-log slope "
              << fmt(report.slope) << ", surrogate-C " << fmt(report.c_surrogate) << "\n"
              << "wrote decay.csv, decay_summary.csv in " << dir.string() << "\n";
    for (const ldr::DecayRow& row : report.rows) {
        if (!row.ok) std::cout << "  warning: k=" << row.k << " flagged: " << row.note << "\n";
    }
    return 0;
}

int cmd_rank_sweep(const CommonOpts& opts, std::vector<std::string>& family_names,
                   std::vector<Index>& sizes, Index trials) {
    const fs::path dir = ensure_out_dir(opts.out_dir);
    std::vector<ldr::Family> families;
    if (family_names.empty()) {
        families = {ldr::Family::circulant, ldr::Family::toeplitz, ldr::Family::hankel,
                    ldr::Family::vandermonde, ldr::Family::cauchy};
    } else {
        for (const std::string& name : family_names)
            families.push_back(ldr::family_from_name(name));
    }
    if (sizes.empty()) sizes = {4, 8, 16, 32};
    const std::uint64_t seed = opts.seed.value_or(1);

    const auto rows = ldr::run_rank_sweep(families, sizes, trials, seed);

    std::ostringstream csv;
    csv << "family,n,trial,measured_rank,bound,ok\n";
    Index violations = 0;
    for (const ldr::RankSweepRow& row : rows) {
        csv << ldr::family_name(row.family) << "," << row.n << "," << row.trial << ","
            << row.measured << "," << row.bound << "," << (row.ok ? 1 : 0) << "\n";
        if (!row.ok) ++violations;
    }
    write_file((dir / "rank_sweep.csv").string(), csv.str());

    std::cout << "rank-sweep: " << rows.size() << " instances, " << violations
              << " bound violations; wrote " << (dir / "rank_sweep.csv").string() << "\n";
    if (violations > 0)
        throw ldr::InvariantError(std::to_string(violations) +
                                  " instances exceeded their rank bound");
    return 0;
}

int cmd_construct(const CommonOpts& opts, const std::string& vectors_path) {
    const ldr::ExperimentConfig config = load_config_or_default(opts);
    const fs::path dir = ensure_out_dir(opts.out_dir);
    const Index n = config.input_dim;
    ldr::PairPtr pair = config.build_pair();

    std::ifstream in(vectors_path);
    if (!in) throw ldr::IoError("cannot open vector file '" + vectors_path + "'");
    std::vector<ldr::Vec> targets;
    std::string line;
    Index line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        for (char& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream ls(line);
        std::vector<double> entries;
        double value = 0.0;
        while (ls >> value) entries.push_back(value);
        if (entries.empty()) continue;  // blank line
        if (static_cast<Index>(entries.size()) != n) {
            std::ostringstream os;
            os << "vector file line " << line_no << ": expected " << n << " entries, got "
               << entries.size();
            throw ldr::ValidationError(os.str());
        }
        ldr::Vec v(n);
        for (Index i = 0; i < n; ++i) v[i] = entries[static_cast<std::size_t>(i)];
        targets.push_back(std::move(v));
    }
    if (targets.empty()) throw ldr::ValidationError("vector file contains no vectors");

    ldr::SelectorOptions sel;
    sel.seed = config.seed;

    std::ostringstream summary;
    summary << "index,j,residual\n";
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const ldr::ColumnEmbedding emb = ldr::construct_with_column(pair, targets[i], sel);
        char name[64];
        std::snprintf(name, sizeof(name), "construct_%03zu.json", i);
        ldr::save_json(ldr::embedding_to_json(emb), (dir / name).string());
        summary << i << "," << emb.j << "," << fmt(emb.residual) << "\n";
    }
    write_file((dir / "construct_summary.csv").string(), summary.str());

    std::cout << "construct: " << targets.size() << " embeddings certified; wrote artifacts in "
              << dir.string() << "\n";
    return 0;
}

int cmd_bench(const CommonOpts& opts, std::vector<Index>& sizes) {
    const fs::path dir = ensure_out_dir(opts.out_dir);
    if (sizes.empty()) sizes = {256, 512, 1024, 2048, 4096, 8192, 16384};
    ldr::BenchOptions options;
    options.seed = opts.seed.value_or(1);

    const auto rows = ldr::run_bench(sizes, options);

    std::ostringstream csv;
    csv << "family,n,structured_params,dense_params,"
           "structured_seconds_volatile,dense_seconds_volatile\n";
    for (const ldr::BenchRow& row : rows)
        csv << row.family << "," << row.n << "," << row.structured_params << ","
            << row.dense_params << "," << fmt(row.structured_seconds) << ","
            << fmt(row.dense_seconds) << "\n";
    write_file((dir / "bench.csv").string(), csv.str());

    std::vector<double> xs, ys;
    for (const ldr::BenchRow& row : rows) {
        if (std::string(row.family) == "circulant") {
            xs.push_back(static_cast<double>(row.n));
            ys.push_back(row.structured_seconds);
        }
    }
    const double slope = xs.size() >= 2 ? ldr::fit_loglog_slope(xs, ys) : 0.0;
    std::cout << "bench: circulant matvec log-log slope " << fmt(slope) << " over "
              << xs.size() << " sizes; wrote " << (dir / "bench.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ldrkit — structured matrices, displacement rank, and LDR network training"};
    app.require_subcommand(1);

    CommonOpts train_opts, decay_opts, sweep_opts, construct_opts, bench_opts;

    CLI::App* train = app.add_subcommand("train", "SGD-train an LDR model on a toy target");
    add_common(train, train_opts, /*config_required=*/false);

    CLI::App* decay = app.add_subcommand("decay", "error-decay experiment across the k grid");
    add_common(decay, decay_opts, /*config_required=*/false);

    CLI::App* sweep = app.add_subcommand("rank-sweep", "measured displacement rank vs bounds");
    add_common(sweep, sweep_opts, /*config_required=*/false);
    std::vector<std::string> family_names;
    std::vector<Index> sweep_sizes;
    Index trials = 20;
    sweep->add_option("--families", family_names,
                      "families to sweep (default: all five)");
    sweep->add_option("--sizes", sweep_sizes, "matrix sizes (>= 3 values; default 4 8 16 32)");
    sweep->add_option("--trials", trials, "random instances per family and size");

    CLI::App* construct = app.add_subcommand(
        "construct", "embed vectors as columns of displacement-rank-1 matrices");
    add_common(construct, construct_opts, /*config_required=*/false);
    std::string vectors_path;
    construct->add_option("--vectors", vectors_path, "text file, one n-vector per line")
        ->required();

    CLI::App* bench = app.add_subcommand("bench", "structured vs dense matvec timings");
    add_common(bench, bench_opts, /*config_required=*/false);
    std::vector<Index> bench_sizes;
    bench->add_option("--sizes", bench_sizes,
                      "sizes, ascending (default 256 ... 16384)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(train_opts);
        if (decay->parsed()) return cmd_decay(decay_opts);
        if (sweep->parsed()) return cmd_rank_sweep(sweep_opts, family_names, sweep_sizes, trials);
        if (construct->parsed()) return cmd_construct(construct_opts, vectors_path);
        if (bench->parsed()) return cmd_bench(bench_opts, bench_sizes);
    } catch (const ldr::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ldr::InvariantError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ldr::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
