#pragma once

// Multi-dataset, multi-loss benchmark: a cross-validated score grid, per-metric
// winner tallies, Bayesian sign tests of AnyLoss against each baseline and
// learning-time ratios against BCE.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "anyloss/evaluation.hpp"
#include "anyloss/losses.hpp"
#include "anyloss/network.hpp"
#include "anyloss/sign_test.hpp"

namespace anyloss {

struct BenchConfig {
    std::vector<Dataset> datasets;
    std::vector<LossSpec> losses = standard_losses();
    NetworkConfig network;                 // input_dim is taken from each dataset
    std::optional<std::size_t> epochs;     // unset: per-loss default
    std::optional<double> learning_rate;   // unset: per-loss default
    std::optional<double> batch_fraction;  // unset: per-loss default
    CVOptions cv;
    std::vector<double> ropes{0.01, 0.05};
    std::size_t mc_samples = kDefaultSignTestSamples;
    std::uint64_t seed = 42;  // training seed; cv.seed fixes the folds

    TrainConfig train_config(const LossSpec& loss) const {
        TrainConfig tc = default_train_config(loss, network.architecture, seed);
        if (epochs) tc.epochs = *epochs;
        if (learning_rate) tc.learning_rate = *learning_rate;
        if (batch_fraction) tc.batch_fraction = *batch_fraction;
        return tc;
    }
};

struct MetricTally {
    std::string metric;
    WinTally tally;
};

struct SignTestEntry {
    std::string metric;
    std::string candidate;
    std::string baseline;
    SignTestResult result;
};

struct BenchResult {
    std::vector<std::string> datasets;
    std::vector<std::string> losses;
    std::vector<std::vector<CVReport>> cells;  // [dataset][loss], filled in order
    std::vector<MetricTally> tallies;
    std::vector<SignTestEntry> sign_tests;
    std::vector<std::vector<std::optional<double>>> timing;  // [dataset][loss] per-epoch time / BCE's
    std::vector<std::string> notes;

    bool complete() const {
        return cells.size() == datasets.size() &&
               std::all_of(cells.begin(), cells.end(), [&](const auto& row) { return row.size() == losses.size(); });
    }
};

namespace detail {

inline std::optional<std::size_t> find_loss(const std::vector<LossSpec>& losses, const std::string& name) {
    for (std::size_t i = 0; i < losses.size(); ++i) {
        if (losses[i].name() == name) return i;
    }
    return std::nullopt;
}

/// The AnyLoss spec that targets `metric`, if the loss list has one.
inline std::optional<std::size_t> find_targeting(const std::vector<LossSpec>& losses, const MetricKind& metric) {
    for (std::size_t i = 0; i < losses.size(); ++i) {
        const LossSpec& s = losses[i];
        if (s.is_anyloss() && s.metric().id() == metric.id() &&
            (metric.id() != MetricId::FBeta || s.metric().beta() == metric.beta())) {
            return i;
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Summaries (tallies, sign tests, timing) from a complete grid.
inline void summarise_bench(const BenchConfig& cfg, BenchResult& r) {
    r.tallies.clear();
    r.sign_tests.clear();
    r.timing.clear();
    const auto mse = detail::find_loss(cfg.losses, "mse");
    const auto bce = detail::find_loss(cfg.losses, "bce");

    for (const MetricKind& metric : evaluation_metrics(cfg.cv.eval_beta)) {
        const std::size_t slot = metric_slot(metric.id());
        const auto ours = detail::find_targeting(cfg.losses, metric);
        if (!ours) {
            r.notes.push_back("no AnyLoss targets " + metric.name() + "; no tally or sign test for it");
            continue;
        }
        std::vector<std::size_t> cols;
        std::vector<std::string> names;
        for (auto c : {mse, bce, ours}) {
            if (c) {
                cols.push_back(*c);
                names.push_back(c == ours ? "ours" : cfg.losses[*c].name());
            }
        }
        ScoreTable table;
        for (const auto& row : r.cells) {
            std::vector<std::optional<double>> cells;
            for (auto c : cols) cells.emplace_back(row[c].mean[slot]);
            table.push_back(std::move(cells));
        }
        r.tallies.push_back({metric.name(), count_wins(table, names)});

        for (auto base : {mse, bce}) {
            if (!base) continue;
            std::vector<double> diffs;
            for (const auto& row : r.cells) diffs.push_back(row[*ours].mean[slot] - row[*base].mean[slot]);
            for (double rope : cfg.ropes) {
                r.sign_tests.push_back({metric.name(), cfg.losses[*ours].name(), cfg.losses[*base].name(),
                                        bayesian_sign_test(diffs, rope, cfg.mc_samples, derive_seed(cfg.seed, 77))});
            }
        }
    }

    for (const auto& row : r.cells) {
        std::vector<std::optional<double>> ratios(row.size());
        if (bce && row[*bce].seconds_per_epoch() > 0.0) {
            const CVReport& b = row[*bce];
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (row[j].epochs == b.epochs && row[j].batch_fraction == b.batch_fraction) {
                    ratios[j] = row[j].seconds_per_epoch() / b.seconds_per_epoch();
                }
            }
        }
        r.timing.push_back(std::move(ratios));
    }
}

/// Runs every (dataset, loss) cell. `on_cell` is called after each finished
/// cell with the partial result so callers can flush it; if a cell throws,
/// the exception propagates and the partial result stays with the caller.
inline BenchResult run_bench(const BenchConfig& cfg, BenchResult& out,
                             const std::function<void(const BenchResult&)>& on_cell = {}) {
    if (cfg.datasets.empty()) throw ContractError("bench: no datasets");
    if (cfg.losses.empty()) throw ContractError("bench: no losses");
    out = BenchResult{};
    for (const auto& d : cfg.datasets) out.datasets.push_back(d.name);
    for (const auto& l : cfg.losses) out.losses.push_back(l.name());

    for (const auto& d : cfg.datasets) {
        out.cells.emplace_back();
        for (const auto& loss : cfg.losses) {
            out.cells.back().push_back(cross_validate(d, cfg.network, cfg.train_config(loss), cfg.cv));
            if (on_cell) on_cell(out);
        }
    }
    summarise_bench(cfg, out);
    return out;
}

inline BenchResult run_bench(const BenchConfig& cfg) {
    BenchResult r;
    return run_bench(cfg, r);
}

}  // namespace anyloss
