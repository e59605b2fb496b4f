#pragma once

// Cross-validation, winner counting, achievement rate, learning-time ratios
// and the amplifying-scale sweep.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "anyloss/confusion.hpp"
#include "anyloss/data.hpp"
#include "anyloss/errors.hpp"
#include "anyloss/losses.hpp"
#include "anyloss/network.hpp"
#include "anyloss/numeric.hpp"
#include "anyloss/parallel.hpp"

namespace anyloss {

inline constexpr std::size_t kMetricCount = 4;

/// The four evaluation metrics in report order. F-beta uses `beta`.
inline std::array<MetricKind, kMetricCount> evaluation_metrics(double beta = 1.0) {
    return {MetricKind::accuracy(), MetricKind::f_beta(beta), MetricKind::g_mean(), MetricKind::balanced_accuracy()};
}

inline std::size_t metric_slot(MetricId id) {
    switch (id) {
        case MetricId::Accuracy: return 0;
        case MetricId::FBeta: return 1;
        case MetricId::GMean: return 2;
        case MetricId::BalancedAccuracy: return 3;
    }
    return 0;
}

struct FoldScores {
    std::array<double, kMetricCount> score{};     // order of evaluation_metrics()
    std::array<bool, kMetricCount> degenerate{};  // zero denominator; score reported as 0
    double train_seconds = 0.0;
    double seconds_per_epoch = 0.0;
    std::size_t train_size = 0;
    std::size_t valid_size = 0;
};

struct CVReport {
    std::string dataset;
    std::string loss;
    double eval_beta = 1.0;
    std::size_t epochs = 0;
    double batch_fraction = 1.0;
    std::vector<FoldScores> folds;
    std::array<double, kMetricCount> mean{};
    std::vector<std::vector<double>> loss_curves;  // one per fold

    std::size_t k() const { return folds.size(); }
    double mean_of(MetricId id) const { return mean[metric_slot(id)]; }
    std::size_t degenerate_folds() const {
        std::size_t c = 0;
        for (const auto& f : folds) {
            for (bool d : f.degenerate) c += d ? 1 : 0;
        }
        return c;
    }
    double seconds_per_epoch() const {
        double s = 0.0;
        for (const auto& f : folds) s += f.seconds_per_epoch;
        return folds.empty() ? 0.0 : s / static_cast<double>(folds.size());
    }
    /// Fold-averaged loss curve.
    std::vector<double> mean_curve() const {
        if (loss_curves.empty()) return {};
        std::vector<double> out(loss_curves.front().size(), 0.0);
        for (const auto& c : loss_curves) {
            for (std::size_t e = 0; e < out.size(); ++e) out[e] += c[e];
        }
        for (double& v : out) v /= static_cast<double>(loss_curves.size());
        return out;
    }
};

struct CVOptions {
    std::size_t k = 10;
    double eval_beta = 1.0;
    bool standardize = true;
    std::size_t threads = 0;  // 0: thread_budget()
    std::uint64_t seed = 42;  // fold assignment; shared by every loss so comparisons are paired
};

/// Scores hard predictions on all four metrics.
inline FoldScores score_predictions(std::span<const Label> y, std::span<const Label> yhat, double beta = 1.0) {
    FoldScores f;
    const HardConfusion c = hard_confusion(y, yhat);
    const auto kinds = evaluation_metrics(beta);
    for (std::size_t i = 0; i < kMetricCount; ++i) {
        const MetricResult r = metric_score(c, kinds[i]);
        f.score[i] = r.value;
        f.degenerate[i] = r.degenerate;
    }
    f.valid_size = y.size();
    return f;
}

/// k-fold cross-validation. Features are standardised with statistics of the
/// training split only. Fold f initialises its network with
/// derive_seed(nc.seed, f) and shuffles batches with derive_seed(tc.seed, f),
/// so every loss sees the same folds and the same starting weights.
inline CVReport cross_validate(const Dataset& d, const NetworkConfig& nc, const TrainConfig& tc,
                               const CVOptions& opts = {}) {
    d.validate();
    tc.validate();
    const FoldPlan plan = stratified_kfold(d.y, opts.k, opts.seed);

    CVReport report;
    report.dataset = d.name;
    report.loss = tc.loss.name();
    report.eval_beta = opts.eval_beta;
    report.epochs = tc.epochs;
    report.batch_fraction = tc.batch_fraction;
    report.folds.resize(plan.k());
    report.loss_curves.resize(plan.k());

    const std::size_t threads = opts.threads ? opts.threads : thread_budget();
    parallel_for(plan.k(), threads, [&](std::size_t f) {
        Dataset train_set = d.subset(plan.train_indices(f));
        Dataset valid_set = d.subset(plan.folds[f]);
        if (opts.standardize) {
            const Standardizer s = Standardizer::fit(train_set.X);
            train_set.X = s.apply(train_set.X);
            valid_set.X = s.apply(valid_set.X);
        }
        NetworkConfig fold_nc = nc;
        fold_nc.input_dim = d.features();
        fold_nc.seed = derive_seed(nc.seed, f);
        TrainConfig fold_tc = tc;
        fold_tc.seed = derive_seed(tc.seed, f);

        TrainReport tr = train(init(fold_nc), train_set, fold_tc);
        const Prediction pred = predict(tr.network, valid_set.X);
        FoldScores fs = score_predictions(valid_set.y, pred.labels, opts.eval_beta);
        fs.train_seconds = tr.total_seconds();
        fs.seconds_per_epoch = tr.wall_time_per_epoch();
        fs.train_size = train_set.size();
        report.folds[f] = fs;
        report.loss_curves[f] = std::move(tr.loss_curve);
    });

    for (std::size_t i = 0; i < kMetricCount; ++i) {
        double s = 0.0;
        for (const auto& fs : report.folds) s += fs.score[i];
        report.mean[i] = s / static_cast<double>(report.folds.size());
    }
    if (const std::size_t deg = report.degenerate_folds()) {
        std::ostringstream os;
        os << "cross_validate: " << deg << " fold metric(s) on '" << d.name << "' with " << report.loss
           << " had a zero denominator and were scored 0";
        warn(os.str());
    }
    return report;
}

/// Convenience overload: k folds, everything else default.
inline CVReport cross_validate(const Dataset& d, const NetworkConfig& nc, const TrainConfig& tc, std::size_t k) {
    CVOptions o;
    o.k = k;
    return cross_validate(d, nc, tc, o);
}

// ---------------------------------------------------------------------------

/// scores[dataset][column]; a missing cell is std::nullopt.
using ScoreTable = std::vector<std::vector<std::optional<double>>>;

struct WinTally {
    std::vector<std::string> columns;
    std::vector<std::size_t> wins;

    std::size_t total() const {
        std::size_t t = 0;
        for (auto w : wins) t += w;
        return t;
    }
};

/// The column with the strictly largest score wins each row. An exact tie
/// goes to the earliest column, so list baselines first.
inline WinTally count_wins(const ScoreTable& scores, std::vector<std::string> columns) {
    if (columns.empty()) throw ContractError("count_wins: no columns");
    WinTally t;
    t.wins.assign(columns.size(), 0);
    for (std::size_t r = 0; r < scores.size(); ++r) {
        if (scores[r].size() != columns.size()) {
            throw ContractError("count_wins: row " + std::to_string(r) + " has the wrong number of cells");
        }
        std::size_t best = 0;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (!scores[r][c] || !std::isfinite(*scores[r][c])) {
                throw ContractError("count_wins: missing score at row " + std::to_string(r) + ", column '" +
                                    columns[c] + "'");
            }
            if (*scores[r][c] > *scores[r][best]) best = c;
        }
        ++t.wins[best];
    }
    t.columns = std::move(columns);
    return t;
}

/// (initial - current) / (initial - final) for the curve at epoch e (0-based).
inline double achievement_rate(std::span<const double> curve, std::size_t e) {
    if (curve.size() < 2) throw ContractError("achievement_rate: curve needs at least two epochs");
    if (e >= curve.size()) throw ContractError("achievement_rate: epoch out of range");
    const double initial = curve.front();
    const double final_loss = curve.back();
    if (initial == final_loss) throw DomainError("achievement_rate: undefined for a flat curve (initial == final)");
    return (initial - curve[e]) / (initial - final_loss);
}

struct TimingEntry {
    std::string name;
    double seconds_per_epoch = 0.0;
    std::size_t epochs = 0;
    std::size_t samples = 0;
    std::size_t batch_size = 0;
};

inline TimingEntry timing_entry(const TrainReport& r) {
    return {r.loss_name, r.wall_time_per_epoch(), r.epochs, r.samples, r.batch_size};
}

/// Per-epoch wall time of each entry divided by that of entries[baseline].
inline std::vector<double> timing_ratio(std::span<const TimingEntry> entries, std::size_t baseline) {
    if (baseline >= entries.size()) throw ContractError("timing_ratio: baseline index out of range");
    const TimingEntry& b = entries[baseline];
    for (const auto& e : entries) {
        if (e.epochs != b.epochs || e.samples != b.samples || e.batch_size != b.batch_size) {
            throw ContractError("timing_ratio: '" + e.name + "' was not trained with the same epochs/batch settings as '" +
                                b.name + "'");
        }
    }
    if (!(b.seconds_per_epoch > 0.0)) throw DomainError("timing_ratio: baseline time is zero");
    std::vector<double> out;
    out.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        out.push_back(i == baseline ? 1.0 : entries[i].seconds_per_epoch / b.seconds_per_epoch);
    }
    return out;
}

inline std::vector<double> timing_ratio(std::span<const TrainReport> reports, std::size_t baseline) {
    std::vector<TimingEntry> e;
    for (const auto& r : reports) e.push_back(timing_entry(r));
    return timing_ratio(std::span<const TimingEntry>(e), baseline);
}

// ---------------------------------------------------------------------------

struct LSweepTable {
    std::vector<std::string> metrics;  // row labels, e.g. "f1"
    std::vector<double> scales;        // column labels
    std::vector<std::vector<double>> score;  // [metric][scale]: mean CV score of that metric
};

/// Cross-validates AnyLoss for every (metric, L) pair and records the mean
/// score of the metric being optimised. Scales outside the strict band are
/// allowed here on purpose.
inline LSweepTable l_sweep(const Dataset& d, std::span<const MetricKind> metrics, std::span<const double> scales,
                           const NetworkConfig& nc, const TrainConfig& tc, const CVOptions& opts = {}) {
    if (metrics.empty() || scales.empty()) throw ContractError("l_sweep: need at least one metric and one scale");
    LSweepTable t;
    for (double L : scales) {
        if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("l_sweep: every L must be finite and > 0");
        t.scales.push_back(L);
    }
    for (const MetricKind& m : metrics) {
        t.metrics.push_back(m.name());
        std::vector<double> row;
        for (double L : scales) {
            TrainConfig c = tc;
            c.loss = LossSpec::any(m, AmplifyingScale(L), ScaleCheck::Override);
            CVOptions o = opts;
            o.eval_beta = m.id() == MetricId::FBeta ? m.beta() : opts.eval_beta;
            const CVReport r = cross_validate(d, nc, c, o);
            row.push_back(r.mean_of(m.id()));
        }
        t.score.push_back(std::move(row));
    }
    return t;
}

}  // namespace anyloss
