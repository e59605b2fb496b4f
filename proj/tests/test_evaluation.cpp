#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <vector>

#include "anyloss/evaluation.hpp"

using namespace anyloss;
using Catch::Approx;

namespace {

TrainConfig quick(const LossSpec& loss, std::size_t epochs = 100) {
    TrainConfig tc = default_train_config(loss, Architecture::SLP, 3);
    tc.epochs = epochs;
    return tc;
}

}  // namespace

TEST_CASE("cross_validate: structure and exact means") {
    const Dataset d = synth_imbalanced(10, 2, 0.5, 3.0, 1);
    CVOptions o;
    o.k = 2;
    const CVReport r = cross_validate(d, NetworkConfig::slp(2), quick(LossSpec::bce(), 20), o);
    REQUIRE(r.k() == 2);
    for (std::size_t i = 0; i < kMetricCount; ++i) {
        double s = 0.0;
        for (const auto& f : r.folds) {
            CHECK(f.score[i] >= 0.0);
            CHECK(f.score[i] <= 1.0);
            s += f.score[i];
        }
        CHECK(r.mean[i] == s / 2.0);
    }
    CHECK(r.folds[0].train_size + r.folds[0].valid_size == 10);
    CHECK(r.loss_curves.size() == 2);
    CHECK(r.mean_curve().size() == 20);
}

TEST_CASE("cross_validate: separable data scores near 1 for every loss") {
    const Dataset d = synth_imbalanced(400, 2, 0.3, 10.0, 2);
    CVOptions o;
    o.k = 5;
    for (const LossSpec& loss : standard_losses()) {
        const CVReport r = cross_validate(d, NetworkConfig::slp(2), quick(loss, 200), o);
        INFO(loss.name());
        CHECK(r.mean_of(MetricId::Accuracy) >= 0.99);
    }
}

TEST_CASE("cross_validate is deterministic and independent of thread count") {
    const Dataset d = synth_imbalanced(300, 3, 0.2, 1.5, 4);
    CVOptions o;
    o.k = 4;
    o.threads = 1;
    const TrainConfig tc = quick(LossSpec::any(MetricKind::f1()), 50);
    const CVReport a = cross_validate(d, NetworkConfig::mlp(3, 2, true), tc, o);
    o.threads = 3;
    const CVReport b = cross_validate(d, NetworkConfig::mlp(3, 2, true), tc, o);
    CHECK(a.mean == b.mean);
    CHECK(a.loss_curves == b.loss_curves);
}

TEST_CASE("cross_validate flags degenerate folds") {
    WarningHandler prev = set_warning_handler([](const std::string&) {});
    Dataset d = synth_imbalanced(40, 2, 0.05, 1.0, 1);  // 2 positives, 4 folds: some folds lack positives
    CVOptions o;
    o.k = 4;
    const CVReport r = cross_validate(d, NetworkConfig::slp(2), quick(LossSpec::bce(), 5), o);
    set_warning_handler(prev);
    CHECK(r.degenerate_folds() > 0);
}

TEST_CASE("count_wins") {
    const std::vector<std::string> cols{"mse", "bce", "ours"};
    auto t = count_wins({{0.8, 0.9, 0.95}}, cols);
    CHECK(t.wins == std::vector<std::size_t>{0, 0, 1});
    t = count_wins({{0.9, 0.8, 0.9}}, cols);
    CHECK(t.wins == std::vector<std::size_t>{1, 0, 0});
    t = count_wins({{0.1, 0.2, 0.3}, {0.5, 0.5, 0.5}, {0.3, 0.9, 0.1}}, cols);
    CHECK(t.total() == 3);
    CHECK(t.wins == std::vector<std::size_t>{1, 1, 1});
    CHECK_THROWS_AS(count_wins({{0.1, std::nullopt, 0.3}}, cols), ContractError);
    CHECK_THROWS_AS(count_wins({{0.1, 0.2}}, cols), ContractError);
    CHECK(count_wins({}, cols).total() == 0);
}

TEST_CASE("achievement rate") {
    const std::vector<double> curve{1.0, 0.85, 0.7, 0.55, 0.4};
    CHECK(achievement_rate(curve, 0) == 0.0);
    CHECK(achievement_rate(curve, 4) == 1.0);
    CHECK(achievement_rate(curve, 2) == Approx(0.5).margin(2e-16));
    double prev = -1.0;
    for (std::size_t e = 0; e < curve.size(); ++e) {
        CHECK(achievement_rate(curve, e) >= prev);
        prev = achievement_rate(curve, e);
    }
    CHECK_THROWS_AS(achievement_rate(std::vector<double>{1.0, 1.0}, 1), DomainError);
    CHECK_THROWS_AS(achievement_rate(std::vector<double>{1.0}, 0), ContractError);
    CHECK_THROWS_AS(achievement_rate(curve, 5), ContractError);
}

TEST_CASE("timing ratio") {
    const std::vector<TimingEntry> e{{"f1", 2.0, 10, 100, 100}, {"bce", 1.0, 10, 100, 100}};
    CHECK(timing_ratio(std::span<const TimingEntry>(e), 1) == std::vector<double>{2.0, 1.0});
    CHECK(timing_ratio(std::span<const TimingEntry>(e), 0)[0] == 1.0);
    const std::vector<TimingEntry> bad{{"f1", 2.0, 10, 100, 50}, {"bce", 1.0, 10, 100, 100}};
    CHECK_THROWS_AS(timing_ratio(std::span<const TimingEntry>(bad), 1), ContractError);
    CHECK_THROWS_AS(timing_ratio(std::span<const TimingEntry>(e), 2), ContractError);
}

TEST_CASE("l_sweep grid shape and the small-L penalty") {
    const Dataset d = synth_imbalanced(600, 2, 0.2, 2.5, 6);
    CVOptions o;
    o.k = 3;
    const std::vector<MetricKind> kinds{MetricKind::f1(), MetricKind::balanced_accuracy()};
    const std::vector<double> scales{1.0, 73.0};
    const LSweepTable t = l_sweep(d, kinds, scales, NetworkConfig::slp(2), quick(LossSpec::bce(), 300), o);
    REQUIRE(t.score.size() == 2);
    CHECK(t.score[0].size() == 2);
    CHECK(t.metrics == std::vector<std::string>{"f1", "bacc"});
    CHECK(t.score[0][0] < t.score[0][1]);
    const std::vector<double> one{73.0};
    CHECK(l_sweep(d, kinds, one, NetworkConfig::slp(2), quick(LossSpec::bce(), 5), o).score[0].size() == 1);
    const std::vector<double> bad{0.0};
    CHECK_THROWS_AS(l_sweep(d, kinds, bad, NetworkConfig::slp(2), quick(LossSpec::bce(), 5), o), DomainError);
}

TEST_CASE("thread budget honours ANYLOSS_THREADS") {
    setenv("ANYLOSS_THREADS", "3", 1);
    CHECK(thread_budget() == 3);
    setenv("ANYLOSS_THREADS", "junk", 1);
    CHECK(thread_budget() >= 1);
    unsetenv("ANYLOSS_THREADS");
    std::vector<int> hits(50, 0);
    parallel_for(50, 4, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 50);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 7) throw ContractError("boom");
                    }),
                    ContractError);
}
