// anyloss-cli: command-line front end.
//
// Exit codes: 0 success, 1 check failure (gradcheck) or run failure,
// 2 usage / configuration / input error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "anyloss/anyloss.hpp"

namespace fs = std::filesystem;
using namespace anyloss;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------------------------
// Option groups shared by several subcommands

struct DataOptions {
    std::vector<std::string> paths;
    std::vector<double> synth;  // n, m, positive fraction, separation
    std::vector<std::string> label_map;
    std::string missing = "drop";
    std::uint64_t synth_seed = 1;

    void add(CLI::App* cmd, bool many) {
        auto* d = cmd->add_option("--data", paths, many ? "CSV file(s) or directories of CSVs" : "CSV file (label in the last column)");
        if (!many) d->expected(1);
        cmd->add_option("--synth", synth, "synthetic dataset instead: n,m,pos_fraction,separation")
            ->expected(4)
            ->delimiter(',');
        cmd->add_option("--synth-seed", synth_seed, "seed of the synthetic generator");
        cmd->add_option("--label-map", label_map, "map raw label text to 0/1, e.g. --label-map M=1 --label-map B=0");
        cmd->add_option("--missing", missing, "rows with missing values: drop or error")
            ->check(CLI::IsMember({"drop", "error"}));
    }

    CsvOptions csv_options() const {
        CsvOptions o;
        o.missing = missing == "error" ? MissingPolicy::Error : MissingPolicy::Drop;
        for (const auto& entry : label_map) {
            const auto eq = entry.rfind('=');
            if (eq == std::string::npos || (entry.substr(eq + 1) != "0" && entry.substr(eq + 1) != "1")) {
                throw UsageError("--label-map expects TEXT=0 or TEXT=1, got '" + entry + "'");
            }
            o.label_map[entry.substr(0, eq)] = entry.substr(eq + 1) == "1" ? 1 : 0;
        }
        return o;
    }

    std::vector<Dataset> load() const {
        std::vector<Dataset> out;
        if (!synth.empty()) {
            if (synth[0] < 1 || synth[1] < 1) throw UsageError("--synth needs n >= 1 and m >= 1");
            Dataset d = synth_imbalanced(static_cast<std::size_t>(synth[0]), static_cast<std::size_t>(synth[1]), synth[2],
                                         synth[3], synth_seed);
            out.push_back(std::move(d));
        }
        std::vector<std::string> files;
        for (const auto& p : paths) {
            if (fs::is_directory(p)) {
                std::vector<std::string> found;
                for (const auto& e : fs::directory_iterator(p)) {
                    if (e.is_regular_file() && e.path().extension() == ".csv") found.push_back(e.path().string());
                }
                std::sort(found.begin(), found.end());
                files.insert(files.end(), found.begin(), found.end());
            } else {
                files.push_back(p);
            }
        }
        const CsvOptions opts = csv_options();
        for (const auto& f : files) out.push_back(load_csv(f, opts).data);
        if (out.empty()) throw UsageError("no data: give --data PATH or --synth n,m,frac,sep");
        return out;
    }
};

struct ModelOptions {
    std::string loss = "bce";
    double beta = 1.0;
    double scale_l = kDefaultScale;
    bool any_l = false;
    std::string arch = "slp";
    std::size_t hidden = 2;
    bool no_bn = false;
    std::optional<std::size_t> epochs;
    std::optional<double> lr;
    std::optional<double> batch_frac;
    std::uint64_t seed = 42;

    // bench takes a list via --losses, so it skips the single --loss
    void add(CLI::App* cmd, bool with_loss = true, bool single_loss = true) {
        if (with_loss) {
            if (single_loss) cmd->add_option("--loss", loss, "mse, bce, acc, f1, fbeta, f<beta>, gmean, bacc");
            cmd->add_option("--beta", beta, "beta for --loss fbeta and for the F-beta evaluation metric");
            cmd->add_option("--scale-l", scale_l, "amplifying scale L of the AnyLoss approximation");
            cmd->add_flag("--allow-any-l", any_l, "accept L outside the valid range");
        }
        cmd->add_option("--arch", arch, "slp or mlp")->check(CLI::IsMember({"slp", "mlp"}));
        cmd->add_option("--hidden", hidden, "hidden nodes (mlp)")->check(CLI::PositiveNumber);
        cmd->add_flag("--no-bn", no_bn, "disable batch normalisation (mlp)");
        cmd->add_option("--epochs", epochs, "epochs (default: slp 1000, mlp 100)");
        cmd->add_option("--lr", lr, "learning rate (default depends on loss and architecture)");
        cmd->add_option("--batch-frac", batch_frac, "batch size as a fraction of the training set");
        cmd->add_option("--seed", seed, "seed for initialisation, batching and folds");
    }

    Architecture architecture() const { return arch == "mlp" ? Architecture::MLP : Architecture::SLP; }

    LossSpec spec(const std::string& name) const {
        return LossSpec::parse(name, beta, scale_l, any_l ? ScaleCheck::Override : ScaleCheck::Strict);
    }

    NetworkConfig network(std::size_t m) const {
        return architecture() == Architecture::MLP ? NetworkConfig::mlp(m, hidden, !no_bn, seed)
                                                   : NetworkConfig::slp(m, seed);
    }

    TrainConfig train_config(const LossSpec& s) const {
        TrainConfig tc = default_train_config(s, architecture(), seed);
        if (epochs) tc.epochs = *epochs;
        if (lr) tc.learning_rate = *lr;
        if (batch_frac) tc.batch_fraction = *batch_frac;
        tc.validate();
        return tc;
    }
};

fs::path prepare_out(const std::string& dir) {
    if (dir.empty()) throw UsageError("--out DIR is required");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
    return fs::path(dir);
}

/// Writes the options given for this run so it can be repeated with --config.
/// Defaults resolved per loss go in as comments; they are re-derived on rerun.
void echo_config(const CLI::App& app, const fs::path& out, const std::vector<TrainConfig>& resolved = {}) {
    std::ofstream f(out / "run_config.toml");
    if (!f) throw InputError("cannot write " + (out / "run_config.toml").string());
    f << "# rerun with: anyloss-cli --config run_config.toml\n";
    for (const TrainConfig& tc : resolved) {
        f << "# resolved " << tc.loss.name() << ": epochs=" << tc.epochs << " lr=" << tc.learning_rate
          << " batch_fraction=" << tc.batch_fraction << " L=" << tc.loss.scale().value() << '\n';
    }
    f << app.config_to_str(false, false);
}

std::string fmt2(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

// ----------------------------------------------------------------------------
// Subcommands

int cmd_lrange(const std::vector<double>& levels, bool grid, bool csv) {
    std::vector<std::pair<double, LRange>> rows;
    for (double t : levels) {
        try {
            const AccuracyLevel level(t);
            rows.emplace_back(t, grid ? valid_L_range_on_grid(level) : valid_L_range(level));
        } catch (const DomainError& e) {
            throw UsageError(std::string("lrange: ") + e.what());
        }
    }
    if (csv) std::cout << "t,min_L,max_L,empty\n";
    for (const auto& [t, r] : rows) {
        std::ostringstream ts;
        ts << t;
        if (csv) {
            std::cout << ts.str() << ',' << detail::format_double(r.min_L) << ',' << detail::format_double(r.max_L) << ','
                      << (r.empty() ? 1 : 0) << '\n';
        } else if (r.empty()) {
            std::cout << std::left << std::setw(8) << ts.str() << fmt2(r.min_L) << ' ' << fmt2(r.max_L)
                      << "  empty (no valid L)\n";
        } else {
            std::cout << std::left << std::setw(8) << ts.str() << fmt2(r.min_L) << ' ' << fmt2(r.max_L) << '\n';
        }
    }
    return kExitOk;
}

int cmd_gradcheck(const std::vector<std::string>& losses, std::size_t instances, bool sabotage, const std::string& out,
                  double beta, double scale_l) {
    GradCheckOptions o;
    o.instances = instances;
    o.sabotage_balanced_accuracy = sabotage;
    for (const auto& l : losses) o.specs.push_back(LossSpec::parse(l, beta, scale_l));
    const GradCheckReport r = run_gradcheck(o);
    for (const auto& c : r.cases) {
        std::printf("%-5s %-6s %-6s  max rel err %.3e  max abs err %.3e  (tol %.0e)\n", c.pass ? "PASS" : "FAIL",
                    c.loss.c_str(), c.level.c_str(), c.max_rel_err, c.max_abs_err, c.tolerance);
    }
    if (const GradCheckCase* w = r.worst_case()) {
        std::printf("worst: %s/%s %s\n", w->loss.c_str(), w->level.c_str(),
                    w->worst.empty() ? "(all components within the absolute tolerance)" : w->worst.c_str());
    }
    std::printf("%s\n", r.pass() ? "PASS" : "FAIL");
    if (!out.empty()) write_json_file((prepare_out(out) / "gradcheck.json").string(), to_json(r));
    return r.pass() ? kExitOk : kExitCheckFailed;
}

int cmd_train(const CLI::App& app, const DataOptions& data, const ModelOptions& mo, bool standardize,
              const std::string& out) {
    const fs::path dir = prepare_out(out);
    Dataset d = data.load().front();
    const LossSpec spec = mo.spec(mo.loss);
    const TrainConfig tc = mo.train_config(spec);
    echo_config(app, dir, {tc});

    Standardizer s;
    if (standardize) {
        s = Standardizer::fit(d.X);
        d.X = s.apply(d.X);
    }
    const TrainReport tr = train(init(mo.network(d.features())), d, tc);
    save_model((dir / "model.txt").string(), tr.network, spec.scale(), spec.name());
    {
        std::ofstream f(dir / "curve.csv");
        write_curves_csv(f, {spec.name()}, {tr.loss_curve});
    }
    if (standardize) {
        std::ofstream f(dir / "standardizer.csv");
        f << "feature,mean,scale\n";
        for (Eigen::Index j = 0; j < s.mean.size(); ++j) {
            f << j << ',' << detail::format_double(s.mean(j)) << ',' << detail::format_double(s.scale(j)) << '\n';
        }
    }
    const Prediction p = predict(tr.network, d.X);
    const FoldScores fit = score_predictions(d.y, p.labels, mo.beta);
    Json summary;
    summary["dataset"] = d.name;
    summary["loss"] = spec.name();
    summary["epochs"] = tc.epochs;
    summary["learning_rate"] = tc.learning_rate;
    summary["batch_fraction"] = tc.batch_fraction;
    summary["final_loss"] = tr.loss_curve.back();
    const auto kinds = evaluation_metrics(mo.beta);
    Json train_scores;
    for (std::size_t i = 0; i < kMetricCount; ++i) train_scores[kinds[i].name()] = fit.score[i];
    summary["train_scores"] = train_scores;
    write_json_file((dir / "summary.json").string(), summary);
    std::cout << "trained " << spec.name() << " on " << d.name << " (" << d.size() << " rows), final loss "
              << tr.loss_curve.back() << "; wrote " << dir.string() << '\n';
    return kExitOk;
}

int cmd_cv(const CLI::App& app, const DataOptions& data, const ModelOptions& mo, std::size_t folds,
           const std::string& out) {
    const fs::path dir = prepare_out(out);
    const Dataset d = data.load().front();
    const LossSpec spec = mo.spec(mo.loss);
    const TrainConfig tc = mo.train_config(spec);
    echo_config(app, dir, {tc});

    CVOptions o;
    o.k = folds;
    o.eval_beta = mo.beta;
    o.seed = mo.seed;
    const CVReport r = cross_validate(d, mo.network(d.features()), tc, o);
    write_json_file((dir / "cv.json").string(), to_json(r));
    write_json_file((dir / "cv_timing.json").string(),
                    Json{{"seconds_per_epoch", r.seconds_per_epoch()}, {"folds", [&] {
                             Json a = Json::array();
                             for (const auto& f : r.folds) a.push_back(f.train_seconds);
                             return a;
                         }()}});
    {
        std::ofstream f(dir / "curves.csv");
        write_curves_csv(f, {spec.name()}, {r.mean_curve()});
    }
    const auto kinds = evaluation_metrics(mo.beta);
    std::cout << d.name << ' ' << spec.name() << ' ' << folds << "-fold:";
    for (std::size_t i = 0; i < kMetricCount; ++i) std::cout << ' ' << kinds[i].name() << '=' << r.mean[i];
    std::cout << '\n';
    return kExitOk;
}

void write_bench(const fs::path& dir, const BenchResult& r) {
    write_json_file((dir / "scores.json").string(), bench_scores_json(r));
    if (!r.complete()) return;
    write_json_file((dir / "signtest.json").string(), bench_sign_json(r));
    write_json_file((dir / "timing.json").string(), bench_timing_json(r));
    std::vector<std::string> names;
    std::vector<std::vector<double>> curves;
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
        for (std::size_t j = 0; j < r.cells[i].size(); ++j) {
            names.push_back(r.datasets[i] + ":" + r.losses[j]);
            curves.push_back(r.cells[i][j].mean_curve());
        }
    }
    std::ofstream f(dir / "curves.csv");
    write_curves_csv(f, names, curves);
}

int cmd_bench(const CLI::App& app, const DataOptions& data, const ModelOptions& mo, const std::vector<std::string>& losses,
              std::size_t folds, const std::vector<double>& ropes, std::size_t samples, const std::string& out) {
    const fs::path dir = prepare_out(out);
    BenchConfig cfg;
    cfg.datasets = data.load();
    cfg.losses.clear();
    for (const auto& l : losses) cfg.losses.push_back(mo.spec(l));
    cfg.network = mo.network(0);
    cfg.epochs = mo.epochs;
    cfg.learning_rate = mo.lr;
    cfg.batch_fraction = mo.batch_frac;
    cfg.cv.k = folds;
    cfg.cv.eval_beta = mo.beta;
    cfg.cv.seed = mo.seed;
    cfg.seed = mo.seed;
    cfg.ropes = ropes;
    cfg.mc_samples = samples;
    std::vector<TrainConfig> resolved;
    for (const auto& l : cfg.losses) {
        resolved.push_back(cfg.train_config(l));
        resolved.back().validate();
    }
    echo_config(app, dir, resolved);

    BenchResult partial;
    try {
        run_bench(cfg, partial, [&](const BenchResult& r) {
            write_bench(dir, r);
            std::cerr << "bench: " << r.cells.back().back().dataset << " / " << r.cells.back().back().loss << " done\n";
        });
    } catch (...) {
        write_bench(dir, partial);
        std::cerr << "bench: aborted; partial scores kept in " << (dir / "scores.json").string() << '\n';
        throw;
    }
    write_bench(dir, partial);

    for (const auto& t : partial.tallies) {
        std::cout << std::left << std::setw(6) << t.metric;
        for (std::size_t i = 0; i < t.tally.columns.size(); ++i) {
            std::cout << ' ' << t.tally.columns[i] << '=' << t.tally.wins[i];
        }
        std::cout << '\n';
    }
    std::cout << "wrote " << dir.string() << '\n';
    return kExitOk;
}

int cmd_sweep(const CLI::App& app, const DataOptions& data, const ModelOptions& mo, const std::vector<std::string>& metrics,
              const std::vector<double>& scales, std::size_t folds, const std::string& out) {
    const fs::path dir = prepare_out(out);
    const Dataset d = data.load().front();
    std::vector<MetricKind> kinds;
    for (const auto& m : metrics) {
        const LossSpec s = LossSpec::parse(m, mo.beta, kDefaultScale);
        if (!s.is_anyloss()) throw UsageError("sweep: '" + m + "' is not an AnyLoss metric");
        kinds.push_back(s.metric());
    }
    // Defaults are per-loss; the AnyLoss settings apply to every sweep cell.
    const TrainConfig tc = mo.train_config(LossSpec::any(kinds.front()));
    echo_config(app, dir, {tc});

    CVOptions o;
    o.k = folds;
    o.eval_beta = mo.beta;
    o.seed = mo.seed;
    const LSweepTable t = l_sweep(d, kinds, scales, mo.network(d.features()), tc, o);
    write_json_file((dir / "sweep.json").string(), to_json(t));
    std::ofstream f(dir / "sweep.csv");
    f << "metric";
    for (double L : t.scales) f << ",L=" << detail::format_double(L);
    f << '\n';
    for (std::size_t i = 0; i < t.metrics.size(); ++i) {
        f << t.metrics[i];
        for (double v : t.score[i]) f << ',' << detail::format_double(v);
        f << '\n';
        std::cout << std::left << std::setw(6) << t.metrics[i];
        for (std::size_t j = 0; j < t.scales.size(); ++j) std::cout << "  L=" << t.scales[j] << ": " << t.score[i][j];
        std::cout << '\n';
    }
    return kExitOk;
}

std::vector<double> read_diffs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::vector<double> v;
    std::string tok;
    while (in >> tok) {
        for (char& c : tok) {
            if (c == ',') c = ' ';
        }
        std::istringstream parts(tok);
        std::string p;
        while (parts >> p) {
            try {
                v.push_back(std::stod(p));
            } catch (const std::exception&) {
                throw InputError("'" + path + "': not a number: '" + p + "'");
            }
        }
    }
    return v;
}

int cmd_signtest(std::vector<double> diffs, const std::string& file, double rope, std::size_t samples,
                 std::uint64_t seed) {
    if (!file.empty()) {
        const auto more = read_diffs_file(file);
        diffs.insert(diffs.end(), more.begin(), more.end());
    }
    if (diffs.empty()) throw UsageError("signtest: give --diffs or --file");
    std::cout << to_json(bayesian_sign_test(diffs, rope, samples, seed)).dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AnyLoss: confusion-matrix metrics as training losses"};
    app.set_config("--config", "", "read options from a TOML/INI file (flags override it)");
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");

    // lrange
    auto* lrange = app.add_subcommand("lrange", "valid range of the amplifying scale L per accuracy level t");
    std::vector<double> levels{0.1, 0.01, 0.001, 1e-14, 1e-15, 1e-16};
    bool grid = false;
    bool lrange_csv = false;
    lrange->add_option("t", levels, "accuracy levels in (0, 0.5)");
    lrange->add_flag("--grid", grid, "snap inwards to the two-decimal grid (min up, max down)");
    lrange->add_flag("--csv", lrange_csv, "CSV output with full precision");

    // gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of every loss and network gradient");
    std::vector<std::string> gc_losses;
    std::size_t gc_instances = 100;
    bool gc_sabotage = false;
    std::string gc_out;
    double gc_beta = 1.0;
    double gc_scale = kDefaultScale;
    gradcheck->add_option("--loss", gc_losses, "restrict to these losses (default: all six)");
    gradcheck->add_option("--beta", gc_beta, "beta for fbeta");
    gradcheck->add_option("--scale-l", gc_scale, "amplifying scale L");
    gradcheck->add_option("--instances", gc_instances, "random instances per check")->check(CLI::PositiveNumber);
    gradcheck->add_flag("--sabotage-bacc", gc_sabotage, "test mode: flip the sign of the balanced-accuracy gradient");
    gradcheck->add_option("--out", gc_out, "also write gradcheck.json here");

    // train
    auto* train_cmd = app.add_subcommand("train", "train one model; writes model.txt, curve.csv, summary.json");
    DataOptions train_data;
    ModelOptions train_model;
    bool no_standardize = false;
    std::string train_out;
    train_data.add(train_cmd, false);
    train_model.add(train_cmd);
    train_cmd->add_flag("--no-standardize", no_standardize, "train on raw features");
    train_cmd->add_option("--out", train_out, "output directory")->required();

    // cv
    auto* cv_cmd = app.add_subcommand("cv", "k-fold cross-validation of one loss; writes cv.json and curves.csv");
    DataOptions cv_data;
    ModelOptions cv_model;
    std::size_t cv_folds = 10;
    std::string cv_out;
    cv_data.add(cv_cmd, false);
    cv_model.add(cv_cmd);
    cv_cmd->add_option("--folds", cv_folds, "number of folds")->check(CLI::Range(2, 1000));
    cv_cmd->add_option("--out", cv_out, "output directory")->required();

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "datasets x losses grid with winner tallies and sign tests");
    DataOptions bench_data;
    ModelOptions bench_model;
    std::vector<std::string> bench_losses{"mse", "bce", "acc", "f1", "gmean", "bacc"};
    std::size_t bench_folds = 10;
    std::vector<double> ropes{0.01, 0.05};
    std::size_t samples = kDefaultSignTestSamples;
    std::string bench_out;
    bench_data.add(bench_cmd, true);
    bench_model.add(bench_cmd, true, false);
    bench_cmd->add_option("--losses", bench_losses, "losses to compare, baselines first")->delimiter(',');
    bench_cmd->add_option("--folds", bench_folds, "number of folds")->check(CLI::Range(2, 1000));
    bench_cmd->add_option("--rope", ropes, "sign-test rope value(s)")->delimiter(',');
    bench_cmd->add_option("--mc-samples", samples, "Monte Carlo samples per sign test")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--out", bench_out, "output directory")->required();

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "cross-validated scores across amplifying scales L");
    DataOptions sweep_data;
    ModelOptions sweep_model;
    std::vector<std::string> sweep_metrics{"acc", "f1", "gmean", "bacc"};
    std::vector<double> scales{30, 50, 73, 90, 110};
    std::size_t sweep_folds = 10;
    std::string sweep_out;
    sweep_data.add(sweep_cmd, false);
    sweep_model.add(sweep_cmd, false);
    sweep_cmd->add_option("--beta", sweep_model.beta, "beta for fbeta");
    sweep_cmd->add_option("--metrics", sweep_metrics, "AnyLoss metrics to sweep")->delimiter(',');
    sweep_cmd->add_option("--scales", scales, "values of L")->delimiter(',');
    sweep_cmd->add_option("--folds", sweep_folds, "number of folds")->check(CLI::Range(2, 1000));
    sweep_cmd->add_option("--out", sweep_out, "output directory")->required();

    // signtest
    auto* sign_cmd = app.add_subcommand("signtest", "Bayesian sign test on paired score differences");
    std::vector<double> diffs;
    std::string diff_file;
    double rope = 0.01;
    std::size_t sign_samples = kDefaultSignTestSamples;
    std::uint64_t sign_seed = 42;
    sign_cmd->add_option("--diffs", diffs, "differences (candidate - baseline)")->delimiter(',');
    sign_cmd->add_option("--file", diff_file, "file of differences (whitespace or comma separated)");
    sign_cmd->add_option("--rope", rope, "region of practical equivalence")->check(CLI::NonNegativeNumber);
    sign_cmd->add_option("--mc-samples", sign_samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
    sign_cmd->add_option("--seed", sign_seed, "Monte Carlo seed");

    // lets a [train] or train.x section in --config select the subcommand
    for (CLI::App* sub : app.get_subcommands({})) sub->configurable();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (lrange->parsed()) return cmd_lrange(levels, grid, lrange_csv);
        if (gradcheck->parsed()) {
            return cmd_gradcheck(gc_losses, gc_instances, gc_sabotage, gc_out, gc_beta, gc_scale);
        }
        if (train_cmd->parsed()) return cmd_train(app, train_data, train_model, !no_standardize, train_out);
        if (cv_cmd->parsed()) return cmd_cv(app, cv_data, cv_model, cv_folds, cv_out);
        if (bench_cmd->parsed()) {
            return cmd_bench(app, bench_data, bench_model, bench_losses, bench_folds, ropes, samples, bench_out);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(app, sweep_data, sweep_model, sweep_metrics, scales, sweep_folds, sweep_out);
        }
        if (sign_cmd->parsed()) return cmd_signtest(diffs, diff_file, rope, sign_samples, sign_seed);
    } catch (const UsageError& e) {
        std::cerr << "anyloss-cli: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "anyloss-cli: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ContractError& e) {
        std::cerr << "anyloss-cli: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InputError& e) {
        std::cerr << "anyloss-cli: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "anyloss-cli: run failed: " << e.what() << '\n';
        return kExitCheckFailed;
    }
    return kExitUsage;
}
