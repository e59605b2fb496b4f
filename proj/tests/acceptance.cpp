// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "anyloss/anyloss.hpp"

namespace fs = std::filesystem;
using namespace anyloss;

namespace {

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
    std::printf("%s %s %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_cli(const std::string& args, const fs::path& stdout_file) {
    const std::string cmd = std::string("\"") + ANYLOSS_CLI_PATH + "\" " + args + " > \"" + stdout_file.string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Runs `fn` guarding against exceptions so one criterion cannot hide the rest.
void criterion(const char* id, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

}  // namespace

int main() {
    const fs::path work = fs::temp_directory_path() / ("anyloss_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(work);
    WarningHandler quiet = [](const std::string&) {};
    set_warning_handler(quiet);

    // AC1: valid L ranges against reference bounds, library and CLI.
    criterion("AC1", [&] {
        struct Row {
            double t;
            double lo;
            double hi;
            bool empty;
        };
        const Row rows[] = {{0.1, 5.50, 91.84, false},   {0.01, 9.38, 74.97, false},  {0.001, 13.85, 73.62, false},
                            {1e-14, 64.48, 73.47, false}, {1e-15, 69.08, 73.47, false}, {1e-16, 73.69, 73.47, true}};
        const auto t0 = std::chrono::steady_clock::now();
        const int code = run_cli("lrange", work / "lrange.txt");
        std::istringstream cli(slurp(work / "lrange.txt"));
        const double elapsed = seconds_since(t0);
        bool ok = code == 0;
        double worst = 0.0;
        for (const Row& r : rows) {
            const LRange lib = valid_L_range(AccuracyLevel(r.t));
            double t = 0, lo = 0, hi = 0;
            cli >> t >> lo >> hi;
            std::string rest;
            std::getline(cli, rest);
            const bool cli_empty = rest.find("empty") != std::string::npos;
            for (double v : {std::fabs(std::round(lib.min_L * 100) / 100 - r.lo), std::fabs(std::round(lib.max_L * 100) / 100 - r.hi),
                             std::fabs(lo - r.lo), std::fabs(hi - r.hi)}) {
                worst = std::max(worst, v);
            }
            ok = ok && t == r.t && lib.empty() == r.empty && cli_empty == r.empty;
        }
        ok = ok && worst <= 0.01 + 1e-9 && elapsed < 1.0;
        std::ostringstream d;
        d << "lrange matches all 12 table bounds within " << worst << " (tol 0.01), empty at 1e-16, cli "
          << std::fixed << std::setprecision(3) << elapsed << "s";
        report("AC1", ok, d.str());
    });

    // AC2: gradient suite.
    criterion("AC2", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        const GradCheckReport r = run_gradcheck();
        const double elapsed = seconds_since(t0);
        double loss_rel = 0.0, net_rel = 0.0, max_abs = 0.0;
        std::size_t min_instances = SIZE_MAX;
        for (const auto& c : r.cases) {
            (c.level == "loss" ? loss_rel : net_rel) = std::max(c.level == "loss" ? loss_rel : net_rel, c.max_rel_err);
            max_abs = std::max(max_abs, c.max_abs_err);
            min_instances = std::min(min_instances, c.instances);
        }
        GradCheckOptions sab;
        sab.sabotage_balanced_accuracy = true;
        sab.instances = 5;
        const bool caught = !run_gradcheck(sab).pass();
        std::ostringstream d;
        d << r.cases.size() << " checks x " << min_instances << " instances; max rel err loss-level " << loss_rel
          << " (tol 1e-5), end-to-end " << net_rel << " (tol 1e-4), components within 1e-8 abs: max abs err " << max_abs
          << "; sabotage caught=" << (caught ? "yes" : "no") << "; " << std::setprecision(3) << elapsed << "s";
        report("AC2", r.pass() && caught && min_instances >= 100 && elapsed < 30.0, d.str());
    });

    // AC3: soft confusion within n * 6.8e-4 of the hard one.
    criterion("AC3", [&] {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> off(0.1, 0.5);
        std::uniform_int_distribution<std::size_t> pick_n(1, 500);
        std::bernoulli_distribution coin(0.5);
        const AmplifyingScale L(73.0);
        bool ok = true;
        double worst_ratio = 0.0;
        for (int rep = 0; rep < 1000; ++rep) {
            const std::size_t n = pick_n(rng);
            Labels y(n);
            std::vector<double> p(n), yh(n);
            for (std::size_t i = 0; i < n; ++i) {
                y[i] = coin(rng);
                p[i] = coin(rng) ? 0.5 + off(rng) : 0.5 - off(rng);
                yh[i] = approximate(p[i], L);
            }
            const SoftConfusion s = soft_confusion(y, yh);
            const HardConfusion h = hard_confusion(y, threshold_labels(p));
            const double bound = static_cast<double>(n) * 6.8e-4;
            for (double diff : {s.tn - h.tn, s.fn - h.fn, s.fp - h.fp, s.tp - h.tp}) {
                ok = ok && std::fabs(diff) <= bound;
                worst_ratio = std::max(worst_ratio, std::fabs(diff) / bound);
            }
        }
        std::ostringstream d;
        d << "1000 vectors, largest |soft - hard| reached " << worst_ratio << " of the n*6.8e-4 bound";
        report("AC3", ok, d.str());
    });

    // AC4: saturation at L = 100 stops learning; L = 73 does not.
    criterion("AC4", [&] {
        const double a100 = approximate(0.9, AmplifyingScale(100.0));
        const double a73 = approximate(0.9, AmplifyingScale(73.0));
        Network net = init(NetworkConfig::slp(2, 1));
        net.params.out_w.setZero();
        net.params.out_b = std::log(0.9 / 0.1);
        Matrix X(4, 2);
        X << 0.3, -1.0, 1.2, 0.4, -0.7, 0.9, 0.1, 0.2;
        const Labels y{1, 0, 1, 0};
        const auto grad_for = [&](double Lv) {
            const LossSpec spec = LossSpec::any(MetricKind::f1(), AmplifyingScale(Lv), ScaleCheck::Override);
            const ForwardCache c = forward(net, X, spec.scale());
            return backward(net, c, loss_grad(spec, y, c.approximated()).grad, GradientSite::Approximated);
        };
        const bool zero100 = grad_for(100.0).all_zero();
        const bool nonzero73 = !grad_for(73.0).all_zero();
        std::ostringstream d;
        d << std::setprecision(17) << "A(0.9; L=100) = " << a100 << ", parameter gradient all zero=" << zero100
          << "; A(0.9; L=73) = " << a73 << ", gradient nonzero=" << nonzero73;
        report("AC4", a100 == 1.0 && zero100 && a73 < 1.0 && a73 > 0.5 && nonzero73, d.str());
    });

    // AC5: imbalanced synthetic data, SLP, 1000 epochs, 10-fold CV.
    criterion("AC5", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        const Dataset d = synth_imbalanced(10'000, 2, 0.1, 1.5, 2024);
        CVOptions o;
        o.k = 10;
        o.seed = 7;
        const auto run = [&](const LossSpec& loss) {
            const TrainConfig tc = default_train_config(loss, Architecture::SLP, 7);
            return cross_validate(d, NetworkConfig::slp(2, 7), tc, o);
        };
        const CVReport bce = run(LossSpec::bce());
        const CVReport f1 = run(LossSpec::any(MetricKind::f1()));
        const CVReport bacc = run(LossSpec::any(MetricKind::balanced_accuracy()));
        const double f1_gap = f1.mean_of(MetricId::FBeta) - bce.mean_of(MetricId::FBeta);
        const double ba_gap = bacc.mean_of(MetricId::BalancedAccuracy) - bce.mean_of(MetricId::BalancedAccuracy);
        const double elapsed = seconds_since(t0);
        std::ostringstream s;
        s << std::setprecision(4) << "9:1 synthetic n=10000: F1 " << f1.mean_of(MetricId::FBeta) << " vs BCE "
          << bce.mean_of(MetricId::FBeta) << " (gap " << f1_gap << ", need 0.03); bacc "
          << bacc.mean_of(MetricId::BalancedAccuracy) << " vs BCE " << bce.mean_of(MetricId::BalancedAccuracy)
          << " (gap " << ba_gap << ", need 0.05); " << std::setprecision(3) << elapsed << "s";
        report("AC5", f1_gap >= 0.03 && ba_gap >= 0.05 && elapsed <= 600.0, s.str());
    });

    // AC6: achievement rate.
    criterion("AC6", [&] {
        // 0.7 and 0.4 are not binary fractions; the quotient of their double
        // values is one ulp above 0.5. A curve with representable values is exact.
        const std::vector<double> worked{1.0, 0.7, 0.4};
        const std::vector<double> dyadic{1.0, 0.75, 0.5};
        const double r_worked = achievement_rate(worked, 1);
        const double r_dyadic = achievement_rate(dyadic, 1);
        bool last_exact = true;
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 5.0);
        for (int i = 0; i < 1000; ++i) {
            std::vector<double> c{u(rng) + 5.0, u(rng), u(rng)};
            last_exact = last_exact && achievement_rate(c, 2) == 1.0 && achievement_rate(c, 0) == 0.0;
        }
        const double ulps = std::fabs(r_worked - 0.5) / (std::nextafter(0.5, 1.0) - 0.5);
        std::ostringstream d;
        d << std::setprecision(17) << "worked example (1.0, 0.7, 0.4) -> " << r_worked << " (" << ulps
          << " ulp from 0.5, decimal inputs), exact-input variant (1.0, 0.75, 0.5) -> " << r_dyadic
          << "; final epoch == 1.0 and epoch 0 == 0.0 exactly on 1000 random curves: " << (last_exact ? "yes" : "no");
        report("AC6", ulps <= 1.0 && r_dyadic == 0.5 && last_exact, d.str());
    });

    // AC7: sign-test sanity, library and CLI.
    criterion("AC7", [&] {
        const std::vector<double> pos(30, 0.2), zero(30, 0.0);
        const double p_win = bayesian_sign_test(pos, 0.01).p_win;
        const double p_rope = bayesian_sign_test(zero, 0.01).p_rope;
        std::vector<double> mixed(9, 0.2);
        mixed.push_back(-0.2);
        const double a = bayesian_sign_test(mixed, 0.01, 1'000'000, 11).p_win;
        const double b = bayesian_sign_test(mixed, 0.01, 1'000'000, 12).p_win;
        const int code = run_cli("signtest --diffs 0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,"
                                 "0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2,0.2 --rope 0.01",
                                 work / "sign.json");
        const Json cli = Json::parse(slurp(work / "sign.json"));
        std::ostringstream d;
        d << "all +0.2: p_win " << p_win << "; all 0: p_rope " << p_rope << "; mixed 9:1 at 1e6 samples: p_win "
          << a << " vs " << b << " (|diff| " << std::fabs(a - b) << ", tol 0.005); cli p_win " << cli["p_win"];
        report("AC7", p_win >= 0.999 && p_rope >= 0.999 && std::fabs(a - b) <= 0.005 && code == 0 &&
                          cli["p_win"].get<double>() >= 0.999,
               d.str());
    });

    // AC8: per-epoch wall time of AnyLoss relative to BCE under identical settings.
    criterion("AC8", [&] {
        const Dataset d = synth_imbalanced(10'000, 2, 0.1, 1.5, 2024);
        const std::vector<LossSpec> specs = {LossSpec::bce(), LossSpec::any(MetricKind::accuracy()),
                                             LossSpec::any(MetricKind::f1()), LossSpec::any(MetricKind::g_mean()),
                                             LossSpec::any(MetricKind::balanced_accuracy())};
        // Interleaved repeats; the median per spec damps scheduler noise.
        constexpr int repeats = 7;
        std::vector<std::vector<double>> times(specs.size());
        for (int rep = 0; rep < repeats; ++rep) {
            for (std::size_t s = 0; s < specs.size(); ++s) {
                TrainConfig tc = default_train_config(specs[s], Architecture::SLP, 1);
                tc.epochs = 100;
                times[s].push_back(train(init(NetworkConfig::slp(2, 1)), d, tc).wall_time_per_epoch());
            }
        }
        std::vector<TimingEntry> entries;
        for (std::size_t s = 0; s < specs.size(); ++s) {
            std::sort(times[s].begin(), times[s].end());
            entries.push_back({specs[s].name(), times[s][repeats / 2], 100, d.size(), d.size()});
        }
        const std::vector<double> ratio = timing_ratio(std::span<const TimingEntry>(entries), 0);
        double mean = 0.0;
        std::ostringstream detail;
        detail << std::setprecision(3);
        for (std::size_t s = 1; s < specs.size(); ++s) {
            mean += ratio[s];
            detail << specs[s].name() << ' ' << ratio[s] << ", ";
        }
        mean /= static_cast<double>(specs.size() - 1);
        detail << "mean AnyLoss/BCE per-epoch time " << mean << " (band 0.8-1.3)";
        report("AC8", mean >= 0.8 && mean <= 1.3, detail.str());
    });

    // AC9: bench over the bundled CSVs through the CLI, twice.
    criterion("AC9", [&] {
        const fs::path a = work / "bench_a";
        const fs::path b = work / "bench_b";
        const std::string common = std::string("bench --data ") + ANYLOSS_DATA_DIR + " --out ";
        const int ca = run_cli(common + "\"" + a.string() + "\"", work / "bench_a.txt");
        const int cb = run_cli(common + "\"" + b.string() + "\"", work / "bench_b.txt");
        const Json scores = Json::parse(slurp(a / "scores.json"));
        const Json sign = Json::parse(slurp(a / "signtest.json"));
        const std::size_t datasets = scores["datasets"].size();
        bool tallies_ok = scores["tallies"].size() == 4;
        for (const auto& [metric, tally] : scores["tallies"].items()) {
            std::size_t total = 0;
            for (const auto& [col, wins] : tally.items()) total += wins.get<std::size_t>();
            tallies_ok = tallies_ok && total == datasets;
        }
        bool sign_ok = !sign["tests"].empty();
        for (const auto& t : sign["tests"]) {
            const double s = t["p_win"].get<double>() + t["p_rope"].get<double>() + t["p_lose"].get<double>();
            sign_ok = sign_ok && std::fabs(s - 1.0) <= 1e-9;
        }
        const bool same = slurp(a / "scores.json") == slurp(b / "scores.json") &&
                          slurp(a / "signtest.json") == slurp(b / "signtest.json");
        const bool echoed = fs::exists(a / "run_config.toml") && fs::exists(a / "curves.csv") && fs::exists(a / "timing.json");
        std::ostringstream d;
        d << datasets << " datasets; tallies per metric sum to " << datasets << ": " << (tallies_ok ? "yes" : "no") << "; "
          << sign["tests"].size() << " sign tests, probabilities sum to 1: " << (sign_ok ? "yes" : "no")
          << "; rerun byte-identical scores/signtest: " << (same ? "yes" : "no") << "; config echoed: " << (echoed ? "yes" : "no");
        report("AC9", ca == 0 && cb == 0 && datasets >= 3 && tallies_ok && sign_ok && same && echoed, d.str());
    });

    std::error_code ec;
    fs::remove_all(work, ec);
    std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
