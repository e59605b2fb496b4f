#pragma once

// JSON and CSV serialisation of results. Wall-clock fields are only written
// when asked for, so that score files are byte-identical across reruns.

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anyloss/approx.hpp"
#include "anyloss/bench.hpp"
#include "anyloss/evaluation.hpp"
#include "anyloss/gradcheck.hpp"
#include "anyloss/model_io.hpp"
#include "anyloss/sign_test.hpp"

namespace anyloss {

using Json = nlohmann::ordered_json;

inline Json to_json(const SignTestResult& s) {
    return Json{{"rope", s.rope},       {"p_win", s.p_win},   {"p_rope", s.p_rope}, {"p_lose", s.p_lose},
                {"n_win", s.n_win},     {"n_rope", s.n_rope}, {"n_lose", s.n_lose}, {"samples", s.samples}};
}

inline Json to_json(const CVReport& r, bool with_timing = false) {
    const auto kinds = evaluation_metrics(r.eval_beta);
    Json j;
    j["dataset"] = r.dataset;
    j["loss"] = r.loss;
    j["k"] = r.k();
    j["epochs"] = r.epochs;
    j["batch_fraction"] = r.batch_fraction;
    Json mean = Json::object();
    for (std::size_t i = 0; i < kMetricCount; ++i) mean[kinds[i].name()] = r.mean[i];
    j["mean"] = mean;
    Json folds = Json::array();
    for (const auto& f : r.folds) {
        Json fj;
        for (std::size_t i = 0; i < kMetricCount; ++i) fj[kinds[i].name()] = f.score[i];
        Json deg = Json::array();
        for (std::size_t i = 0; i < kMetricCount; ++i) {
            if (f.degenerate[i]) deg.push_back(kinds[i].name());
        }
        fj["degenerate"] = deg;
        fj["train_size"] = f.train_size;
        fj["valid_size"] = f.valid_size;
        if (with_timing) fj["train_seconds"] = f.train_seconds;
        folds.push_back(fj);
    }
    j["folds"] = folds;
    if (with_timing) j["seconds_per_epoch"] = r.seconds_per_epoch();
    return j;
}

inline Json to_json(const WinTally& t) {
    Json j = Json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) j[t.columns[i]] = t.wins[i];
    return j;
}

inline Json to_json(const LSweepTable& t) {
    Json j;
    j["scales"] = t.scales;
    Json rows = Json::object();
    for (std::size_t i = 0; i < t.metrics.size(); ++i) rows[t.metrics[i]] = t.score[i];
    j["scores"] = rows;
    return j;
}

inline Json to_json(const GradCheckReport& r) {
    Json j;
    j["pass"] = r.pass();
    Json cases = Json::array();
    for (const auto& c : r.cases) {
        cases.push_back(Json{{"loss", c.loss},
                             {"level", c.level},
                             {"instances", c.instances},
                             {"max_rel_err", c.max_rel_err},
                             {"max_abs_err", c.max_abs_err},
                             {"tolerance", c.tolerance},
                             {"pass", c.pass},
                             {"worst", c.worst}});
    }
    j["cases"] = cases;
    return j;
}

/// Score grid and tallies; deterministic for a fixed configuration.
inline Json bench_scores_json(const BenchResult& r) {
    Json j;
    j["datasets"] = r.datasets;
    j["losses"] = r.losses;
    j["complete"] = r.complete();
    Json grid = Json::array();
    for (const auto& row : r.cells) {
        for (const auto& cell : row) grid.push_back(to_json(cell));
    }
    j["cells"] = grid;
    Json tallies = Json::object();
    for (const auto& t : r.tallies) tallies[t.metric] = to_json(t.tally);
    j["tallies"] = tallies;
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j;
}

inline Json bench_sign_json(const BenchResult& r) {
    Json arr = Json::array();
    for (const auto& s : r.sign_tests) {
        Json e{{"metric", s.metric}, {"candidate", s.candidate}, {"baseline", s.baseline}};
        e.update(to_json(s.result));
        arr.push_back(e);
    }
    return Json{{"direction", "candidate score - baseline score"}, {"tests", arr}};
}

inline Json bench_timing_json(const BenchResult& r) {
    Json j;
    j["baseline"] = "bce";
    Json rows = Json::array();
    for (std::size_t d = 0; d < r.timing.size(); ++d) {
        Json row;
        row["dataset"] = r.datasets[d];
        Json ratios = Json::object();
        Json spe = Json::object();
        for (std::size_t l = 0; l < r.timing[d].size(); ++l) {
            ratios[r.losses[l]] = r.timing[d][l] ? Json(*r.timing[d][l]) : Json(nullptr);
            spe[r.losses[l]] = r.cells[d][l].seconds_per_epoch();
        }
        row["ratio"] = ratios;
        row["seconds_per_epoch"] = spe;
        rows.push_back(row);
    }
    j["datasets"] = rows;
    return j;
}

/// One column per named curve, one row per epoch; shorter curves leave blanks.
inline void write_curves_csv(std::ostream& out, const std::vector<std::string>& names,
                             const std::vector<std::vector<double>>& curves) {
    out << "epoch";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    std::size_t rows = 0;
    for (const auto& c : curves) rows = std::max(rows, c.size());
    for (std::size_t e = 0; e < rows; ++e) {
        out << e + 1;
        for (const auto& c : curves) {
            out << ',';
            if (e < c.size()) out << detail::format_double(c[e]);
        }
        out << '\n';
    }
}

inline void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace anyloss
