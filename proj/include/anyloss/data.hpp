#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "anyloss/errors.hpp"
#include "anyloss/numeric.hpp"

namespace anyloss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<Label>;
using IndexList = std::vector<std::size_t>;

/// Feature matrix (n x m) and binary labels.
struct Dataset {
    Matrix X;
    Labels y;
    std::string name;

    std::size_t size() const { return y.size(); }
    std::size_t features() const { return static_cast<std::size_t>(X.cols()); }
    std::size_t positives() const { return static_cast<std::size_t>(std::count(y.begin(), y.end(), Label{1})); }
    std::size_t negatives() const { return size() - positives(); }

    /// majority : minority, expressed as majority / minority (>= 1; inf if a class is absent).
    double imbalance_ratio() const {
        const auto pos = static_cast<double>(positives());
        const auto neg = static_cast<double>(negatives());
        const double lo = std::min(pos, neg);
        return lo == 0.0 ? std::numeric_limits<double>::infinity() : std::max(pos, neg) / lo;
    }

    Dataset subset(const IndexList& rows) const {
        Dataset out;
        out.name = name;
        out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
        out.y.resize(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out.X.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(rows[r]));
            out.y[r] = y[rows[r]];
        }
        return out;
    }

    /// Throws ContractError unless the dataset invariants hold.
    void validate() const {
        if (size() == 0 || X.cols() == 0) throw ContractError("dataset must have n >= 1 and m >= 1");
        if (static_cast<std::size_t>(X.rows()) != y.size()) {
            throw ContractError("dataset: feature rows and label count differ");
        }
        for (Label l : y) {
            if (l > 1) throw ContractError("dataset: labels must be 0 or 1");
        }
        if (!X.allFinite()) throw ContractError("dataset: non-finite feature value");
    }
};

// ---------------------------------------------------------------------------
// CSV ingestion

enum class MissingPolicy { Drop, Error };

struct CsvOptions {
    /// Raw label text -> 0/1. When empty, labels must read as 0 or 1.
    std::map<std::string, Label> label_map;
    MissingPolicy missing = MissingPolicy::Drop;
    char delimiter = ',';
};

struct CsvLoadResult {
    Dataset data;
    std::vector<std::string> feature_names;
    std::size_t dropped_rows = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(delim, start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool is_missing(std::string_view cell) {
    return cell.empty() || cell == "NA" || cell == "na" || cell == "?" || cell == "NaN" || cell == "nan";
}

inline bool parse_double(std::string_view cell, double& out) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

}  // namespace detail

/// Header row required; comma separated; last column is the label.
inline CsvLoadResult load_csv(std::istream& in, const std::string& name, const CsvOptions& opts = {}) {
    std::string line;
    std::size_t line_no = 0;
    // Skip a UTF-8 BOM and blank lines before the header.
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!detail::trim(line).empty()) break;
    }
    if (detail::trim(line).empty()) throw InputError(name + ": missing header row");

    CsvLoadResult result;
    for (auto h : detail::split(line, opts.delimiter)) result.feature_names.emplace_back(h);
    if (result.feature_names.size() < 2) {
        throw InputError(name + ": need at least one feature column and a label column");
    }
    result.feature_names.pop_back();
    const std::size_t m = result.feature_names.size();

    std::vector<double> values;
    Labels labels;
    std::vector<double> row(m);
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split(line, opts.delimiter);
        if (cells.size() != m + 1) {
            std::ostringstream os;
            os << name << ':' << line_no << ": expected " << m + 1 << " columns, found " << cells.size();
            throw InputError(os.str());
        }
        bool missing = false;
        for (std::size_t j = 0; j <= m; ++j) {
            if (detail::is_missing(cells[j])) {
                if (opts.missing == MissingPolicy::Error) {
                    std::ostringstream os;
                    os << name << ':' << line_no << ": missing value in column " << j + 1;
                    throw InputError(os.str());
                }
                missing = true;
            }
        }
        if (missing) {
            ++result.dropped_rows;
            continue;
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (!detail::parse_double(cells[j], row[j])) {
                std::ostringstream os;
                os << name << ':' << line_no << ": column " << j + 1 << " ('" << result.feature_names[j]
                   << "'): cannot parse '" << cells[j] << "' as a number";
                throw InputError(os.str());
            }
        }
        const std::string label_text(cells[m]);
        Label label = 0;
        if (!opts.label_map.empty()) {
            const auto it = opts.label_map.find(label_text);
            if (it == opts.label_map.end()) {
                std::ostringstream os;
                os << name << ':' << line_no << ": label '" << label_text << "' not in label map";
                throw InputError(os.str());
            }
            label = it->second;
        } else {
            double v = 0.0;
            if (!detail::parse_double(cells[m], v) || (v != 0.0 && v != 1.0)) {
                std::ostringstream os;
                os << name << ':' << line_no << ": label '" << label_text
                   << "' is not binary (0/1); supply a label map";
                throw InputError(os.str());
            }
            label = v == 1.0 ? 1 : 0;
        }
        values.insert(values.end(), row.begin(), row.end());
        labels.push_back(label);
    }
    if (labels.empty()) throw InputError(name + ": no usable data rows");
    if (result.dropped_rows > 0) {
        std::ostringstream os;
        os << name << ": dropped " << result.dropped_rows << " row(s) with missing values";
        warn(os.str());
    }

    const auto n = static_cast<Eigen::Index>(labels.size());
    result.data.X = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), n, static_cast<Eigen::Index>(m));
    result.data.y = std::move(labels);
    result.data.name = name;
    return result;
}

inline CsvLoadResult load_csv(const std::string& path, const CsvOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::string stem = path.substr(path.find_last_of("/\\") + 1);
    if (const auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem.resize(dot);
    return load_csv(in, stem, opts);
}

inline void write_csv(std::ostream& out, const Dataset& d, const std::vector<std::string>& feature_names = {}) {
    for (Eigen::Index j = 0; j < d.X.cols(); ++j) {
        if (static_cast<std::size_t>(j) < feature_names.size()) {
            out << feature_names[static_cast<std::size_t>(j)];
        } else {
            out << 'x' << j + 1;
        }
        out << ',';
    }
    out << "label\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
        for (Eigen::Index j = 0; j < d.X.cols(); ++j) out << d.X(i, j) << ',';
        out << static_cast<int>(d.y[static_cast<std::size_t>(i)]) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Synthetic data

/// Two unit-covariance Gaussian clusters whose means are `separation` apart
/// along a random direction; exactly round(n * pos_fraction) positives.
inline Dataset synth_imbalanced(std::size_t n, std::size_t m, double pos_fraction, double separation,
                                std::uint64_t seed) {
    if (!(pos_fraction > 0.0 && pos_fraction < 1.0)) {
        throw ContractError("synth_imbalanced: pos_fraction must lie in (0, 1)");
    }
    if (n == 0 || m == 0) throw ContractError("synth_imbalanced: n and m must be positive");
    if (!(separation >= 0.0) || !std::isfinite(separation)) {
        throw ContractError("synth_imbalanced: separation must be finite and >= 0");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Vector dir(static_cast<Eigen::Index>(m));
    do {
        for (auto& v : dir) v = gauss(rng);
    } while (dir.norm() < 1e-12);
    dir.normalize();

    const auto n_pos = static_cast<std::size_t>(std::llround(static_cast<double>(n) * pos_fraction));
    IndexList order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    Dataset d;
    d.name = "synthetic";
    d.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    d.y.assign(n, 0);
    for (std::size_t k = 0; k < n_pos; ++k) d.y[order[k]] = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (Eigen::Index j = 0; j < d.X.cols(); ++j) d.X(r, j) = gauss(rng);
        if (d.y[i]) d.X.row(r) += separation * dir.transpose();
    }
    return d;
}

// ---------------------------------------------------------------------------
// Stratified k-fold

struct FoldPlan {
    std::vector<IndexList> folds;

    std::size_t k() const { return folds.size(); }

    /// All indices not in fold `f`, ascending.
    IndexList train_indices(std::size_t f) const {
        IndexList out;
        for (std::size_t g = 0; g < folds.size(); ++g) {
            if (g != f) out.insert(out.end(), folds[g].begin(), folds[g].end());
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

/// Per-class seeded shuffle followed by round-robin assignment. The second
/// class continues the rotation where the first stopped, so fold sizes also
/// differ by at most one.
inline FoldPlan stratified_kfold(std::span<const Label> y, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ContractError("stratified_kfold: k must be >= 2");
    if (k > y.size()) {
        std::ostringstream os;
        os << "stratified_kfold: k = " << k << " exceeds sample count " << y.size();
        throw ContractError(os.str());
    }
    IndexList by_class[2];
    for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i] ? 1 : 0].push_back(i);
    for (int c = 0; c < 2; ++c) {
        if (!by_class[c].empty() && by_class[c].size() < k) {
            std::ostringstream os;
            os << "stratified_kfold: class " << c << " has " << by_class[c].size() << " member(s) for k = " << k
               << "; some folds will lack it";
            warn(os.str());
        }
    }
    std::mt19937_64 rng(seed);
    FoldPlan plan;
    plan.folds.resize(k);
    std::size_t slot = 0;
    // Minority class first keeps its spread exact regardless of the other class.
    const int first = by_class[1].size() <= by_class[0].size() ? 1 : 0;
    for (int c : {first, 1 - first}) {
        IndexList& members = by_class[c];
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t idx : members) {
            plan.folds[slot].push_back(idx);
            slot = (slot + 1) % k;
        }
    }
    for (auto& f : plan.folds) std::sort(f.begin(), f.end());
    return plan;
}

// ---------------------------------------------------------------------------
// Standardisation

/// Per-feature z-scoring fitted on one split and applied to others.
/// Constant features keep unit scale.
struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd scale;

    static Standardizer fit(const Matrix& X) {
        Standardizer s;
        const double n = static_cast<double>(X.rows());
        s.mean = X.colwise().mean();
        s.scale.resize(X.cols());
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            const double var = (X.col(j).array() - s.mean(j)).square().sum() / n;
            const double sd = std::sqrt(var);
            s.scale(j) = sd > 1e-12 ? sd : 1.0;
        }
        return s;
    }

    Matrix apply(const Matrix& X) const {
        return (X.rowwise() - mean).array().rowwise() / scale.array();
    }
};

}  // namespace anyloss
