#pragma once

// Resampling baselines: random under-sampling of the majority class and
// SMOTE over-sampling of the minority class.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "anyloss/data.hpp"
#include "anyloss/errors.hpp"

namespace anyloss {

/// Target class ratio majority : minority, e.g. {1, 1} or {1, 0.5}.
struct ClassRatio {
    double majority = 1.0;
    double minority = 1.0;

    double majority_per_minority() const { return majority / minority; }

    void validate() const {
        if (!(majority > 0.0) || !(minority > 0.0) || !std::isfinite(majority) || !std::isfinite(minority)) {
            throw ContractError("class ratio entries must be finite and > 0");
        }
        if (minority > majority) throw ContractError("class ratio must be majority:minority with majority >= minority");
    }
};

namespace detail {

struct ClassSplit {
    IndexList majority;
    IndexList minority;
};

inline ClassSplit split_classes(const Dataset& d) {
    ClassSplit s;
    IndexList pos;
    IndexList neg;
    for (std::size_t i = 0; i < d.size(); ++i) (d.y[i] ? pos : neg).push_back(i);
    // Ties: positives are treated as the minority.
    if (pos.size() <= neg.size()) {
        s.minority = std::move(pos);
        s.majority = std::move(neg);
    } else {
        s.minority = std::move(neg);
        s.majority = std::move(pos);
    }
    return s;
}

}  // namespace detail

/// Removes majority rows uniformly at random until majority/minority equals
/// the target. Output rows keep their original relative order.
inline Dataset random_undersample(const Dataset& d, ClassRatio target, std::uint64_t seed) {
    target.validate();
    auto cls = detail::split_classes(d);
    if (cls.minority.empty()) throw ContractError("random_undersample: dataset has a single class");
    const auto wanted = static_cast<std::size_t>(
        std::llround(static_cast<double>(cls.minority.size()) * target.majority_per_minority()));
    if (wanted == cls.majority.size()) return d;
    if (wanted > cls.majority.size()) {
        std::ostringstream os;
        os << "random_undersample: target " << target.majority << ':' << target.minority
           << " would require deleting minority samples";
        throw ContractError(os.str());
    }
    std::mt19937_64 rng(seed);
    std::shuffle(cls.majority.begin(), cls.majority.end(), rng);
    cls.majority.resize(wanted);
    IndexList keep = std::move(cls.minority);
    keep.insert(keep.end(), cls.majority.begin(), cls.majority.end());
    std::sort(keep.begin(), keep.end());
    return d.subset(keep);
}

/// x + lambda (neighbour - x)
inline Eigen::RowVectorXd smote_point(const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& neighbour, double lambda) {
    return x + lambda * (neighbour - x);
}

/// Indices (into `rows`) of the k nearest rows to rows[self] by Euclidean distance.
inline IndexList nearest_neighbours(const Matrix& X, const IndexList& rows, std::size_t self, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(rows.size());
    const auto xs = X.row(static_cast<Eigen::Index>(rows[self]));
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (j == self) continue;
        dist.emplace_back((X.row(static_cast<Eigen::Index>(rows[j])) - xs).squaredNorm(), j);
    }
    const std::size_t kk = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    IndexList out(kk);
    for (std::size_t j = 0; j < kk; ++j) out[j] = dist[j].second;
    return out;
}

/// Synthesises minority samples on segments between a minority point and one
/// of its k nearest minority neighbours until majority/minority reaches the
/// target. Synthetic rows are appended after the original rows.
inline Dataset smote(const Dataset& d, std::size_t k_neighbors, ClassRatio target, std::uint64_t seed) {
    target.validate();
    if (k_neighbors == 0) throw ContractError("smote: k_neighbors must be >= 1");
    const auto cls = detail::split_classes(d);
    if (cls.minority.size() <= k_neighbors) {
        std::ostringstream os;
        os << "smote: minority class has " << cls.minority.size() << " sample(s), need more than k = " << k_neighbors;
        throw ContractError(os.str());
    }
    const auto wanted = static_cast<std::size_t>(
        std::llround(static_cast<double>(cls.majority.size()) / target.majority_per_minority()));
    if (wanted <= cls.minority.size()) return d;

    const std::size_t extra = wanted - cls.minority.size();
    const Label minority_label = d.y[cls.minority.front()];

    std::vector<IndexList> neighbours(cls.minority.size());
    for (std::size_t i = 0; i < cls.minority.size(); ++i) {
        neighbours[i] = nearest_neighbours(d.X, cls.minority, i, k_neighbors);
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_source(0, cls.minority.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_nn(0, k_neighbors - 1);
    std::uniform_real_distribution<double> lambda(0.0, 1.0);

    Dataset out;
    out.name = d.name;
    out.X.resize(static_cast<Eigen::Index>(d.size() + extra), d.X.cols());
    out.X.topRows(d.X.rows()) = d.X;
    out.y = d.y;
    out.y.resize(d.size() + extra, minority_label);
    for (std::size_t s = 0; s < extra; ++s) {
        const std::size_t src = pick_source(rng);
        const std::size_t nn = neighbours[src][pick_nn(rng)];
        out.X.row(static_cast<Eigen::Index>(d.size() + s)) =
            smote_point(d.X.row(static_cast<Eigen::Index>(cls.minority[src])),
                        d.X.row(static_cast<Eigen::Index>(cls.minority[nn])), lambda(rng));
    }
    return out;
}

}  // namespace anyloss
