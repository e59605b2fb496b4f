#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "anyloss/errors.hpp"
#include "anyloss/numeric.hpp"

namespace anyloss {

/// Confusion matrix cells. Real-valued for the soft (differentiable) variant,
/// integer counts for the thresholded one.
template <typename T>
struct BasicConfusion {
    T tn{};
    T fn{};
    T fp{};
    T tp{};

    T total() const { return tn + fn + fp + tp; }
    T positives() const { return tp + fn; }
    T negatives() const { return tn + fp; }
    friend bool operator==(const BasicConfusion&, const BasicConfusion&) = default;
};

using SoftConfusion = BasicConfusion<double>;
using HardConfusion = BasicConfusion<std::int64_t>;

enum class MetricId { Accuracy, FBeta, GMean, BalancedAccuracy };

/// Target metric f(TN, FN, FP, TP). beta is only meaningful for FBeta.
class MetricKind {
public:
    static MetricKind accuracy() { return MetricKind(MetricId::Accuracy, 1.0); }
    static MetricKind f_beta(double beta) {
        if (!std::isfinite(beta) || beta <= 0.0) {
            throw DomainError("F-beta requires a finite beta > 0");
        }
        return MetricKind(MetricId::FBeta, beta);
    }
    static MetricKind f1() { return f_beta(1.0); }
    static MetricKind g_mean() { return MetricKind(MetricId::GMean, 1.0); }
    static MetricKind balanced_accuracy() { return MetricKind(MetricId::BalancedAccuracy, 1.0); }

    MetricId id() const { return id_; }
    double beta() const { return beta_; }

    /// Metrics whose formula divides by the per-class totals.
    bool class_ratio() const { return id_ == MetricId::GMean || id_ == MetricId::BalancedAccuracy; }

    /// Short identifier: acc, f1, f0.5, f2, gmean, bacc.
    std::string name() const {
        switch (id_) {
            case MetricId::Accuracy: return "acc";
            case MetricId::FBeta: {
                std::ostringstream os;
                os << 'f' << beta_;
                return os.str();
            }
            case MetricId::GMean: return "gmean";
            case MetricId::BalancedAccuracy: return "bacc";
        }
        return "?";
    }

    friend bool operator==(const MetricKind&, const MetricKind&) = default;

private:
    MetricKind(MetricId id, double beta) : id_(id), beta_(beta) {}
    MetricId id_;
    double beta_;
};

/// Metric value; degenerate is set when a denominator vanished and the value
/// was defined as 0 by convention.
struct MetricResult {
    double value = 0.0;
    bool degenerate = false;
};

/// Predicted label: 1 iff p >= 0.5.
inline Label threshold_label(double p) { return p >= 0.5 ? 1 : 0; }

inline std::vector<Label> threshold_labels(std::span<const double> probs) {
    std::vector<Label> out(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) out[i] = threshold_label(probs[i]);
    return out;
}

namespace detail {
inline void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": length mismatch (" << a << " vs " << b << ")";
        throw ContractError(os.str());
    }
}
}  // namespace detail

/// Differentiable confusion matrix from labels and approximated outputs yh.
inline SoftConfusion soft_confusion(std::span<const Label> y, std::span<const double> yh) {
    detail::require_same_length(y.size(), yh.size(), "soft_confusion");
    const std::size_t n = y.size();
    SoftConfusion c;
    c.tp = pairwise_sum(n, [&](std::size_t i) { return y[i] ? yh[i] : 0.0; });
    c.fn = pairwise_sum(n, [&](std::size_t i) { return y[i] ? 1.0 - yh[i] : 0.0; });
    c.fp = pairwise_sum(n, [&](std::size_t i) { return y[i] ? 0.0 : yh[i]; });
    c.tn = pairwise_sum(n, [&](std::size_t i) { return y[i] ? 0.0 : 1.0 - yh[i]; });
    return c;
}

inline HardConfusion hard_confusion(std::span<const Label> y, std::span<const Label> yhat) {
    detail::require_same_length(y.size(), yhat.size(), "hard_confusion");
    HardConfusion c;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] > 1 || yhat[i] > 1) throw ContractError("hard_confusion: labels must be 0 or 1");
        if (y[i]) {
            (yhat[i] ? c.tp : c.fn) += 1;
        } else {
            (yhat[i] ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

template <typename T>
MetricResult metric_score(const BasicConfusion<T>& conf, const MetricKind& kind) {
    const double tn = static_cast<double>(conf.tn);
    const double fn = static_cast<double>(conf.fn);
    const double fp = static_cast<double>(conf.fp);
    const double tp = static_cast<double>(conf.tp);

    switch (kind.id()) {
        case MetricId::Accuracy: {
            const double n = tn + fn + fp + tp;
            if (n <= 0.0) return {0.0, true};
            return {(tp + tn) / n, false};
        }
        case MetricId::FBeta: {
            const double b2 = kind.beta() * kind.beta();
            const double den = (1.0 + b2) * tp + fp + b2 * fn;
            if (den <= 0.0) return {0.0, true};
            return {(1.0 + b2) * tp / den, false};
        }
        case MetricId::GMean: {
            const double pos = tp + fn;
            const double neg = tn + fp;
            if (pos <= 0.0 || neg <= 0.0) return {0.0, true};
            return {std::sqrt((tp / pos) * (tn / neg)), false};
        }
        case MetricId::BalancedAccuracy: {
            const double pos = tp + fn;
            const double neg = tn + fp;
            if (pos <= 0.0 || neg <= 0.0) return {0.0, true};
            return {0.5 * (tp / pos + tn / neg), false};
        }
    }
    return {0.0, true};
}

}  // namespace anyloss
