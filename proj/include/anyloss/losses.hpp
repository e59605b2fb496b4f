#pragma once

// AnyLoss = 1 - f(TN, FN, FP, TP) over the soft confusion matrix, its
// analytic gradient with respect to the approximated outputs yh, and the MSE
// and BCE baselines (which act on the sigmoid probabilities p instead).

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "anyloss/approx.hpp"
#include "anyloss/confusion.hpp"
#include "anyloss/errors.hpp"
#include "anyloss/numeric.hpp"

namespace anyloss {

enum class LossFamily { AnyLoss, MSE, BCE };

enum class ScaleCheck {
    Strict,    ///< L must lie in the valid range at accuracy level 1e-15
    Override,  ///< any L > 0 (sweeps, saturation experiments)
};

/// Which loss to optimise, and the amplifying scale for AnyLoss variants.
class LossSpec {
public:
    static LossSpec any(MetricKind metric, AmplifyingScale scale = {},
                        ScaleCheck check = ScaleCheck::Strict) {
        if (check == ScaleCheck::Strict) {
            const LRange r = valid_L_range(AccuracyLevel(kFinestAccuracyLevel));
            if (!r.contains(scale.value())) {
                std::ostringstream os;
                os << "amplifying scale " << scale.value() << " outside the valid range ["
                   << r.min_L << ", " << r.max_L << "]; pass ScaleCheck::Override to force it";
                throw DomainError(os.str());
            }
        }
        return LossSpec(LossFamily::AnyLoss, metric, scale);
    }
    static LossSpec mse() { return LossSpec(LossFamily::MSE, MetricKind::accuracy(), {}); }
    static LossSpec bce() { return LossSpec(LossFamily::BCE, MetricKind::accuracy(), {}); }

    /// Parses mse, bce, acc, f1, fbeta (with beta), f<beta> e.g. f0.5, gmean, bacc.
    static LossSpec parse(const std::string& name, double beta = 1.0, double scale = kDefaultScale,
                          ScaleCheck check = ScaleCheck::Strict) {
        const AmplifyingScale L(scale);
        if (name == "mse") return mse();
        if (name == "bce") return bce();
        if (name == "acc" || name == "accuracy") return any(MetricKind::accuracy(), L, check);
        if (name == "gmean" || name == "g-mean") return any(MetricKind::g_mean(), L, check);
        if (name == "bacc" || name == "balanced-accuracy") {
            return any(MetricKind::balanced_accuracy(), L, check);
        }
        if (name == "fbeta") return any(MetricKind::f_beta(beta), L, check);
        if (name.size() > 1 && name[0] == 'f') {
            std::size_t used = 0;
            double b = 0.0;
            try {
                b = std::stod(name.substr(1), &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == name.size() - 1) return any(MetricKind::f_beta(b), L, check);
        }
        throw InputError("unknown loss '" + name + "' (expected mse, bce, acc, f1, fbeta, f<beta>, gmean, bacc)");
    }

    LossFamily family() const { return family_; }
    bool is_anyloss() const { return family_ == LossFamily::AnyLoss; }
    const MetricKind& metric() const { return metric_; }
    AmplifyingScale scale() const { return scale_; }

    /// GMean / balanced accuracy need both classes in every batch.
    bool class_ratio() const { return is_anyloss() && metric_.class_ratio(); }

    std::string name() const {
        switch (family_) {
            case LossFamily::MSE: return "mse";
            case LossFamily::BCE: return "bce";
            case LossFamily::AnyLoss: return metric_.name();
        }
        return "?";
    }

    friend bool operator==(const LossSpec&, const LossSpec&) = default;

private:
    LossSpec(LossFamily family, MetricKind metric, AmplifyingScale scale)
        : family_(family), metric_(metric), scale_(scale) {}
    LossFamily family_;
    MetricKind metric_;
    AmplifyingScale scale_;
};

struct LossValue {
    double value = 0.0;
    bool degenerate = false;
};

/// Loss value and its gradient with respect to the loss input (yh for
/// AnyLoss, p for the baselines).
struct LossGrad {
    double value = 0.0;
    std::vector<double> grad;
};

/// Bounds applied to yh before the divisions in the F-beta and G-mean gradients.
inline constexpr double kGradYhFloor = 1e-12;
inline constexpr double kGradYhCeil = 1.0 - 1e-12;

namespace detail {

inline void require_nonempty_matching(std::size_t ny, std::size_t nv, const char* what) {
    if (ny == 0) throw ContractError(std::string(what) + ": empty input");
    require_same_length(ny, nv, what);
}

inline double clamp_p(double p) { return std::clamp(p, kProbFloor, kProbCeil); }

}  // namespace detail

/// AnyLoss variants take yh = A(p); MSE and BCE take p.
inline LossValue loss_value(const LossSpec& spec, std::span<const Label> y, std::span<const double> v) {
    detail::require_nonempty_matching(y.size(), v.size(), "loss_value");
    const std::size_t n = y.size();
    switch (spec.family()) {
        case LossFamily::MSE: {
            const double s = pairwise_sum(n, [&](std::size_t i) {
                const double d = y[i] - v[i];
                return d * d;
            });
            return {s / static_cast<double>(n), false};
        }
        case LossFamily::BCE: {
            const double s = pairwise_sum(n, [&](std::size_t i) {
                const double p = detail::clamp_p(v[i]);
                return y[i] ? std::log(p) : std::log1p(-p);
            });
            return {-s / static_cast<double>(n), false};
        }
        case LossFamily::AnyLoss: {
            const MetricResult m = metric_score(soft_confusion(y, v), spec.metric());
            if (m.degenerate) return {1.0, true};
            return {1.0 - m.value, false};
        }
    }
    return {};
}

/// dAnyLoss/dyh_i. Every component except the accuracy one depends on the
/// whole batch through the confusion sums.
inline LossGrad loss_grad_yh(const LossSpec& spec, std::span<const Label> y, std::span<const double> yh) {
    if (!spec.is_anyloss()) {
        throw ContractError("loss_grad_yh: " + spec.name() + " is not an AnyLoss variant");
    }
    detail::require_nonempty_matching(y.size(), yh.size(), "loss_grad_yh");
    const std::size_t n = y.size();
    const double nd = static_cast<double>(n);

    LossGrad out;
    out.value = loss_value(spec, y, yh).value;
    out.grad.resize(n);

    const auto yhc = [&](std::size_t i) { return std::clamp(yh[i], kGradYhFloor, kGradYhCeil); };
    const double sum_y = pairwise_sum(n, [&](std::size_t i) { return static_cast<double>(y[i]); });

    switch (spec.metric().id()) {
        case MetricId::Accuracy: {
            for (std::size_t i = 0; i < n; ++i) out.grad[i] = (1.0 - 2.0 * y[i]) / nd;
            break;
        }
        case MetricId::FBeta: {
            const double b2 = spec.metric().beta() * spec.metric().beta();
            const double s = pairwise_sum(n, [&](std::size_t i) { return y[i] ? yhc(i) : 0.0; });
            const double d = b2 * sum_y + pairwise_sum(n, yhc);
            const double scale = -(1.0 + b2) / (d * d);
            for (std::size_t i = 0; i < n; ++i) out.grad[i] = scale * (y[i] * d - s);
            break;
        }
        case MetricId::GMean: {
            const double neg = nd - sum_y;
            if (sum_y <= 0.0 || neg <= 0.0) {
                throw DegenerateClassError("G-mean gradient needs both classes in the batch");
            }
            const double tp = pairwise_sum(n, [&](std::size_t i) { return y[i] ? yhc(i) : 0.0; });
            const double tn = pairwise_sum(n, [&](std::size_t i) { return y[i] ? 0.0 : 1.0 - yhc(i); });
            // G = sqrt(tp tn / (pos neg)); dG/dyh_i = (y_i tn - (1 - y_i) tp) / (2 sqrt(pos neg) sqrt(tp tn))
            const double scale = -0.5 / (std::sqrt(sum_y * neg) * std::sqrt(tp * tn));
            for (std::size_t i = 0; i < n; ++i) out.grad[i] = scale * (y[i] ? tn : -tp);
            break;
        }
        case MetricId::BalancedAccuracy: {
            const double neg = nd - sum_y;
            if (sum_y <= 0.0 || neg <= 0.0) {
                throw DegenerateClassError("balanced-accuracy gradient needs both classes in the batch");
            }
            const double den = 2.0 * sum_y * neg;
            for (std::size_t i = 0; i < n; ++i) out.grad[i] = (sum_y - nd * y[i]) / den;
            break;
        }
    }
    return out;
}

/// dLoss/dp_i for the MSE and BCE baselines.
inline LossGrad baseline_grad_p(const LossSpec& spec, std::span<const Label> y, std::span<const double> p) {
    if (spec.is_anyloss()) {
        throw ContractError("baseline_grad_p: " + spec.name() + " is an AnyLoss variant");
    }
    detail::require_nonempty_matching(y.size(), p.size(), "baseline_grad_p");
    const std::size_t n = y.size();
    const double nd = static_cast<double>(n);

    LossGrad out;
    out.value = loss_value(spec, y, p).value;
    out.grad.resize(n);
    if (spec.family() == LossFamily::MSE) {
        for (std::size_t i = 0; i < n; ++i) out.grad[i] = -2.0 * (y[i] - p[i]) / nd;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double pc = detail::clamp_p(p[i]);
            out.grad[i] = (pc - y[i]) / (nd * pc * (1.0 - pc));
        }
    }
    return out;
}

/// Dispatches on the family: gradient w.r.t. yh for AnyLoss, w.r.t. p otherwise.
inline LossGrad loss_grad(const LossSpec& spec, std::span<const Label> y, std::span<const double> v) {
    return spec.is_anyloss() ? loss_grad_yh(spec, y, v) : baseline_grad_p(spec, y, v);
}

/// MSE, BCE and the four AnyLoss variants (F-beta at beta = 1).
inline std::vector<LossSpec> standard_losses() {
    return {LossSpec::mse(),
            LossSpec::bce(),
            LossSpec::any(MetricKind::accuracy()),
            LossSpec::any(MetricKind::f1()),
            LossSpec::any(MetricKind::g_mean()),
            LossSpec::any(MetricKind::balanced_accuracy())};
}

}  // namespace anyloss
