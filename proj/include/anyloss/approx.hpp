#pragma once

// Sigmoid amplifier A(p) = 1 / (1 + exp(-L (p - 0.5))) that pushes class
// probabilities towards 0/1, plus the analysis of which scales L keep it a
// true amplifier without collapsing onto exact 0/1 in double precision.

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "anyloss/errors.hpp"

namespace anyloss {

/// Unit roundoff of IEEE-754 binary64. A(p) rounds to exactly 1.0 once
/// exp(-L (p - 0.5)) drops to this value.
inline constexpr double kUnitRoundoff = 0x1p-53;

/// Clamp bounds for the sigmoid output.
inline constexpr double kProbFloor = kUnitRoundoff;
inline constexpr double kProbCeil = 1.0 - kUnitRoundoff;

inline constexpr double kDefaultScale = 73.0;

/// Accuracy level at which the shipped scale range is computed.
inline constexpr double kFinestAccuracyLevel = 1e-15;

/// Steepness L of the amplifier. Always finite and strictly positive.
class AmplifyingScale {
public:
    constexpr AmplifyingScale() = default;
    explicit AmplifyingScale(double value) : value_(value) {
        if (!std::isfinite(value) || value <= 0.0) {
            std::ostringstream os;
            os << "amplifying scale must be finite and > 0, got " << value;
            throw DomainError(os.str());
        }
    }
    constexpr double value() const { return value_; }
    friend constexpr bool operator==(AmplifyingScale, AmplifyingScale) = default;

private:
    double value_ = kDefaultScale;
};

/// Distance t of the extreme test probabilities {t, 1-t} from 0 and 1.
class AccuracyLevel {
public:
    explicit AccuracyLevel(double t) : value_(t) {
        if (!(t > 0.0 && t < 0.5)) {
            std::ostringstream os;
            os << "accuracy level must lie in (0, 0.5), got " << t;
            throw DomainError(os.str());
        }
    }
    constexpr double value() const { return value_; }

private:
    double value_;
};

struct LRange {
    double min_L;
    double max_L;
    bool empty() const { return min_L > max_L; }
    bool contains(double L) const { return L >= min_L && L <= max_L; }
};

/// Logistic sigmoid with the result clamped to [2^-53, 1 - 2^-53] so that
/// log(p) and log(1 - p) stay finite.
inline double sigmoid(double z) {
    if (!std::isfinite(z)) {
        throw DomainError("sigmoid: non-finite input");
    }
    double p;
    if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
    }
    return std::fmin(std::fmax(p, kProbFloor), kProbCeil);
}

/// A(p). Not clamped: saturation to exactly 1.0 is an observable property.
inline double approximate(double p, AmplifyingScale L) {
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream os;
        os << "approximate: probability must lie in [0, 1], got " << p;
        throw DomainError(os.str());
    }
    return 1.0 / (1.0 + std::exp(-L.value() * (p - 0.5)));
}

/// dA/dp expressed through the already computed yh = A(p). Zero when yh has
/// saturated to 0 or 1, which is what stalls training for oversized L.
inline double approximate_derivative(double yh, AmplifyingScale L) {
    return L.value() * yh * (1.0 - yh);
}

/// |A(p) - 0.5| >= |p - 0.5|
inline bool check_amplifier(double p, AmplifyingScale L) {
    return std::fabs(approximate(p, L) - 0.5) >= std::fabs(p - 0.5);
}

/// 0 < A(p) < 1 as evaluated in double precision.
inline bool check_no_saturation(double p, AmplifyingScale L) {
    const double a = approximate(p, L);
    return a > 0.0 && a < 1.0;
}

/// Smallest L for which A(t) <= t, i.e. the amplifier condition holds at both
/// boundary probabilities t and 1 - t: ln((1-t)/t) / (0.5 - t).
inline double min_valid_L(AccuracyLevel level) {
    const double t = level.value();
    return (std::log1p(-t) - std::log(t)) / (0.5 - t);
}

/// Largest L for which A(1 - t) stays below 1.0 in double precision:
/// exp(-L (0.5 - t)) must exceed 2^-53, so L < 53 ln 2 / (0.5 - t).
inline double max_valid_L(AccuracyLevel level) {
    const double t = level.value();
    return 53.0 * std::numbers::ln2 / (0.5 - t);
}

inline LRange valid_L_range(AccuracyLevel level) {
    return {min_valid_L(level), max_valid_L(level)};
}

/// The range snapped inwards onto a 0.01 grid (min rounded up, max rounded
/// down), i.e. the two-decimal values of L that are actually admissible.
inline LRange valid_L_range_on_grid(AccuracyLevel level, double step = 0.01) {
    const LRange r = valid_L_range(level);
    // Guard against representation noise turning 5.5 into 5.51.
    const auto snap_up = [step](double x) { return std::ceil(x / step - 1e-9) * step; };
    const auto snap_down = [step](double x) { return std::floor(x / step + 1e-9) * step; };
    return {snap_up(r.min_L), snap_down(r.max_L)};
}

}  // namespace anyloss
