#pragma once

// Central finite-difference checks of the loss gradients (w.r.t. the network
// outputs) and of the full backward pass (w.r.t. every parameter).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "anyloss/losses.hpp"
#include "anyloss/network.hpp"
#include "anyloss/numeric.hpp"

namespace anyloss {

struct GradCheckOptions {
    std::vector<LossSpec> specs;        // empty: the six standard losses
    std::size_t instances = 100;        // random instances per check
    double h = 1e-6;
    double loss_tol = 1e-5;             // relative, loss level
    double network_tol = 1e-4;          // relative, end to end
    double abs_tol = 1e-8;              // components this close pass regardless
    std::uint64_t seed = 20240101;
    bool sabotage_balanced_accuracy = false;  // negate the L_B gradient (self-test of the checker)
};

struct GradCheckCase {
    std::string loss;
    std::string level;  // "loss", "slp", "mlp", "mlp-bn"
    std::size_t instances = 0;
    double max_rel_err = 0.0;  // over components with abs error > abs_tol
    double max_abs_err = 0.0;
    double tolerance = 0.0;
    std::string worst;  // description of the worst component
    bool pass = true;
};

struct GradCheckReport {
    std::vector<GradCheckCase> cases;

    bool pass() const {
        return std::all_of(cases.begin(), cases.end(), [](const GradCheckCase& c) { return c.pass; });
    }
    const GradCheckCase* worst_case() const {
        const GradCheckCase* w = nullptr;
        for (const auto& c : cases) {
            if (!w || c.max_rel_err / c.tolerance > w->max_rel_err / w->tolerance ||
                (c.max_rel_err == 0.0 && w->max_rel_err == 0.0 && c.max_abs_err > w->max_abs_err)) {
                w = &c;
            }
        }
        return w;
    }
};

namespace detail {

/// Random labels of length n containing both classes.
inline Labels random_labels(std::size_t n, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(0.35);
    Labels y(n);
    for (auto& v : y) v = coin(rng) ? 1 : 0;
    y[0] = 1;
    y[1] = 0;
    std::shuffle(y.begin(), y.end(), rng);
    return y;
}

struct ErrorTracker {
    ErrorTracker(double rel, double abs) : tol(rel), abs_tol(abs) {}
    double tol;
    double abs_tol;
    double worst = 0.0;
    std::string where;
    bool pass = true;

    double max_abs = 0.0;

    // A component passes when its relative error is within tol or its
    // absolute error is within abs_tol (gradients near zero). `worst` is the
    // largest relative error among components not rescued by abs_tol.
    void add(double analytic, double numeric, const std::string& what) {
        const double diff = std::abs(analytic - numeric);
        max_abs = std::max(max_abs, diff);
        if (diff <= abs_tol) return;
        const double rel = diff / std::max(std::abs(analytic), std::abs(numeric));
        if (rel > tol) pass = false;
        if (rel > worst) {
            worst = rel;
            std::ostringstream os;
            os << what << ": analytic " << analytic << ", numeric " << numeric;
            where = os.str();
        }
    }
};

inline bool sabotaged(const LossSpec& spec, const GradCheckOptions& o) {
    return o.sabotage_balanced_accuracy && spec.is_anyloss() && spec.metric().id() == MetricId::BalancedAccuracy;
}

}  // namespace detail

/// d loss / d output for random (y, output) pairs; n in [2, 50], outputs in [0.01, 0.99].
inline GradCheckCase check_loss_gradient(const LossSpec& spec, const GradCheckOptions& o = {}) {
    std::mt19937_64 rng(derive_seed(o.seed, 1));
    std::uniform_int_distribution<std::size_t> pick_n(2, 50);
    std::uniform_real_distribution<double> pick_v(0.01, 0.99);
    detail::ErrorTracker t{o.loss_tol, o.abs_tol};
    for (std::size_t inst = 0; inst < o.instances; ++inst) {
        const std::size_t n = pick_n(rng);
        const Labels y = detail::random_labels(n, rng);
        std::vector<double> v(n);
        for (auto& x : v) x = pick_v(rng);
        LossGrad g = loss_grad(spec, y, v);
        if (detail::sabotaged(spec, o)) {
            for (auto& x : g.grad) x = -x;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double keep = v[i];
            v[i] = keep + o.h;
            const double up = loss_value(spec, y, v).value;
            v[i] = keep - o.h;
            const double down = loss_value(spec, y, v).value;
            v[i] = keep;
            std::ostringstream what;
            what << "instance " << inst << " (n=" << n << ") component " << i;
            t.add(g.grad[i], (up - down) / (2.0 * o.h), what.str());
        }
    }
    return {spec.name(), "loss", o.instances, t.worst, t.max_abs, o.loss_tol, t.where, t.pass};
}

/// d loss / d parameter through forward/backward in training mode, n = 16, m = 4.
inline GradCheckCase check_network_gradient(const LossSpec& spec, const NetworkConfig& shape,
                                            const GradCheckOptions& o = {}) {
    constexpr std::size_t n = 16;
    constexpr std::size_t m = 4;
    const std::string level = shape.has_hidden() ? (shape.batch_norm ? "mlp-bn" : "mlp") : "slp";
    std::mt19937_64 rng(derive_seed(o.seed, 2, shape.has_hidden() ? (shape.batch_norm ? 2 : 1) : 0));
    std::normal_distribution<double> gauss;
    detail::ErrorTracker t{o.network_tol, o.abs_tol};
    const GradientSite site = gradient_site(spec);

    const auto loss_of = [&](const Network& net, const Matrix& X, const Labels& y) {
        const ForwardCache c = forward(net, X, spec.scale(), Mode::Training);
        return loss_value(spec, y, spec.is_anyloss() ? c.approximated() : c.probabilities()).value;
    };

    for (std::size_t inst = 0; inst < o.instances; ++inst) {
        NetworkConfig nc = shape;
        nc.input_dim = m;
        nc.seed = rng();
        Network net = init(nc);
        // Move BN affine parameters off their initial values so they are exercised.
        for (Eigen::Index j = 0; j < net.params.bn_gamma.size(); ++j) {
            net.params.bn_gamma(j) = 1.0 + 0.3 * gauss(rng);
            net.params.bn_beta(j) = 0.3 * gauss(rng);
        }
        Matrix X(n, m);
        for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = gauss(rng);
        const Labels y = detail::random_labels(n, rng);

        const ForwardCache c = forward(net, X, spec.scale(), Mode::Training);
        LossGrad g = loss_grad(spec, y, spec.is_anyloss() ? c.approximated() : c.probabilities());
        if (detail::sabotaged(spec, o)) {
            for (auto& x : g.grad) x = -x;
        }
        const Parameters analytic = backward(net, c, g.grad, site);
        std::vector<double> a;
        analytic.for_each([&](double v) { a.push_back(v); });

        std::vector<double*> slots;
        net.params.for_each([&](double& v) { slots.push_back(&v); });
        for (std::size_t k = 0; k < slots.size(); ++k) {
            double& p = *slots[k];
            const double keep = p;
            p = keep + o.h;
            const double up = loss_of(net, X, y);
            p = keep - o.h;
            const double down = loss_of(net, X, y);
            p = keep;
            std::ostringstream what;
            what << "instance " << inst << " parameter " << k;
            t.add(a[k], (up - down) / (2.0 * o.h), what.str());
        }
    }
    return {spec.name(), level, o.instances, t.worst, t.max_abs, o.network_tol, t.where, t.pass};
}

/// Every spec at the loss level and through SLP, MLP and batch-normalised MLP.
inline GradCheckReport run_gradcheck(const GradCheckOptions& o = {}) {
    const std::vector<LossSpec> specs = o.specs.empty() ? standard_losses() : o.specs;
    GradCheckReport r;
    for (const auto& s : specs) r.cases.push_back(check_loss_gradient(s, o));
    const NetworkConfig shapes[] = {NetworkConfig::slp(0), NetworkConfig::mlp(0, 2, false), NetworkConfig::mlp(0, 2, true)};
    for (const auto& shape : shapes) {
        for (const auto& s : specs) r.cases.push_back(check_network_gradient(s, shape, o));
    }
    return r;
}

}  // namespace anyloss
