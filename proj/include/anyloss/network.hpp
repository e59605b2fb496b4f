#pragma once

// Single-layer perceptron and one-hidden-layer MLP (optionally batch
// normalised) trained by plain mini-batch gradient descent. The output chain
// is z -> p = sigmoid(z) -> yh = A(p; L); AnyLoss gradients enter at yh,
// MSE/BCE gradients enter at p.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "anyloss/approx.hpp"
#include "anyloss/confusion.hpp"
#include "anyloss/data.hpp"
#include "anyloss/errors.hpp"
#include "anyloss/losses.hpp"

namespace anyloss {

enum class Architecture { SLP, MLP };

inline std::string to_string(Architecture a) { return a == Architecture::SLP ? "slp" : "mlp"; }

struct NetworkConfig {
    Architecture architecture = Architecture::SLP;
    std::size_t input_dim = 0;
    std::size_t hidden_nodes = 2;
    bool batch_norm = true;
    std::uint64_t seed = 42;

    static NetworkConfig slp(std::size_t m, std::uint64_t seed = 42) {
        return {Architecture::SLP, m, 0, false, seed};
    }
    static NetworkConfig mlp(std::size_t m, std::size_t hidden = 2, bool batch_norm = true, std::uint64_t seed = 42) {
        return {Architecture::MLP, m, hidden, batch_norm, seed};
    }

    bool has_hidden() const { return architecture == Architecture::MLP; }
    bool uses_batch_norm() const { return has_hidden() && batch_norm; }
};

/// Trainable parameters. Also used as the gradient container, entry for entry.
/// For a batch-normalised hidden layer the hidden bias is absent (the BN shift
/// plays its role).
struct Parameters {
    Matrix hidden_w;               // m x h
    Eigen::RowVectorXd hidden_b;   // h, empty with batch norm
    Eigen::RowVectorXd bn_gamma;   // h, empty without batch norm
    Eigen::RowVectorXd bn_beta;    // h, empty without batch norm
    Vector out_w;                  // input_dim (SLP) or h (MLP)
    double out_b = 0.0;

    /// Visits every scalar parameter in a fixed order.
    template <typename Self, typename F>
    static void visit(Self& self, F&& f) {
        for (Eigen::Index i = 0; i < self.hidden_w.size(); ++i) f(self.hidden_w.data()[i]);
        for (Eigen::Index i = 0; i < self.hidden_b.size(); ++i) f(self.hidden_b(i));
        for (Eigen::Index i = 0; i < self.bn_gamma.size(); ++i) f(self.bn_gamma(i));
        for (Eigen::Index i = 0; i < self.bn_beta.size(); ++i) f(self.bn_beta(i));
        for (Eigen::Index i = 0; i < self.out_w.size(); ++i) f(self.out_w(i));
        f(self.out_b);
    }
    template <typename F> void for_each(F&& f) { visit(*this, std::forward<F>(f)); }
    template <typename F> void for_each(F&& f) const { visit(*this, std::forward<F>(f)); }

    std::size_t count() const {
        std::size_t c = 0;
        for_each([&](double) { ++c; });
        return c;
    }

    Parameters zeros_like() const {
        Parameters z;
        z.hidden_w = Matrix::Zero(hidden_w.rows(), hidden_w.cols());
        z.hidden_b = Eigen::RowVectorXd::Zero(hidden_b.size());
        z.bn_gamma = Eigen::RowVectorXd::Zero(bn_gamma.size());
        z.bn_beta = Eigen::RowVectorXd::Zero(bn_beta.size());
        z.out_w = Vector::Zero(out_w.size());
        z.out_b = 0.0;
        return z;
    }

    /// this += a * g
    Parameters& axpy(double a, const Parameters& g) {
        hidden_w += a * g.hidden_w;
        hidden_b += a * g.hidden_b;
        bn_gamma += a * g.bn_gamma;
        bn_beta += a * g.bn_beta;
        out_w += a * g.out_w;
        out_b += a * g.out_b;
        return *this;
    }

    bool all_finite() const {
        bool ok = true;
        for_each([&](double v) { ok = ok && std::isfinite(v); });
        return ok;
    }

    bool all_zero() const {
        bool zero = true;
        for_each([&](double v) { zero = zero && v == 0.0; });
        return zero;
    }

    friend bool operator==(const Parameters& a, const Parameters& b) {
        return a.hidden_w == b.hidden_w && a.hidden_b == b.hidden_b && a.bn_gamma == b.bn_gamma &&
               a.bn_beta == b.bn_beta && a.out_w == b.out_w && a.out_b == b.out_b;
    }
};

inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.9;

struct Network {
    NetworkConfig config;
    Parameters params;
    Eigen::RowVectorXd running_mean;  // h, batch norm only
    Eigen::RowVectorXd running_var;   // h, batch norm only
    double bn_eps = kBatchNormEps;
    double bn_momentum = kBatchNormMomentum;

    std::size_t hidden_width() const { return config.has_hidden() ? config.hidden_nodes : 0; }

    friend bool operator==(const Network& a, const Network& b) {
        return a.config.architecture == b.config.architecture && a.config.input_dim == b.config.input_dim &&
               a.hidden_width() == b.hidden_width() && a.config.uses_batch_norm() == b.config.uses_batch_norm() &&
               a.config.seed == b.config.seed && a.params == b.params && a.running_mean == b.running_mean &&
               a.running_var == b.running_var && a.bn_eps == b.bn_eps && a.bn_momentum == b.bn_momentum;
    }
};

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)); biases 0; BN scale 1, shift 0.
inline Network init(const NetworkConfig& config) {
    if (config.input_dim == 0) throw ContractError("init: input dimension must be >= 1");
    if (config.has_hidden() && config.hidden_nodes == 0) throw ContractError("init: hidden layer needs >= 1 node");

    std::mt19937_64 rng(config.seed);
    const auto uniform_fill = [&rng](auto& m, std::size_t fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
    };

    Network net;
    net.config = config;
    const auto m = static_cast<Eigen::Index>(config.input_dim);
    if (config.has_hidden()) {
        const auto h = static_cast<Eigen::Index>(config.hidden_nodes);
        net.params.hidden_w.resize(m, h);
        uniform_fill(net.params.hidden_w, config.input_dim);
        if (config.batch_norm) {
            net.params.bn_gamma = Eigen::RowVectorXd::Ones(h);
            net.params.bn_beta = Eigen::RowVectorXd::Zero(h);
            net.running_mean = Eigen::RowVectorXd::Zero(h);
            net.running_var = Eigen::RowVectorXd::Ones(h);
        } else {
            net.params.hidden_b = Eigen::RowVectorXd::Zero(h);
        }
        net.params.out_w.resize(h);
        uniform_fill(net.params.out_w, config.hidden_nodes);
    } else {
        net.params.out_w.resize(m);
        uniform_fill(net.params.out_w, config.input_dim);
    }
    return net;
}

enum class Mode {
    Training,   ///< batch norm uses batch statistics
    Inference,  ///< batch norm uses running statistics
};

/// Everything the backward pass needs from one forward pass.
struct ForwardCache {
    Mode mode = Mode::Training;
    AmplifyingScale scale;
    Matrix input;                 // X batch, n x m
    Matrix hidden_pre;            // X W (+ b), n x h
    Matrix hidden_norm;           // normalised pre-activation, n x h (batch norm)
    Eigen::RowVectorXd norm_mean; // statistics used for normalisation
    Eigen::RowVectorXd norm_var;
    Matrix hidden_act;            // sigmoid activations, n x h
    Vector z;                     // output net values
    Vector p;                     // sigmoid(z)
    Vector yh;                    // A(p; L)

    std::size_t size() const { return static_cast<std::size_t>(z.size()); }
    std::span<const double> probabilities() const { return {p.data(), static_cast<std::size_t>(p.size())}; }
    std::span<const double> approximated() const { return {yh.data(), static_cast<std::size_t>(yh.size())}; }
};

namespace detail {

inline Matrix sigmoid_matrix(const Matrix& a) {
    return a.unaryExpr([](double v) { return sigmoid(v); });
}

}  // namespace detail

inline ForwardCache forward(const Network& net, Matrix X, AmplifyingScale L, Mode mode = Mode::Training) {
    if (static_cast<std::size_t>(X.cols()) != net.config.input_dim) {
        std::ostringstream os;
        os << "forward: batch has " << X.cols() << " columns, network expects " << net.config.input_dim;
        throw ContractError(os.str());
    }
    ForwardCache c;
    c.mode = mode;
    c.scale = L;
    c.input = std::move(X);
    const Parameters& w = net.params;

    if (net.config.has_hidden()) {
        c.hidden_pre = c.input * w.hidden_w;
        if (net.config.uses_batch_norm()) {
            if (mode == Mode::Training) {
                if (c.input.rows() == 0) throw ContractError("forward: batch norm needs a non-empty training batch");
                c.norm_mean = c.hidden_pre.colwise().mean();
                c.norm_var = (c.hidden_pre.rowwise() - c.norm_mean).array().square().colwise().mean();
            } else {
                c.norm_mean = net.running_mean;
                c.norm_var = net.running_var;
            }
            const Eigen::RowVectorXd inv_std = (c.norm_var.array() + net.bn_eps).rsqrt();
            c.hidden_norm = (c.hidden_pre.rowwise() - c.norm_mean).array().rowwise() * inv_std.array();
            const Matrix shifted =
                (c.hidden_norm.array().rowwise() * w.bn_gamma.array()).rowwise() + w.bn_beta.array();
            c.hidden_act = detail::sigmoid_matrix(shifted);
        } else {
            c.hidden_act = detail::sigmoid_matrix(c.hidden_pre.rowwise() + w.hidden_b);
        }
        c.z = (c.hidden_act * w.out_w).array() + w.out_b;
    } else {
        c.z = (c.input * w.out_w).array() + w.out_b;
    }

    c.p = c.z.unaryExpr([](double v) { return sigmoid(v); });
    c.yh = c.p.unaryExpr([L](double v) { return approximate(v, L); });
    return c;
}

/// Where the upstream gradient attaches to the output chain.
enum class GradientSite {
    Approximated,  ///< dLoss/dyh (AnyLoss)
    Probability,   ///< dLoss/dp (MSE, BCE)
};

inline GradientSite gradient_site(const LossSpec& spec) {
    return spec.is_anyloss() ? GradientSite::Approximated : GradientSite::Probability;
}

/// Back-propagates an output gradient to every parameter. For the AnyLoss site
/// the chain is dL/dyh * L yh (1 - yh) * p (1 - p) * dz/dW.
inline Parameters backward(const Network& net, const ForwardCache& cache, std::span<const double> upstream,
                           GradientSite site) {
    const auto n = static_cast<Eigen::Index>(cache.size());
    if (upstream.size() != cache.size()) throw ContractError("backward: gradient length differs from batch size");
    if (static_cast<std::size_t>(cache.input.cols()) != net.config.input_dim ||
        static_cast<std::size_t>(cache.hidden_act.cols()) != net.hidden_width()) {
        throw ContractError("backward: cache was produced by a differently shaped network");
    }

    const Eigen::Map<const Vector> g(upstream.data(), n);
    Vector dz = g.array() * cache.p.array() * (1.0 - cache.p.array());
    if (site == GradientSite::Approximated) {
        const double L = cache.scale.value();
        dz.array() *= L * cache.yh.array() * (1.0 - cache.yh.array());
    }

    Parameters grad = net.params.zeros_like();
    grad.out_b = dz.sum();
    if (!net.config.has_hidden()) {
        grad.out_w = cache.input.transpose() * dz;
        return grad;
    }

    grad.out_w = cache.hidden_act.transpose() * dz;
    const Matrix dact = dz * net.params.out_w.transpose();
    const Matrix dpre_act = dact.array() * cache.hidden_act.array() * (1.0 - cache.hidden_act.array());

    Matrix dpre;
    if (net.config.uses_batch_norm()) {
        grad.bn_gamma = (dpre_act.array() * cache.hidden_norm.array()).colwise().sum();
        grad.bn_beta = dpre_act.colwise().sum();
        const Eigen::RowVectorXd inv_std = (cache.norm_var.array() + net.bn_eps).rsqrt();
        const Matrix dnorm = dpre_act.array().rowwise() * net.params.bn_gamma.array();
        if (cache.mode == Mode::Training) {
            const double nd = static_cast<double>(n);
            const Eigen::RowVectorXd sum_dnorm = dnorm.colwise().sum();
            const Eigen::RowVectorXd sum_dnorm_x = (dnorm.array() * cache.hidden_norm.array()).colwise().sum();
            const Matrix centred = (nd * dnorm).rowwise() - sum_dnorm;
            const Matrix corrected = centred.array() - cache.hidden_norm.array().rowwise() * sum_dnorm_x.array();
            dpre = (corrected.array().rowwise() * inv_std.array()) / nd;
        } else {
            dpre = dnorm.array().rowwise() * inv_std.array();
        }
    } else {
        dpre = dpre_act;
        grad.hidden_b = dpre.colwise().sum();
    }
    grad.hidden_w = cache.input.transpose() * dpre;
    return grad;
}

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
    LossSpec loss = LossSpec::bce();
    std::size_t epochs = 1000;
    double learning_rate = 1e-2;
    double batch_fraction = 1.0;
    std::uint64_t seed = 42;

    void validate() const {
        if (epochs == 0) throw ContractError("train: epochs must be >= 1");
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
            throw ContractError("train: learning rate must be finite and > 0");
        }
        if (!(batch_fraction > 0.0 && batch_fraction <= 1.0)) {
            throw ContractError("train: batch fraction must lie in (0, 1]");
        }
    }
};

/// Learning rate used when none is given, tuned for plain gradient descent on
/// mean-reduced losses over standardised features.
inline double default_learning_rate(const LossSpec& loss, Architecture arch) {
    if (arch == Architecture::SLP) return 1.0;
    return loss.is_anyloss() ? 0.2 : 0.5;
}

/// SLP: 1000 full-batch epochs. MLP: 100 epochs with batches of 5% of the
/// training set (50% for the class-ratio losses).
inline TrainConfig default_train_config(const LossSpec& loss, Architecture arch, std::uint64_t seed = 42) {
    TrainConfig tc;
    tc.loss = loss;
    tc.seed = seed;
    tc.learning_rate = default_learning_rate(loss, arch);
    if (arch == Architecture::SLP) {
        tc.epochs = 1000;
        tc.batch_fraction = 1.0;
    } else {
        tc.epochs = 100;
        tc.batch_fraction = loss.class_ratio() ? 0.5 : 0.05;
    }
    return tc;
}

struct TrainReport {
    std::vector<double> loss_curve;     // mean batch loss per epoch
    std::vector<double> epoch_seconds;  // wall time per epoch
    Network network;
    std::string loss_name;
    std::size_t epochs = 0;
    std::size_t samples = 0;
    std::size_t batch_size = 0;
    double batch_fraction = 1.0;
    bool stratified_batches = false;
    std::size_t frozen_epochs = 0;      // epochs in which every update was exactly zero

    double total_seconds() const { return std::accumulate(epoch_seconds.begin(), epoch_seconds.end(), 0.0); }
    double wall_time_per_epoch() const { return epochs ? total_seconds() / static_cast<double>(epochs) : 0.0; }
};

namespace detail {

struct BatchPlanner {
    std::size_t n = 0;
    std::size_t batch_size = 0;
    std::size_t batch_count = 0;
    bool stratified = false;
    IndexList pos;
    IndexList neg;
    IndexList all;

    BatchPlanner(const Dataset& d, const TrainConfig& tc) : n(d.size()) {
        batch_size = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::ceil(tc.batch_fraction * static_cast<double>(n) - 1e-9)), 1, n);
        batch_count = (n + batch_size - 1) / batch_size;
        for (std::size_t i = 0; i < n; ++i) (d.y[i] ? pos : neg).push_back(i);
        all.resize(n);
        std::iota(all.begin(), all.end(), std::size_t{0});

        if (tc.loss.class_ratio()) {
            if (pos.empty() || neg.empty()) {
                throw DegenerateClassError("train: " + tc.loss.name() + " needs both classes in the training data");
            }
            stratified = true;
            const std::size_t feasible = std::min({batch_count, pos.size(), neg.size()});
            if (feasible < batch_count) {
                std::ostringstream os;
                os << "train: only " << feasible << " of " << batch_count
                   << " batches can hold both classes; using fewer, larger stratified batches";
                warn(os.str());
                batch_count = feasible;
            }
        }
    }

    std::vector<IndexList> plan(std::mt19937_64& rng) {
        std::vector<IndexList> batches(batch_count);
        if (batch_count == 1) {
            batches[0] = all;
            return batches;
        }
        if (stratified) {
            std::shuffle(pos.begin(), pos.end(), rng);
            std::shuffle(neg.begin(), neg.end(), rng);
            std::size_t slot = 0;
            for (const IndexList* cls : {&pos, &neg}) {
                for (std::size_t idx : *cls) {
                    batches[slot].push_back(idx);
                    slot = (slot + 1) % batch_count;
                }
            }
            return batches;
        }
        std::shuffle(all.begin(), all.end(), rng);
        for (std::size_t b = 0; b < batch_count; ++b) {
            const std::size_t lo = b * batch_size;
            const std::size_t hi = std::min(n, lo + batch_size);
            batches[b].assign(all.begin() + static_cast<std::ptrdiff_t>(lo), all.begin() + static_cast<std::ptrdiff_t>(hi));
        }
        return batches;
    }
};

inline void update_running_stats(Network& net, const ForwardCache& cache) {
    if (!net.config.uses_batch_norm()) return;
    const double m = net.bn_momentum;
    net.running_mean = m * net.running_mean + (1.0 - m) * cache.norm_mean;
    net.running_var = m * net.running_var + (1.0 - m) * cache.norm_var;
}

}  // namespace detail

/// One gradient-descent step on a batch; returns the batch loss before the
/// update and whether the update was exactly zero.
struct StepResult {
    double loss = 0.0;
    bool zero_update = false;
};

inline StepResult train_step(Network& net, const Matrix& X, std::span<const Label> y, const TrainConfig& tc) {
    const ForwardCache cache = forward(net, X, tc.loss.scale(), Mode::Training);
    const std::span<const double> out = tc.loss.is_anyloss() ? cache.approximated() : cache.probabilities();
    const LossGrad lg = loss_grad(tc.loss, y, out);
    const Parameters grad = backward(net, cache, lg.grad, gradient_site(tc.loss));
    net.params.axpy(-tc.learning_rate, grad);
    detail::update_running_stats(net, cache);
    return {lg.value, grad.all_zero()};
}

/// Mini-batch gradient descent. Batches are reshuffled every epoch; with a
/// class-ratio loss every batch is stratified so that it contains both classes.
inline TrainReport train(Network net, const Dataset& data, const TrainConfig& tc) {
    tc.validate();
    data.validate();
    if (data.features() != net.config.input_dim) throw ContractError("train: dataset/network dimension mismatch");

    detail::BatchPlanner planner(data, tc);
    std::mt19937_64 rng(tc.seed);

    TrainReport report;
    report.loss_name = tc.loss.name();
    report.epochs = tc.epochs;
    report.samples = data.size();
    report.batch_fraction = tc.batch_fraction;
    report.batch_size = planner.batch_size;
    report.stratified_batches = planner.stratified;
    report.loss_curve.reserve(tc.epochs);
    report.epoch_seconds.reserve(tc.epochs);

    // Full-batch training reuses the dataset as is.
    const bool full_batch = planner.batch_count == 1;
    for (std::size_t e = 0; e < tc.epochs; ++e) {
        const auto t0 = std::chrono::steady_clock::now();
        double loss_sum = 0.0;
        bool frozen = true;
        std::size_t batches = 0;
        if (full_batch) {
            const StepResult r = train_step(net, data.X, data.y, tc);
            loss_sum = r.loss;
            frozen = r.zero_update;
            batches = 1;
        } else {
            for (const IndexList& idx : planner.plan(rng)) {
                if (idx.empty()) continue;
                const Dataset batch = data.subset(idx);
                const StepResult r = train_step(net, batch.X, batch.y, tc);
                loss_sum += r.loss;
                frozen = frozen && r.zero_update;
                ++batches;
            }
        }
        const auto t1 = std::chrono::steady_clock::now();
        report.loss_curve.push_back(loss_sum / static_cast<double>(batches));
        report.epoch_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
        if (frozen) ++report.frozen_epochs;
    }
    if (!net.params.all_finite()) throw ContractError("train: parameters diverged to non-finite values");
    if (report.frozen_epochs > 0) {
        std::ostringstream os;
        os << "train: " << report.frozen_epochs << " epoch(s) produced exactly zero updates"
           << (tc.loss.is_anyloss() ? " (approximated outputs saturated to 0/1; lower L)" : "");
        warn(os.str());
    }
    report.network = std::move(net);
    return report;
}

struct Prediction {
    std::vector<double> probabilities;
    Labels labels;
};

/// Inference-mode forward pass; labels threshold p (not yh) at 0.5.
inline Prediction predict(const Network& net, const Matrix& X) {
    Prediction out;
    if (X.rows() == 0) return out;
    const ForwardCache c = forward(net, X, AmplifyingScale{}, Mode::Inference);
    out.probabilities.assign(c.p.data(), c.p.data() + c.p.size());
    out.labels = threshold_labels(out.probabilities);
    return out;
}

}  // namespace anyloss
