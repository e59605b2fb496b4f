#pragma once

// Plain-text model format, one "key values..." record per line:
//
//   anyloss-model 1
//   architecture mlp            (slp | mlp)
//   input_dim 4
//   hidden_nodes 2              (0 for slp)
//   batch_norm 1
//   seed 42
//   scale_l 73
//   loss f1                     (informational)
//   bn_eps 1e-05
//   bn_momentum 0.9
//   hidden_w 4 2 <8 values, row-major>
//   hidden_b 0
//   bn_gamma 2 <values>
//   bn_beta 2 <values>
//   running_mean 2 <values>
//   running_var 2 <values>
//   out_w 2 <values>
//   out_b <value>
//   end
//
// Numbers use the shortest decimal form that round-trips exactly. Unknown keys
// are rejected so that a newer file is never half-read.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "anyloss/errors.hpp"
#include "anyloss/network.hpp"

namespace anyloss {

inline constexpr int kModelFormatVersion = 1;

struct ModelFile {
    Network network;
    AmplifyingScale scale;
    std::string loss_name;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

template <typename Vec>
void write_vector(std::ostream& out, const char* key, const Vec& v) {
    out << key << ' ' << v.size();
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << format_double(v(i));
    out << '\n';
}

inline std::vector<double> read_values(std::istringstream& in, std::size_t count, const std::string& key) {
    std::vector<double> values(count);
    for (auto& v : values) {
        std::string tok;
        if (!(in >> tok)) throw InputError("model: record '" + key + "' is truncated");
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
            throw InputError("model: bad number '" + tok + "' in record '" + key + "'");
        }
    }
    return values;
}

}  // namespace detail

inline void save_model(std::ostream& out, const Network& net, AmplifyingScale scale, const std::string& loss_name = "") {
    const NetworkConfig& c = net.config;
    out << "anyloss-model " << kModelFormatVersion << '\n';
    out << "architecture " << to_string(c.architecture) << '\n';
    out << "input_dim " << c.input_dim << '\n';
    out << "hidden_nodes " << net.hidden_width() << '\n';
    out << "batch_norm " << (c.uses_batch_norm() ? 1 : 0) << '\n';
    out << "seed " << c.seed << '\n';
    out << "scale_l " << detail::format_double(scale.value()) << '\n';
    out << "loss " << (loss_name.empty() ? "-" : loss_name) << '\n';
    out << "bn_eps " << detail::format_double(net.bn_eps) << '\n';
    out << "bn_momentum " << detail::format_double(net.bn_momentum) << '\n';

    const Parameters& p = net.params;
    out << "hidden_w " << p.hidden_w.rows() << ' ' << p.hidden_w.cols();
    for (Eigen::Index i = 0; i < p.hidden_w.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.hidden_w.cols(); ++j) out << ' ' << detail::format_double(p.hidden_w(i, j));
    }
    out << '\n';
    detail::write_vector(out, "hidden_b", p.hidden_b);
    detail::write_vector(out, "bn_gamma", p.bn_gamma);
    detail::write_vector(out, "bn_beta", p.bn_beta);
    detail::write_vector(out, "running_mean", net.running_mean);
    detail::write_vector(out, "running_var", net.running_var);
    detail::write_vector(out, "out_w", p.out_w);
    out << "out_b " << detail::format_double(p.out_b) << '\n';
    out << "end\n";
}

inline ModelFile load_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("model: empty input");
    {
        std::istringstream head(line);
        std::string magic;
        int version = 0;
        if (!(head >> magic >> version) || magic != "anyloss-model") throw InputError("model: not an anyloss model file");
        if (version != kModelFormatVersion) {
            throw InputError("model: unsupported format version " + std::to_string(version));
        }
    }

    ModelFile mf;
    NetworkConfig& c = mf.network.config;
    Parameters& p = mf.network.params;
    bool ended = false;
    const auto to_row = [](const std::vector<double>& v) {
        return Eigen::RowVectorXd(Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };

    while (!ended && std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream rec(line);
        std::string key;
        rec >> key;
        if (key == "architecture") {
            std::string a;
            rec >> a;
            if (a == "slp") c.architecture = Architecture::SLP;
            else if (a == "mlp") c.architecture = Architecture::MLP;
            else throw InputError("model: unknown architecture '" + a + "'");
        } else if (key == "input_dim") {
            rec >> c.input_dim;
        } else if (key == "hidden_nodes") {
            rec >> c.hidden_nodes;
        } else if (key == "batch_norm") {
            int b = 0;
            rec >> b;
            c.batch_norm = b != 0;
        } else if (key == "seed") {
            rec >> c.seed;
        } else if (key == "scale_l") {
            mf.scale = AmplifyingScale(detail::read_values(rec, 1, key)[0]);
        } else if (key == "loss") {
            rec >> mf.loss_name;
            if (mf.loss_name == "-") mf.loss_name.clear();
        } else if (key == "bn_eps") {
            mf.network.bn_eps = detail::read_values(rec, 1, key)[0];
        } else if (key == "bn_momentum") {
            mf.network.bn_momentum = detail::read_values(rec, 1, key)[0];
        } else if (key == "hidden_w") {
            Eigen::Index rows = 0;
            Eigen::Index cols = 0;
            rec >> rows >> cols;
            const auto v = detail::read_values(rec, static_cast<std::size_t>(rows * cols), key);
            p.hidden_w = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                v.data(), rows, cols);
        } else if (key == "hidden_b" || key == "bn_gamma" || key == "bn_beta" || key == "running_mean" ||
                   key == "running_var" || key == "out_w") {
            std::size_t count = 0;
            rec >> count;
            const auto v = detail::read_values(rec, count, key);
            if (key == "hidden_b") p.hidden_b = to_row(v);
            else if (key == "bn_gamma") p.bn_gamma = to_row(v);
            else if (key == "bn_beta") p.bn_beta = to_row(v);
            else if (key == "running_mean") mf.network.running_mean = to_row(v);
            else if (key == "running_var") mf.network.running_var = to_row(v);
            else p.out_w = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
        } else if (key == "out_b") {
            p.out_b = detail::read_values(rec, 1, key)[0];
        } else if (key == "end") {
            ended = true;
        } else {
            throw InputError("model: unknown record '" + key + "'");
        }
        if (rec.fail()) throw InputError("model: malformed record '" + key + "'");
    }
    if (!ended) throw InputError("model: missing 'end' record");

    // Shape checks against the declared architecture.
    const auto m = static_cast<Eigen::Index>(c.input_dim);
    const auto h = static_cast<Eigen::Index>(mf.network.hidden_width());
    const bool bn = c.uses_batch_norm();
    const bool ok = c.input_dim > 0 &&
                    (c.has_hidden() ? (p.hidden_w.rows() == m && p.hidden_w.cols() == h && p.out_w.size() == h &&
                                       p.bn_gamma.size() == (bn ? h : 0) && p.bn_beta.size() == (bn ? h : 0) &&
                                       p.hidden_b.size() == (bn ? 0 : h) &&
                                       mf.network.running_mean.size() == (bn ? h : 0) &&
                                       mf.network.running_var.size() == (bn ? h : 0))
                                    : (p.hidden_w.size() == 0 && p.out_w.size() == m));
    if (!ok) throw InputError("model: parameter shapes do not match the declared architecture");
    if (!c.has_hidden()) {
        c.hidden_nodes = 0;
        c.batch_norm = false;
    }
    return mf;
}

inline void save_model(const std::string& path, const Network& net, AmplifyingScale scale,
                       const std::string& loss_name = "") {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    save_model(out, net, scale, loss_name);
}

inline ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return load_model(in);
}

}  // namespace anyloss
