#include <catch_amalgamated.hpp>

#include <sstream>
#include <string>

#include "anyloss/model_io.hpp"

using namespace anyloss;

namespace {

Network trained(const NetworkConfig& nc) {
    const Dataset d = synth_imbalanced(120, nc.input_dim, 0.3, 2.0, 4);
    TrainConfig tc;
    tc.loss = LossSpec::bce();
    tc.epochs = 20;
    tc.learning_rate = 0.5;
    tc.batch_fraction = 0.25;
    return train(init(nc), d, tc).network;
}

std::string save(const Network& n, AmplifyingScale L = {}, const std::string& loss = "f1") {
    std::ostringstream os;
    save_model(os, n, L, loss);
    return os.str();
}

}  // namespace

TEST_CASE("models round-trip bit for bit") {
    for (const NetworkConfig& nc :
         {NetworkConfig::slp(3, 1), NetworkConfig::mlp(3, 2, true, 2), NetworkConfig::mlp(4, 3, false, 3)}) {
        const Network net = trained(nc);
        std::istringstream in(save(net, AmplifyingScale(70.25), "gmean"));
        const ModelFile mf = load_model(in);
        CHECK(mf.network == net);
        CHECK(mf.scale.value() == 70.25);
        CHECK(mf.loss_name == "gmean");

        const Matrix X = synth_imbalanced(30, nc.input_dim, 0.5, 1.0, 9).X;
        CHECK(predict(mf.network, X).probabilities == predict(net, X).probabilities);
        // Saving again gives the same text.
        CHECK(save(mf.network, mf.scale, mf.loss_name) == save(net, AmplifyingScale(70.25), "gmean"));
    }
}

TEST_CASE("malformed model files are rejected") {
    const std::string good = save(trained(NetworkConfig::mlp(2, 2, true, 1)));

    std::istringstream empty("");
    CHECK_THROWS_AS(load_model(empty), InputError);

    std::istringstream wrong_magic("some-model 1\n");
    CHECK_THROWS_AS(load_model(wrong_magic), InputError);

    std::istringstream wrong_version("anyloss-model 99\n");
    CHECK_THROWS_AS(load_model(wrong_version), InputError);

    std::string no_end = good.substr(0, good.find("end"));
    std::istringstream truncated(no_end);
    CHECK_THROWS_AS(load_model(truncated), InputError);

    std::string unknown = good;
    unknown.insert(unknown.find("out_b"), "dropout 0.5\n");
    std::istringstream u(unknown);
    CHECK_THROWS_AS(load_model(u), InputError);

    std::string bad_number = good;
    bad_number.replace(bad_number.find("scale_l 73"), 10, "scale_l x3");
    std::istringstream b(bad_number);
    CHECK_THROWS_AS(load_model(b), InputError);

    std::string wrong_shape = good;
    wrong_shape.replace(wrong_shape.find("input_dim 2"), 11, "input_dim 5");
    std::istringstream s(wrong_shape);
    CHECK_THROWS_AS(load_model(s), InputError);

    CHECK_THROWS_AS(load_model(std::string("/nonexistent/model.txt")), InputError);
}
