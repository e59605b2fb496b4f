// Trains a single-layer perceptron on a 9:1 synthetic problem with BCE and
// with the F1 AnyLoss, then compares cross-validated scores.

#include <cstdio>

#include "anyloss/anyloss.hpp"

int main() {
    using namespace anyloss;
    const Dataset d = synth_imbalanced(4000, 2, 0.1, 1.5, 11);
    std::printf("%zu rows, %zu positives\n", d.size(), d.positives());

    CVOptions cv;
    cv.k = 5;
    for (const LossSpec& loss : {LossSpec::bce(), LossSpec::any(MetricKind::f1())}) {
        const TrainConfig tc = default_train_config(loss, Architecture::SLP, 3);
        const CVReport r = cross_validate(d, NetworkConfig::slp(d.features(), 3), tc, cv);
        std::printf("%-4s  acc %.3f  f1 %.3f  gmean %.3f  bacc %.3f\n", r.loss.c_str(), r.mean_of(MetricId::Accuracy),
                    r.mean_of(MetricId::FBeta), r.mean_of(MetricId::GMean), r.mean_of(MetricId::BalancedAccuracy));
    }
}
