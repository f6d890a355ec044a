#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lens/io.hpp"
#include "lens/network.hpp"

namespace lens {

struct AdversarialTraining {
    double epsilon = 0.3;
    std::size_t pgd_steps = 40;
    double pgd_step_size = 0.01;
};

struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 16;
    double learning_rate = 0.1;
    std::uint64_t seed = 1;
    std::optional<AdversarialTraining> adversarial;

    // Throws ConfigError on a zero batch size, non-positive learning rate, or a
    // PGD step size above epsilon.
    void validate() const;
};

struct EpochStats {
    std::size_t epoch = 0;  // 1-based
    double loss = 0.0;      // mean training loss on the (possibly adversarial) batches
    double accuracy = 0.0;  // clean training accuracy after the epoch
};

// L-infinity PGD on the cross-entropy loss: `steps` signed-gradient ascent
// steps of size `step_size`, each projected onto the epsilon ball around x
// and onto [0, 1]. Starts at x.
std::vector<double> pgd_linf(const ToyNetwork& net, std::span<const double> x, std::size_t label,
                             const AdversarialTraining& pgd);

// Mini-batch SGD on softmax cross-entropy. Deterministic for a fixed seed
// (initialisation uses the same seed). Throws TrainingDivergenceError when
// the loss becomes non-finite.
ToyNetwork train(const std::vector<LabeledImage>& data, const TrainConfig& cfg,
                 const std::vector<std::size_t>& layer_dims, Activation activation,
                 std::vector<EpochStats>* log = nullptr);

// Continues training an existing network.
ToyNetwork train_from(ToyNetwork net, const std::vector<LabeledImage>& data, const TrainConfig& cfg,
                      std::vector<EpochStats>* log = nullptr);

double accuracy(const ToyNetwork& net, const std::vector<LabeledImage>& data);

}  // namespace lens
