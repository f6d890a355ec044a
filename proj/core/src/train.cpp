#include "lens/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lens/error.hpp"
#include "lens/random.hpp"

namespace lens {

void TrainConfig::validate() const {
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
    if (adversarial) {
        const auto& a = *adversarial;
        if (!(a.epsilon >= 0.0)) throw ConfigError("adversarial epsilon must be non-negative");
        if (a.pgd_steps == 0) throw ConfigError("pgd_steps must be positive");
        if (!(a.pgd_step_size > 0.0)) throw ConfigError("pgd_step_size must be positive");
        if (a.pgd_step_size > a.epsilon) throw ConfigError("pgd_step_size must not exceed epsilon");
    }
}

std::vector<double> pgd_linf(const ToyNetwork& net, std::span<const double> x, std::size_t label,
                             const AdversarialTraining& pgd) {
    std::vector<double> adv(x.begin(), x.end());
    std::vector<double> dlogits;
    for (std::size_t step = 0; step < pgd.pgd_steps; ++step) {
        const auto trace = forward_trace(net, adv);
        cross_entropy(trace.logits, label, &dlogits);
        const auto g = backprop_input(net, trace, dlogits);
        for (std::size_t i = 0; i < adv.size(); ++i) {
            const double s = g[i] > 0.0 ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
            const double v = adv[i] + pgd.pgd_step_size * s;
            adv[i] = std::clamp(std::clamp(v, x[i] - pgd.epsilon, x[i] + pgd.epsilon), 0.0, 1.0);
        }
    }
    return adv;
}

double accuracy(const ToyNetwork& net, const std::vector<LabeledImage>& data) {
    if (data.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& d : data) correct += predict(net, d.image.pixels()) == static_cast<std::size_t>(d.label) ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

ToyNetwork train_from(ToyNetwork net, const std::vector<LabeledImage>& data, const TrainConfig& cfg,
                      std::vector<EpochStats>* log) {
    cfg.validate();
    if (cfg.epochs == 0) return net;
    if (data.empty()) throw DomainError("training set is empty");
    for (const auto& d : data) {
        if (d.image.size() != net.input_size()) throw DomainError("image size does not match the network input");
        if (d.label < 0 || static_cast<std::size_t>(d.label) >= net.class_count()) {
            throw DomainError("label outside the class range");
        }
    }

    // Shuffling draws from a stream distinct from initialisation.
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    auto zero_like = [](const std::vector<DenseLayer>& layers) {
        auto g = layers;
        for (auto& l : g) {
            std::fill(l.weights.begin(), l.weights.end(), 0.0);
            std::fill(l.bias.begin(), l.bias.end(), 0.0);
        }
        return g;
    };

    std::vector<double> dlogits;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            auto grads = zero_like(net.layers());
            for (std::size_t b = start; b < end; ++b) {
                const auto& ex = data[order[b]];
                const auto label = static_cast<std::size_t>(ex.label);
                std::vector<double> input(ex.image.pixels().begin(), ex.image.pixels().end());
                if (cfg.adversarial) input = pgd_linf(net, input, label, *cfg.adversarial);
                const auto trace = forward_trace(net, input);
                const double loss = cross_entropy(trace.logits, label, &dlogits);
                if (!std::isfinite(loss)) {
                    throw TrainingDivergenceError("non-finite loss in epoch " + std::to_string(epoch));
                }
                loss_sum += loss;
                backprop_params(net, trace, dlogits, grads);
            }
            const double scale = cfg.learning_rate / static_cast<double>(end - start);
            auto& layers = net.mutable_layers();
            for (std::size_t l = 0; l < layers.size(); ++l) {
                for (std::size_t i = 0; i < layers[l].weights.size(); ++i) {
                    layers[l].weights[i] -= scale * grads[l].weights[i];
                }
                for (std::size_t i = 0; i < layers[l].bias.size(); ++i) layers[l].bias[i] -= scale * grads[l].bias[i];
            }
        }
        const double mean_loss = loss_sum / static_cast<double>(data.size());
        if (!std::isfinite(mean_loss)) throw TrainingDivergenceError("non-finite loss in epoch " + std::to_string(epoch));
        for (const auto& layer : net.layers()) {
            for (double w : layer.weights) {
                if (!std::isfinite(w)) throw TrainingDivergenceError("non-finite parameter after epoch " + std::to_string(epoch));
            }
        }
        if (log) log->push_back({epoch, mean_loss, accuracy(net, data)});
    }
    return net;
}

ToyNetwork train(const std::vector<LabeledImage>& data, const TrainConfig& cfg,
                 const std::vector<std::size_t>& layer_dims, Activation activation, std::vector<EpochStats>* log) {
    return train_from(init_network(layer_dims, activation, cfg.seed), data, cfg, log);
}

}  // namespace lens
