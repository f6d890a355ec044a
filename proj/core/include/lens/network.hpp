#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace lens {

enum class ActivationKind { relu, softplus };

struct Activation {
    ActivationKind kind = ActivationKind::softplus;
    double beta = 10.0;  // softplus sharpness; ignored for relu

    static Activation relu() { return {ActivationKind::relu, 1.0}; }
    static Activation softplus(double beta = 10.0) { return {ActivationKind::softplus, beta}; }

    double apply(double z) const noexcept;
    double derivative(double z) const noexcept;

    friend bool operator==(const Activation&, const Activation&) = default;
};

std::string to_string(ActivationKind kind);
ActivationKind parse_activation(const std::string& name);

struct DenseLayer {
    std::size_t out = 0;
    std::size_t in = 0;
    std::vector<double> weights;  // out x in, row-major
    std::vector<double> bias;     // out

    double w(std::size_t o, std::size_t i) const noexcept { return weights[o * in + i]; }
    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Fully connected classifier. Hidden layers apply the activation; the last
// layer is linear and produces logits.
class ToyNetwork {
public:
    ToyNetwork() = default;
    // Throws DomainError on inconsistent shapes or non-finite parameters.
    ToyNetwork(std::vector<DenseLayer> layers, Activation activation);

    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    std::vector<DenseLayer>& mutable_layers() noexcept { return layers_; }
    Activation activation() const noexcept { return activation_; }
    std::size_t input_size() const noexcept { return layers_.front().in; }
    std::size_t class_count() const noexcept { return layers_.back().out; }
    // [input, hidden..., classes]
    std::vector<std::size_t> layer_dims() const;

    friend bool operator==(const ToyNetwork&, const ToyNetwork&) = default;

private:
    std::vector<DenseLayer> layers_;
    Activation activation_;
};

// Scaled-uniform initialisation: weights in +-1/sqrt(fan_in), zero bias.
// Throws DomainError for fewer than two dims or a zero dim.
ToyNetwork init_network(const std::vector<std::size_t>& layer_dims, Activation activation, std::uint64_t seed);

// Intermediate values of one forward pass, kept for backpropagation.
struct ForwardTrace {
    std::vector<std::vector<double>> inputs;  // inputs[l] feeds layer l
    std::vector<std::vector<double>> pre;     // pre-activations of layer l
    std::vector<double> logits;
};

std::vector<double> forward(const ToyNetwork& net, std::span<const double> x);
ForwardTrace forward_trace(const ToyNetwork& net, std::span<const double> x);

std::size_t predict(const ToyNetwork& net, std::span<const double> x);

// Gradient of <upstream, logits> with respect to the input.
std::vector<double> backprop_input(const ToyNetwork& net, const ForwardTrace& trace,
                                   std::span<const double> upstream);

// Parameter gradients of <upstream, logits>, same layout as the layers.
// Accumulated (added) into `grads`.
void backprop_params(const ToyNetwork& net, const ForwardTrace& trace, std::span<const double> upstream,
                     std::vector<DenseLayer>& grads);

// Softmax cross-entropy and its gradient with respect to the logits.
double cross_entropy(std::span<const double> logits, std::size_t label, std::vector<double>* dlogits = nullptr);

// Checkpoint text format:
//   TOYNET1 <n_layers> <activation> <beta>
//   DIMS <out> <in>
//   <in reals>  x out   (weight rows)
//   <out reals>         (bias row)
std::string render_network(const ToyNetwork& net);
ToyNetwork parse_network(std::string_view text);
void save_network(const ToyNetwork& net, const std::filesystem::path& path);
ToyNetwork load_network(const std::filesystem::path& path);

}  // namespace lens
