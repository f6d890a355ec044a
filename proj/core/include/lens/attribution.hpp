#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lens/network.hpp"
#include "lens/types.hpp"

namespace lens {

// d logit[class] / d x for a flat input vector.
std::vector<double> input_gradient(const ToyNetwork& net, std::span<const double> x, std::size_t class_index);

// Simple gradients reshaped onto the image grid.
AttributionMap grad_input(const ToyNetwork& net, const ImageTensor& x, std::size_t class_index);
AttributionMap input_x_gradient(const ToyNetwork& net, const ImageTensor& x, std::size_t class_index);

// Midpoint Riemann approximation of integrated gradients along the straight
// path from `baseline` to `x`.
std::vector<double> integrated_gradients(const ToyNetwork& net, std::span<const double> x,
                                         std::span<const double> baseline, std::size_t steps,
                                         std::size_t class_index);
AttributionMap integrated_gradients(const ToyNetwork& net, const ImageTensor& x, const ImageTensor& baseline,
                                    std::size_t steps, std::size_t class_index);

// Central-difference Hessian-vector product of logit[class]:
// (g(x + r d) - g(x - r d)) / (2 r).
std::vector<double> hvp_fd(const ToyNetwork& net, std::span<const double> x, std::span<const double> direction,
                           std::size_t class_index, double r = 1e-4);

enum class AttributionKind { simple_grad, input_x_grad, integrated_gradients };

struct AttributionMethod {
    AttributionKind kind = AttributionKind::integrated_gradients;
    std::size_t ig_steps = 32;  // only for integrated gradients; zero baseline

    std::string name() const;
    // Parses "simple_grad", "input_x_grad", "ig" or "ig(<steps>)".
    static AttributionMethod parse(const std::string& text);
};

// Attribution of `x` for `class_index` on a grid of `dims`; multi-channel
// inputs are collapsed with collapse_channels.
AttributionMap attribute(const ToyNetwork& net, std::span<const double> x, Dims dims, std::size_t channels,
                         std::size_t class_index, const AttributionMethod& method);
AttributionMap attribute(const ToyNetwork& net, const ImageTensor& x, std::size_t class_index,
                         const AttributionMethod& method);

}  // namespace lens
