#include "lens/attribution.hpp"

#include <cmath>

#include "lens/error.hpp"
#include "lens/io.hpp"

namespace lens {

std::vector<double> input_gradient(const ToyNetwork& net, std::span<const double> x, std::size_t class_index) {
    if (class_index >= net.class_count()) throw DomainError("class index out of range");
    const auto trace = forward_trace(net, x);
    std::vector<double> upstream(net.class_count(), 0.0);
    upstream[class_index] = 1.0;
    return backprop_input(net, trace, upstream);
}

namespace {

void require_grid(const ToyNetwork& net, const ImageTensor& x) {
    if (x.size() != net.input_size()) throw DomainError("image size does not match the network input");
}

}  // namespace

AttributionMap grad_input(const ToyNetwork& net, const ImageTensor& x, std::size_t class_index) {
    require_grid(net, x);
    return collapse_channels(x.dims(), x.channels(), input_gradient(net, x.pixels(), class_index));
}

AttributionMap input_x_gradient(const ToyNetwork& net, const ImageTensor& x, std::size_t class_index) {
    require_grid(net, x);
    auto g = input_gradient(net, x.pixels(), class_index);
    const auto px = x.pixels();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] *= px[i];
    return collapse_channels(x.dims(), x.channels(), g);
}

std::vector<double> integrated_gradients(const ToyNetwork& net, std::span<const double> x,
                                         std::span<const double> baseline, std::size_t steps,
                                         std::size_t class_index) {
    if (baseline.size() != x.size()) throw DomainError("baseline and input differ in size");
    if (steps == 0) throw DomainError("integrated gradients needs at least one step");
    std::vector<double> mean(x.size(), 0.0);
    std::vector<double> point(x.size());
    for (std::size_t s = 0; s < steps; ++s) {
        const double alpha = (static_cast<double>(s) + 0.5) / static_cast<double>(steps);
        for (std::size_t i = 0; i < x.size(); ++i) point[i] = baseline[i] + alpha * (x[i] - baseline[i]);
        const auto g = input_gradient(net, point, class_index);
        for (std::size_t i = 0; i < x.size(); ++i) mean[i] += g[i];
    }
    for (std::size_t i = 0; i < x.size(); ++i) mean[i] = (x[i] - baseline[i]) * (mean[i] / static_cast<double>(steps));
    return mean;
}

AttributionMap integrated_gradients(const ToyNetwork& net, const ImageTensor& x, const ImageTensor& baseline,
                                    std::size_t steps, std::size_t class_index) {
    require_grid(net, x);
    if (baseline.dims() != x.dims() || baseline.channels() != x.channels()) {
        throw DomainError("baseline and input differ in shape");
    }
    return collapse_channels(x.dims(), x.channels(),
                             integrated_gradients(net, x.pixels(), baseline.pixels(), steps, class_index));
}

std::vector<double> hvp_fd(const ToyNetwork& net, std::span<const double> x, std::span<const double> direction,
                           std::size_t class_index, double r) {
    if (direction.size() != x.size()) throw DomainError("direction and input differ in size");
    if (!(r > 0.0)) throw DomainError("finite-difference radius must be positive");
    std::vector<double> plus(x.begin(), x.end());
    std::vector<double> minus(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        plus[i] += r * direction[i];
        minus[i] -= r * direction[i];
    }
    auto gp = input_gradient(net, plus, class_index);
    const auto gm = input_gradient(net, minus, class_index);
    for (std::size_t i = 0; i < gp.size(); ++i) gp[i] = (gp[i] - gm[i]) / (2.0 * r);
    return gp;
}

std::string AttributionMethod::name() const {
    switch (kind) {
        case AttributionKind::simple_grad: return "simple_grad";
        case AttributionKind::input_x_grad: return "input_x_grad";
        case AttributionKind::integrated_gradients: return "ig(" + std::to_string(ig_steps) + ")";
    }
    return "unknown";
}

AttributionMethod AttributionMethod::parse(const std::string& text) {
    if (text == "simple_grad") return {AttributionKind::simple_grad, 0};
    if (text == "input_x_grad") return {AttributionKind::input_x_grad, 0};
    if (text == "ig") return {AttributionKind::integrated_gradients, 32};
    if (text.size() > 4 && text.starts_with("ig(") && text.back() == ')') {
        const long long steps = parse_int(std::string_view(text).substr(3, text.size() - 4));
        if (steps < 1) throw DomainError("integrated gradients needs at least one step");
        return {AttributionKind::integrated_gradients, static_cast<std::size_t>(steps)};
    }
    throw DomainError("unknown attribution method '" + text + "'");
}

AttributionMap attribute(const ToyNetwork& net, std::span<const double> x, Dims dims, std::size_t channels,
                         std::size_t class_index, const AttributionMethod& method) {
    if (x.size() != dims.size() * channels) throw DomainError("input does not match the grid");
    std::vector<double> per_channel;
    switch (method.kind) {
        case AttributionKind::simple_grad:
            per_channel = input_gradient(net, x, class_index);
            break;
        case AttributionKind::input_x_grad:
            per_channel = input_gradient(net, x, class_index);
            for (std::size_t i = 0; i < x.size(); ++i) per_channel[i] *= x[i];
            break;
        case AttributionKind::integrated_gradients: {
            const std::vector<double> zeros(x.size(), 0.0);
            per_channel = integrated_gradients(net, x, zeros, method.ig_steps, class_index);
            break;
        }
    }
    return collapse_channels(dims, channels, per_channel);
}

AttributionMap attribute(const ToyNetwork& net, const ImageTensor& x, std::size_t class_index,
                         const AttributionMethod& method) {
    return attribute(net, x.pixels(), x.dims(), x.channels(), class_index, method);
}

}  // namespace lens
