#include "lens/network.hpp"

#include <algorithm>
#include <cmath>

#include "lens/error.hpp"
#include "lens/io.hpp"
#include "lens/random.hpp"

namespace lens {

double Activation::apply(double z) const noexcept {
    if (kind == ActivationKind::relu) return z > 0.0 ? z : 0.0;
    const double t = beta * z;
    // log(1 + e^t) / beta without overflow
    return (std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)))) / beta;
}

double Activation::derivative(double z) const noexcept {
    if (kind == ActivationKind::relu) return z > 0.0 ? 1.0 : 0.0;
    const double t = beta * z;
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

std::string to_string(ActivationKind kind) { return kind == ActivationKind::relu ? "relu" : "softplus"; }

ActivationKind parse_activation(const std::string& name) {
    if (name == "relu") return ActivationKind::relu;
    if (name == "softplus") return ActivationKind::softplus;
    throw DomainError("unknown activation '" + name + "'");
}

ToyNetwork::ToyNetwork(std::vector<DenseLayer> layers, Activation activation)
    : layers_(std::move(layers)), activation_(activation) {
    if (layers_.empty()) throw DomainError("network needs at least one layer");
    if (activation_.kind == ActivationKind::softplus && !(activation_.beta > 0.0 && std::isfinite(activation_.beta))) {
        throw DomainError("softplus beta must be positive");
    }
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        if (layer.out == 0 || layer.in == 0) throw DomainError("layer dimensions must be positive");
        if (l > 0 && layer.in != layers_[l - 1].out) throw DomainError("inconsistent layer dimensions");
        if (layer.weights.size() != layer.out * layer.in || layer.bias.size() != layer.out) {
            throw DomainError("layer parameter count mismatch");
        }
        auto finite = [](double v) { return std::isfinite(v); };
        if (!std::all_of(layer.weights.begin(), layer.weights.end(), finite) ||
            !std::all_of(layer.bias.begin(), layer.bias.end(), finite)) {
            throw DomainError("network parameters must be finite");
        }
    }
}

std::vector<std::size_t> ToyNetwork::layer_dims() const {
    std::vector<std::size_t> dims{layers_.front().in};
    for (const auto& l : layers_) dims.push_back(l.out);
    return dims;
}

ToyNetwork init_network(const std::vector<std::size_t>& layer_dims, Activation activation, std::uint64_t seed) {
    if (layer_dims.size() < 2) throw DomainError("network needs at least input and output dimensions");
    if (std::find(layer_dims.begin(), layer_dims.end(), std::size_t{0}) != layer_dims.end()) {
        throw DomainError("layer dimensions must be positive");
    }
    Rng rng(seed);
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        DenseLayer layer{layer_dims[l + 1], layer_dims[l], {}, {}};
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
        layer.weights.resize(layer.out * layer.in);
        for (auto& w : layer.weights) w = rng.uniform(-bound, bound);
        layer.bias.assign(layer.out, 0.0);
        layers.push_back(std::move(layer));
    }
    return ToyNetwork(std::move(layers), activation);
}

namespace {

void require_input(const ToyNetwork& net, std::span<const double> x) {
    if (x.size() != net.input_size()) {
        throw DomainError("input has " + std::to_string(x.size()) + " values, network expects " +
                          std::to_string(net.input_size()));
    }
}

}  // namespace

ForwardTrace forward_trace(const ToyNetwork& net, std::span<const double> x) {
    require_input(net, x);
    ForwardTrace trace;
    const auto& layers = net.layers();
    const auto act = net.activation();
    std::vector<double> current(x.begin(), x.end());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        std::vector<double> z(layer.out);
        for (std::size_t o = 0; o < layer.out; ++o) {
            double sum = layer.bias[o];
            const double* row = &layer.weights[o * layer.in];
            for (std::size_t i = 0; i < layer.in; ++i) sum += row[i] * current[i];
            z[o] = sum;
        }
        trace.inputs.push_back(std::move(current));
        if (l + 1 < layers.size()) {
            current.resize(layer.out);
            for (std::size_t o = 0; o < layer.out; ++o) current[o] = act.apply(z[o]);
        } else {
            trace.logits = z;
        }
        trace.pre.push_back(std::move(z));
    }
    return trace;
}

std::vector<double> forward(const ToyNetwork& net, std::span<const double> x) {
    return forward_trace(net, x).logits;
}

std::size_t predict(const ToyNetwork& net, std::span<const double> x) {
    const auto logits = forward(net, x);
    return static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

namespace {

// Walks the layers backwards. `visit(l, delta)` sees the gradient with
// respect to layer l's pre-activation before it is pushed further down.
template <typename Visit>
std::vector<double> backward(const ToyNetwork& net, const ForwardTrace& trace, std::span<const double> upstream,
                             Visit&& visit) {
    const auto& layers = net.layers();
    if (upstream.size() != net.class_count()) throw DomainError("upstream gradient size mismatch");
    std::vector<double> delta(upstream.begin(), upstream.end());
    for (std::size_t l = layers.size(); l-- > 0;) {
        const auto& layer = layers[l];
        if (l + 1 < layers.size()) {
            const auto act = net.activation();
            for (std::size_t o = 0; o < layer.out; ++o) delta[o] *= act.derivative(trace.pre[l][o]);
        }
        visit(l, delta);
        std::vector<double> below(layer.in, 0.0);
        for (std::size_t o = 0; o < layer.out; ++o) {
            const double d = delta[o];
            if (d == 0.0) continue;
            const double* row = &layer.weights[o * layer.in];
            for (std::size_t i = 0; i < layer.in; ++i) below[i] += d * row[i];
        }
        delta = std::move(below);
    }
    return delta;
}

}  // namespace

std::vector<double> backprop_input(const ToyNetwork& net, const ForwardTrace& trace, std::span<const double> upstream) {
    return backward(net, trace, upstream, [](std::size_t, const std::vector<double>&) {});
}

void backprop_params(const ToyNetwork& net, const ForwardTrace& trace, std::span<const double> upstream,
                     std::vector<DenseLayer>& grads) {
    if (grads.size() != net.layers().size()) throw DomainError("gradient buffer layout mismatch");
    backward(net, trace, upstream, [&](std::size_t l, const std::vector<double>& delta) {
        auto& g = grads[l];
        const auto& in = trace.inputs[l];
        for (std::size_t o = 0; o < g.out; ++o) {
            g.bias[o] += delta[o];
            double* row = &g.weights[o * g.in];
            for (std::size_t i = 0; i < g.in; ++i) row[i] += delta[o] * in[i];
        }
    });
}

double cross_entropy(std::span<const double> logits, std::size_t label, std::vector<double>* dlogits) {
    if (label >= logits.size()) throw DomainError("label outside the class range");
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits) z += std::exp(v - m);
    const double log_z = m + std::log(z);
    if (dlogits) {
        dlogits->resize(logits.size());
        for (std::size_t i = 0; i < logits.size(); ++i) (*dlogits)[i] = std::exp(logits[i] - log_z);
        (*dlogits)[label] -= 1.0;
    }
    return log_z - logits[label];
}

// ---- checkpoints ---------------------------------------------------------

std::string render_network(const ToyNetwork& net) {
    const auto act = net.activation();
    std::string out = "TOYNET1 " + std::to_string(net.layers().size()) + " " + to_string(act.kind) + " " +
                      format_double(act.beta) + "\n";
    for (const auto& layer : net.layers()) {
        out += "DIMS " + std::to_string(layer.out) + " " + std::to_string(layer.in) + "\n";
        for (std::size_t o = 0; o < layer.out; ++o) {
            for (std::size_t i = 0; i < layer.in; ++i) {
                if (i) out += ' ';
                out += format_double(layer.w(o, i));
            }
            out += '\n';
        }
        for (std::size_t o = 0; o < layer.out; ++o) {
            if (o) out += ' ';
            out += format_double(layer.bias[o]);
        }
        out += '\n';
    }
    return out;
}

namespace {

class LineCursor {
public:
    explicit LineCursor(std::string_view text) : text_(text) {}

    // Next line split on spaces; throws at end of input.
    std::vector<std::string_view> fields(const char* what) {
        if (pos_ >= text_.size()) throw ParseError(std::string("missing ") + what, line_ + 1);
        std::size_t nl = text_.find('\n', pos_);
        if (nl == std::string_view::npos) nl = text_.size();
        std::string_view line = text_.substr(pos_, nl - pos_);
        pos_ = nl + 1;
        ++line_;
        std::vector<std::string_view> out;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\r')) ++i;
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\r') ++j;
            if (j > i) out.push_back(line.substr(i, j - i));
            i = j;
        }
        return out;
    }

    int line() const noexcept { return line_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 0;
};

std::vector<double> parse_row(LineCursor& cur, std::size_t n, const char* what) {
    auto f = cur.fields(what);
    if (f.size() != n) {
        throw ParseError(std::string(what) + ": expected " + std::to_string(n) + " values, found " +
                             std::to_string(f.size()),
                         cur.line());
    }
    std::vector<double> out;
    out.reserve(n);
    for (auto t : f) out.push_back(parse_double(t, cur.line()));
    return out;
}

}  // namespace

ToyNetwork parse_network(std::string_view text) {
    LineCursor cur(text);
    auto header = cur.fields("header");
    if (header.size() != 4 || header[0] != "TOYNET1") throw ParseError("malformed TOYNET1 header", 1);
    const long long n_layers = parse_int(header[1], 1);
    if (n_layers < 1) throw ParseError("layer count must be positive", 1);
    Activation act;
    try {
        act.kind = parse_activation(std::string(header[2]));
    } catch (const DomainError& e) {
        throw ParseError(e.what(), 1);
    }
    act.beta = parse_double(header[3], 1);

    std::vector<DenseLayer> layers;
    for (long long l = 0; l < n_layers; ++l) {
        auto dims = cur.fields("DIMS line");
        if (dims.size() != 3 || dims[0] != "DIMS") throw ParseError("malformed DIMS line", cur.line());
        const long long out = parse_int(dims[1], cur.line());
        const long long in = parse_int(dims[2], cur.line());
        if (out <= 0 || in <= 0) throw ParseError("layer dimensions must be positive", cur.line());
        if (!layers.empty() && static_cast<std::size_t>(in) != layers.back().out) {
            throw ParseError("layer input does not match previous output", cur.line());
        }
        DenseLayer layer{static_cast<std::size_t>(out), static_cast<std::size_t>(in), {}, {}};
        layer.weights.reserve(layer.out * layer.in);
        for (std::size_t o = 0; o < layer.out; ++o) {
            auto row = parse_row(cur, layer.in, "weight row");
            layer.weights.insert(layer.weights.end(), row.begin(), row.end());
        }
        layer.bias = parse_row(cur, layer.out, "bias row");
        layers.push_back(std::move(layer));
    }
    try {
        return ToyNetwork(std::move(layers), act);
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
}

void save_network(const ToyNetwork& net, const std::filesystem::path& path) { write_file(path, render_network(net)); }

ToyNetwork load_network(const std::filesystem::path& path) {
    try {
        return parse_network(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace lens
