#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "lens/error.hpp"
#include "lens/io.hpp"
#include "lens/network.hpp"
#include "lens/random.hpp"
#include "test_util.hpp"

namespace lens {
namespace {

std::vector<double> random_input(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform();
    return x;
}

TEST(InitNetwork, ShapesAndDeterminism) {
    const auto a = init_network({4, 3, 2}, Activation::softplus(), 5);
    ASSERT_EQ(a.layers().size(), 2u);
    EXPECT_EQ(a.layers()[0].out, 3u);
    EXPECT_EQ(a.layers()[0].in, 4u);
    EXPECT_EQ(a.layers()[1].out, 2u);
    EXPECT_EQ(a.layers()[1].in, 3u);
    EXPECT_EQ(a.layer_dims(), (std::vector<std::size_t>{4, 3, 2}));
    EXPECT_EQ(a, init_network({4, 3, 2}, Activation::softplus(), 5));
    EXPECT_NE(a.layers()[0].weights[0], init_network({4, 3, 2}, Activation::softplus(), 6).layers()[0].weights[0]);
    for (double w : a.layers()[0].weights) EXPECT_LE(std::fabs(w), 0.5);
    EXPECT_THROW(init_network({4}, Activation::softplus(), 1), DomainError);
    EXPECT_THROW(init_network({4, 0, 2}, Activation::softplus(), 1), DomainError);
}

TEST(Forward, ZeroParametersGiveZeroLogits) {
    ToyNetwork net({DenseLayer{2, 3, std::vector<double>(6, 0.0), {0, 0}}, DenseLayer{3, 2, std::vector<double>(6, 0.0), {0, 0, 0}}},
                   Activation::softplus());
    // softplus(0) = log 2 / beta is nonzero, but zero second-layer weights cancel it.
    EXPECT_EQ(forward(net, std::vector<double>{0.3, 0.1, 0.9}), (std::vector<double>{0, 0, 0}));
}

TEST(Forward, SingleLinearLayerByHand) {
    ToyNetwork net({DenseLayer{2, 4, {1, 2, 3, 4, -1, 0, 0.5, 2}, {0.5, -1}}}, Activation::softplus());
    const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
    const auto y = forward(net, x);
    EXPECT_DOUBLE_EQ(y[0], 0.1 + 0.4 + 0.9 + 1.6 + 0.5);
    EXPECT_DOUBLE_EQ(y[1], -0.1 + 0.0 + 0.15 + 0.8 - 1.0);
    EXPECT_EQ(predict(net, x), 0u);
}

TEST(Forward, RejectsWrongInputSize) {
    const auto net = init_network({4, 2}, Activation::relu(), 1);
    EXPECT_THROW(forward(net, std::vector<double>{1, 2}), DomainError);
}

TEST(Activation, SoftplusIsStable) {
    const auto sp = Activation::softplus(10.0);
    EXPECT_DOUBLE_EQ(sp.apply(100.0), 100.0);
    EXPECT_GE(sp.apply(-100.0), 0.0);
    EXPECT_NEAR(sp.apply(0.0), std::log(2.0) / 10.0, 1e-15);
    EXPECT_NEAR(sp.derivative(0.0), 0.5, 1e-15);
    EXPECT_EQ(Activation::relu().apply(-1.0), 0.0);
    EXPECT_EQ(Activation::relu().derivative(2.0), 1.0);
}

TEST(Forward, DirectionalDerivativeMatchesFiniteDifference) {
    const auto net = init_network({16, 8, 8, 3}, Activation::softplus(), 3);
    const auto x = random_input(16, 4);
    const auto d = random_input(16, 5);
    const auto trace = forward_trace(net, x);
    for (std::size_t cls = 0; cls < 3; ++cls) {
        std::vector<double> up(3, 0.0);
        up[cls] = 1.0;
        const auto g = backprop_input(net, trace, up);
        double analytic = 0.0;
        for (std::size_t i = 0; i < 16; ++i) analytic += g[i] * d[i];
        const double h = 1e-5;
        auto xp = x, xm = x;
        for (std::size_t i = 0; i < 16; ++i) {
            xp[i] += h * d[i];
            xm[i] -= h * d[i];
        }
        const double fd = (forward(net, xp)[cls] - forward(net, xm)[cls]) / (2 * h);
        EXPECT_NEAR(analytic, fd, 1e-6);
    }
}

TEST(Backprop, ParameterGradientMatchesFiniteDifference) {
    auto net = init_network({5, 4, 3}, Activation::softplus(), 8);
    const auto x = random_input(5, 9);
    std::vector<double> dlogits;
    cross_entropy(forward(net, x), 1, &dlogits);
    std::vector<DenseLayer> grads;
    for (const auto& l : net.layers())
        grads.push_back(DenseLayer{l.out, l.in, std::vector<double>(l.weights.size()), std::vector<double>(l.bias.size())});
    backprop_params(net, forward_trace(net, x), dlogits, grads);

    auto loss = [&](const ToyNetwork& n) { return cross_entropy(forward(n, x), 1); };
    const double h = 1e-6;
    for (std::size_t l = 0; l < 2; ++l) {
        for (std::size_t i = 0; i < net.layers()[l].weights.size(); ++i) {
            auto p = net, m = net;
            p.mutable_layers()[l].weights[i] += h;
            m.mutable_layers()[l].weights[i] -= h;
            EXPECT_NEAR(grads[l].weights[i], (loss(p) - loss(m)) / (2 * h), 1e-7);
        }
        for (std::size_t i = 0; i < net.layers()[l].bias.size(); ++i) {
            auto p = net, m = net;
            p.mutable_layers()[l].bias[i] += h;
            m.mutable_layers()[l].bias[i] -= h;
            EXPECT_NEAR(grads[l].bias[i], (loss(p) - loss(m)) / (2 * h), 1e-7);
        }
    }
}

TEST(CrossEntropy, ValueAndGradient) {
    std::vector<double> d;
    const double l = cross_entropy(std::vector<double>{0.0, 0.0}, 0, &d);
    EXPECT_NEAR(l, std::log(2.0), 1e-15);
    EXPECT_NEAR(d[0], -0.5, 1e-15);
    EXPECT_NEAR(d[1], 0.5, 1e-15);
    EXPECT_TRUE(std::isfinite(cross_entropy(std::vector<double>{1000.0, -1000.0}, 1)));
    EXPECT_THROW(cross_entropy(std::vector<double>{0.0}, 3), DomainError);
}

TEST(Checkpoint, RoundTripIsBitExact) {
    const auto net = init_network({64, 32, 10}, Activation::softplus(7.5), 11);
    const auto path = test::temp_dir("net") / "n.toynet";
    save_network(net, path);
    const auto back = load_network(path);
    EXPECT_EQ(back, net);
    const auto x = random_input(64, 1);
    const auto a = forward(net, x), b = forward(back, x);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(std::bit_cast<std::uint64_t>(a[i]), std::bit_cast<std::uint64_t>(b[i]));
}

TEST(Checkpoint, CorruptedInput) {
    const auto text = render_network(init_network({2, 2}, Activation::relu(), 1));
    auto bad_dims = text;
    bad_dims.replace(bad_dims.find("DIMS"), 4, "DIMX");
    EXPECT_THROW(parse_network(bad_dims), ParseError);
    EXPECT_THROW(parse_network("TOYNET2 1 relu 1\n"), ParseError);
    EXPECT_THROW(parse_network(text.substr(0, text.size() / 2)), ParseError);
    EXPECT_THROW(load_network("/nonexistent/net.toynet"), IoError);
}

}  // namespace
}  // namespace lens
