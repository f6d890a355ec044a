#include <gtest/gtest.h>

#include <cmath>

#include "lens/error.hpp"
#include "lens/micro_dataset.hpp"
#include "lens/train.hpp"

namespace lens {
namespace {

const Dims kBlobDims{2, 2};

TEST(Train, ZeroEpochsReturnsInitialisation) {
    const auto data = make_blobs(20, kBlobDims, 0.1, 1);
    TrainConfig cfg;
    cfg.epochs = 0;
    cfg.seed = 4;
    std::vector<EpochStats> log;
    EXPECT_EQ(train(data, cfg, {4, 6, 2}, Activation::softplus(), &log),
              init_network({4, 6, 2}, Activation::softplus(), 4));
    EXPECT_TRUE(log.empty());
}

TEST(Train, SeparableBlobsReachHighAccuracy) {
    const auto data = make_blobs(200, kBlobDims, 0.1, 2);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.seed = 3;
    std::vector<EpochStats> log;
    const auto net = train(data, cfg, {4, 8, 2}, Activation::softplus(), &log);
    EXPECT_EQ(log.size(), 50u);
    EXPECT_GE(accuracy(net, data), 0.95);
    EXPECT_LT(log.back().loss, log.front().loss);
}

TEST(Train, DeterministicForFixedSeed) {
    const auto data = make_micro_digits(40, 5);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.adversarial = AdversarialTraining{0.1, 3, 0.05};
    const auto a = train(data, cfg, {64, 8, 10}, Activation::softplus(), nullptr);
    const auto b = train(data, cfg, {64, 8, 10}, Activation::softplus(), nullptr);
    EXPECT_EQ(a, b);
    cfg.seed = 2;
    EXPECT_NE(a, train(data, cfg, {64, 8, 10}, Activation::softplus(), nullptr));
}

TEST(Train, DivergenceIsReported) {
    const auto data = make_blobs(20, kBlobDims, 0.1, 1);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.learning_rate = 1e300;
    EXPECT_THROW(train(data, cfg, {4, 6, 2}, Activation::softplus(), nullptr), TrainingDivergenceError);
}

TEST(TrainConfig, Validation) {
    TrainConfig cfg;
    cfg.batch_size = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = TrainConfig{};
    cfg.learning_rate = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = TrainConfig{};
    cfg.adversarial = AdversarialTraining{0.1, 5, 0.2};
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(PgdLinf, StaysInBallAndRangeAndRaisesLoss) {
    const auto data = make_micro_digits(30, 9);
    const auto net = init_network({64, 16, 10}, Activation::softplus(), 1);
    const AdversarialTraining pgd{0.1, 10, 0.02};
    for (const auto& d : data) {
        const auto x = d.image.pixels();
        const auto adv = pgd_linf(net, x, static_cast<std::size_t>(d.label), pgd);
        for (std::size_t i = 0; i < x.size(); ++i) {
            EXPECT_LE(std::fabs(adv[i] - x[i]), pgd.epsilon + 1e-12);
            EXPECT_GE(adv[i], 0.0);
            EXPECT_LE(adv[i], 1.0);
        }
        EXPECT_GE(cross_entropy(forward(net, adv), static_cast<std::size_t>(d.label)),
                  cross_entropy(forward(net, x), static_cast<std::size_t>(d.label)));
    }
}

TEST(MicroDigits, DeterministicAndInRange) {
    const auto a = make_micro_digits(30, 11);
    const auto b = make_micro_digits(30, 11);
    ASSERT_EQ(a.size(), 30u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].image, b[i].image);
        EXPECT_EQ(a[i].label, static_cast<int>(i % 10));
        EXPECT_EQ(a[i].image.dims(), (Dims{8, 8}));
    }
    EXPECT_EQ(a[3].id, "digit_0003");
}

}  // namespace
}  // namespace lens
