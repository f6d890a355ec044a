#include <gtest/gtest.h>

#include <cmath>

#include "lens/attacks.hpp"
#include "lens/error.hpp"
#include "lens/metrics.hpp"
#include "lens/micro_dataset.hpp"
#include "lens/random.hpp"

namespace lens {
namespace {

class AttackTest : public ::testing::Test {
protected:
    ToyNetwork net = init_network({64, 16, 10}, Activation::softplus(), 17);
    std::vector<LabeledImage> data = make_micro_digits(12, 3);

    AttackConfig config(AttackVariant v, double eps = 0.2) const {
        AttackConfig cfg;
        cfg.variant = v;
        cfg.epsilon = eps;
        cfg.steps = 8;
        cfg.step_size = eps > 0.0 ? std::min(0.05, eps) : 0.05;
        cfg.restarts = 2;
        cfg.seed = 5;
        cfg.attribution = AttributionMethod::parse("ig(8)");
        return cfg;
    }

    AttributionMap attr(const ImageTensor& x, const AttackConfig& cfg) const {
        return attribute(net, x, predict(net, x.pixels()), cfg.attribution);
    }
};

constexpr AttackVariant kAll[] = {AttackVariant::random_sign, AttackVariant::universal_random, AttackVariant::top_k,
                                  AttackVariant::mass_center, AttackVariant::lens_objective};

TEST_F(AttackTest, ZeroBudgetIsIdentity) {
    const auto& x = data[0].image;
    const auto delta = universal_random(x.size(), 0.0, 1);
    for (double d : delta) EXPECT_EQ(d, 0.0);
    for (auto v : kAll) {
        auto cfg = config(v, 0.0);
        const auto r = run_attack(net, x, cfg, delta);
        EXPECT_EQ(r.perturbed, x) << to_string(v);
        EXPECT_EQ(r.delta_linf, 0.0);
        EXPECT_TRUE(r.prediction_preserved);
        EXPECT_EQ(topk_intersection(attr(x, cfg), attr(r.perturbed, cfg), 10), 1.0);
    }
}

TEST_F(AttackTest, ZeroStepsIsIdentity) {
    for (auto v : {AttackVariant::top_k, AttackVariant::mass_center, AttackVariant::lens_objective}) {
        auto cfg = config(v);
        cfg.steps = 0;
        const auto r = run_attack(net, data[1].image, cfg);
        EXPECT_EQ(r.perturbed, data[1].image);
        EXPECT_EQ(r.chosen_iteration, -1);
        EXPECT_TRUE(r.objective_trace.empty());
    }
}

TEST_F(AttackTest, RandomSignHitsBudgetWhereUnclipped) {
    const auto& x = data[2].image;
    const auto r = random_sign(net, x, 0.1, 9);
    EXPECT_EQ(r.perturbed, random_sign(net, x, 0.1, 9).perturbed);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double p = r.perturbed.pixels()[i];
        if (p > 0.0 && p < 1.0) EXPECT_NEAR(std::fabs(p - x.pixels()[i]), 0.1, 1e-15);
    }
}

TEST_F(AttackTest, UniversalDeltaIsShared) {
    const auto delta = universal_random(64, 0.1, 4);
    for (const auto& d : data) {
        const auto r = apply_perturbation(net, d.image, delta, 0.1);
        for (std::size_t i = 0; i < 64; ++i) {
            EXPECT_EQ(r.perturbed.pixels()[i], std::clamp(d.image.pixels()[i] + delta[i], 0.0, 1.0));
        }
    }
    EXPECT_THROW(apply_perturbation(net, data[0].image, delta, 0.05), DomainError);
}

TEST_F(AttackTest, IteratesStayInBudgetAndPreservePrediction) {
    const auto delta = universal_random(64, 0.2, 2);
    for (auto v : kAll) {
        for (const auto& d : data) {
            const auto r = run_attack(net, d.image, config(v), delta);
            EXPECT_LE(r.max_iterate_linf, 0.2 + 1e-12);
            EXPECT_LE(r.delta_linf, 0.2 + 1e-12);
            EXPECT_TRUE(r.iterates_in_range);
            if (r.prediction_preserved && v != AttackVariant::random_sign && v != AttackVariant::universal_random) {
                EXPECT_EQ(predict(net, r.perturbed.pixels()), predict(net, d.image.pixels()));
            }
            if (v == AttackVariant::random_sign || v == AttackVariant::universal_random) {
                EXPECT_EQ(r.prediction_preserved,
                          predict(net, r.perturbed.pixels()) == predict(net, d.image.pixels()));
            }
        }
    }
}

TEST_F(AttackTest, TopKAttackReturnsWorstIterate) {
    for (const auto& d : data) {
        const auto cfg = config(AttackVariant::top_k);
        const auto r = topk_attack(net, d.image, cfg);
        ASSERT_EQ(r.objective_trace.size(), cfg.steps * cfg.restarts);
        const double chosen = topk_intersection(attr(d.image, cfg), attr(r.perturbed, cfg), cfg.k_eval);
        EXPECT_LE(chosen, 1.0);
        if (r.chosen_iteration < 0) EXPECT_EQ(r.perturbed, d.image);
        else EXPECT_LT(chosen, 1.0);
    }
}

TEST_F(AttackTest, ZeroWindowLensObjectiveMatchesTopK) {
    auto cfg = config(AttackVariant::lens_objective);
    cfg.w_eval = 0;
    auto topk = config(AttackVariant::top_k);
    topk.w_eval = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto a = lens_objective_attack(net, data[i].image, cfg);
        const auto b = topk_attack(net, data[i].image, topk);
        EXPECT_EQ(a.objective_trace, b.objective_trace);
        EXPECT_EQ(a.perturbed, b.perturbed);
    }
}

TEST_F(AttackTest, MassCenterRecordsDisplacementOfChosenIterate) {
    const auto cfg = config(AttackVariant::mass_center);
    for (const auto& d : data) {
        const auto r = mass_center_attack(net, d.image, cfg);
        for (double t : r.objective_trace) EXPECT_GE(t, 0.0);
        if (r.chosen_iteration < 0) continue;
        const auto c0 = center_of_mass(attr(d.image, cfg));
        const auto c1 = center_of_mass(attr(r.perturbed, cfg));
        EXPECT_NEAR(r.objective_trace[static_cast<std::size_t>(r.chosen_iteration)],
                    std::hypot(c1.row - c0.row, c1.col - c0.col), 1e-12);
    }
}

TEST_F(AttackTest, MassCenterCannotMoveLinearModelGradient) {
    Rng rng(3);
    std::vector<double> w(10 * 64);
    for (auto& v : w) v = rng.uniform(-1, 1);
    const ToyNetwork linear({DenseLayer{10, 64, w, std::vector<double>(10, 0.0)}}, Activation::softplus());
    auto cfg = config(AttackVariant::mass_center);
    cfg.attribution = AttributionMethod::parse("simple_grad");
    const auto r = mass_center_attack(linear, data[0].image, cfg);
    for (double t : r.objective_trace) EXPECT_EQ(t, 0.0);
    EXPECT_EQ(r.chosen_iteration, -1);
}

TEST(CenterOfMass, Examples) {
    const auto uniform = center_of_mass(AttributionMap(3, 5, std::vector<double>(15, 2.0)));
    EXPECT_DOUBLE_EQ(uniform.row, 1.0);
    EXPECT_DOUBLE_EQ(uniform.col, 2.0);
    std::vector<double> point(5 * 5, 0.0);
    point[2 * 5 + 3] = -4.0;
    const auto p = center_of_mass(AttributionMap(5, 5, point));
    EXPECT_EQ(p.row, 2.0);
    EXPECT_EQ(p.col, 3.0);
    const auto mid = center_of_mass(AttributionMap(1, 3, {1.0, 0.0, 1.0}));
    EXPECT_EQ(mid.row, 0.0);
    EXPECT_EQ(mid.col, 1.0);
    EXPECT_THROW(center_of_mass(AttributionMap::zeros(Dims{2, 2})), DomainError);
}

TEST(ProjectLinf, ClipsToBallAndRange) {
    std::vector<double> c{0.5, -0.2, 1.3, 0.25};
    const std::vector<double> x{0.1, 0.05, 0.95, 0.3};
    project_linf(c, x, 0.1);
    EXPECT_EQ(c, (std::vector<double>{0.2, 0.0, 1.0, 0.25}));
}

TEST(AttackConfig, Validation) {
    AttackConfig cfg;
    cfg.epsilon = 0.1;
    cfg.step_size = 0.2;
    EXPECT_THROW(cfg.validate(64), DomainError);
    cfg.step_size = 0.01;
    cfg.t = 0;
    EXPECT_THROW(cfg.validate(64), DomainError);
    EXPECT_EQ(parse_attack_variant("mass_center"), AttackVariant::mass_center);
    EXPECT_THROW(parse_attack_variant("fgsm"), DomainError);
}

}  // namespace
}  // namespace lens
