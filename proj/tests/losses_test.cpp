#include <gtest/gtest.h>

#include <cmath>

#include "endo/core/rng.hpp"
#include "endo/train/losses.hpp"

using namespace endo;

namespace {

Tensor<float> grid(float value, int n = 2, int side = 4) {
    return Tensor<float>(n, 1, side, side, value);
}

Tensor<float> filled(int n, int c, int h, int w, float value) {
    return Tensor<float>(n, c, h, w, value);
}

Tensor<float> random_tensor(int n, int c, int h, int w, std::uint64_t seed) {
    Tensor<float> t(n, c, h, w);
    Rng rng(seed);
    for (auto& v : t.v) v = static_cast<float>(2.0 * rng.next_uniform() - 1.0);
    return t;
}

} // namespace

TEST(GanValue, HalfProbabilitiesGiveTwoLogHalf) {
    EXPECT_NEAR(gan_value(grid(0.5f), grid(0.5f), 1e-7), -1.386294, 1e-6);
}

TEST(GanValue, PerfectDiscriminationGivesZero) {
    EXPECT_DOUBLE_EQ(gan_value(grid(1.0f), grid(0.0f), 1e-7), 0.0);
}

TEST(GanValue, ClampPathBoundsTheLog) {
    double v = gan_value(grid(0.0f), grid(0.0f), 1e-7);
    EXPECT_NEAR(v, std::log(1e-7), 1e-3); // ~= -16.118
}

TEST(GanValue, AlwaysNonPositive) {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        Tensor<float> real = grid(0.0f), fake = grid(0.0f);
        for (auto& v : real.v) v = static_cast<float>(rng.next_uniform());
        for (auto& v : fake.v) v = static_cast<float>(rng.next_uniform());
        EXPECT_LE(gan_value(real, fake, 1e-7), 0.0);
    }
}

TEST(GanValue, OutOfRangeGridIsDomainError) {
    EXPECT_THROW(gan_value(grid(1.5f), grid(0.5f), 1e-7), DomainError);
    EXPECT_THROW(gan_value(grid(0.5f), grid(-0.2f), 1e-7), DomainError);
    // Within the 1e-6 tolerance band is accepted.
    EXPECT_NO_THROW(gan_value(grid(1.0f + 5e-7f), grid(0.5f), 1e-7));
}

TEST(GanValue, AntagonismInFakeScores) {
    // Raising every fake score strictly lowers the discriminator's value
    // and strictly lowers the non-saturating generator term.
    double low = gan_value(grid(0.8f), grid(0.3f), 1e-7);
    double high = gan_value(grid(0.8f), grid(0.4f), 1e-7);
    EXPECT_LT(high, low);

    Tensor<float> g;
    double gen_low = generator_gan_term_grad(grid(0.3f), GanForm::LogNonSaturating,
                                             1e-7, g);
    double gen_high = generator_gan_term_grad(grid(0.4f), GanForm::LogNonSaturating,
                                              1e-7, g);
    EXPECT_LT(gen_high, gen_low);
}

TEST(CycleLoss, IdentityReconstructionIsZero) {
    Tensor<float> v = random_tensor(2, 3, 8, 8, 1);
    Tensor<float> r = random_tensor(2, 3, 8, 8, 2);
    EXPECT_DOUBLE_EQ(cycle_loss(v, v, r, r), 0.0);
}

TEST(CycleLoss, ConstantOffsetGivesTheOffset) {
    Tensor<float> v = random_tensor(2, 3, 8, 8, 3);
    Tensor<float> v_rec = v;
    for (auto& x : v_rec.v) x += 0.1f;
    Tensor<float> r = random_tensor(2, 3, 8, 8, 4);
    EXPECT_NEAR(cycle_loss(v, v_rec, r, r), 0.1, 1e-6);
}

TEST(CycleLoss, SignFlipOfHalfIsOne) {
    Tensor<float> v = filled(2, 3, 8, 8, 0.5f);
    Tensor<float> v_rec = filled(2, 3, 8, 8, -0.5f);
    Tensor<float> r = random_tensor(2, 3, 8, 8, 5);
    EXPECT_NEAR(cycle_loss(v, v_rec, r, r), 1.0, 1e-7);
}

TEST(CycleLoss, MetricProperties) {
    Tensor<float> a = random_tensor(1, 3, 6, 6, 6);
    Tensor<float> b = random_tensor(1, 3, 6, 6, 7);
    Tensor<float> c = random_tensor(1, 3, 6, 6, 8);
    Tensor<float> zero = filled(1, 3, 6, 6, 0.0f);
    // Nonnegative, symmetric under exchanging input and reconstruction.
    EXPECT_GE(cycle_loss(a, b, zero, zero), 0.0);
    EXPECT_NEAR(cycle_loss(a, b, zero, zero), cycle_loss(b, a, zero, zero), 1e-9);
    // Triangle inequality per direction.
    double ab = cycle_loss(a, b, zero, zero);
    double bc = cycle_loss(b, c, zero, zero);
    double ac = cycle_loss(a, c, zero, zero);
    EXPECT_LE(ac, ab + bc + 1e-9);
}

TEST(CycleLoss, ShapeMismatchIsAnError) {
    Tensor<float> a = filled(1, 3, 6, 6, 0.0f);
    Tensor<float> b = filled(1, 3, 8, 8, 0.0f);
    EXPECT_THROW(cycle_loss(a, b, a, a), ShapeError);
}

TEST(TotalLoss, LambdaZeroDropsTheCycleTerm) {
    LossWeights w;
    w.lambda_cyc = 0.0;
    EXPECT_DOUBLE_EQ(total_loss(-0.3, -0.4, 5.0, w), -0.7);
}

TEST(TotalLoss, HandArithmetic) {
    LossWeights w; // lambda 10
    const double two_log_half = 2.0 * std::log(0.5); // -1.386294...
    EXPECT_NEAR(total_loss(two_log_half, two_log_half, 0.1, w), -1.772589, 1e-6);
    EXPECT_DOUBLE_EQ(total_loss(0.0, 0.0, 0.0, w), 0.0);
}

TEST(TotalLoss, AffineInLambdaWithSlopeCyc) {
    const double cyc = 0.37;
    const double g1 = -0.8, g2 = -1.1;
    for (double lambda : {0.0, 1.0, 2.5, 10.0, 33.0}) {
        LossWeights w;
        w.lambda_cyc = lambda;
        double expected = g1 + g2 + lambda * cyc;
        EXPECT_NEAR(total_loss(g1, g2, cyc, w), expected, 1e-9);
    }
}

TEST(LossWeights, Validation) {
    LossWeights w;
    w.lambda_cyc = -1;
    EXPECT_THROW(w.validate(), ParamError);
    w.lambda_cyc = 10;
    w.epsilon_log = 0.0;
    EXPECT_THROW(w.validate(), ParamError);
    w.epsilon_log = 1e-2;
    EXPECT_THROW(w.validate(), ParamError);
}

TEST(DiscriminatorLoss, GradientSignsPushTheRightWay) {
    Tensor<float> g_real, g_fake;
    double loss =
        discriminator_loss_grad(grid(0.6f), grid(0.4f), 1e-7, g_real, g_fake);
    EXPECT_GT(loss, 0.0); // negated gan_value
    // Ascending gan_value means d_real should rise (negative loss grad) and
    // d_fake should fall (positive loss grad).
    for (float v : g_real.v) EXPECT_LT(v, 0.0f);
    for (float v : g_fake.v) EXPECT_GT(v, 0.0f);
}

TEST(GeneratorTerm, SaturatingAndNonSaturatingAgreeOnDirection) {
    Tensor<float> g_ns, g_sat;
    generator_gan_term_grad(grid(0.3f), GanForm::LogNonSaturating, 1e-7, g_ns);
    generator_gan_term_grad(grid(0.3f), GanForm::LogSaturating, 1e-7, g_sat);
    // Both objectives fall as D(fake) rises.
    for (float v : g_ns.v) EXPECT_LT(v, 0.0f);
    for (float v : g_sat.v) EXPECT_LT(v, 0.0f);
}

TEST(DiscriminatorAccuracy, CountsThresholdedDecisions) {
    EXPECT_DOUBLE_EQ(discriminator_accuracy(grid(0.9f), grid(0.1f)), 1.0);
    EXPECT_DOUBLE_EQ(discriminator_accuracy(grid(0.1f), grid(0.9f)), 0.0);
    EXPECT_DOUBLE_EQ(discriminator_accuracy(grid(0.9f), grid(0.9f)), 0.5);
}
