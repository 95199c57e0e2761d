#include <gtest/gtest.h>

#include <algorithm>

#include "anchord/synthetic.hpp"

using namespace anchord;

TEST(GenerateScene, DegenerateParamsGiveIdentityPriorAndSensor) {
    const SyntheticScene scene = generate_scene(5, SceneParams::identity());
    EXPECT_EQ(scene.mde.values, scene.gt.values);
    EXPECT_EQ(scene.sensor.values, scene.gt.values);
    EXPECT_EQ(scene.sensor.valid_count(), scene.sensor.size());
}

TEST(GenerateScene, FullHoleFractionInvalidatesExactlyTheMask) {
    SceneParams params;
    params.hole_fraction = 1.0;
    params.corrupt_fraction = 0.0;
    const SyntheticScene scene = generate_scene(3, params);
    ASSERT_GT(scene.object_mask.count(), 0u);
    for (std::size_t p = 0; p < scene.sensor.size(); ++p) {
        if (scene.object_mask.values[p]) {
            EXPECT_EQ(scene.sensor.valid[p], 0);
        } else {
            EXPECT_EQ(scene.sensor.valid[p], 1);
        }
    }
}

TEST(GenerateScene, DeterministicForEqualSeeds) {
    const SyntheticScene a = generate_scene(7);
    const SyntheticScene b = generate_scene(7);
    EXPECT_EQ(a.gt.values, b.gt.values);
    EXPECT_EQ(a.sensor.values, b.sensor.values);
    EXPECT_EQ(a.sensor.valid, b.sensor.valid);
    EXPECT_EQ(a.mde.values, b.mde.values);
    EXPECT_EQ(a.object_mask.values, b.object_mask.values);

    const SyntheticScene c = generate_scene(8);
    EXPECT_NE(a.gt.values, c.gt.values);
}

TEST(GenerateScene, RespectsDocumentedRangesAndInvariants) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const SyntheticScene scene = generate_scene(seed);
        EXPECT_EQ(scene.gt.height, 240);
        EXPECT_EQ(scene.gt.width, 320);
        scene.gt.check_invariants("gt");
        scene.mde.check_invariants("mde");
        scene.sensor.check_invariants("sensor");
        EXPECT_EQ(scene.gt.valid_count(), scene.gt.size());
        EXPECT_EQ(scene.mde.valid_count(), scene.mde.size());
        for (const double v : scene.gt.values) {
            EXPECT_GE(v, scene.params.depth_min);
            EXPECT_LE(v, scene.params.depth_max);
        }
        for (const double v : scene.mde.values) EXPECT_GT(v, 0.0);
        // Objects exist and corruption is confined to them.
        EXPECT_GT(scene.object_mask.count(), 0u);
        for (std::size_t p = 0; p < scene.sensor.size(); ++p) {
            if (!scene.object_mask.values[p]) {
                EXPECT_EQ(scene.sensor.valid[p], 1);
            }
        }
    }
}

TEST(GenerateScene, PriorDistortionIsPiecewise) {
    // Per-object affine jitter must actually shear the prior relative to
    // the global background transform: the best global affine fit of the
    // prior to the ground truth cannot be exact inside objects.
    SceneParams params;
    params.sigma_mde = 0.0;
    params.sigma_sen = 0.0;
    params.bias_field_amplitude = 0.0;
    const SyntheticScene scene = generate_scene(11, params);
    // Fit alpha, beta on background pixels only (noiseless there).
    double sm = 0.0, sy = 0.0, smm = 0.0, smy = 0.0, n = 0.0;
    for (std::size_t p = 0; p < scene.gt.size(); ++p) {
        if (scene.object_mask.values[p]) continue;
        const double g = scene.gt.values[p];
        const double m = scene.mde.values[p];
        sm += g; sy += m; smm += g * g; smy += g * m; n += 1.0;
    }
    const double alpha = (smy - sm * sy / n) / (smm - sm * sm / n);
    const double beta = sy / n - alpha * sm / n;
    double max_err = 0.0;
    for (std::size_t p = 0; p < scene.gt.size(); ++p) {
        const double fitted = alpha * scene.gt.values[p] + beta;
        const double err = std::abs(fitted - scene.mde.values[p]);
        if (scene.object_mask.values[p]) {
            max_err = std::max(max_err, err);
        } else {
            EXPECT_LT(err, 1e-9);  // background is exactly affine
        }
    }
    EXPECT_GT(max_err, 0.01);  // objects are distorted differently
}
