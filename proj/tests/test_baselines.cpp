#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "anchord/baselines.hpp"
#include "anchord/pipeline.hpp"
#include "anchord/rng.hpp"

using namespace anchord;

TEST(AffineBaseline, IdentityAndExactRelation) {
    Rng rng(70);
    DepthMap mde(12, 16, 0.0, true);
    for (auto& v : mde.values) v = rng.uniform(0.4, 1.6);
    const DepthMap sensor_equal = mde;
    const DepthMap identity = affine_alignment_baseline(sensor_equal, mde, 64, 1);
    for (std::size_t i = 0; i < mde.size(); ++i) {
        EXPECT_NEAR(identity.values[i], mde.values[i], 1e-12);
    }

    DepthMap sensor(12, 16, 0.0, true);
    for (std::size_t i = 0; i < mde.size(); ++i) sensor.values[i] = 1.5 * mde.values[i] + 0.2;
    const DepthMap aligned = affine_alignment_baseline(sensor, mde, 64, 1);
    for (std::size_t i = 0; i < mde.size(); ++i) {
        EXPECT_NEAR(aligned.values[i], 1.5 * mde.values[i] + 0.2, 1e-9);
    }
}

TEST(InpaintBaseline, FullyValidMapIsIdentity) {
    Rng rng(71);
    DepthMap sensor(6, 6, 0.0, true);
    for (auto& v : sensor.values) v = rng.uniform(0.4, 1.6);
    const DepthMap out = inpaint_baseline(sensor);
    EXPECT_EQ(out.values, sensor.values);
}

TEST(InpaintBaseline, SingleHoleTakesNeighborAverage) {
    // Uniform neighbors.
    DepthMap uniform(3, 3, 2.0, true);
    uniform.set(1, 1, 0.0, false);
    const DepthMap filled = inpaint_baseline(uniform);
    EXPECT_NEAR(filled.at(1, 1), 2.0, 1e-9);

    // Neighbors (1, 1, 2, 2) -> 1.5. Corners chosen so the boundary stays
    // harmonic after one sweep.
    DepthMap mixed(3, 3, 1.5, true);
    mixed.set(0, 1, 1.0, true);
    mixed.set(2, 1, 1.0, true);
    mixed.set(1, 0, 2.0, true);
    mixed.set(1, 2, 2.0, true);
    mixed.set(1, 1, 0.0, false);
    const DepthMap stencil = inpaint_baseline(mixed);
    EXPECT_NEAR(stencil.at(1, 1), 1.5, 1e-9);
}

TEST(InpaintBaseline, MaximumPrincipleHolds) {
    Rng rng(72);
    DepthMap sensor(24, 24);
    double lo = 1e9;
    double hi = -1e9;
    for (std::size_t i = 0; i < sensor.size(); ++i) {
        if (rng.uniform01() < 0.4) continue;  // leave invalid
        sensor.values[i] = rng.uniform(0.4, 1.6);
        sensor.valid[i] = 1;
        lo = std::min(lo, sensor.values[i]);
        hi = std::max(hi, sensor.values[i]);
    }
    ASSERT_GT(sensor.valid_count(), 0u);
    const DepthMap out = inpaint_baseline(sensor);
    for (std::size_t i = 0; i < out.size(); ++i) {
        EXPECT_GE(out.values[i], lo);
        EXPECT_LE(out.values[i], hi);
        EXPECT_EQ(out.valid[i], 1);
        if (sensor.valid[i]) EXPECT_DOUBLE_EQ(out.values[i], sensor.values[i]);
    }
}

TEST(InpaintBaseline, IdempotentOnDenseMaps) {
    Rng rng(73);
    DepthMap sensor(10, 10);
    for (std::size_t i = 0; i < sensor.size(); ++i) {
        if (rng.uniform01() < 0.3) continue;
        sensor.values[i] = rng.uniform(0.4, 1.6);
        sensor.valid[i] = 1;
    }
    const DepthMap once = inpaint_baseline(sensor);
    const DepthMap twice = inpaint_baseline(once);
    EXPECT_EQ(once.values, twice.values);
}

TEST(InpaintBaseline, ErrorsWithoutAnyValidPixel) {
    const DepthMap empty(4, 4);
    EXPECT_THROW(inpaint_baseline(empty), InputError);
}

TEST(AffineBaseline, MatchesSolverInDegenerateConfiguration) {
    // Noiseless fully-valid affine relation, slope factors off, single
    // patch: the optimizer's smoothed prediction and the baseline both
    // reduce to the same global affine map.
    Rng rng(74);
    const int h = 32;
    const int w = 32;
    DepthMap mde(h, w, 0.0, true);
    for (auto& v : mde.values) v = rng.uniform(0.4, 1.6);
    DepthMap sensor(h, w, 0.0, true);
    for (std::size_t i = 0; i < mde.size(); ++i) sensor.values[i] = 1.5 * mde.values[i] + 0.2;

    PipelineOptions options;
    options.method = Method::Anchord;
    options.solver.patch_size = 32;  // single patch at this size
    options.solver.weights.lambda_slp = 0.0;
    const PipelineResult result = run_complete(sensor, mde, options);
    const DepthMap baseline = affine_alignment_baseline(sensor, mde, options.solver.k,
                                                        options.solver.seed);
    for (std::size_t i = 0; i < baseline.size(); ++i) {
        EXPECT_NEAR(result.prediction.values[i], baseline.values[i], 1e-6);
    }
}
