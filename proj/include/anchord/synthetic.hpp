#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "anchord/depth_map.hpp"
#include "anchord/errors.hpp"
#include "anchord/rng.hpp"

namespace anchord {

/// Parameters of the synthetic desk-scale scene generator. The defaults
/// produce 240x320 scenes in the 0.4-1.7 m range with a tilted background
/// plane, a handful of raised objects, a piecewise-affine distorted prior
/// (each object region gets its own affine perturbation), and sensor
/// corruption concentrated inside the object mask.
struct SceneParams {
    int height = 240;
    int width = 320;
    double depth_min = 0.4;   // meters, scene bound
    double depth_max = 1.7;

    // Background plane.
    double plane_depth_min = 1.0;   // plane depth at image center
    double plane_depth_max = 1.2;
    double plane_tilt = 0.25;       // max +- depth change across each axis

    // Raised objects (rectangles and domes), closer to the camera than
    // the plane.
    int min_objects = 3;
    int max_objects = 8;
    double object_extent_min = 0.06;  // half size as fraction of min(H, W)
    double object_extent_max = 0.14;
    double object_relief_min = 0.08;  // meters toward the camera
    double object_relief_max = 0.22;

    // Affine distortion of the prior: background (alpha0, beta0), each
    // object region alpha0 * (1 +- jitter), beta0 +- jitter.
    double alpha0_min = 0.60;
    double alpha0_max = 0.80;
    double beta0_min = -0.12;
    double beta0_max = 0.12;
    double object_alpha_jitter = 0.25;
    double object_beta_jitter = 0.08;

    // Smooth low-amplitude bias field and per-pixel noise on the prior.
    double bias_field_amplitude = 0.01;
    double sigma_mde = 0.001;
    double mde_floor = 0.02;

    // Sensor noise and object-localized corruption.
    double sigma_sen = 0.004;
    double hole_fraction = 0.5;      // of object pixels invalidated
    double corrupt_fraction = 0.3;   // of object pixels biased too deep
    double corrupt_bias_min = 0.15;  // meters
    double corrupt_bias_max = 0.45;

    /// Degenerate configuration: prior equals ground truth, sensor equals
    /// ground truth, nothing invalid. Useful as a sanity oracle.
    static SceneParams identity() {
        SceneParams p;
        p.alpha0_min = p.alpha0_max = 1.0;
        p.beta0_min = p.beta0_max = 0.0;
        p.object_alpha_jitter = 0.0;
        p.object_beta_jitter = 0.0;
        p.bias_field_amplitude = 0.0;
        p.sigma_mde = 0.0;
        p.sigma_sen = 0.0;
        p.hole_fraction = 0.0;
        p.corrupt_fraction = 0.0;
        return p;
    }
};

/// A generated scene: dense ground truth, corrupted sensor map, distorted
/// prior, and the object mask the corruption was localized to.
struct SyntheticScene {
    DepthMap gt;
    DepthMap sensor;
    DepthMap mde;
    BoolMask object_mask;
    std::uint64_t seed = 0;
    SceneParams params;
};

namespace detail {

struct SceneObject {
    bool is_dome = false;
    double center_r = 0.0;
    double center_c = 0.0;
    double half_r = 0.0;
    double half_c = 0.0;
    double relief = 0.0;
    double alpha = 1.0;
    double beta = 0.0;
};

}  // namespace detail

/// Deterministically generates a scene from (seed, params): identical
/// inputs give byte-identical scenes. Draw order is fixed (plane, object
/// shapes, distortion, bias field, prior noise, sensor noise, corruption
/// assignment), so adding pixels or objects never perturbs unrelated
/// draws within one configuration.
inline SyntheticScene generate_scene(std::uint64_t seed, const SceneParams& params = {}) {
    if (params.height < 1 || params.width < 1) {
        throw InputError("input-invalid", "scene dimensions must be positive");
    }
    const int h = params.height;
    const int w = params.width;
    Rng rng(seed);

    SyntheticScene scene;
    scene.seed = seed;
    scene.params = params;
    scene.gt = DepthMap(h, w, 0.0, true);
    scene.object_mask = BoolMask(h, w, false);

    // Background plane.
    const double plane_depth = rng.uniform(params.plane_depth_min, params.plane_depth_max);
    const double tilt_r = rng.uniform(-params.plane_tilt, params.plane_tilt);
    const double tilt_c = rng.uniform(-params.plane_tilt, params.plane_tilt);

    // Object shapes and per-object distortion placeholders.
    const int object_count =
        params.min_objects +
        static_cast<int>(rng.below(static_cast<std::uint64_t>(params.max_objects - params.min_objects + 1)));
    const double extent_base = std::min(h, w);
    std::vector<detail::SceneObject> objects(static_cast<std::size_t>(object_count));
    for (auto& obj : objects) {
        obj.is_dome = rng.below(2) == 1;
        obj.center_r = rng.uniform(0.15, 0.85) * (h - 1);
        obj.center_c = rng.uniform(0.15, 0.85) * (w - 1);
        obj.half_r = rng.uniform(params.object_extent_min, params.object_extent_max) * extent_base;
        obj.half_c = rng.uniform(params.object_extent_min, params.object_extent_max) * extent_base;
        obj.relief = rng.uniform(params.object_relief_min, params.object_relief_max);
    }

    // Distortion parameters: background first, then per object.
    const double alpha0 = rng.uniform(params.alpha0_min, params.alpha0_max);
    const double beta0 = rng.uniform(params.beta0_min, params.beta0_max);
    for (auto& obj : objects) {
        obj.alpha = alpha0 * (1.0 + rng.uniform(-params.object_alpha_jitter, params.object_alpha_jitter));
        obj.beta = beta0 + rng.uniform(-params.object_beta_jitter, params.object_beta_jitter);
    }

    // Bias field frequencies/phases.
    const double freq_r = rng.uniform(0.5, 1.5);
    const double freq_c = rng.uniform(0.5, 1.5);
    const double phase_r = rng.uniform(0.0, 1.0);
    const double phase_c = rng.uniform(0.0, 1.0);

    // Compose ground truth and the ownership map. Where objects overlap,
    // the closest surface wins and claims the pixel.
    std::vector<int> owner(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), -1);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const auto p = static_cast<std::size_t>(r) * w + c;
            const double row_frac = h > 1 ? static_cast<double>(r) / (h - 1) - 0.5 : 0.0;
            const double col_frac = w > 1 ? static_cast<double>(c) / (w - 1) - 0.5 : 0.0;
            const double plane_at = plane_depth + tilt_r * row_frac + tilt_c * col_frac;
            double depth = plane_at;
            for (std::size_t j = 0; j < objects.size(); ++j) {
                const auto& obj = objects[j];
                const double dr = (r - obj.center_r) / obj.half_r;
                const double dc = (c - obj.center_c) / obj.half_c;
                double candidate;
                if (obj.is_dome) {
                    const double rr = dr * dr + dc * dc;
                    if (rr > 1.0) continue;
                    candidate = plane_at - obj.relief * std::sqrt(1.0 - rr);
                } else {
                    if (std::abs(dr) > 1.0 || std::abs(dc) > 1.0) continue;
                    candidate = plane_at - obj.relief;
                }
                if (candidate < depth) {
                    depth = candidate;
                    owner[p] = static_cast<int>(j);
                }
            }
            depth = std::clamp(depth, params.depth_min, params.depth_max);
            scene.gt.values[p] = depth;
            scene.object_mask.values[p] = owner[p] >= 0 ? 1 : 0;
        }
    }

    // Distorted prior: per-region affine transform of the ground truth
    // plus a smooth bias field plus noise (noise drawn row-major).
    scene.mde = DepthMap(h, w, 0.0, true);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const auto p = static_cast<std::size_t>(r) * w + c;
            double alpha = alpha0;
            double beta = beta0;
            if (owner[p] >= 0) {
                alpha = objects[static_cast<std::size_t>(owner[p])].alpha;
                beta = objects[static_cast<std::size_t>(owner[p])].beta;
            }
            double value = alpha * scene.gt.values[p] + beta;
            if (params.bias_field_amplitude != 0.0) {
                value += params.bias_field_amplitude *
                         std::sin(2.0 * std::numbers::pi * (freq_r * r / h + phase_r)) *
                         std::sin(2.0 * std::numbers::pi * (freq_c * c / w + phase_c));
            }
            if (params.sigma_mde != 0.0) value += params.sigma_mde * rng.normal();
            scene.mde.values[p] = std::max(value, params.mde_floor);
        }
    }

    // Sensor: ground truth plus noise, then object-localized holes and
    // corruption.
    scene.sensor = DepthMap(h, w, 0.0, true);
    for (std::size_t p = 0; p < scene.sensor.size(); ++p) {
        double value = scene.gt.values[p];
        if (params.sigma_sen != 0.0) value += params.sigma_sen * rng.normal();
        scene.sensor.values[p] = std::max(value, 1e-3);
    }

    std::vector<std::size_t> object_pixels;
    for (std::size_t p = 0; p < scene.object_mask.values.size(); ++p) {
        if (scene.object_mask.values[p]) object_pixels.push_back(p);
    }
    if (!object_pixels.empty() && (params.hole_fraction > 0.0 || params.corrupt_fraction > 0.0)) {
        const auto total = static_cast<int>(object_pixels.size());
        int hole_count = static_cast<int>(std::lround(params.hole_fraction * total));
        hole_count = std::clamp(hole_count, 0, total);
        int corrupt_count = static_cast<int>(std::lround(params.corrupt_fraction * total));
        corrupt_count = std::clamp(corrupt_count, 0, total - hole_count);

        const auto order = rng.sample_without_replacement(total, hole_count + corrupt_count);
        for (int j = 0; j < hole_count; ++j) {
            scene.sensor.valid[object_pixels[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])]] = 0;
        }
        for (int j = hole_count; j < hole_count + corrupt_count; ++j) {
            const auto p = object_pixels[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
            scene.sensor.values[p] += rng.uniform(params.corrupt_bias_min, params.corrupt_bias_max);
        }
    }

    return scene;
}

}  // namespace anchord
