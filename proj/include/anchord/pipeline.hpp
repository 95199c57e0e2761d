#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>

#include "anchord/baselines.hpp"
#include "anchord/depth_map.hpp"
#include "anchord/errors.hpp"
#include "anchord/factor_graph.hpp"
#include "anchord/patch_grid.hpp"
#include "anchord/smoothing.hpp"
#include "anchord/solver.hpp"

namespace anchord {

enum class Method {
    Anchord,   // full pipeline: solve, smooth parameters, apply to prior
    NoPatch,   // single global patch, prediction is the optimized depth
    NoSmooth,  // patch-wise solve, prediction is the optimized depth
    Affine,    // global affine alignment baseline
    Inpaint,   // harmonic hole-filling baseline
};

inline std::string method_name(Method method) {
    switch (method) {
        case Method::Anchord: return "anchord";
        case Method::NoPatch: return "no-patch";
        case Method::NoSmooth: return "no-smooth";
        case Method::Affine: return "affine";
        case Method::Inpaint: return "inpaint";
    }
    return "unknown";
}

inline Method parse_method(const std::string& name) {
    if (name == "anchord") return Method::Anchord;
    if (name == "no-patch") return Method::NoPatch;
    if (name == "no-smooth") return Method::NoSmooth;
    if (name == "affine") return Method::Affine;
    if (name == "inpaint") return Method::Inpaint;
    throw InputError("input-invalid", "unknown method '" + name + "'");
}

struct PipelineOptions {
    SolverConfig solver;
    Method method = Method::Anchord;
    double sigma = 0.0;  // Gaussian smoothing stddev; 0 means "= patch size"
    bool want_uncertainty = false;
    UncertaintyNorm uncertainty_norm;
};

struct PipelineResult {
    DepthMap prediction;                  // full input resolution, dense
    int resized_height = 0;               // H' (0 for baseline methods)
    int resized_width = 0;
    SolveState state;                      // optimized variables (solver methods)
    SolveStats stats;
    AffineFit init_fit;
    std::optional<ScalarField> uncertainty;  // full resolution, [0, 1]
};

/// Runs one method end to end on full-resolution sensor and prior maps.
/// Solver methods resize both inputs to the largest patch multiple,
/// optimize there, and resize the prediction back.
inline PipelineResult run_complete(const DepthMap& sensor, const DepthMap& mde,
                                   const PipelineOptions& options) {
    sensor.check_invariants("sensor depth");
    mde.check_invariants("prior depth");
    if (!sensor.same_shape(mde)) {
        throw InputError("input-invalid", "sensor and prior dimensions differ");
    }
    if (mde.valid_count() != mde.size()) {
        throw InputError("input-invalid", "prior depth map must be dense (no invalid pixels)");
    }

    PipelineResult result;
    if (options.method == Method::Affine) {
        result.prediction = affine_alignment_baseline(sensor, mde, options.solver.k,
                                                      options.solver.seed,
                                                      options.solver.depth_floor);
        return result;
    }
    if (options.method == Method::Inpaint) {
        result.prediction = inpaint_baseline(sensor);
        return result;
    }

    const int m = options.solver.patch_size;
    const int resized_h = floor_to_multiple(sensor.height, m);
    const int resized_w = floor_to_multiple(sensor.width, m);
    DepthMap sensor_resized = resize_nearest(sensor, resized_h, resized_w);
    DepthMap mde_resized = resize_nearest(mde, resized_h, resized_w);
    // The log-slope factors need a strictly positive prior.
    for (auto& v : mde_resized.values) v = std::max(v, options.solver.depth_floor);

    const PatchGrid grid = options.method == Method::NoPatch
                               ? single_patch_grid(resized_h, resized_w)
                               : build_patch_grid(resized_h, resized_w, m);
    SolveState state = initialize(sensor_resized, mde_resized, grid, options.solver, &result.init_fit);
    const FactorSet factors = build_factors(grid, sensor_resized);
    auto [solved, stats] = irls_solve(std::move(state), factors, sensor_resized, mde_resized, grid,
                                      options.solver);
    stats.degenerate_init = result.init_fit.degenerate;

    DepthMap prediction_resized;
    if (options.method == Method::Anchord) {
        const double sigma = options.sigma > 0.0 ? options.sigma : static_cast<double>(m);
        const AffineField field = smooth_affine_params(grid, solved.slope, solved.bias, sigma);
        prediction_resized = apply_affine_field(mde_resized, field, options.solver.depth_floor);
    } else {
        // Ablations use the optimized depth directly.
        prediction_resized = DepthMap(resized_h, resized_w, 0.0, true);
        prediction_resized.values = solved.depth;
    }

    result.prediction = assemble_final(prediction_resized, sensor.height, sensor.width);
    result.resized_height = resized_h;
    result.resized_width = resized_w;

    if (options.want_uncertainty) {
        const ScalarField unc_resized =
            residual_uncertainty(solved, sensor_resized, mde_resized, grid,
                                 options.solver.weights, options.solver.huber,
                                 options.uncertainty_norm);
        // Nearest-neighbor upsample to the input resolution.
        ScalarField unc(sensor.height, sensor.width, 0.0);
        for (int r = 0; r < sensor.height; ++r) {
            const int sr = detail::nearest_source_index(r, resized_h, sensor.height);
            for (int c = 0; c < sensor.width; ++c) {
                const int sc = detail::nearest_source_index(c, resized_w, sensor.width);
                unc.at(r, c) = unc_resized.at(sr, sc);
            }
        }
        result.uncertainty = std::move(unc);
    }

    result.state = std::move(solved);
    result.stats = std::move(stats);
    return result;
}

}  // namespace anchord
