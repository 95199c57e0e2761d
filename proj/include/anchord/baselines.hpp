#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "anchord/depth_map.hpp"
#include "anchord/errors.hpp"
#include "anchord/solver.hpp"

namespace anchord {

/// Global affine alignment baseline: fit (slope, bias) on k sampled valid
/// sensor pixels and apply it to the full-resolution prior. Output is
/// dense (all pixels valid), clamped at the depth floor.
inline DepthMap affine_alignment_baseline(const DepthMap& sensor, const DepthMap& mde, int k,
                                          std::uint64_t seed, double depth_floor = 1e-4) {
    const AffineFit fit = global_affine_fit(sensor, mde, k, seed);
    DepthMap out(mde.height, mde.width, 0.0, true);
    for (std::size_t p = 0; p < mde.size(); ++p) {
        out.values[p] = std::max(fit.slope * mde.values[p] + fit.bias, depth_floor);
    }
    return out;
}

/// Depth-only hole filling baseline: valid pixels are kept, invalid
/// pixels are filled with the discrete harmonic (Laplace) interpolant
/// using the valid pixels as Dirichlet data. Solved by Gauss-Seidel
/// sweeps in row-major order until the largest per-sweep change falls
/// below 1e-6. Every update is an average of current neighbor values, so
/// filled values stay inside [min valid, max valid].
inline DepthMap inpaint_baseline(const DepthMap& sensor) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    std::size_t valid_count = 0;
    for (std::size_t p = 0; p < sensor.size(); ++p) {
        if (!sensor.valid[p]) continue;
        lo = std::min(lo, sensor.values[p]);
        hi = std::max(hi, sensor.values[p]);
        sum += sensor.values[p];
        ++valid_count;
    }
    if (valid_count == 0) {
        throw InputError("insufficient-sensor-support", "nothing to inpaint from");
    }

    const int h = sensor.height;
    const int w = sensor.width;
    DepthMap out(h, w, 0.0, true);
    std::vector<std::size_t> holes;
    for (std::size_t p = 0; p < sensor.size(); ++p) {
        out.values[p] = sensor.valid[p] ? sensor.values[p] : sum / static_cast<double>(valid_count);
    }
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const auto p = static_cast<std::size_t>(r) * w + c;
            if (!sensor.valid[p]) holes.push_back(p);
        }
    }
    if (holes.empty()) return out;

    constexpr double kTol = 1e-6;
    constexpr int kMaxSweeps = 200000;
    const auto uw = static_cast<std::size_t>(w);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double max_change = 0.0;
        for (const auto p : holes) {
            const int r = static_cast<int>(p / uw);
            const int c = static_cast<int>(p % uw);
            double acc = 0.0;
            int count = 0;
            if (r > 0) { acc += out.values[p - uw]; ++count; }
            if (r + 1 < h) { acc += out.values[p + uw]; ++count; }
            if (c > 0) { acc += out.values[p - 1]; ++count; }
            if (c + 1 < w) { acc += out.values[p + 1]; ++count; }
            const double next = acc / count;  // count >= 1 for any grid with >= 2 cells
            max_change = std::max(max_change, std::abs(next - out.values[p]));
            out.values[p] = next;
        }
        if (max_change < kTol) break;
    }
    return out;
}

}  // namespace anchord
