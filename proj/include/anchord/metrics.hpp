#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "anchord/depth_map.hpp"
#include "anchord/errors.hpp"

namespace anchord {

/// MAE, RMSE and REL over one evaluation region, with the number of
/// pixels that actually entered the statistics.
struct RegionMetrics {
    double mae = 0.0;
    double rmse = 0.0;
    double rel = 0.0;
    std::int64_t pixel_count = 0;
};

/// What to do with prediction pixels that are invalid inside the
/// evaluation region: leave them out (pixel_count reflects it) or
/// penalize them as if the prediction were zero depth.
enum class InvalidPred { Skip, Penalize };

/// Error statistics of `pred` against `gt` over the pixels where `mask`
/// is set and gt is valid. REL divides by ground-truth depth.
inline RegionMetrics compute_metrics(const DepthMap& pred, const DepthMap& gt, const BoolMask& mask,
                                     InvalidPred mode = InvalidPred::Skip) {
    if (!pred.same_shape(gt) || gt.height != mask.height || gt.width != mask.width) {
        throw InputError("input-invalid", "metric inputs have mismatched dimensions");
    }
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    double rel_sum = 0.0;
    std::int64_t count = 0;
    for (std::size_t p = 0; p < gt.size(); ++p) {
        if (!mask.values[p] || !gt.valid[p]) continue;
        double prediction;
        if (pred.valid[p]) {
            prediction = pred.values[p];
        } else if (mode == InvalidPred::Penalize) {
            prediction = 0.0;
        } else {
            continue;
        }
        const double err = std::abs(prediction - gt.values[p]);
        abs_sum += err;
        sq_sum += err * err;
        rel_sum += err / gt.values[p];
        ++count;
    }
    if (count == 0) {
        throw InputError("empty-region", "empty region");
    }
    RegionMetrics out;
    out.mae = abs_sum / static_cast<double>(count);
    out.rmse = std::sqrt(sq_sum / static_cast<double>(count));
    out.rel = rel_sum / static_cast<double>(count);
    out.pixel_count = count;
    return out;
}

/// Metrics split into object / background / full regions. A region with
/// no evaluable pixels is reported absent.
struct RegionReport {
    std::optional<RegionMetrics> objects;
    std::optional<RegionMetrics> background;
    std::optional<RegionMetrics> full;
};

inline RegionReport evaluate_regions(const DepthMap& pred, const DepthMap& gt,
                                     const BoolMask& object_mask,
                                     InvalidPred mode = InvalidPred::Skip) {
    if (gt.height != object_mask.height || gt.width != object_mask.width) {
        throw InputError("input-invalid", "object mask dimensions do not match ground truth");
    }
    BoolMask background_mask(gt.height, gt.width);
    BoolMask full_mask(gt.height, gt.width, true);
    for (std::size_t p = 0; p < background_mask.values.size(); ++p) {
        background_mask.values[p] = object_mask.values[p] ? 0 : 1;
    }

    RegionReport report;
    const auto try_region = [&](const BoolMask& mask) -> std::optional<RegionMetrics> {
        try {
            return compute_metrics(pred, gt, mask, mode);
        } catch (const InputError& e) {
            if (e.error_class() == "empty-region") return std::nullopt;
            throw;
        }
    };
    report.objects = try_region(object_mask);
    report.background = try_region(background_mask);
    report.full = try_region(full_mask);
    return report;
}

}  // namespace anchord
