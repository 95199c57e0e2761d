#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "anchord/depth_map.hpp"
#include "anchord/errors.hpp"
#include "anchord/patch_grid.hpp"
#include "anchord/robust.hpp"

namespace anchord {

/// Positive scalar weight per factor type. The weight multiplies the
/// robust cost of each factor, so the per-factor IRLS weight is
/// lambda * huber_irls_weight(residual).
struct FactorWeights {
    double lambda_mde = 2.5;
    double lambda_sen = 0.5;
    double lambda_slp = 1.0;
};

/// The optimization unknowns: dense depth over the resized domain plus a
/// (slope, bias) pair per patch.
struct SolveState {
    int height = 0;
    int width = 0;
    std::vector<double> depth;  // meters, row-major, H' x W'
    std::vector<double> slope;  // per patch
    std::vector<double> bias;   // per patch, meters

    std::size_t pixel_count() const { return depth.size(); }
};

/// 4-connected neighbor pair; p and q are flat row-major pixel indices.
struct PixelPair {
    std::int32_t p = 0;
    std::int32_t q = 0;
};

/// Materialized factor connectivity over the resized domain. There is one
/// MDE factor and one sensor factor per pixel (the sensor factor carries
/// the validity flag), and one log-slope factor per 4-connected neighbor
/// pair: horizontal pairs in row-major order, then vertical pairs.
struct FactorSet {
    int height = 0;
    int width = 0;
    std::vector<std::int32_t> patch_of;        // per pixel
    std::vector<std::uint8_t> sensor_valid;    // per pixel
    std::vector<PixelPair> slope_pairs;

    std::size_t mde_count() const { return patch_of.size(); }
    std::size_t sensor_count() const { return sensor_valid.size(); }
    std::size_t slope_count() const { return slope_pairs.size(); }
};

/// Residual of the patch-wise alignment factor: optimized depth minus the
/// local affine model applied to the monocular prior.
inline double mde_residual(double d_p, double s_i, double b_i, double m_p) {
    return d_p - (s_i * m_p + b_i);
}

/// Residual of the metric anchoring factor. Missing sensor measurements
/// contribute exactly zero.
inline double sensor_residual(double d_p, std::optional<double> s_p) {
    if (!s_p.has_value()) return 0.0;
    return d_p - *s_p;
}

/// Residual of the log-slope consistency factor between neighboring
/// pixels: difference of log-depth slopes between the optimized depth and
/// the monocular prior. Invariant to rescaling either depth field by a
/// common positive factor.
inline double slope_residual(double d_p, double d_q, double m_p, double m_q) {
    if (!(d_p > 0.0) || !(d_q > 0.0) || !(m_p > 0.0) || !(m_q > 0.0)) {
        throw NumericError("numerical-failure", "log of non-positive depth");
    }
    return (std::log(d_p) - std::log(d_q)) - (std::log(m_p) - std::log(m_q));
}

inline FactorSet build_factors(const PatchGrid& grid, const DepthMap& sensor) {
    if (sensor.height != grid.height || sensor.width != grid.width) {
        throw InputError("input-invalid", "sensor dimensions do not match patch grid");
    }
    const int h = grid.height;
    const int w = grid.width;
    FactorSet factors;
    factors.height = h;
    factors.width = w;
    factors.patch_of.resize(static_cast<std::size_t>(h) * static_cast<std::size_t>(w));
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            factors.patch_of[static_cast<std::size_t>(r) * w + c] =
                static_cast<std::int32_t>(grid.patch_index(r, c));
        }
    }
    factors.sensor_valid = sensor.valid;
    factors.slope_pairs.reserve(static_cast<std::size_t>(h) * (w - 1) +
                                static_cast<std::size_t>(h - 1) * w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c + 1 < w; ++c) {
            const auto p = static_cast<std::int32_t>(r * w + c);
            factors.slope_pairs.push_back({p, p + 1});
        }
    }
    for (int r = 0; r + 1 < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const auto p = static_cast<std::int32_t>(r * w + c);
            factors.slope_pairs.push_back({p, p + static_cast<std::int32_t>(w)});
        }
    }
    return factors;
}

namespace detail {

/// Neumaier compensated accumulator; keeps the total independent of
/// summation order to well below the 1e-9 relative tolerance the cost
/// contract promises.
struct CompensatedSum {
    double sum = 0.0;
    double compensation = 0.0;

    void add(double value) {
        const double t = sum + value;
        if (std::abs(sum) >= std::abs(value)) {
            compensation += (sum - t) + value;
        } else {
            compensation += (value - t) + sum;
        }
        sum = t;
    }

    double total() const { return sum + compensation; }
};

inline void check_cost_inputs(const SolveState& state, const DepthMap& sensor,
                              const DepthMap& mde, const PatchGrid& grid) {
    if (state.height != grid.height || state.width != grid.width ||
        !sensor.same_shape(mde) || sensor.height != grid.height ||
        sensor.width != grid.width) {
        throw InputError("input-invalid", "cost inputs have mismatched dimensions");
    }
    if (state.slope.size() != static_cast<std::size_t>(grid.n()) ||
        state.bias.size() != state.slope.size()) {
        throw InputError("input-invalid", "state has wrong number of patch parameters");
    }
}

}  // namespace detail

/// Total robust cost: weighted Huber penalties of all MDE, sensor, and
/// log-slope factors over the resized domain.
inline double total_cost(const SolveState& state, const DepthMap& sensor, const DepthMap& mde,
                         const PatchGrid& grid, const FactorWeights& weights,
                         const HuberParams& huber) {
    detail::check_cost_inputs(state, sensor, mde, grid);
    const int h = grid.height;
    const int w = grid.width;
    detail::CompensatedSum acc;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const auto p = static_cast<std::size_t>(r) * w + c;
            const int i = grid.patch_index(r, c);
            const double rm = mde_residual(state.depth[p], state.slope[static_cast<std::size_t>(i)],
                                           state.bias[static_cast<std::size_t>(i)], mde.values[p]);
            acc.add(weights.lambda_mde * huber_cost(rm, huber.delta1));
            if (sensor.valid[p]) {
                acc.add(weights.lambda_sen *
                        huber_cost(state.depth[p] - sensor.values[p], huber.delta1));
            }
        }
    }
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c + 1 < w; ++c) {
            const auto p = static_cast<std::size_t>(r) * w + c;
            const double rs =
                slope_residual(state.depth[p], state.depth[p + 1], mde.values[p], mde.values[p + 1]);
            acc.add(weights.lambda_slp * huber_cost(rs, huber.delta2));
        }
    }
    for (int r = 0; r + 1 < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const auto p = static_cast<std::size_t>(r) * w + c;
            const auto q = p + static_cast<std::size_t>(w);
            const double rs =
                slope_residual(state.depth[p], state.depth[q], mde.values[p], mde.values[q]);
            acc.add(weights.lambda_slp * huber_cost(rs, huber.delta2));
        }
    }
    const double cost = acc.total();
    if (!std::isfinite(cost)) {
        throw NumericError("numerical-failure", "divergence");
    }
    return cost;
}

/// How residual_uncertainty normalizes the per-pixel weighted residual:
/// by the maximum over this image, or by an externally supplied constant
/// (e.g. a dataset-wide maximum).
struct UncertaintyNorm {
    enum class Mode { PerImageMax, External };
    Mode mode = Mode::PerImageMax;
    double external_value = 1.0;
};

/// Per-pixel weighted sum of the unary sensor residual cost and the MDE
/// alignment residual cost, normalized into [0, 1]. Missing sensor pixels
/// contribute only the MDE term.
inline ScalarField residual_uncertainty(const SolveState& state, const DepthMap& sensor,
                                        const DepthMap& mde, const PatchGrid& grid,
                                        const FactorWeights& weights, const HuberParams& huber,
                                        const UncertaintyNorm& norm = {}) {
    detail::check_cost_inputs(state, sensor, mde, grid);
    const int h = grid.height;
    const int w = grid.width;
    ScalarField field(h, w, 0.0);
    double max_value = 0.0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const auto p = static_cast<std::size_t>(r) * w + c;
            const int i = grid.patch_index(r, c);
            const double rm = mde_residual(state.depth[p], state.slope[static_cast<std::size_t>(i)],
                                           state.bias[static_cast<std::size_t>(i)], mde.values[p]);
            double u = weights.lambda_mde * huber_cost(rm, huber.delta1);
            if (sensor.valid[p]) {
                u += weights.lambda_sen *
                     huber_cost(state.depth[p] - sensor.values[p], huber.delta1);
            }
            field.values[p] = u;
            max_value = std::max(max_value, u);
        }
    }
    double denom = 1.0;
    if (norm.mode == UncertaintyNorm::Mode::PerImageMax) {
        denom = max_value > 0.0 ? max_value : 1.0;
    } else {
        if (!(norm.external_value > 0.0)) {
            throw InputError("input-invalid", "external uncertainty normalization must be positive");
        }
        denom = norm.external_value;
    }
    for (auto& u : field.values) {
        u = std::min(u / denom, 1.0);
    }
    return field;
}

}  // namespace anchord
