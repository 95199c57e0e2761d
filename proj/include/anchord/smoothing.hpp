#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "anchord/depth_map.hpp"
#include "anchord/errors.hpp"
#include "anchord/patch_grid.hpp"

namespace anchord {

/// Per-pixel affine alignment parameters obtained by Gaussian-weighted
/// averaging of the optimized patch parameters. Every value is a convex
/// combination of the patch values.
struct AffineField {
    int height = 0;
    int width = 0;
    std::vector<double> slope;
    std::vector<double> bias;
};

/// Normalized Gaussian-distance weighting of patch parameters into dense
/// per-pixel fields. The kernel exp(-|p - c_i|^2 / (2 sigma^2)) separates
/// over rows and columns of the regular patch-center lattice, so the
/// field is accumulated in two passes (columns, then rows), each
/// truncated at 4 sigma; the per-pixel weight sum is carried alongside
/// and divides the result, which makes the output insensitive to the
/// truncation. Pixels beyond the truncation radius of every center (only
/// possible for tiny sigma) take the nearest patch's parameters, the
/// sigma -> 0 limit of the weighting.
inline AffineField smooth_affine_params(const PatchGrid& grid, const std::vector<double>& slopes,
                                        const std::vector<double>& biases, double sigma) {
    const int n = grid.n();
    if (n == 0) throw InputError("input-invalid", "patch grid has no patches");
    if (slopes.size() != static_cast<std::size_t>(n) || biases.size() != static_cast<std::size_t>(n)) {
        throw InputError("input-invalid", "patch parameter count does not match grid");
    }
    if (!(sigma > 0.0)) throw InputError("input-invalid", "sigma must be positive");

    const int h = grid.height;
    const int w = grid.width;
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    const double radius = 4.0 * sigma;

    // Pass 1: accumulate over patch columns for every (patch row, pixel
    // column). center_col of patch (a, b) depends only on b.
    const auto rows = static_cast<std::size_t>(grid.rows);
    const auto width_sz = static_cast<std::size_t>(w);
    std::vector<double> col_slope(rows * width_sz, 0.0);
    std::vector<double> col_bias(rows * width_sz, 0.0);
    std::vector<double> col_weight(rows * width_sz, 0.0);
    for (int c = 0; c < w; ++c) {
        for (int b = 0; b < grid.cols; ++b) {
            const double dc = c - grid.center_col[static_cast<std::size_t>(b)];
            if (std::abs(dc) > radius) continue;
            const double g = std::exp(-dc * dc * inv_two_sigma_sq);
            for (int a = 0; a < grid.rows; ++a) {
                const auto patch = static_cast<std::size_t>(a) * grid.cols + b;
                const auto slot = static_cast<std::size_t>(a) * width_sz + c;
                col_slope[slot] += g * slopes[patch];
                col_bias[slot] += g * biases[patch];
                col_weight[slot] += g;
            }
        }
    }

    // Pass 2: accumulate over patch rows per pixel. center_row of patch
    // (a, b) depends only on a.
    AffineField field;
    field.height = h;
    field.width = w;
    field.slope.assign(static_cast<std::size_t>(h) * width_sz, 0.0);
    field.bias.assign(static_cast<std::size_t>(h) * width_sz, 0.0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double num_slope = 0.0;
            double num_bias = 0.0;
            double den = 0.0;
            for (int a = 0; a < grid.rows; ++a) {
                const double dr = r - grid.center_row[static_cast<std::size_t>(a) * grid.cols];
                if (std::abs(dr) > radius) continue;
                const double g = std::exp(-dr * dr * inv_two_sigma_sq);
                const auto slot = static_cast<std::size_t>(a) * width_sz + c;
                num_slope += g * col_slope[slot];
                num_bias += g * col_bias[slot];
                den += g * col_weight[slot];
            }
            const auto p = static_cast<std::size_t>(r) * width_sz + c;
            if (den > 0.0) {
                field.slope[p] = num_slope / den;
                field.bias[p] = num_bias / den;
            } else {
                // Nearest patch center by squared distance, lowest index on ties.
                double best = std::numeric_limits<double>::infinity();
                int best_i = 0;
                for (int i = 0; i < n; ++i) {
                    const double drc = r - grid.center_row[static_cast<std::size_t>(i)];
                    const double dcc = c - grid.center_col[static_cast<std::size_t>(i)];
                    const double d2 = drc * drc + dcc * dcc;
                    if (d2 < best) {
                        best = d2;
                        best_i = i;
                    }
                }
                field.slope[p] = slopes[static_cast<std::size_t>(best_i)];
                field.bias[p] = biases[static_cast<std::size_t>(best_i)];
            }
        }
    }
    return field;
}

/// Applies the per-pixel affine parameters to the (resized) monocular
/// prior; output is clamped at the depth floor and fully valid.
inline DepthMap apply_affine_field(const DepthMap& mde, const AffineField& field,
                                   double depth_floor) {
    if (mde.height != field.height || mde.width != field.width) {
        throw InputError("input-invalid", "affine field dimensions do not match prior");
    }
    DepthMap out(mde.height, mde.width, 0.0, true);
    for (std::size_t p = 0; p < mde.size(); ++p) {
        out.values[p] = std::max(field.slope[p] * mde.values[p] + field.bias[p], depth_floor);
    }
    return out;
}

/// Final step: nearest-neighbor resize of the resized-domain prediction
/// back to the requested (original) resolution.
inline DepthMap assemble_final(const DepthMap& pred_resized, int out_h, int out_w) {
    return resize_nearest(pred_resized, out_h, out_w);
}

}  // namespace anchord
