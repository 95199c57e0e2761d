#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "anchord/errors.hpp"

namespace anchord {

/// Rectangular grid of metric depth values (meters, row-major) with
/// per-pixel validity. Valid pixels must hold strictly positive depth.
struct DepthMap {
    int height = 0;
    int width = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;

    DepthMap() = default;

    DepthMap(int h, int w, double value = 0.0, bool is_valid = false)
        : height(h),
          width(w),
          values(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), value),
          valid(static_cast<std::size_t>(h) * static_cast<std::size_t>(w),
                is_valid ? std::uint8_t{1} : std::uint8_t{0}) {}

    std::size_t size() const { return values.size(); }

    int idx(int r, int c) const { return r * width + c; }

    double& at(int r, int c) { return values[static_cast<std::size_t>(idx(r, c))]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(idx(r, c))]; }

    bool is_valid(int r, int c) const { return valid[static_cast<std::size_t>(idx(r, c))] != 0; }

    void set(int r, int c, double v, bool is_valid = true) {
        const auto i = static_cast<std::size_t>(idx(r, c));
        values[i] = v;
        valid[i] = is_valid ? 1 : 0;
    }

    std::size_t valid_count() const {
        std::size_t count = 0;
        for (const auto flag : valid) count += flag;
        return count;
    }

    bool same_shape(const DepthMap& other) const {
        return height == other.height && width == other.width;
    }

    /// Throws InputError if shapes disagree or a valid pixel holds a
    /// non-positive value.
    void check_invariants(const std::string& name = "depth map") const {
        const auto expected = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
        if (values.size() != expected || valid.size() != expected) {
            throw InputError("input-invalid", name + ": storage does not match dimensions");
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (valid[i] && !(values[i] > 0.0)) {
                throw InputError("input-invalid",
                                 name + ": valid pixel with non-positive depth at index " +
                                     std::to_string(i));
            }
        }
    }
};

/// Scalar per-pixel field without validity (uncertainty maps, affine
/// parameter fields).
struct ScalarField {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(int h, int w, double value = 0.0)
        : height(h),
          width(w),
          values(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), value) {}

    int idx(int r, int c) const { return r * width + c; }
    double& at(int r, int c) { return values[static_cast<std::size_t>(idx(r, c))]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(idx(r, c))]; }
};

/// Boolean per-pixel mask (object regions and similar).
struct BoolMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> values;

    BoolMask() = default;
    BoolMask(int h, int w, bool value = false)
        : height(h),
          width(w),
          values(static_cast<std::size_t>(h) * static_cast<std::size_t>(w),
                 value ? std::uint8_t{1} : std::uint8_t{0}) {}

    int idx(int r, int c) const { return r * width + c; }
    bool at(int r, int c) const { return values[static_cast<std::size_t>(idx(r, c))] != 0; }
    void set(int r, int c, bool v) { values[static_cast<std::size_t>(idx(r, c))] = v ? 1 : 0; }

    std::size_t count() const {
        std::size_t total = 0;
        for (const auto flag : values) total += flag;
        return total;
    }
};

/// Largest multiple of m that is <= x. Used to shrink image dimensions to
/// an exact patch multiple before optimization.
inline int floor_to_multiple(int x, int m) {
    if (m < 1) throw InputError("input-invalid", "patch size must be positive");
    if (x < m) throw InputError("input-invalid", "image smaller than one patch");
    return (x / m) * m;
}

namespace detail {

/// Source index for nearest-neighbor resizing with pixel-center
/// alignment: floor((dst + 0.5) * src_size / dst_size), clamped.
inline int nearest_source_index(int dst, int src_size, int dst_size) {
    const double coord = (static_cast<double>(dst) + 0.5) * static_cast<double>(src_size) /
                         static_cast<double>(dst_size);
    auto src = static_cast<int>(coord);  // coord >= 0, truncation == floor
    if (src >= src_size) src = src_size - 1;
    return src;
}

}  // namespace detail

/// Nearest-neighbor resize of values and validity. Never interpolates:
/// every output value is a copy of some input value.
inline DepthMap resize_nearest(const DepthMap& map, int out_h, int out_w) {
    if (out_h < 1 || out_w < 1) {
        throw InputError("input-invalid", "resize target must be at least 1x1");
    }
    if (map.height < 1 || map.width < 1) {
        throw InputError("input-invalid", "cannot resize an empty map");
    }
    DepthMap out(out_h, out_w);
    std::vector<int> src_col(static_cast<std::size_t>(out_w));
    for (int c = 0; c < out_w; ++c) {
        src_col[static_cast<std::size_t>(c)] = detail::nearest_source_index(c, map.width, out_w);
    }
    for (int r = 0; r < out_h; ++r) {
        const int sr = detail::nearest_source_index(r, map.height, out_h);
        const auto src_row = static_cast<std::size_t>(sr) * static_cast<std::size_t>(map.width);
        const auto dst_row = static_cast<std::size_t>(r) * static_cast<std::size_t>(out_w);
        for (int c = 0; c < out_w; ++c) {
            const auto src_idx = src_row + static_cast<std::size_t>(src_col[static_cast<std::size_t>(c)]);
            out.values[dst_row + static_cast<std::size_t>(c)] = map.values[src_idx];
            out.valid[dst_row + static_cast<std::size_t>(c)] = map.valid[src_idx];
        }
    }
    return out;
}

/// Same index rule applied to a boolean mask.
inline BoolMask resize_nearest(const BoolMask& mask, int out_h, int out_w) {
    if (out_h < 1 || out_w < 1) {
        throw InputError("input-invalid", "resize target must be at least 1x1");
    }
    BoolMask out(out_h, out_w);
    for (int r = 0; r < out_h; ++r) {
        const int sr = detail::nearest_source_index(r, mask.height, out_h);
        for (int c = 0; c < out_w; ++c) {
            const int sc = detail::nearest_source_index(c, mask.width, out_w);
            out.values[static_cast<std::size_t>(out.idx(r, c))] =
                mask.values[static_cast<std::size_t>(mask.idx(sr, sc))];
        }
    }
    return out;
}

}  // namespace anchord
