#pragma once

#include <vector>

#include "anchord/errors.hpp"

namespace anchord {

/// Partition of an H' x W' pixel domain into a regular grid of
/// non-overlapping rectangular patches. Regular grids built by
/// build_patch_grid use square m x m patches; single_patch_grid covers
/// the whole domain with one patch (the no-patch ablation).
///
/// Patch centers are geometric midpoints in continuous 0-based pixel
/// coordinates, so Gaussian weights around them are symmetric.
struct PatchGrid {
    int height = 0;   // H'
    int width = 0;    // W'
    int patch_h = 0;  // patch extent in rows (m for square grids)
    int patch_w = 0;  // patch extent in cols
    int rows = 0;     // H' / patch_h
    int cols = 0;     // W' / patch_w
    std::vector<double> center_row;  // per patch, row-major over (rows, cols)
    std::vector<double> center_col;

    int n() const { return rows * cols; }

    int patch_index(int r, int c) const { return (r / patch_h) * cols + (c / patch_w); }
};

namespace detail {

inline PatchGrid make_grid(int h, int w, int patch_h, int patch_w) {
    PatchGrid grid;
    grid.height = h;
    grid.width = w;
    grid.patch_h = patch_h;
    grid.patch_w = patch_w;
    grid.rows = h / patch_h;
    grid.cols = w / patch_w;
    grid.center_row.reserve(static_cast<std::size_t>(grid.n()));
    grid.center_col.reserve(static_cast<std::size_t>(grid.n()));
    for (int pr = 0; pr < grid.rows; ++pr) {
        for (int pc = 0; pc < grid.cols; ++pc) {
            grid.center_row.push_back((pr + 0.5) * patch_h - 0.5);
            grid.center_col.push_back((pc + 0.5) * patch_w - 0.5);
        }
    }
    return grid;
}

}  // namespace detail

/// Regular grid of square m x m patches; h and w must be exact multiples
/// of m.
inline PatchGrid build_patch_grid(int h, int w, int m) {
    if (m < 1 || h < 1 || w < 1) {
        throw InputError("input-invalid", "patch grid dimensions must be positive");
    }
    if (h % m != 0 || w % m != 0) {
        throw InputError("input-invalid", "patch grid dimensions must be multiples of the patch size");
    }
    return detail::make_grid(h, w, m, m);
}

/// One patch covering the whole domain.
inline PatchGrid single_patch_grid(int h, int w) {
    if (h < 1 || w < 1) {
        throw InputError("input-invalid", "patch grid dimensions must be positive");
    }
    return detail::make_grid(h, w, h, w);
}

}  // namespace anchord
