#include <gtest/gtest.h>

#include <vector>

#include "anchord/patch_grid.hpp"

using anchord::build_patch_grid;
using anchord::InputError;
using anchord::PatchGrid;
using anchord::single_patch_grid;

TEST(PatchGrid, CountsForFlooredHdResolution) {
    const PatchGrid grid = build_patch_grid(704, 1216, 64);
    EXPECT_EQ(grid.rows, 11);
    EXPECT_EQ(grid.cols, 19);
    EXPECT_EQ(grid.n(), 209);
}

TEST(PatchGrid, SinglePatchCenter) {
    const PatchGrid grid = build_patch_grid(64, 64, 64);
    ASSERT_EQ(grid.n(), 1);
    EXPECT_DOUBLE_EQ(grid.center_row[0], 31.5);
    EXPECT_DOUBLE_EQ(grid.center_col[0], 31.5);
}

TEST(PatchGrid, PixelToPatchIndex) {
    const PatchGrid grid = build_patch_grid(128, 128, 64);
    ASSERT_EQ(grid.n(), 4);
    EXPECT_EQ(grid.patch_index(70, 10), 2);   // row 1, col 0
    EXPECT_EQ(grid.patch_index(0, 0), 0);
    EXPECT_EQ(grid.patch_index(63, 63), 0);
    EXPECT_EQ(grid.patch_index(64, 64), 3);
}

TEST(PatchGrid, RejectsNonMultipleDimensions) {
    EXPECT_THROW(build_patch_grid(100, 128, 64), InputError);
    EXPECT_THROW(build_patch_grid(128, 100, 64), InputError);
}

TEST(PatchGrid, PartitionCoversEveryPixelExactlyOnce) {
    const PatchGrid grid = build_patch_grid(24, 36, 6);
    std::vector<int> hits(static_cast<std::size_t>(grid.n()), 0);
    for (int r = 0; r < grid.height; ++r) {
        for (int c = 0; c < grid.width; ++c) {
            const int i = grid.patch_index(r, c);
            ASSERT_GE(i, 0);
            ASSERT_LT(i, grid.n());
            hits[static_cast<std::size_t>(i)] += 1;
        }
    }
    for (const int count : hits) EXPECT_EQ(count, 36);  // 6 x 6 pixels per patch
}

TEST(PatchGrid, CentersAreGeometricMidpoints) {
    const PatchGrid grid = build_patch_grid(12, 18, 6);
    // Patch (1, 2): rows 6..11, cols 12..17, midpoint (8.5, 14.5).
    const int i = 1 * grid.cols + 2;
    EXPECT_DOUBLE_EQ(grid.center_row[i], 8.5);
    EXPECT_DOUBLE_EQ(grid.center_col[i], 14.5);
}

TEST(PatchGrid, SinglePatchGridCoversRectangularDomain) {
    const PatchGrid grid = single_patch_grid(10, 20);
    EXPECT_EQ(grid.n(), 1);
    EXPECT_EQ(grid.patch_index(0, 0), 0);
    EXPECT_EQ(grid.patch_index(9, 19), 0);
    EXPECT_DOUBLE_EQ(grid.center_row[0], 4.5);
    EXPECT_DOUBLE_EQ(grid.center_col[0], 9.5);
}
