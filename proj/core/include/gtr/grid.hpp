#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "gtr/errors.hpp"

namespace gtr {

struct GridShape {
    int h = 0;  // rows
    int w = 0;  // columns

    constexpr int tokens() const { return h * w; }
    constexpr bool valid() const { return h >= 1 && w >= 1; }
    friend constexpr bool operator==(const GridShape&, const GridShape&) = default;
};

void require_valid(GridShape shape);

struct TokenPos {
    int i = 0;  // row
    int j = 0;  // column

    // Lexicographic (i, j) comparison orders positions in raster order.
    friend constexpr auto operator<=>(const TokenPos&, const TokenPos&) = default;
};

constexpr bool in_bounds(TokenPos p, GridShape s) {
    return p.i >= 0 && p.i < s.h && p.j >= 0 && p.j < s.w;
}

constexpr int raster_index(TokenPos p, GridShape s) { return p.i * s.w + p.j; }

constexpr TokenPos pos_at(int raster, GridShape s) { return {raster / s.w, raster % s.w}; }

constexpr int manhattan(TokenPos a, TokenPos b) {
    const int di = a.i - b.i;
    const int dj = a.j - b.j;
    return (di < 0 ? -di : di) + (dj < 0 ? -dj : dj);
}

// K disjoint subsets S_1..S_K covering the grid. S_K is always the odd-parity
// checkerboard half; earlier subsets are the (i+j) mod 2^k residue classes
// peeled off by hierarchical bisection, emitted in reverse peel order.
struct StagePartition {
    GridShape shape;
    std::vector<std::vector<TokenPos>> stages;  // raster-sorted within each stage

    int stage_count() const { return static_cast<int>(stages.size()); }
};

enum class EmptyStagePolicy {
    reject,  // throw EmptyStage if any subset comes out empty
    drop,    // drop empty subsets and renumber
};

StagePartition partition_stages(GridShape shape, int stage_count,
                                EmptyStagePolicy policy = EmptyStagePolicy::reject);

// Baseline token orders.
std::vector<TokenPos> order_raster(GridShape shape);
std::vector<TokenPos> order_subsample(GridShape shape);  // parity cosets (0,0),(0,1),(1,0),(1,1)
std::vector<TokenPos> order_random(GridShape shape, std::uint64_t seed);

// Alternative reading of "4-quadrant" subsampling: the four spatial quadrant
// blocks scanned one after another. Not used by the default comparisons.
std::vector<TokenPos> order_quadrant_blocks(GridShape shape);

// Cells with (i+j) mod 2 == parity, raster-sorted.
std::vector<TokenPos> parity_cells(GridShape shape, int parity);

inline constexpr int kInfiniteDistance = std::numeric_limits<int>::max();

// Minimum pairwise Manhattan distance; kInfiniteDistance for a singleton.
int min_intra_set_distance(std::span<const TokenPos> set);

}  // namespace gtr
