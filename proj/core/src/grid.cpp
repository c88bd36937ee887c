#include "gtr/grid.hpp"

#include <algorithm>
#include <string>

#include "gtr/rng.hpp"

namespace gtr {

void require_valid(GridShape shape) {
    if (!shape.valid()) {
        throw InvalidArgument("grid shape must have h >= 1 and w >= 1, got " +
                              std::to_string(shape.h) + "x" + std::to_string(shape.w));
    }
}

StagePartition partition_stages(GridShape shape, int stage_count, EmptyStagePolicy policy) {
    require_valid(shape);
    if (stage_count < 2) {
        throw InvalidStageCount("need at least 2 stages, got " + std::to_string(stage_count));
    }

    // Peel residue classes of (i+j) off the grid: iteration k extracts the
    // cells with remainder 2^(k-1) mod 2^k and keeps remainder 0. The peeled
    // sets are emitted last-peeled-first, so the odd-parity half (peeled
    // first) always lands in the final stage.
    std::vector<std::vector<TokenPos>> peeled;
    std::vector<TokenPos> remaining;
    remaining.reserve(static_cast<std::size_t>(shape.tokens()));
    for (int i = 0; i < shape.h; ++i) {
        for (int j = 0; j < shape.w; ++j) remaining.push_back({i, j});
    }

    for (int k = 1; k <= stage_count - 1; ++k) {
        const int modulus = 1 << k;
        const int remainder = 1 << (k - 1);
        std::vector<TokenPos> extracted;
        std::vector<TokenPos> kept;
        for (const TokenPos& p : remaining) {
            ((p.i + p.j) % modulus == remainder ? extracted : kept).push_back(p);
        }
        peeled.push_back(std::move(extracted));
        remaining = std::move(kept);
    }
    peeled.push_back(std::move(remaining));

    StagePartition partition;
    partition.shape = shape;
    partition.stages.reserve(peeled.size());
    for (auto it = peeled.rbegin(); it != peeled.rend(); ++it) {
        if (it->empty()) {
            if (policy == EmptyStagePolicy::reject) {
                const int k = static_cast<int>(it - peeled.rbegin()) + 1;
                throw EmptyStage("stage " + std::to_string(k) + " of " +
                                 std::to_string(stage_count) + " is empty on a " +
                                 std::to_string(shape.h) + "x" + std::to_string(shape.w) +
                                 " grid");
            }
            continue;  // drop and renumber
        }
        partition.stages.push_back(std::move(*it));
    }
    return partition;
}

std::vector<TokenPos> order_raster(GridShape shape) {
    require_valid(shape);
    std::vector<TokenPos> order;
    order.reserve(static_cast<std::size_t>(shape.tokens()));
    for (int i = 0; i < shape.h; ++i) {
        for (int j = 0; j < shape.w; ++j) order.push_back({i, j});
    }
    return order;
}

std::vector<TokenPos> order_subsample(GridShape shape) {
    require_valid(shape);
    std::vector<TokenPos> order;
    order.reserve(static_cast<std::size_t>(shape.tokens()));
    constexpr int kCosets[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    for (const auto& coset : kCosets) {
        for (int i = coset[0]; i < shape.h; i += 2) {
            for (int j = coset[1]; j < shape.w; j += 2) order.push_back({i, j});
        }
    }
    return order;
}

std::vector<TokenPos> order_quadrant_blocks(GridShape shape) {
    require_valid(shape);
    const int mid_i = (shape.h + 1) / 2;
    const int mid_j = (shape.w + 1) / 2;
    std::vector<TokenPos> order;
    order.reserve(static_cast<std::size_t>(shape.tokens()));
    const int bounds[4][4] = {
        {0, mid_i, 0, mid_j},
        {0, mid_i, mid_j, shape.w},
        {mid_i, shape.h, 0, mid_j},
        {mid_i, shape.h, mid_j, shape.w},
    };
    for (const auto& b : bounds) {
        for (int i = b[0]; i < b[1]; ++i) {
            for (int j = b[2]; j < b[3]; ++j) order.push_back({i, j});
        }
    }
    return order;
}

std::vector<TokenPos> order_random(GridShape shape, std::uint64_t seed) {
    std::vector<TokenPos> order = order_raster(shape);
    std::mt19937_64 rng(mix64(seed));
    shuffle(order, rng);
    return order;
}

std::vector<TokenPos> parity_cells(GridShape shape, int parity) {
    require_valid(shape);
    std::vector<TokenPos> cells;
    for (int i = 0; i < shape.h; ++i) {
        for (int j = 0; j < shape.w; ++j) {
            if ((i + j) % 2 == parity) cells.push_back({i, j});
        }
    }
    return cells;
}

int min_intra_set_distance(std::span<const TokenPos> set) {
    if (set.empty()) throw EmptySet("min_intra_set_distance needs a nonempty set");
    int best = kInfiniteDistance;
    for (std::size_t a = 0; a < set.size(); ++a) {
        for (std::size_t b = a + 1; b < set.size(); ++b) {
            best = std::min(best, manhattan(set[a], set[b]));
        }
    }
    return best;
}

}  // namespace gtr
