#pragma once

#include <span>
#include <vector>

#include "gtr/grid.hpp"
#include "gtr/plan.hpp"

namespace gtr {

// Per-token conditioning feature, D >= 2 finite components.
using ConditioningVector = std::vector<double>;

// One-sided amplitude spectrum A(n), n = 0..floor(D/2).
struct AmplitudeSpectrum {
    std::vector<double> amplitudes;

    int bins() const { return static_cast<int>(amplitudes.size()); }
};

AmplitudeSpectrum dft_amplitude(std::span<const double> z);

// Frequency-weighted importance: sum over n >= 1 of A(n) * (1 + n / floor(D/2)).
// The DC bin is excluded, so the score is shift-invariant and zero for
// constant vectors.
double fts_score(std::span<const double> z);

// The ceil(beta * |scores|) highest-scoring positions, ties broken toward the
// smaller raster index. Returned raster-sorted.
std::vector<TokenPos> rank_tokens(const ScoreMap& scores, double beta);

}  // namespace gtr
