#include "gtr/fts.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gtr/errors.hpp"

namespace gtr {

AmplitudeSpectrum dft_amplitude(std::span<const double> z) {
    const int d = static_cast<int>(z.size());
    if (d < 2) throw InvalidArgument("conditioning vector needs >= 2 components, got " + std::to_string(d));

    AmplitudeSpectrum spectrum;
    spectrum.amplitudes.resize(static_cast<std::size_t>(d / 2) + 1);
    for (int n = 0; n <= d / 2; ++n) {
        double re = 0.0;
        double im = 0.0;
        for (int t = 0; t < d; ++t) {
            // Reduce n*t mod d before converting to an angle; the products stay
            // exact in int64 and the reduced angle keeps sin/cos well-conditioned
            // for long vectors.
            const long long turn = (static_cast<long long>(n) * t) % d;
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(turn) / d;
            re += z[static_cast<std::size_t>(t)] * std::cos(angle);
            im += z[static_cast<std::size_t>(t)] * std::sin(angle);
        }
        spectrum.amplitudes[static_cast<std::size_t>(n)] = std::hypot(re, im);
    }
    return spectrum;
}

double fts_score(std::span<const double> z) {
    const AmplitudeSpectrum spectrum = dft_amplitude(z);
    const int half = spectrum.bins() - 1;  // floor(D/2)
    double score = 0.0;
    for (int n = 1; n <= half; ++n) {
        score += spectrum.amplitudes[static_cast<std::size_t>(n)] *
                 (1.0 + static_cast<double>(n) / half);
    }
    return score;
}

std::vector<TokenPos> rank_tokens(const ScoreMap& scores, double beta) {
    if (scores.empty()) throw EmptySet("cannot rank an empty score map");
    const int count = top_fraction_count(beta, static_cast<int>(scores.size()));

    // ScoreMap iterates in raster order, so a stable sort on score alone
    // leaves ties ordered by raster index.
    std::vector<TokenPos> order;
    order.reserve(scores.size());
    for (const auto& [pos, score] : scores) order.push_back(pos);
    std::stable_sort(order.begin(), order.end(),
                     [&](TokenPos a, TokenPos b) { return scores.at(a) > scores.at(b); });

    order.resize(static_cast<std::size_t>(count));
    std::sort(order.begin(), order.end());
    return order;
}

}  // namespace gtr
