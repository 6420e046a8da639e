#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "skyex/dataset.hpp"
#include "skyex/matrix.hpp"
#include "skyex/skyline.hpp"

namespace skyex {

/// Column-wise z-scores (population std). Zero-variance columns become 0.
Matrix standardize(const Matrix& m);

/// Pairwise Euclidean distances between rows.
Matrix distance_matrix(const Matrix& z);

struct EmbeddingConfig {
    double perplexity = 30.0;
    std::size_t iterations = 1000;
    double learning_rate = 200.0;
    double exaggeration = 12.0;
    std::size_t exaggeration_iterations = 250;
    std::uint64_t seed = 42;
    bool record_kl = false;  // fill Embedding2D::kl_trace with the KL at the start of each iteration

    /// min(30, floor((n-1)/3)), never below 1; other fields at their defaults.
    static EmbeddingConfig defaults_for(std::size_t n, std::uint64_t seed = 42);
};

struct Embedding2D {
    std::vector<std::array<double, 2>> coords;  // one per input row
    double kl_divergence = 0.0;
    std::vector<double> kl_trace;
};

/// Exact t-SNE on a precomputed distance matrix. Throws contract_violation for
/// fewer than three points and config_error for an invalid configuration.
Embedding2D tsne_embed(const Matrix& distances, const EmbeddingConfig& cfg);

/// Full projection pipeline for the skyline: z-score canonical skyline rows,
/// take distances, embed.
Embedding2D embed_skyline(const Dataset& data, const SkylineResult& result, const EmbeddingConfig& cfg);

enum class FocusSign { lower = -1, equal = 0, higher = 1 };

struct Glyph {
    std::size_t row;
    std::vector<double> sectors;  // per dimension, min–max over all points, in [0, 1]
    double inner_score;           // φ / max φ
    std::optional<std::vector<FocusSign>> focus;
};

std::vector<Glyph> glyph_payload(const Dataset& data, const SkylineResult& result,
                                 std::optional<std::size_t> focus = std::nullopt);

}  // namespace skyex
