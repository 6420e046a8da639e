#include "skyex/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "skyex/error.hpp"

namespace skyex {

Matrix standardize(const Matrix& m) {
    require(m.rows() >= 2, "standardization needs at least two rows");
    const auto n = static_cast<double>(m.rows());
    Matrix z(m.rows(), m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) sum += m(r, c);
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) ss += (m(r, c) - mean) * (m(r, c) - mean);
        const double sd = std::sqrt(ss / n);
        for (std::size_t r = 0; r < m.rows(); ++r) z(r, c) = sd > 0.0 ? (m(r, c) - mean) / sd : 0.0;
    }
    return z;
}

Matrix distance_matrix(const Matrix& z) {
    const std::size_t n = z.rows();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double ss = 0.0;
            for (std::size_t c = 0; c < z.cols(); ++c) {
                const double diff = z(i, c) - z(j, c);
                ss += diff * diff;
            }
            d(i, j) = d(j, i) = std::sqrt(ss);
        }
    }
    return d;
}

EmbeddingConfig EmbeddingConfig::defaults_for(std::size_t n, std::uint64_t seed) {
    EmbeddingConfig cfg;
    const double scaled = n >= 1 ? std::floor(static_cast<double>(n - 1) / 3.0) : 0.0;
    cfg.perplexity = std::max(1.0, std::min(30.0, scaled));
    cfg.seed = seed;
    return cfg;
}

namespace {

constexpr double entropy_tolerance = 1e-5;
constexpr int max_bisection_steps = 50;
constexpr double min_probability = 1e-12;
constexpr double min_gain = 0.01;
constexpr std::size_t momentum_switch = 250;

void validate(const Matrix& distances, const EmbeddingConfig& cfg) {
    const std::size_t n = distances.rows();
    require(distances.cols() == n, "distance matrix must be square");
    if (n < 3) contract_violation("t-SNE needs at least three points, got " + std::to_string(n));
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::config_error, msg); };
    if (!(cfg.perplexity > 0.0) || !std::isfinite(cfg.perplexity)) fail("perplexity must be positive");
    if (cfg.perplexity >= static_cast<double>(n))
        fail("perplexity must be smaller than the number of points (" + std::to_string(n) + ")");
    if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) fail("learning rate must be positive");
    if (!(cfg.exaggeration > 0.0) || !std::isfinite(cfg.exaggeration)) fail("exaggeration must be positive");
    if (cfg.iterations < cfg.exaggeration_iterations)
        fail("iterations must be at least the early-exaggeration duration");
    for (double v : distances.data())
        if (!std::isfinite(v) || v < 0.0) fail("distances must be finite and non-negative");
}

// Conditional affinities p_{j|i} with per-row Gaussian bandwidth found by
// bisection on the precision so that the row entropy matches log(perplexity).
Matrix conditional_affinities(const Matrix& distances, double perplexity) {
    const std::size_t n = distances.rows();
    const double target = std::log(perplexity);
    Matrix p(n, n);
    std::vector<double> sq(n), row(n);

    for (std::size_t i = 0; i < n; ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            sq[j] = distances(i, j) * distances(i, j);
            if (j != i) nearest = std::min(nearest, sq[j]);
        }
        // Entropy is invariant to shifting all distances, which keeps exp() away from underflow.
        for (std::size_t j = 0; j < n; ++j) sq[j] -= nearest;

        double beta = 1.0;
        double beta_lo = -std::numeric_limits<double>::infinity();
        double beta_hi = std::numeric_limits<double>::infinity();
        for (int step = 0; step < max_bisection_steps; ++step) {
            double sum = 0.0, weighted = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                row[j] = j == i ? 0.0 : std::exp(-sq[j] * beta);
                sum += row[j];
                weighted += sq[j] * row[j];
            }
            const double entropy = std::log(sum) + beta * weighted / sum;
            for (std::size_t j = 0; j < n; ++j) p(i, j) = row[j] / sum;

            const double diff = entropy - target;
            if (std::abs(diff) <= entropy_tolerance) break;
            if (diff > 0.0) {
                beta_lo = beta;
                beta = std::isinf(beta_hi) ? beta * 2.0 : (beta + beta_hi) / 2.0;
            } else {
                beta_hi = beta;
                beta = std::isinf(beta_lo) ? beta / 2.0 : (beta + beta_lo) / 2.0;
            }
        }
    }
    return p;
}

// Symmetrized joint affinities, normalized to sum 1 and floored.
Matrix joint_affinities(const Matrix& distances, double perplexity) {
    const Matrix cond = conditional_affinities(distances, perplexity);
    const std::size_t n = cond.rows();
    Matrix p(n, n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) total += (p(i, j) = cond(i, j) + cond(j, i));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p(i, j) = i == j ? 0.0 : std::max(p(i, j) / total, min_probability);
    return p;
}

// Student-t kernel values (1 + |y_i - y_j|^2)^-1 and their off-diagonal sum.
double student_kernel(const std::vector<std::array<double, 2>>& y, Matrix& kernel) {
    const std::size_t n = y.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        kernel(i, i) = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = y[i][0] - y[j][0];
            const double dy = y[i][1] - y[j][1];
            const double k = 1.0 / (1.0 + dx * dx + dy * dy);
            kernel(i, j) = kernel(j, i) = k;
            sum += 2.0 * k;
        }
    }
    return sum;
}

double kl_divergence(const Matrix& p, const Matrix& kernel, double kernel_sum) {
    double kl = 0.0;
    const std::size_t n = p.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double q = std::max(kernel(i, j) / kernel_sum, min_probability);
            kl += p(i, j) * std::log(p(i, j) / q);
        }
    }
    return kl;
}

void check_finite(const std::vector<std::array<double, 2>>& y, std::size_t iteration) {
    for (const auto& pt : y)
        if (!std::isfinite(pt[0]) || !std::isfinite(pt[1]))
            throw Error(ErrorCode::contract_violation,
                        "t-SNE produced non-finite coordinates at iteration " + std::to_string(iteration));
}

}  // namespace

Embedding2D tsne_embed(const Matrix& distances, const EmbeddingConfig& cfg) {
    validate(distances, cfg);
    const std::size_t n = distances.rows();
    const Matrix p = joint_affinities(distances, cfg.perplexity);

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> init(0.0, 1e-4);
    std::vector<std::array<double, 2>> y(n);
    for (auto& pt : y) {
        pt[0] = init(rng);
        pt[1] = init(rng);
    }

    std::vector<std::array<double, 2>> velocity(n, {0.0, 0.0});
    std::vector<std::array<double, 2>> gains(n, {1.0, 1.0});
    std::vector<std::array<double, 2>> grad(n);
    Matrix kernel(n, n);

    Embedding2D out;
    if (cfg.record_kl) out.kl_trace.reserve(cfg.iterations);

    for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
        const double exaggeration = iter < cfg.exaggeration_iterations ? cfg.exaggeration : 1.0;
        const double momentum = iter < momentum_switch ? 0.5 : 0.8;
        const double kernel_sum = student_kernel(y, kernel);

        // Σ_j (p_ij − q_ij) (1 + |y_i − y_j|²)^-1 (y_i − y_j), the gradient up to its constant factor 4,
        // which the learning rate absorbs.
        for (std::size_t i = 0; i < n; ++i) {
            double gx = 0.0, gy = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double q = std::max(kernel(i, j) / kernel_sum, min_probability);
                const double w = (exaggeration * p(i, j) - q) * kernel(i, j);
                gx += w * (y[i][0] - y[j][0]);
                gy += w * (y[i][1] - y[j][1]);
            }
            grad[i] = {gx, gy};
        }

        if (cfg.record_kl) out.kl_trace.push_back(kl_divergence(p, kernel, kernel_sum));

        for (std::size_t i = 0; i < n; ++i) {
            for (int c = 0; c < 2; ++c) {
                auto& g = gains[i][c];
                g = (grad[i][c] > 0.0) != (velocity[i][c] > 0.0) ? g + 0.2 : g * 0.8;
                g = std::max(g, min_gain);
                velocity[i][c] = momentum * velocity[i][c] - cfg.learning_rate * g * grad[i][c];
                y[i][c] += velocity[i][c];
            }
        }

        double cx = 0.0, cy = 0.0;
        for (const auto& pt : y) {
            cx += pt[0];
            cy += pt[1];
        }
        cx /= static_cast<double>(n);
        cy /= static_cast<double>(n);
        for (auto& pt : y) {
            pt[0] -= cx;
            pt[1] -= cy;
        }

        if ((iter + 1) % 100 == 0) check_finite(y, iter + 1);
    }
    check_finite(y, cfg.iterations);

    const double kernel_sum = student_kernel(y, kernel);
    out.kl_divergence = kl_divergence(p, kernel, kernel_sum);
    out.coords = std::move(y);
    return out;
}

Embedding2D embed_skyline(const Dataset& data, const SkylineResult& result, const EmbeddingConfig& cfg) {
    Matrix rows(result.skyline.size(), data.dimension_count());
    for (std::size_t k = 0; k < result.skyline.size(); ++k)
        for (std::size_t d = 0; d < data.dimension_count(); ++d) rows(k, d) = data.canonical(result.skyline[k], d);
    require(rows.rows() >= 3, "projection needs at least three skyline points");
    return tsne_embed(distance_matrix(standardize(rows)), cfg);
}

std::vector<Glyph> glyph_payload(const Dataset& data, const SkylineResult& result, std::optional<std::size_t> focus) {
    if (focus) result.position(*focus);

    const std::size_t m = data.dimension_count();
    std::vector<double> lo(m, std::numeric_limits<double>::infinity());
    std::vector<double> hi(m, -std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (std::size_t d = 0; d < m; ++d) {
            lo[d] = std::min(lo[d], data.canonical(r, d));
            hi[d] = std::max(hi[d], data.canonical(r, d));
        }
    }
    std::size_t max_score = 0;
    for (auto s : result.dominating_score) max_score = std::max(max_score, s);

    std::vector<Glyph> glyphs;
    glyphs.reserve(result.skyline.size());
    for (std::size_t k = 0; k < result.skyline.size(); ++k) {
        const std::size_t r = result.skyline[k];
        Glyph g{r, std::vector<double>(m), 0.0, std::nullopt};
        for (std::size_t d = 0; d < m; ++d) {
            // A constant column ties every point for best.
            g.sectors[d] = hi[d] > lo[d] ? (data.canonical(r, d) - lo[d]) / (hi[d] - lo[d]) : 1.0;
        }
        g.inner_score = max_score > 0 ? static_cast<double>(result.dominating_score[k]) / static_cast<double>(max_score)
                                      : 0.0;
        if (focus) {
            std::vector<FocusSign> signs(m);
            for (std::size_t d = 0; d < m; ++d) {
                const double a = data.canonical(r, d), b = data.canonical(*focus, d);
                signs[d] = a > b ? FocusSign::higher : (a < b ? FocusSign::lower : FocusSign::equal);
            }
            g.focus = std::move(signs);
        }
        glyphs.push_back(std::move(g));
    }
    return glyphs;
}

}  // namespace skyex
