#pragma once

#include "mmgeo/spectral.hpp"
#include "mmgeo/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mmgeo {

enum class NoiseSupport { full, span };

struct GapWorldOptions {
    // Re-project x rows onto the sphere after adding gap and noise. Off by
    // default so that x - y - gap is exactly the sampled noise.
    bool renormalize = false;
    NoiseSupport noise = NoiseSupport::full;
};

// x = y + gap + eps with y unit-norm inside a k-dimensional span and the gap
// orthogonal to that span.
struct GapWorld {
    PairedEmbeddings pairs;
    Vector true_gap;
    double true_sigma = 0.0;
    Matrix span_basis; // k x d, orthonormal rows
    GapWorldOptions options;
};

GapWorld make_gap_world(std::size_t n, std::size_t d, std::size_t span_dim, double gap_norm,
                        double sigma, std::uint64_t seed, const GapWorldOptions& options = {});

// Random orthonormal rows (count x d) obtained by Gram-Schmidt on Gaussians.
Matrix random_orthonormal_rows(std::size_t count, std::size_t d, std::uint64_t seed);

struct InitSimWorld {
    PairedEmbeddings pairs; // unit-norm rows
    Matrix raw_x;           // before normalisation
    Matrix raw_y;
    std::size_t dex = 25;
    std::size_t dey = 230;
    Vector constants_x;     // per-dimension constants; 0 inside x's random block
    Vector constants_y;

    // [0, dex), [dex, dex + dey) and [dex + dey, d).
    std::size_t shared_begin() const noexcept { return dex + dey; }
};

// x: dims [0, dex) random, every other dim a per-dimension constant.
// y: dims [dex, dex + dey) random, every other dim a per-dimension constant.
// All draws are N(0, 1); rows are then unit-normalised.
InitSimWorld make_init_sim_world(std::size_t n = 1000, std::size_t d = 512, std::size_t dex = 25,
                                 std::size_t dey = 230, std::uint64_t seed = 0);

// fan_in x fan_out matrix, entries uniform on [-b, b], b = sqrt(6 / (fan_in + fan_out)).
Matrix xavier_uniform(std::size_t fan_in, std::size_t fan_out, std::uint64_t seed);
double xavier_bound(std::size_t fan_in, std::size_t fan_out);

struct MlpSimConfig {
    std::size_t depth = 20;
    std::size_t width = 512;
    std::size_t inputs = 1000;
    std::size_t probe_stride = 5;
    double gamma = kDefaultGamma;
    std::uint64_t seed = 0;

    void validate() const;
};

struct MlpProbe {
    std::size_t layer = 0;
    SpectralSummary spectrum;
    MeanStd cone;      // mean pairwise cosine of the activations
    bool dead = false; // every activation is zero; effective_dim is the 0 sentinel
};

// Standard-normal inputs through depth blocks of (linear, ReLU) with Xavier
// weights and zero biases; probes at layer 0 and every probe_stride layers.
std::vector<MlpProbe> mlp_collapse_sim(const MlpSimConfig& cfg);

} // namespace mmgeo
