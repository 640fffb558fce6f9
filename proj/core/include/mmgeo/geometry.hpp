#pragma once

#include "mmgeo/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mmgeo {

// Subset of embedding coordinates, e.g. the shared ineffective block.
struct DimMask {
    std::vector<std::size_t> dims;

    static DimMask range(std::size_t begin, std::size_t end);
    static DimMask all(std::size_t d) { return range(0, d); }
    bool empty() const noexcept { return dims.empty(); }
};

inline constexpr std::size_t kDefaultGroupSize = 100;
inline constexpr std::size_t kDefaultPairSamples = 1000;

// Random partition of pair indices into groups of group_size. A remainder
// group is kept only when it is larger than half a group.
struct PairGroups {
    std::vector<std::vector<std::size_t>> groups;
    std::size_t group_size = kDefaultGroupSize;
    std::size_t dropped = 0;
};

PairGroups group_pairs(const PairedEmbeddings& pairs, std::size_t group_size, std::uint64_t seed);

// Counts of cosines skipped because one side had norm below 1e-12.
struct SkipTally {
    std::size_t gap_direction = 0;
    std::size_t gap_orthogonality = 0;
    std::size_t noise_direction = 0;
};

struct GapReport {
    MeanStd gap_length;        // ||d_i||
    MeanStd gap_direction;     // cos(d_i, d_j), group pairs i < j
    MeanStd gap_orthogonality; // cos(d_i, x_j - x_k), sampled within group
    MeanStd noise_mean;        // per-dimension mean of eps_j = d_j - d_i
    MeanStd noise_direction;   // cos(eps_j, eps_k), sampled within group
    std::size_t groups = 0;
    std::size_t pairs_per_group = 0;
    SkipTally skipped;
};

struct GroupStatsOptions {
    std::size_t pair_samples = kDefaultPairSamples; // (j, k) pairs per group
    std::uint64_t seed = 0;
};

GapReport group_statistics(const PairedEmbeddings& pairs, const PairGroups& groups,
                           const GroupStatsOptions& options = {});

// mean(X) - mean(Y).
Vector estimate_gap_vector(const PairedEmbeddings& pairs);

// l2 distance between the modality means restricted to the mask.
double masked_gap_distance(const PairedEmbeddings& pairs, const DimMask& mask);

// Population variance of every column.
Vector per_dim_variance(const Matrix& m);

} // namespace mmgeo
