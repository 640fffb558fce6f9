#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace mmgeo {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Independent seed for a named sub-stream (row index, modality, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Deterministic generator: mt19937_64 seeded through splitmix64. Gaussians come
// from std::normal_distribution (Marsaglia polar method in libstdc++), so streams
// are reproducible within one standard library, not across them.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(derive_seed(seed, stream)) {}

    double gaussian() { return normal_(engine_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace mmgeo
