#pragma once

#include "mmgeo/contrastive.hpp"
#include "mmgeo/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmgeo {

enum class GradientForm { exact, compact };

struct TrainerConfig {
    double learning_rate = 0.1;
    std::size_t steps = 1000;
    bool renormalize_each_step = true;
    std::size_t record_every = 100;
    std::uint64_t seed = 0;
    // The exact form descends the true loss; the compact form is available
    // for studying descent driven only by differences of the other modality.
    GradientForm gradient_form = GradientForm::exact;
    // Coordinates for gap_masked and the masked gradient probes; empty means all.
    DimMask watch;

    void validate() const;
};

struct TrajectoryPoint {
    std::size_t step = 0;
    double loss = 0.0;
    double gap_full = 0.0;
    double gap_masked = 0.0;
    // Largest |entry| inside the watched coordinates for the gradient actually
    // applied at this step and for the compact form at the same state.
    double masked_grad_max = 0.0;
    double masked_compact_max = 0.0;
    Vector per_dim_variance_x;
    Vector per_dim_variance_y;
};

struct TrainingResult {
    std::vector<TrajectoryPoint> trajectory;
    PairedEmbeddings final_pairs;
};

class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(std::size_t step)
        : std::runtime_error("loss became non-finite at step " + std::to_string(step)), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

// Full-batch gradient descent on free embedding rows. Metrics are recorded at
// step 0, every record_every steps, and after the final update.
TrainingResult train_contrastive(const PairedEmbeddings& init, double tau, const TrainerConfig& cfg);

} // namespace mmgeo
