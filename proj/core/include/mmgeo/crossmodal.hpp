#pragma once

#include "mmgeo/c3.hpp"
#include "mmgeo/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mmgeo {

// Classification toy task. Class centroids live in a span_dim-dimensional
// subspace; y adds a fixed offset plus small isotropic jitter in the
// complement, and x = y + gap + N(0, sigma_align^2 I) with the gap
// orthogonal to the span.
struct ToyTaskSpec {
    std::size_t n = 5000;
    std::size_t d = 64;
    std::size_t span_dim = 16;
    std::size_t classes = 10;
    double gap_norm = 0.83;
    double sigma_align = 0.05;
    double class_spread = 0.15;
    double ineffective_std = 0.01;
    double base_offset_std = 0.1;
    double train_fraction = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

struct ToyTask {
    ToyTaskSpec spec;
    PairedEmbeddings pairs;
    std::vector<std::size_t> labels;
    Matrix span_basis;       // span_dim x d
    Matrix complement_basis; // (d - span_dim) x d
    Vector true_gap;
    std::vector<std::size_t> train; // rows whose y side is used for training
    std::vector<std::size_t> test;  // rows whose x side is used for evaluation
};

ToyTask make_toy_task(const ToyTaskSpec& spec);

// Linear map with bias; classification uses one-vs-rest targets and argmax.
struct RidgeDecoder {
    Matrix weights; // d x m
    Vector bias;    // m
    double lambda = 0.0;

    Matrix predict(const Matrix& inputs) const;
    std::vector<std::size_t> classify(const Matrix& inputs) const;
};

// Closed-form ridge on centred data, so the bias is not penalised.
RidgeDecoder train_decoder(const Matrix& inputs, const Matrix& targets, double lambda);
RidgeDecoder train_classifier(const Matrix& inputs, const std::vector<std::size_t>& labels,
                              std::size_t classes, double lambda);
double accuracy(const RidgeDecoder& decoder, const Matrix& inputs, const std::vector<std::size_t>& labels);

Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& rows);
std::vector<std::size_t> select(const std::vector<std::size_t>& values, const std::vector<std::size_t>& rows);

// C1: connect only. C21: collapse. C22: corrupt. C22SpanOnly: corrupt with the
// gap direction projected out. C3: collapse and corrupt.
enum class Variant { C1, C21, C22, C22SpanOnly, C3 };
const std::vector<Variant>& all_variants();
std::string variant_name(Variant v);
bool variant_collapses(Variant v);
bool variant_corrupts(Variant v);

// Means from the uni-modal sets: mean_y over training y rows, mean_x over test x rows.
ModalityMeans task_means(const ToyTask& task);

// Transform config a variant applies at training time.
C3Config variant_config(Variant v, const ToyTask& task, double train_sigma, std::uint64_t noise_seed);

// Accuracy on the test x rows passed through the variant's test transform.
double evaluate_crossmodal(const RidgeDecoder& decoder, const ToyTask& task, Variant v);

struct VariantOutcome {
    double cross = 0.0;     // trained on y, tested on x
    double in_modality = 0.0; // trained on x (same transforms), tested on x
};

VariantOutcome run_variant(const ToyTask& task, Variant v, double train_sigma, double lambda,
                           std::uint64_t noise_seed);

inline const std::vector<double> kDefaultSigmaGrid = {0.01, 0.05, 0.1, 0.2};

struct AblationRow {
    Variant variant = Variant::C1;
    double best_sigma = 0.0; // 0 for variants without corruption
    std::size_t seeds = 0;
    MeanStd accuracy;
    MeanStd in_modality;
    std::vector<double> per_seed;
    std::vector<double> sigma_means; // mean accuracy per grid entry
};

struct AblationOptions {
    std::vector<double> sigma_grid = kDefaultSigmaGrid;
    double lambda = 0.1;
    std::size_t seeds = 5;
};

// Every variant over seeds spec.seed, spec.seed + 1, ...; train sigma picked
// per variant as the grid entry with the best mean accuracy.
std::vector<AblationRow> ablation(const ToyTaskSpec& spec, const AblationOptions& options);

enum class ShiftDirection { orthogonal, in_span };

struct ShiftPoint {
    double shift = 0.0;
    double metric = 0.0;
};

// Evaluates the decoder on raw test x rows shifted by c * u for a fixed
// random unit u (orthogonal to the span unless in_span is requested).
std::vector<ShiftPoint> gap_shift_sweep(const RidgeDecoder& decoder, const ToyTask& task,
                                        const std::vector<double>& shifts, ShiftDirection direction,
                                        std::uint64_t seed);

} // namespace mmgeo
