// Acceptance runner: one PASS/FAIL line per criterion. Each criterion runs the
// corresponding experiment, requires the named checks and a runtime limit.
#include "mmgeo/embedding_io.hpp"
#include "mmgeo/experiments.hpp"
#include "mmgeo/rng.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

using namespace mmgeo;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        passed = passed && ok;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

struct Criterion {
    std::string title;
    double limit_seconds; // 0: no runtime limit
    std::function<Outcome()> run;
};

// Runs a command and requires every listed check to be present and passing.
Outcome report_checks(const std::string& command, const std::string& config, const std::vector<std::string>& names) {
    const Report r = run_experiment(command, config, {});
    Outcome o;
    for (const std::string& name : names) {
        const Check* found = nullptr;
        for (const Check& c : r.checks)
            if (c.name == name) found = &c;
        if (!found) {
            o.require(false, name + " missing");
            continue;
        }
        o.require(found->passed, found->detail.empty() ? name : name + " (" + found->detail + ")");
    }
    return o;
}

Outcome determinism_and_io() {
    Outcome o;
    const char* cfg = R"({"instances": 200})";
    RunOptions opt;
    opt.seed = 11;
    const Report a = run_experiment("stable-region", cfg, opt), b = run_experiment("stable-region", cfg, opt);
    o.require(a.json == b.json && a.csv_files == b.csv_files, "stable-region reports byte-identical");
    const Report replay = run_experiment("stable-region", a.json, {});
    o.require(replay.json == a.json, "report replay byte-identical");

    Matrix m(1000, 512);
    Rng rng(2024);
    for (std::size_t i = 0; i < 1000; ++i)
        for (std::size_t j = 0; j < 512; ++j) m(i, j) = static_cast<double>(static_cast<float>(rng.gaussian()));
    const std::string bytes = encode(m, EmbeddingFormat::mmeb);
    o.require(bytes.size() == kMmebHeaderBytes + 1000 * 512 * 4, "MMEB size " + std::to_string(bytes.size()));
    o.require(decode(bytes, EmbeddingFormat::mmeb).values == m, "MMEB 1000x512 round trip bit-exact");
    o.require(encode(decode(bytes, EmbeddingFormat::mmeb).values, EmbeddingFormat::mmeb) == bytes,
              "MMEB re-encode byte-identical");
    return o;
}

std::vector<Criterion> criteria() {
    return {
        {"exact gradients match central finite differences (100 batches)", 10.0,
         [] {
             return report_checks("verify-gradients", "", {"finite_difference_max_rel_error_below_1e-5"});
         }},
        {"compact-form identity and symmetric coincidence", 0.0,
         [] {
             return report_checks("verify-gradients", "",
                                  {"compact_identity_within_1e-10", "compact_equals_exact_on_symmetric_batches"});
         }},
        {"initialisation gaps and raw effective dimensions", 5.0,
         [] {
             return report_checks("simulate-init", "",
                                  {"gap_full_mean_within_0.1_of_1.21", "gap_masked_mean_within_0.1_of_0.99",
                                   "raw_effective_dims_match_blocks"});
         }},
        {"gap preservation under unconstrained descent (n=256, 20k steps)", 600.0,
         [] {
             return report_checks("train-sim", R"({"renormalize_each_step": false})",
                                  {"masked_gradient_exactly_zero", "loss_decreasing_after_step_100",
                                   "final_loss_below_0.01", "final_masked_gap_in_[0.7,1.1]"});
         }},
        {"per-anchor loss bound and threshold monotonicity (1000 instances)", 0.0,
         [] {
             return report_checks("stable-region", "",
                                  {"loss_never_exceeds_bound", "threshold_non_decreasing_in_tau"});
         }},
        {"group statistics recover the synthetic gap geometry", 30.0,
         [] {
             return report_checks("gap-stats", "",
                                  {"gap_length_mean_within_0.02", "gap_direction_mean_at_least_0.98",
                                   "gap_orthogonality_mean_within_0.02", "noise_mean_within_1e-3",
                                   "noise_direction_mean_within_0.03"});
         }},
        {"deep ReLU collapse and cone effect", 60.0,
         [] {
             return report_checks("mlp-collapse", "",
                                  {"effective_dim_non_increasing_across_probes",
                                   "cone_mean_strictly_increasing_across_probes", "cone_mean_positive_at_every_probe"});
         }},
        {"cross-modal ablation ordering", 60.0,
         [] {
             return report_checks("c3-bench", R"({"sigma_align_sweep": []})",
                                  {"C3_at_least_C2_1", "C3_at_least_C2_2", "C2_2_at_least_C1",
                                   "C3_minus_C1_at_least_0.1", "span_only_within_0.05_of_C2_1"});
         }},
        {"gap-shift degradation", 0.0,
         [] {
             return report_checks("shift-sweep", R"({"shift_norms": [0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0]})",
                                  {"metric_non_increasing_up_to_2", "metric_at_2_at_most_half_of_baseline"});
         }},
        {"determinism and MMEB round trip", 0.0, determinism_and_io},
    };
}

bool run_one(std::size_t index, const Criterion& c) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.1f s", seconds);
    if (c.limit_seconds > 0.0) {
        char limit[64];
        std::snprintf(limit, sizeof limit, "runtime %.1f s < %.0f s", seconds, c.limit_seconds);
        o.require(seconds < c.limit_seconds, limit);
    }
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << index << ": " << c.title << " [" << o.detail
              << "] (" << timing << ")" << std::endl;
    return o.passed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmgeo acceptance criteria"};
    std::size_t only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-10); all when omitted")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> all = criteria();
    bool ok = true;
    for (std::size_t i = 1; i <= all.size(); ++i)
        if (only == 0 || only == i) ok = run_one(i, all[i - 1]) && ok;
    return ok ? 0 : 1;
}
