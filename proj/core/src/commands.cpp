#include "experiment_internal.hpp"

#include "mmgeo/contrastive.hpp"
#include "mmgeo/crossmodal.hpp"
#include "mmgeo/embedding_io.hpp"
#include "mmgeo/geometry.hpp"
#include "mmgeo/rng.hpp"
#include "mmgeo/spectral.hpp"
#include "mmgeo/trainer.hpp"
#include "mmgeo/verification.hpp"
#include "mmgeo/worlds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace mmgeo {

namespace detail {

namespace {

std::string fmt(double v) { return format_double(v); }

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

// ---------------------------------------------------------------- simulate-init

Report simulate_init(const Config& cfg, const RunOptions&) {
    const std::size_t n = cfg.count("n"), d = cfg.count("d"), dex = cfg.count("dex"), dey = cfg.count("dey");
    const std::size_t seeds = cfg.count("seeds");
    const double gamma = cfg.number("gamma");
    const double rank_gamma = cfg.number("rank_gamma");
    require(seeds >= 1, "seeds must be at least 1");
    require(dex + dey < d, "a shared ineffective block is required");

    ReportBuilder rb(cfg);
    CsvTable per_seed({"seed", "gap_full", "gap_masked", "effective_dim_x", "effective_dim_y", "effective_dim_x_at_gamma",
                       "effective_dim_y_at_gamma"});
    Json seeds_json = Json::array();
    double full_sum = 0.0, masked_sum = 0.0;
    bool dims_exact = true;
    InitSimWorld first;
    for (std::size_t s = 0; s < seeds; ++s) {
        const std::uint64_t seed = cfg.seed() + s;
        InitSimWorld w = make_init_sim_world(n, d, dex, dey, seed);
        const double full = masked_gap_distance(w.pairs, DimMask::all(d));
        const double masked = masked_gap_distance(w.pairs, DimMask::range(w.shared_begin(), d));
        // Rank-level count: only dimensions carrying any variance contribute.
        const SpectralSummary sx = spectral_summary(covariance(w.raw_x), rank_gamma);
        const SpectralSummary sy = spectral_summary(covariance(w.raw_y), rank_gamma);
        const std::size_t ex = sx.effective_dim, ey = sy.effective_dim;
        const std::size_t gx = effective_dimension(sx.singular_values, gamma);
        const std::size_t gy = effective_dimension(sy.singular_values, gamma);
        dims_exact = dims_exact && ex == dex && ey == dey;
        full_sum += full;
        masked_sum += masked;
        per_seed.row({cell(seed), cell(full), cell(masked), cell(ex), cell(ey), cell(gx), cell(gy)});
        seeds_json.push_back(Json{{"seed", seed},
                                  {"gap_full", full},
                                  {"gap_masked", masked},
                                  {"effective_dim_x", ex},
                                  {"effective_dim_y", ey},
                                  {"effective_dim_x_at_gamma", gx},
                                  {"effective_dim_y_at_gamma", gy}});
        if (s == 0) first = std::move(w);
    }
    const double full_mean = full_sum / static_cast<double>(seeds);
    const double masked_mean = masked_sum / static_cast<double>(seeds);

    auto& res = rb.results();
    res["shared_ineffective_dims"] = Json::array({first.shared_begin(), d});
    res["gap_full_mean"] = full_mean;
    res["gap_masked_mean"] = masked_mean;
    res["per_seed"] = seeds_json;

    rb.check("gap_full_mean_within_0.1_of_1.21", within(full_mean, 1.21, 0.1), fmt(full_mean));
    rb.check("gap_masked_mean_within_0.1_of_0.99", within(masked_mean, 0.99, 0.1), fmt(masked_mean));
    rb.check("raw_effective_dims_match_blocks", dims_exact,
             "expected " + std::to_string(dex) + "/" + std::to_string(dey));

    CsvTable variance({"dim", "var_x_raw", "var_y_raw", "var_x", "var_y"});
    const Vector vxr = per_dim_variance(first.raw_x), vyr = per_dim_variance(first.raw_y);
    const Vector vx = per_dim_variance(first.pairs.x), vy = per_dim_variance(first.pairs.y);
    for (std::size_t c = 0; c < d; ++c) variance.row({cell(c), cell(vxr[c]), cell(vyr[c]), cell(vx[c]), cell(vy[c])});
    rb.csv("", per_seed);
    rb.csv("variance", variance);
    return rb.finish();
}

// ---------------------------------------------------------------- train-sim

Report train_sim(const Config& cfg, const RunOptions&) {
    const bool long_running = cfg.flag("long_running");
    const std::size_t n = long_running ? cfg.count("long_n") : cfg.count("n");
    const std::size_t steps = long_running ? cfg.count("long_steps") : cfg.count("steps");
    const std::size_t d = cfg.count("d"), dex = cfg.count("dex"), dey = cfg.count("dey");
    const std::string form = cfg.text("gradient_form");
    require(form == "exact" || form == "compact", "gradient_form must be exact or compact");
    require(dex + dey < d, "a shared ineffective block is required");

    const InitSimWorld world = make_init_sim_world(n, d, dex, dey, cfg.seed());
    TrainerConfig tc;
    tc.learning_rate = cfg.number("lr");
    tc.steps = steps;
    tc.record_every = cfg.count("record_every");
    tc.renormalize_each_step = cfg.flag("renormalize_each_step");
    tc.seed = cfg.seed();
    tc.gradient_form = form == "exact" ? GradientForm::exact : GradientForm::compact;
    tc.watch = DimMask::range(world.shared_begin(), d);
    const TrainingResult tr = train_contrastive(world.pairs, cfg.number("tau"), tc);

    ReportBuilder rb(cfg);
    CsvTable traj({"step", "loss", "gap_full", "gap_masked", "masked_grad_max", "masked_compact_max"});
    double grad_max = 0.0, compact_max = 0.0;
    bool decreasing = true;
    const TrajectoryPoint* prev = nullptr;
    for (const auto& p : tr.trajectory) {
        traj.row({cell(p.step), cell(p.loss), cell(p.gap_full), cell(p.gap_masked), cell(p.masked_grad_max),
                  cell(p.masked_compact_max)});
        grad_max = std::max(grad_max, p.masked_grad_max);
        compact_max = std::max(compact_max, p.masked_compact_max);
        if (p.step > 100) {
            if (prev && !(p.loss < prev->loss)) decreasing = false;
            prev = &p;
        }
    }
    const TrajectoryPoint& first = tr.trajectory.front();
    const TrajectoryPoint& last = tr.trajectory.back();

    auto& res = rb.results();
    res["n"] = n;
    res["steps"] = steps;
    res["mode"] = tc.renormalize_each_step ? "renormalize_each_step" : "unconstrained";
    res["gradient_form"] = form;
    res["initial"] = Json{{"loss", first.loss}, {"gap_full", first.gap_full}, {"gap_masked", first.gap_masked}};
    res["final"] = Json{{"loss", last.loss}, {"gap_full", last.gap_full}, {"gap_masked", last.gap_masked}};
    res["masked_grad_max"] = grad_max;
    res["masked_compact_max"] = compact_max;

    rb.check("masked_gradient_exactly_zero", grad_max == 0.0, "max |entry| " + fmt(grad_max));
    rb.check("loss_decreasing_after_step_100", decreasing, "");
    if (long_running) {
        rb.check("final_masked_gap_within_0.1_of_0.82", within(last.gap_masked, 0.82, 0.1), fmt(last.gap_masked));
    } else {
        rb.check("final_loss_below_0.01", last.loss < 0.01, fmt(last.loss));
        rb.check("final_masked_gap_in_[0.7,1.1]", last.gap_masked >= 0.7 && last.gap_masked <= 1.1,
                 fmt(last.gap_masked));
    }

    CsvTable variance({"dim", "var_x_initial", "var_y_initial", "var_x_final", "var_y_final"});
    for (std::size_t c = 0; c < d; ++c)
        variance.row({cell(c), cell(first.per_dim_variance_x[c]), cell(first.per_dim_variance_y[c]),
                      cell(last.per_dim_variance_x[c]), cell(last.per_dim_variance_y[c])});
    rb.csv("", traj);
    rb.csv("variance", variance);
    return rb.finish();
}

// ---------------------------------------------------------------- verify-gradients

Report verify_gradients(const Config& cfg, const RunOptions&) {
    const std::size_t batches = cfg.count("batches"), n_max = cfg.count("n_max"), d_max = cfg.count("d_max");
    const std::vector<double> taus = cfg.numbers("taus");
    const double h = cfg.number("h");
    require(!taus.empty() && n_max >= 2 && d_max >= 2, "need temperatures and n_max, d_max >= 2");

    ReportBuilder rb(cfg);
    CsvTable table({"batch", "n", "d", "tau", "max_rel_error", "compact_identity_error"});
    std::map<double, double> worst_by_tau;
    double worst = 0.0, worst_identity = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
        Rng shape(cfg.seed(), b);
        const std::size_t n = 2 + shape.below(n_max - 1);
        const std::size_t d = 2 + shape.below(d_max - 1);
        const double tau = taus[b % taus.size()];
        const ContrastiveBatch batch = random_batch(n, d, tau, derive_seed(cfg.seed(), 1000 + b));
        const double err = max_gradient_relative_error(exact_gradients(batch), finite_difference_gradients(batch, h));
        const double ident = compact_identity_error(batch);
        worst = std::max(worst, err);
        worst_identity = std::max(worst_identity, ident);
        worst_by_tau[tau] = std::max(worst_by_tau[tau], err);
        table.row({cell(b), cell(n), cell(d), cell(tau), cell(err), cell(ident)});
    }

    double symmetric_gap = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n)
        for (double tau : taus) {
            const ContrastiveBatch batch = symmetric_batch(n, std::max(n, d_max), tau);
            const GradientPair e = exact_gradients(batch), l = compact_gradients(batch);
            for (std::size_t i = 0; i < e.grad_x.values().size(); ++i) {
                symmetric_gap = std::max(symmetric_gap, std::abs(e.grad_x.values()[i] - l.grad_x.values()[i]));
                symmetric_gap = std::max(symmetric_gap, std::abs(e.grad_y.values()[i] - l.grad_y.values()[i]));
            }
        }

    auto& res = rb.results();
    res["max_rel_error"] = worst;
    Json per_tau = Json::array();
    for (const auto& [tau, e] : worst_by_tau) per_tau.push_back(Json{{"tau", tau}, {"max_rel_error", e}});
    res["max_rel_error_by_tau"] = per_tau;
    res["compact_identity_max_error"] = worst_identity;
    res["symmetric_max_difference"] = symmetric_gap;

    rb.check("finite_difference_max_rel_error_below_1e-5", worst < 1e-5, fmt(worst));
    rb.check("compact_identity_within_1e-10", worst_identity <= 1e-10, fmt(worst_identity));
    rb.check("compact_equals_exact_on_symmetric_batches", symmetric_gap <= 1e-10, fmt(symmetric_gap));
    rb.csv("", table);
    return rb.finish();
}

// ---------------------------------------------------------------- stable-region

Report stable_region(const Config& cfg, const RunOptions&) {
    const std::size_t instances = cfg.count("instances"), n = cfg.count("n"), d = cfg.count("d");
    const std::vector<double> taus = cfg.numbers("taus");
    std::vector<double> grid = cfg.numbers("tau_grid");
    const double delta = cfg.number("delta");
    require(!taus.empty() && n >= 2, "need temperatures and n >= 2");
    std::sort(grid.begin(), grid.end());

    ReportBuilder rb(cfg);
    CsvTable table({"instance", "tau", "anchor", "margin", "o", "loss", "bound", "threshold", "in_stable_region"});
    std::size_t violations = 0, non_monotone = 0, stable = 0;
    for (std::size_t k = 0; k < instances; ++k) {
        const double tau = taus[k % taus.size()];
        const ContrastiveBatch batch = random_batch(n, d, tau, derive_seed(cfg.seed(), k));
        const std::size_t anchor = k % n;
        const LossBound lb = loss_bound_check(batch, anchor, delta);
        violations += lb.loss > lb.bound;
        stable += lb.in_stable_region;

        Vector negatives;
        for (std::size_t j = 0; j < n; ++j)
            if (j != anchor) negatives.push_back(dot(batch.pairs.x.row(anchor), batch.pairs.y.row(j)));
        double previous = -INFINITY;
        for (double t : grid) {
            const double thr = stable_region_threshold(negatives, t, delta);
            if (thr < previous) ++non_monotone;
            previous = thr;
        }
        table.row({cell(k), cell(tau), cell(anchor), cell(lb.margin), cell(lb.o), cell(lb.loss), cell(lb.bound),
                   cell(stable_region_threshold(negatives, tau, delta)), cell(lb.in_stable_region)});
    }

    auto& res = rb.results();
    res["instances"] = instances;
    res["bound_violations"] = violations;
    res["threshold_monotonicity_violations"] = non_monotone;
    res["in_stable_region"] = stable;
    rb.check("loss_never_exceeds_bound", violations == 0, std::to_string(violations) + " violations");
    rb.check("threshold_non_decreasing_in_tau", non_monotone == 0, std::to_string(non_monotone) + " inversions");
    rb.csv("", table);
    return rb.finish();
}

// ---------------------------------------------------------------- mlp-collapse

Report mlp_collapse(const Config& cfg, const RunOptions&) {
    MlpSimConfig mc;
    mc.depth = cfg.count("depth");
    mc.width = cfg.count("width");
    mc.inputs = cfg.count("inputs");
    mc.probe_stride = cfg.count("probe_stride");
    mc.gamma = cfg.number("gamma");
    const std::size_t seeds = cfg.count("seeds");
    require(seeds >= 1, "seeds must be at least 1");

    ReportBuilder rb(cfg);
    CsvTable table({"seed", "layer", "effective_dim", "total_variance", "cone_mean", "cone_std", "dead"});
    std::map<std::size_t, std::pair<double, double>> sums; // layer -> (effective dim, cone mean)
    bool any_dead = false;
    for (std::size_t s = 0; s < seeds; ++s) {
        mc.seed = cfg.seed() + s;
        for (const MlpProbe& p : mlp_collapse_sim(mc)) {
            table.row({cell(static_cast<std::size_t>(mc.seed)), cell(p.layer), cell(p.spectrum.effective_dim),
                       cell(p.spectrum.total), cell(p.cone.mean), cell(p.cone.std), cell(p.dead)});
            sums[p.layer].first += static_cast<double>(p.spectrum.effective_dim);
            sums[p.layer].second += p.cone.mean;
            any_dead = any_dead || p.dead;
        }
    }

    CsvTable summary({"layer", "effective_dim_mean", "cone_mean"});
    Json layers = Json::array();
    std::vector<std::pair<double, double>> probes; // probes past the input layer
    for (const auto& [layer, sum] : sums) {
        const double e = sum.first / static_cast<double>(seeds), c = sum.second / static_cast<double>(seeds);
        summary.row({cell(layer), cell(e), cell(c)});
        layers.push_back(Json{{"layer", layer}, {"effective_dim_mean", e}, {"cone_mean", c}});
        if (layer > 0) probes.emplace_back(e, c);
    }
    bool dims_non_increasing = true, cone_increasing = true, cone_positive = true;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        cone_positive = cone_positive && probes[i].second > 0.0;
        if (i > 0) {
            dims_non_increasing = dims_non_increasing && probes[i].first <= probes[i - 1].first;
            cone_increasing = cone_increasing && probes[i].second > probes[i - 1].second;
        }
    }

    rb.results()["layers"] = layers;
    rb.results()["any_dead_layer"] = any_dead;
    rb.check("effective_dim_non_increasing_across_probes", dims_non_increasing, "");
    rb.check("cone_mean_strictly_increasing_across_probes", cone_increasing, "");
    rb.check("cone_mean_positive_at_every_probe", cone_positive, "");
    rb.csv("", table);
    rb.csv("summary", summary);
    return rb.finish();
}

// ---------------------------------------------------------------- gap-stats

PairedEmbeddings load_pairs(const Config& cfg) {
    const EmbeddingFormat fmt_in = parse_format(cfg.text("input_format"));
    const std::string px = cfg.text("input_x"), py = cfg.text("input_y");
    require(!px.empty() && !py.empty(), "file source needs input_x and input_y");
    PairedEmbeddings p{ingest(px, fmt_in).values, ingest(py, fmt_in).values};
    require(p.x.rows() == p.y.rows() && p.x.cols() == p.y.cols(), "input matrices differ in shape");
    if (cfg.flag("normalize_input")) {
        p.x = l2_normalize_rows(p.x);
        p.y = l2_normalize_rows(p.y);
    }
    return p;
}

Report gap_stats(const Config& cfg, const RunOptions&) {
    const std::string source = cfg.text("source");
    require(source == "gap_world" || source == "files", "source must be gap_world or files");
    ReportBuilder rb(cfg);
    auto& res = rb.results();

    PairedEmbeddings pairs;
    if (source == "gap_world") {
        const std::string support = cfg.text("noise_support");
        require(support == "full" || support == "span", "noise_support must be full or span");
        GapWorldOptions opt;
        opt.renormalize = cfg.flag("renormalize");
        opt.noise = support == "full" ? NoiseSupport::full : NoiseSupport::span;
        pairs = make_gap_world(cfg.count("n"), cfg.count("d"), cfg.count("span_dim"), cfg.number("gap_norm"),
                               cfg.number("sigma"), cfg.seed(), opt)
                    .pairs;
        res["noise_support"] = support;
    } else {
        pairs = load_pairs(cfg);
    }

    const PairGroups groups = group_pairs(pairs, cfg.count("group_size"), cfg.seed());
    const GapReport g = group_statistics(pairs, groups, {cfg.count("pair_samples"), cfg.seed()});

    const std::vector<std::pair<std::string, MeanStd>> stats = {{"gap_length", g.gap_length},
                                                                {"gap_direction", g.gap_direction},
                                                                {"gap_orthogonality", g.gap_orthogonality},
                                                                {"noise_mean", g.noise_mean},
                                                                {"noise_direction", g.noise_direction}};
    CsvTable table({"statistic", "mean", "std"});
    Json table1 = Json::object();
    for (const auto& [name, ms] : stats) {
        table.row({name, cell(ms.mean), cell(ms.std)});
        table1[name] = mean_std_json(ms.mean, ms.std);
    }
    res["pairs"] = pairs.size();
    res["groups"] = g.groups;
    res["dropped_pairs"] = groups.dropped;
    res["table1"] = table1;
    res["skipped"] = Json{{"gap_direction", g.skipped.gap_direction},
                          {"gap_orthogonality", g.skipped.gap_orthogonality},
                          {"noise_direction", g.skipped.noise_direction}};

    if (source == "gap_world") {
        const double gap = cfg.number("gap_norm");
        rb.check("gap_length_mean_within_0.02", within(g.gap_length.mean, gap, 0.02), fmt(g.gap_length.mean));
        rb.check("gap_direction_mean_at_least_0.98", g.gap_direction.mean >= 0.98, fmt(g.gap_direction.mean));
        rb.check("gap_orthogonality_mean_within_0.02", std::abs(g.gap_orthogonality.mean) <= 0.02,
                 fmt(g.gap_orthogonality.mean));
        rb.check("noise_mean_within_1e-3", std::abs(g.noise_mean.mean) <= 1e-3, fmt(g.noise_mean.mean));
        rb.check("noise_direction_mean_within_0.03", std::abs(g.noise_direction.mean) <= 0.03,
                 fmt(g.noise_direction.mean));
    }
    rb.csv("", table);
    return rb.finish();
}

// ---------------------------------------------------------------- c3-bench

ToyTaskSpec toy_spec(const Config& cfg) {
    ToyTaskSpec s;
    s.n = cfg.count("n");
    s.d = cfg.count("d");
    s.span_dim = cfg.count("span_dim");
    s.classes = cfg.count("classes");
    s.gap_norm = cfg.number("gap_norm");
    s.sigma_align = cfg.number("sigma_align");
    s.class_spread = cfg.number("class_spread");
    s.ineffective_std = cfg.number("ineffective_std");
    s.base_offset_std = cfg.number("base_offset_std");
    s.train_fraction = cfg.number("train_fraction");
    s.seed = cfg.seed();
    return s;
}

Report c3_bench(const Config& cfg, const RunOptions&) {
    const ToyTaskSpec spec = toy_spec(cfg);
    AblationOptions opt;
    opt.sigma_grid = cfg.numbers("sigma_grid");
    opt.lambda = cfg.number("ridge_lambda");
    opt.seeds = cfg.count("seeds");
    const auto rows = ablation(spec, opt);

    ReportBuilder rb(cfg);
    std::map<Variant, double> acc;
    CsvTable table({"variant", "best_sigma", "accuracy_mean", "accuracy_std", "in_modality_mean", "seeds"});
    CsvTable sweep({"variant", "sigma", "accuracy_mean"});
    Json rows_json = Json::array();
    bool sane = true;
    for (const AblationRow& r : rows) {
        acc[r.variant] = r.accuracy.mean;
        sane = sane && r.in_modality.mean >= r.accuracy.mean;
        table.row({variant_name(r.variant), cell(r.best_sigma), cell(r.accuracy.mean), cell(r.accuracy.std),
                   cell(r.in_modality.mean), cell(r.seeds)});
        const std::vector<double> grid = variant_corrupts(r.variant) ? opt.sigma_grid : std::vector<double>{0.0};
        Json sig = Json::array();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            sweep.row({variant_name(r.variant), cell(grid[i]), cell(r.sigma_means[i])});
            sig.push_back(Json{{"sigma", grid[i]}, {"accuracy_mean", r.sigma_means[i]}});
        }
        rows_json.push_back(Json{{"variant", variant_name(r.variant)},
                                 {"best_sigma", r.best_sigma},
                                 {"accuracy", mean_std_json(r.accuracy.mean, r.accuracy.std)},
                                 {"in_modality", mean_std_json(r.in_modality.mean, r.in_modality.std)},
                                 {"per_seed", r.per_seed},
                                 {"sigma_sweep", sig}});
    }
    const double c1 = acc[Variant::C1], c21 = acc[Variant::C21], c22 = acc[Variant::C22], c3 = acc[Variant::C3],
                 span = acc[Variant::C22SpanOnly];

    // How the span-only variant tracks the alignment noise level.
    CsvTable align({"sigma_align", "variant", "accuracy_mean"});
    Json align_json = Json::array();
    for (double sa : cfg.numbers("sigma_align_sweep")) {
        ToyTaskSpec s2 = spec;
        s2.sigma_align = sa;
        Json entry{{"sigma_align", sa}};
        for (const AblationRow& r : ablation(s2, opt)) {
            align.row({cell(sa), variant_name(r.variant), cell(r.accuracy.mean)});
            entry[variant_name(r.variant)] = r.accuracy.mean;
        }
        align_json.push_back(entry);
    }

    auto& res = rb.results();
    res["ablation"] = rows_json;
    res["sigma_align_sweep"] = align_json;
    rb.check("C3_at_least_C2_1", c3 >= c21, fmt(c3) + " vs " + fmt(c21));
    rb.check("C3_at_least_C2_2", c3 >= c22, fmt(c3) + " vs " + fmt(c22));
    rb.check("C2_2_at_least_C1", c22 >= c1, fmt(c22) + " vs " + fmt(c1));
    rb.check("min_C2_at_least_C1", std::min(c21, c22) >= c1, fmt(std::min(c21, c22)) + " vs " + fmt(c1));
    rb.check("C3_minus_C1_at_least_0.1", c3 - c1 >= 0.1, fmt(c3 - c1));
    rb.check("span_only_within_0.05_of_C2_1", std::abs(span - c21) <= 0.05, fmt(span) + " vs " + fmt(c21));
    rb.check("in_modality_at_least_cross_modal", sane, "");
    rb.csv("", table);
    rb.csv("sigma_sweep", sweep);
    rb.csv("sigma_align_sweep", align);
    return rb.finish();
}

// ---------------------------------------------------------------- shift-sweep

Report shift_sweep(const Config& cfg, const RunOptions&) {
    const ToyTaskSpec spec = toy_spec(cfg);
    const std::size_t seeds = cfg.count("seeds");
    const double lambda = cfg.number("ridge_lambda");
    const std::vector<double> shifts = cfg.numbers("shift_norms");
    const std::string dir_name = cfg.text("shift_direction");
    require(dir_name == "orthogonal" || dir_name == "in_span", "shift_direction must be orthogonal or in_span");
    require(seeds >= 1 && !shifts.empty(), "need seeds and shift norms");
    const ShiftDirection dir = dir_name == "orthogonal" ? ShiftDirection::orthogonal : ShiftDirection::in_span;

    std::vector<std::vector<double>> metrics(shifts.size());
    for (std::size_t s = 0; s < seeds; ++s) {
        ToyTaskSpec ts = spec;
        ts.seed = spec.seed + s;
        const ToyTask task = make_toy_task(ts);
        const RidgeDecoder dec = train_classifier(select_rows(task.pairs.y, task.train),
                                                  select(task.labels, task.train), ts.classes, lambda);
        const auto curve = gap_shift_sweep(dec, task, shifts, dir, ts.seed);
        for (std::size_t i = 0; i < curve.size(); ++i) metrics[i].push_back(curve[i].metric);
    }

    ReportBuilder rb(cfg);
    CsvTable table({"shift", "metric_mean", "metric_std"});
    Json curve = Json::array();
    std::vector<double> means;
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        const MeanStd ms = mean_std(metrics[i]);
        means.push_back(ms.mean);
        table.row({cell(shifts[i]), cell(ms.mean), cell(ms.std)});
        curve.push_back(Json{{"shift", shifts[i]}, {"metric", mean_std_json(ms.mean, ms.std)}});
    }
    rb.results()["curve"] = curve;
    rb.results()["chance"] = 1.0 / static_cast<double>(spec.classes);

    // Trend over the [0, 2] window: at most one inversion, of at most 0.01.
    std::size_t inversions = 0;
    double worst_rise = 0.0;
    double at0 = NAN, at2 = NAN;
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        if (shifts[i] > 2.0 + 1e-12) break;
        if (shifts[i] == 0.0) at0 = means[i];
        if (std::abs(shifts[i] - 2.0) <= 1e-12) at2 = means[i];
        if (i > 0 && means[i] > means[i - 1]) {
            ++inversions;
            worst_rise = std::max(worst_rise, means[i] - means[i - 1]);
        }
    }
    rb.check("metric_non_increasing_up_to_2", inversions <= 1 && worst_rise <= 0.01,
             std::to_string(inversions) + " inversions, largest " + fmt(worst_rise));
    if (!std::isnan(at0) && !std::isnan(at2))
        rb.check("metric_at_2_at_most_half_of_baseline", at2 <= 0.5 * at0, fmt(at2) + " vs " + fmt(at0));
    for (std::size_t i = 0; i < shifts.size(); ++i)
        if (shifts[i] >= 5.0)
            rb.check("metric_near_chance_at_" + fmt(shifts[i]),
                     std::abs(means[i] - 1.0 / static_cast<double>(spec.classes)) <= 0.1, fmt(means[i]));
    rb.csv("", table);
    return rb.finish();
}

// ---------------------------------------------------------------- export

Report export_command(const Config& cfg, const RunOptions&) {
    const std::string source = cfg.text("source");
    const EmbeddingFormat out_fmt = parse_format(cfg.text("export_format"));
    const std::string ext = out_fmt == EmbeddingFormat::mmeb ? ".mmeb" : ".csv";

    std::vector<std::pair<std::string, Matrix>> outputs;
    if (source == "gap_world") {
        const GapWorld w = make_gap_world(cfg.count("n"), cfg.count("d"), cfg.count("span_dim"),
                                          cfg.number("gap_norm"), cfg.number("sigma"), cfg.seed());
        outputs = {{"x" + ext, w.pairs.x}, {"y" + ext, w.pairs.y}};
    } else if (source == "init-sim") {
        const InitSimWorld w = make_init_sim_world(cfg.count("n"), cfg.count("d"), 25, 230, cfg.seed());
        outputs = {{"x" + ext, w.pairs.x}, {"y" + ext, w.pairs.y}};
    } else if (source == "file") {
        const std::string input = cfg.text("input");
        require(!input.empty(), "file source needs an input path");
        outputs = {{"converted" + ext, ingest(input, parse_format(cfg.text("input_format"))).values}};
    } else {
        throw std::invalid_argument("source must be gap_world, init-sim or file");
    }

    ReportBuilder rb(cfg);
    Json files = Json::array();
    bool round_trip = true;
    for (auto& [name, m] : outputs) {
        std::string bytes = encode(m, out_fmt);
        const Matrix back = decode(bytes, out_fmt, name).values;
        // MMEB stores float32: compare against the float-rounded matrix.
        bool same = back.rows() == m.rows() && back.cols() == m.cols();
        for (std::size_t i = 0; same && i < m.values().size(); ++i) {
            const double expected =
                out_fmt == EmbeddingFormat::mmeb ? static_cast<double>(static_cast<float>(m.values()[i])) : m.values()[i];
            same = back.values()[i] == expected;
        }
        round_trip = round_trip && same;
        files.push_back(Json{{"file", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"bytes", bytes.size()}});
        rb.artifact(name, std::move(bytes));
    }
    rb.results()["files"] = files;
    rb.check("round_trip_exact", round_trip, "");
    return rb.finish();
}

using Handler = std::function<Report(const Config&, const RunOptions&)>;

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> h = {
        {"simulate-init", simulate_init}, {"train-sim", train_sim},       {"verify-gradients", verify_gradients},
        {"stable-region", stable_region}, {"mlp-collapse", mlp_collapse}, {"gap-stats", gap_stats},
        {"c3-bench", c3_bench},           {"shift-sweep", shift_sweep},   {"export", export_command},
    };
    return h;
}

} // namespace

} // namespace detail

Report run_experiment(const std::string& command, const std::string& config_text, const RunOptions& options) {
    const auto& h = detail::handlers();
    const auto it = h.find(command);
    if (it == h.end()) throw std::invalid_argument("unknown command '" + command + "'");
    const detail::Config cfg = detail::resolve_config(command, config_text, options);
    try {
        return it->second(cfg, options);
    } catch (const std::exception& e) {
        throw std::runtime_error(command + ": " + e.what());
    }
}

} // namespace mmgeo
