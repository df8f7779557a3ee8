// arpbench: segment labeled sensor recordings into sliding windows, extract
// per-channel statistics, train four reference classifiers, and compare
// shuffled k-fold against leave-one-subject-out cross-validation over a
// configurable experiment grid.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arp/classifiers.hpp"
#include "arp/dataset.hpp"
#include "arp/evaluation.hpp"
#include "arp/features.hpp"
#include "arp/runner.hpp"
#include "arp/segmentation.hpp"
#include "arp/synthgen.hpp"

namespace {

struct StageOptions {
    std::string manifest;
    std::vector<std::size_t> columns{0, 1, 2};
    std::size_t label_column = 3;
    double sampling_rate_hz = 50.0;
    std::optional<std::size_t> time_column;
    double size_s = 1.0;
    std::optional<double> step_s;
    bool keep_null = false;
};

void add_stage_options(CLI::App* cmd, StageOptions& opt, bool with_windowing) {
    cmd->add_option("--manifest", opt.manifest, "manifest of subject recordings")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--columns", opt.columns, "selected channel columns (zero-based)")
        ->delimiter(',');
    cmd->add_option("--label-column", opt.label_column, "activity label column");
    cmd->add_option("--rate", opt.sampling_rate_hz, "sampling rate in Hz");
    cmd->add_option("--time-column", opt.time_column,
                    "timestamp column (default: synthesized from row index)");
    if (with_windowing) {
        cmd->add_option("--size", opt.size_s, "window size in seconds")->required();
        cmd->add_option("--step", opt.step_s,
                        "slide step in seconds (default: non-overlapping)");
        cmd->add_flag("--keep-null", opt.keep_null, "keep null-majority windows");
    }
}

arp::LoadOptions load_options(const StageOptions& opt) {
    arp::LoadOptions load;
    load.selection.columns = opt.columns;
    load.label_column = opt.label_column;
    load.sampling_rate_hz = opt.sampling_rate_hz;
    load.time_column = opt.time_column;
    return load;
}

arp::WindowSpec window_spec(const StageOptions& opt) {
    return opt.step_s ? arp::WindowSpec::overlapping(opt.size_s, *opt.step_s)
                      : arp::WindowSpec::non_overlapping(opt.size_s);
}

void write_windows_csv(const std::vector<arp::Window>& windows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "subject,start,length,label\n";
    for (const auto& w : windows) {
        out << w.subject_id << ',' << w.start_index << ',' << w.length << ',' << w.label
            << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sliding-window activity recognition benchmark"};
    app.require_subcommand(1);

    // grid
    auto* grid = app.add_subcommand("grid", "evaluate the full experiment grid");
    std::string grid_config;
    std::string grid_out;
    std::uint64_t seed_override = 0;
    std::size_t threads_override = 0;
    grid->add_option("--config", grid_config, "grid config file")
        ->required()
        ->check(CLI::ExistingFile);
    grid->add_option("--out", grid_out, "output directory")->required();
    grid->add_option("--seed", seed_override, "override the config seed");
    grid->add_option("--threads", threads_override, "worker thread count (0 = auto)");
    grid->callback([&] {
        arp::GridConfig cfg = arp::grid_config_from_file(grid_config);
        if (grid->count("--seed") > 0) {
            cfg.seed = seed_override;
            if (cfg.synth) {
                // re-derive the synthetic seed unless the config pinned one
                const arp::ConfigFile file = arp::parse_config_file(grid_config);
                cfg.synth = arp::synth_config_from_file(file, cfg.seed);
            }
        }
        if (grid->count("--threads") > 0) cfg.threads = threads_override;
        const auto cells = arp::run_grid(cfg);
        arp::report(cells, grid_out);
        std::cout << "evaluated " << cells.size() << " cells\n"
                  << "wrote " << grid_out << "/summary.csv, per_fold.csv, timings.csv\n";
    });

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    std::string synth_config_path;
    std::string synth_out;
    synth->add_option("--config", synth_config_path, "config file with a [synth] section")
        ->required()
        ->check(CLI::ExistingFile);
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->callback([&] {
        const arp::ConfigFile file = arp::parse_config_file(synth_config_path);
        const std::uint64_t run_seed = file.has("grid.seed")
                                           ? std::stoull(file.get("grid.seed"))
                                           : 42;
        const arp::SynthConfig cfg = arp::synth_config_from_file(file, run_seed);
        const arp::Dataset data = arp::generate(cfg);
        arp::write_dataset_raw(data, synth_out);
        std::size_t samples = 0;
        for (const auto& rec : data.recordings) samples += rec.samples.size();
        std::cout << "wrote " << data.recordings.size() << " recordings ("
                  << samples << " samples) to " << synth_out << "\n";
    });

    // segment
    auto* segment = app.add_subcommand("segment", "window one dataset and report counts");
    StageOptions seg_opt;
    std::string seg_out;
    add_stage_options(segment, seg_opt, true);
    segment->add_option("--out", seg_out, "windows CSV (subject,start,length,label)");
    segment->callback([&] {
        const auto data =
            arp::load_dataset_from_manifest_file(seg_opt.manifest, load_options(seg_opt));
        const auto windows =
            arp::segment_dataset(data, window_spec(seg_opt), {seg_opt.keep_null});
        std::size_t null_windows = 0;
        for (const auto& w : windows) {
            if (w.label == 0) ++null_windows;
        }
        std::cout << data.recordings.size() << " subjects, " << windows.size()
                  << " windows";
        if (seg_opt.keep_null) std::cout << " (" << null_windows << " null-labeled)";
        std::cout << "\n";
        if (!seg_out.empty()) write_windows_csv(windows, seg_out);
    });

    // features
    auto* features = app.add_subcommand("features", "extract a feature matrix CSV");
    StageOptions feat_opt;
    std::string feat_fs = "FS3";
    std::string feat_out;
    add_stage_options(features, feat_opt, true);
    features->add_option("--feature-set", feat_fs, "FS1, FS2 or FS3");
    features->add_option("--out", feat_out, "feature CSV path")->required();
    features->callback([&] {
        const auto data =
            arp::load_dataset_from_manifest_file(feat_opt.manifest, load_options(feat_opt));
        const auto windows = arp::segment_dataset(data, window_spec(feat_opt));
        const auto matrix =
            arp::extract_features(windows, data, arp::feature_set_from_string(feat_fs));
        arp::write_feature_csv(matrix, feat_out);
        std::cout << matrix.rows() << " rows, width " << matrix.width() << " -> "
                  << feat_out << "\n";
    });

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "cross-validate one configuration");
    StageOptions eval_opt;
    std::string eval_fs = "FS3";
    std::string eval_clf = "KNN";
    std::string eval_cv = "kfold";
    std::size_t eval_k = 10;
    std::uint64_t eval_seed = 42;
    std::size_t knn_k = 3;
    std::size_t dt_max_depth = 0;
    std::size_t dt_min_leaf = 1;
    double nb_var_smoothing = 1e-9;
    bool eval_pooled = false;
    std::string eval_out;
    add_stage_options(evaluate, eval_opt, true);
    evaluate->add_option("--feature-set", eval_fs, "FS1, FS2 or FS3");
    evaluate->add_option("--classifier", eval_clf, "KNN, DT, NB or NCC");
    evaluate->add_option("--cv", eval_cv, "kfold or subject");
    evaluate->add_option("--kfold-k", eval_k, "fold count for kfold");
    evaluate->add_option("--seed", eval_seed, "shuffle seed for kfold");
    evaluate->add_option("--knn-k", knn_k, "neighbor count for KNN");
    evaluate->add_option("--dt-max-depth", dt_max_depth, "depth limit for DT (0 = none)");
    evaluate->add_option("--dt-min-leaf", dt_min_leaf, "minimum rows per DT leaf");
    evaluate->add_option("--nb-var-smoothing", nb_var_smoothing, "NB variance smoothing");
    evaluate->add_flag("--pooled", eval_pooled,
                       "also report F1 over predictions pooled across folds");
    evaluate->add_option("--out", eval_out, "per-fold CSV (fold,scheme,f1)");
    evaluate->callback([&] {
        const auto data =
            arp::load_dataset_from_manifest_file(eval_opt.manifest, load_options(eval_opt));
        const auto windows = arp::segment_dataset(data, window_spec(eval_opt));
        const auto matrix =
            arp::extract_features(windows, data, arp::feature_set_from_string(eval_fs));

        const arp::CvScheme scheme = arp::scheme_from_string(eval_cv);
        const arp::FoldPlan plan = scheme == arp::CvScheme::KFOLD
                                       ? arp::kfold_plan(matrix.rows(), eval_k, eval_seed)
                                       : arp::subject_plan(matrix.subject_per_row());
        arp::ClassifierSpec spec;
        spec.kind = arp::classifier_from_string(eval_clf);
        spec.knn_k = knn_k;
        if (dt_max_depth > 0) spec.dt_max_depth = dt_max_depth;
        spec.dt_min_leaf = dt_min_leaf;
        spec.nb_var_smoothing = nb_var_smoothing;

        const arp::EvalResult result = arp::cross_validate(matrix, plan, spec);
        for (std::size_t f = 0; f < result.per_fold_f1.size(); ++f) {
            std::printf("fold %zu: f1 = %.4f\n", f, result.per_fold_f1[f]);
        }
        std::printf("mean f1 = %.4f, std = %.4f over %zu folds (%zu windows)\n",
                    result.mean_f1, result.std_f1, result.per_fold_f1.size(),
                    matrix.rows());
        if (eval_pooled) std::printf("pooled f1 = %.4f\n", result.pooled_f1);
        if (!eval_out.empty()) arp::write_per_fold_csv(result, scheme, eval_out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "arpbench: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
