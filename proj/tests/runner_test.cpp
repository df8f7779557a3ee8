#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "arp/runner.hpp"
#include "arp/segmentation.hpp"
#include "test_util.hpp"

using namespace arp;
using testutil::TempDir;
using testutil::read_text;
using testutil::write_text;

namespace {

SynthConfig oracle_config() {
    SynthConfig synth;
    synth.n_subjects = 5;
    synth.n_activities = 3;
    synth.segments_per_activity = 2;
    synth.segment_len_samples = 120;
    synth.n_channels = 3;
    synth.subject_sigma = 2.0;
    synth.noise_sigma = 1.0;
    synth.smoothness = 0.9;
    synth.seed = 500;
    return synth;
}

GridConfig small_grid() {
    GridConfig cfg;
    cfg.window_sizes_s = {0.5, 1.0};
    cfg.modes = {WindowMode::NONOVERLAP, WindowMode::OVERLAP};
    cfg.feature_sets = {FeatureSet::FS1, FeatureSet::FS3};
    cfg.classifiers = {ClassifierKind::KNN, ClassifierKind::DT};
    cfg.cv_schemes = {{CvScheme::KFOLD, 10}, {CvScheme::SUBJECT, 10}};
    cfg.seed = 42;
    cfg.synth = oracle_config();
    return cfg;
}

const ExperimentCell* find_cell(const std::vector<ExperimentCell>& cells,
                                double size, WindowMode mode, FeatureSet fs,
                                ClassifierKind clf, CvScheme scheme) {
    for (const auto& cell : cells) {
        if (cell.window_size_s == size && cell.mode == mode &&
            cell.feature_set == fs && cell.classifier == clf &&
            cell.cv.scheme == scheme) {
            return &cell;
        }
    }
    return nullptr;
}

}  // namespace

TEST_CASE("run_grid covers the full Cartesian product in canonical order") {
    const auto cells = run_grid(small_grid());
    CHECK(cells.size() == 2 * 2 * 2 * 2 * 2);

    // canonical order: sizes ascending, then mode, feature set, classifier, scheme
    CHECK(cells[0].window_size_s == 0.5);
    CHECK(cells[0].mode == WindowMode::NONOVERLAP);
    CHECK(cells[0].feature_set == FeatureSet::FS1);
    CHECK(cells[0].classifier == ClassifierKind::KNN);
    CHECK(cells[0].cv.scheme == CvScheme::KFOLD);
    CHECK(cells[1].cv.scheme == CvScheme::SUBJECT);
    CHECK(cells.back().window_size_s == 1.0);
    CHECK(cells.back().mode == WindowMode::OVERLAP);

    for (const auto& cell : cells) {
        CHECK(cell.n_windows > 0);
        const std::size_t expected_folds =
            cell.cv.scheme == CvScheme::KFOLD ? 10 : 5;
        CHECK(cell.eval.per_fold_f1.size() == expected_folds);
        CHECK(cell.eval.mean_f1 >= 0.0);
        CHECK(cell.eval.mean_f1 <= 1.0);
    }
}

TEST_CASE("single-cell grid produces one cell with ten fold scores") {
    GridConfig cfg = small_grid();
    cfg.window_sizes_s = {1.0};
    cfg.modes = {WindowMode::NONOVERLAP};
    cfg.feature_sets = {FeatureSet::FS1};
    cfg.classifiers = {ClassifierKind::KNN};
    cfg.cv_schemes = {{CvScheme::KFOLD, 10}};
    const auto cells = run_grid(cfg);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].eval.per_fold_f1.size() == 10);

    // n_windows matches the count law summed over recordings (the synth
    // data has no null windows; 1 s at 50 Hz is 50 samples)
    const auto& synth = *cfg.synth;
    const std::size_t per_subject = synth.n_activities * synth.segments_per_activity *
                                    synth.segment_len_samples;
    const std::size_t expected = synth.n_subjects * window_count(per_subject, 50, 50);
    CHECK(cells[0].n_windows == expected);
}

TEST_CASE("the default config file expands to the documented 768 cells") {
    TempDir tmp("arp-runner");
    write_text(tmp.file("grid.cfg"), "[synth]\nsubjects = 4\n");
    GridConfig cfg = grid_config_from_file(tmp.file("grid.cfg"));
    cfg.normalize();
    CHECK(cfg.window_sizes_s.size() == 16);
    CHECK(cfg.modes.size() == 2);
    CHECK(cfg.feature_sets.size() == 3);
    CHECK(cfg.classifiers.size() == 4);
    CHECK(cfg.cv_schemes.size() == 2);
    CHECK(cfg.window_sizes_s.size() * cfg.modes.size() * cfg.feature_sets.size() *
              cfg.classifiers.size() * cfg.cv_schemes.size() ==
          768);
}

TEST_CASE("grid cells match independently computed single-stage results") {
    // grid path (cached windows/features) vs a fresh single-cell run
    GridConfig cfg = small_grid();
    const auto cells = run_grid(cfg);

    GridConfig solo = small_grid();
    solo.window_sizes_s = {1.0};
    solo.modes = {WindowMode::OVERLAP};
    solo.feature_sets = {FeatureSet::FS3};
    solo.classifiers = {ClassifierKind::KNN};
    solo.cv_schemes = {{CvScheme::KFOLD, 10}};
    const auto lone = run_grid(solo);
    REQUIRE(lone.size() == 1);

    const auto* cell = find_cell(cells, 1.0, WindowMode::OVERLAP, FeatureSet::FS3,
                                 ClassifierKind::KNN, CvScheme::KFOLD);
    REQUIRE(cell != nullptr);
    CHECK(cell->eval.per_fold_f1 == lone[0].eval.per_fold_f1);
    CHECK(cell->n_windows == lone[0].n_windows);
}

TEST_CASE("adding grid points never perturbs existing cells") {
    GridConfig base = small_grid();
    base.window_sizes_s = {0.5, 1.0};
    const auto before = run_grid(base);

    GridConfig extended = base;
    extended.window_sizes_s = {0.5, 1.0, 2.0};
    extended.classifiers = {ClassifierKind::KNN, ClassifierKind::DT, ClassifierKind::NCC};
    const auto after = run_grid(extended);

    for (const auto& cell : before) {
        const auto* match = find_cell(after, cell.window_size_s, cell.mode,
                                      cell.feature_set, cell.classifier, cell.cv.scheme);
        REQUIRE(match != nullptr);
        CHECK(match->eval.per_fold_f1 == cell.eval.per_fold_f1);
    }
}

TEST_CASE("threading does not change results") {
    GridConfig serial = small_grid();
    serial.threads = 1;
    GridConfig threaded = small_grid();
    threaded.threads = 4;
    const auto a = run_grid(serial);
    const auto b = run_grid(threaded);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].eval.per_fold_f1 == b[i].eval.per_fold_f1);
        CHECK(a[i].n_windows == b[i].n_windows);
    }
}

TEST_CASE("report writes the three CSVs with stable content") {
    TempDir tmp("arp-runner");
    GridConfig cfg = small_grid();
    cfg.window_sizes_s = {0.5};
    cfg.modes = {WindowMode::NONOVERLAP};
    const auto cells = run_grid(cfg);
    report(cells, tmp.file("out"));

    const auto summary = read_text(tmp.file("out") + "/summary.csv");
    CHECK(summary.rfind("window_size_s,mode,feature_set,classifier,cv_scheme,"
                        "mean_f1,std_f1,n_windows\n",
                        0) == 0);
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 1 + cells.size());

    const auto per_fold = read_text(tmp.file("out") + "/per_fold.csv");
    std::size_t fold_rows = 0;
    for (const auto& cell : cells) fold_rows += cell.eval.per_fold_f1.size();
    CHECK(std::count(per_fold.begin(), per_fold.end(), '\n') == 1 + fold_rows);

    // subject folds: one row per subject
    const auto* subject_cell = find_cell(cells, 0.5, WindowMode::NONOVERLAP,
                                         FeatureSet::FS1, ClassifierKind::KNN,
                                         CvScheme::SUBJECT);
    REQUIRE(subject_cell != nullptr);
    CHECK(subject_cell->eval.per_fold_f1.size() == 5);

    const auto timings = read_text(tmp.file("out") + "/timings.csv");
    CHECK(std::count(timings.begin(), timings.end(), '\n') == 1 + cells.size());

    // a second report of the same cells is byte-identical for the stable files
    report(cells, tmp.file("out2"));
    CHECK(read_text(tmp.file("out2") + "/summary.csv") == summary);
    CHECK(read_text(tmp.file("out2") + "/per_fold.csv") == per_fold);
}

TEST_CASE("grid errors carry the failing cell's coordinates") {
    GridConfig cfg = small_grid();
    cfg.cv_schemes = {{CvScheme::KFOLD, 100000}};  // k far above the row count
    try {
        run_grid(cfg);
        FAIL("expected an error");
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        CHECK(msg.find("cell ws=0.5;mode=nonoverlap;fs=FS1;clf=KNN;cv=kfold") !=
              std::string::npos);
    }
}

TEST_CASE("config validation catches contradictory sources") {
    GridConfig cfg = small_grid();
    cfg.manifest_path = "also-a-manifest.txt";
    CHECK_THROWS(run_grid(cfg));

    GridConfig none = small_grid();
    none.synth.reset();
    CHECK_THROWS(run_grid(none));

    GridConfig empty = small_grid();
    empty.feature_sets.clear();
    CHECK_THROWS(run_grid(empty));
}

TEST_CASE("cell seeds depend on the row-set coordinates only") {
    CHECK(cell_seed(42, 0.5, WindowMode::OVERLAP) ==
          cell_seed(42, 0.5, WindowMode::OVERLAP));
    CHECK(cell_seed(42, 0.5, WindowMode::OVERLAP) !=
          cell_seed(42, 0.5, WindowMode::NONOVERLAP));
    CHECK(cell_seed(42, 0.5, WindowMode::OVERLAP) !=
          cell_seed(42, 1.0, WindowMode::OVERLAP));
    CHECK(cell_seed(42, 0.5, WindowMode::OVERLAP) !=
          cell_seed(43, 0.5, WindowMode::OVERLAP));
}

TEST_CASE("config files parse sections, defaults and overrides") {
    TempDir tmp("arp-runner");

    SUBCASE("full grid file") {
        write_text(tmp.file("grid.cfg"),
                   "# comment\n"
                   "[grid]\n"
                   "window_sizes_s = 0.5 1 2\n"
                   "modes = overlap\n"
                   "overlap_step_s = 0.25\n"
                   "feature_sets = FS2\n"
                   "classifiers = NB NCC\n"
                   "cv_schemes = subject\n"
                   "seed = 7\n"
                   "[classifier]\n"
                   "knn_k = 5\n"
                   "dt_max_depth = 12\n"
                   "[synth]\n"
                   "subjects = 3\n"
                   "activities = 4\n"
                   "seed = 11\n");
        const auto cfg = grid_config_from_file(tmp.file("grid.cfg"));
        CHECK(cfg.window_sizes_s == std::vector<double>{0.5, 1, 2});
        CHECK(cfg.modes == std::vector<WindowMode>{WindowMode::OVERLAP});
        CHECK(cfg.overlap_step_s == 0.25);
        CHECK(cfg.feature_sets == std::vector<FeatureSet>{FeatureSet::FS2});
        CHECK(cfg.classifiers ==
              std::vector<ClassifierKind>{ClassifierKind::NB, ClassifierKind::NCC});
        REQUIRE(cfg.cv_schemes.size() == 1);
        CHECK(cfg.cv_schemes[0].scheme == CvScheme::SUBJECT);
        CHECK(cfg.seed == 7);
        CHECK(cfg.classifier_params.knn_k == 5);
        REQUIRE(cfg.classifier_params.dt_max_depth.has_value());
        CHECK(*cfg.classifier_params.dt_max_depth == 12);
        REQUIRE(cfg.synth.has_value());
        CHECK(cfg.synth->n_subjects == 3);
        CHECK(cfg.synth->n_activities == 4);
        CHECK(cfg.synth->seed == 11);
    }
    SUBCASE("synth seed derives from the run seed when unset") {
        write_text(tmp.file("a.cfg"), "[grid]\nseed = 1\n[synth]\nsubjects = 3\n");
        write_text(tmp.file("b.cfg"), "[grid]\nseed = 2\n[synth]\nsubjects = 3\n");
        const auto a = grid_config_from_file(tmp.file("a.cfg"));
        const auto b = grid_config_from_file(tmp.file("b.cfg"));
        CHECK(a.synth->seed != b.synth->seed);
    }
    SUBCASE("manifest paths resolve relative to the config file") {
        write_text(tmp.file("data.cfg"),
                   "[data]\nmanifest = files/manifest.txt\ncolumns = 0 1\n"
                   "label_column = 2\n");
        const auto cfg = grid_config_from_file(tmp.file("data.cfg"));
        REQUIRE(cfg.manifest_path.has_value());
        CHECK(cfg.manifest_path->find(tmp.dir.string()) == 0);
        CHECK(cfg.load_options.selection.columns == std::vector<std::size_t>{0, 1});
        CHECK(cfg.load_options.label_column == 2);
    }
    SUBCASE("malformed files are rejected") {
        write_text(tmp.file("bad1.cfg"), "[grid\nseed = 1\n");
        CHECK_THROWS(parse_config_file(tmp.file("bad1.cfg")));
        write_text(tmp.file("bad2.cfg"), "[grid]\njust a dangling line\n");
        CHECK_THROWS(parse_config_file(tmp.file("bad2.cfg")));
        write_text(tmp.file("bad3.cfg"), "[grid]\nseed = notanumber\n");
        CHECK_THROWS(grid_config_from_file(tmp.file("bad3.cfg")));
        write_text(tmp.file("bad4.cfg"), "[grid]\nseed = 1\n");
        CHECK_THROWS(grid_config_from_file(tmp.file("bad4.cfg")));  // no data source
        write_text(tmp.file("bad5.cfg"),
                   "[data]\nmanifest = m.txt\n[synth]\nsubjects = 3\n");
        CHECK_THROWS(grid_config_from_file(tmp.file("bad5.cfg")));  // two data sources
    }
}

TEST_CASE("leakage gap properties hold on the synthetic oracle") {
    GridConfig cfg = small_grid();
    const auto cells = run_grid(cfg);

    // with subject offsets, kfold beats subject CV on average for KNN/DT,
    // and overlap widens the average gap
    std::map<WindowMode, std::pair<double, int>> gaps;
    for (const auto& cell : cells) {
        if (cell.cv.scheme != CvScheme::KFOLD) continue;
        const auto* subject = find_cell(cells, cell.window_size_s, cell.mode,
                                        cell.feature_set, cell.classifier,
                                        CvScheme::SUBJECT);
        REQUIRE(subject != nullptr);
        auto& [sum, count] = gaps[cell.mode];
        sum += cell.eval.mean_f1 - subject->eval.mean_f1;
        ++count;
    }
    const double tiled = gaps[WindowMode::NONOVERLAP].first /
                         gaps[WindowMode::NONOVERLAP].second;
    const double slid = gaps[WindowMode::OVERLAP].first / gaps[WindowMode::OVERLAP].second;
    CHECK(tiled > 0.0);
    CHECK(slid > tiled);
}

TEST_CASE("richer feature sets cost at most 0.05 mean F1 on i.i.d. data") {
    // The soft bound is a property of the regime where class signal, not
    // subject identity, dominates the features. With strong subject offsets
    // the extra FS3 statistics are offset-and-noise carriers and can cost
    // subject-CV scores well over 0.05 on this generator.
    for (std::size_t channels : {2, 3}) {
        GridConfig cfg = small_grid();
        cfg.synth->n_channels = channels;
        cfg.synth->subject_sigma = 0.0;
        cfg.synth->smoothness = 0.0;
        const auto cells = run_grid(cfg);
        for (const auto& cell : cells) {
            if (cell.feature_set != FeatureSet::FS1) continue;
            const auto* rich = find_cell(cells, cell.window_size_s, cell.mode,
                                         FeatureSet::FS3, cell.classifier, cell.cv.scheme);
            REQUIRE(rich != nullptr);
            CHECK(rich->eval.mean_f1 >= cell.eval.mean_f1 - 0.05);
        }
    }
}
