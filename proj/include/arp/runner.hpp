#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arp/classifiers.hpp"
#include "arp/dataset.hpp"
#include "arp/evaluation.hpp"
#include "arp/features.hpp"
#include "arp/synthgen.hpp"

namespace arp {

enum class WindowMode { NONOVERLAP, OVERLAP };

const char* to_string(WindowMode mode);
WindowMode window_mode_from_string(const std::string& name);

struct CvSpec {
    CvScheme scheme = CvScheme::KFOLD;
    std::size_t kfold_k = 10;  // used by KFOLD only
};

struct GridConfig {
    std::vector<double> window_sizes_s;
    std::vector<WindowMode> modes;
    double overlap_step_s = 0.2;
    std::vector<FeatureSet> feature_sets;
    std::vector<ClassifierKind> classifiers;
    std::vector<CvSpec> cv_schemes;
    std::uint64_t seed = 42;
    std::size_t threads = 0;  // 0 = hardware concurrency

    // Shared hyperparameters; kind is overridden per cell.
    ClassifierSpec classifier_params;

    // Exactly one data source: a manifest of raw sensor logs, or a
    // synthetic-data config.
    std::optional<std::string> manifest_path;
    LoadOptions load_options;
    std::optional<SynthConfig> synth;

    // Sorts window sizes ascending, puts the other axes in canonical
    // declaration order, drops duplicates, and checks every list is
    // non-empty. Called by run_grid.
    void normalize();
};

struct ExperimentCell {
    double window_size_s = 0.0;
    WindowMode mode = WindowMode::NONOVERLAP;
    FeatureSet feature_set = FeatureSet::FS1;
    ClassifierKind classifier = ClassifierKind::KNN;
    CvSpec cv;
    EvalResult eval;
    std::size_t n_windows = 0;
    double wall_time_s = 0.0;
};

std::string cell_name(const ExperimentCell& cell);

// The k-fold shuffle seed for a cell is derived from the run seed and the
// coordinates that define the cell's row set (window size and mode), so
// classifiers and feature sets at one segmentation share fold assignments
// and adding grid points never perturbs existing cells.
std::uint64_t cell_seed(std::uint64_t run_seed, double window_size_s, WindowMode mode);

// Evaluates the full Cartesian grid over the normalized config. Windows
// and feature matrices are built once per (size, mode) and
// (size, mode, feature set) and shared across cells. Cells are evaluated
// by a worker pool; results are identical for a fixed seed regardless of
// the thread count.
std::vector<ExperimentCell> run_grid(const GridConfig& cfg);
std::vector<ExperimentCell> run_grid(const GridConfig& cfg, const Dataset& data);

// summary.csv:  window_size_s,mode,feature_set,classifier,cv_scheme,
//               mean_f1,std_f1,n_windows
// per_fold.csv: same coordinates plus fold,f1
// timings.csv:  coordinates plus wall_time_s; kept separate because wall
//               times vary run to run while the other two files are
//               byte-stable for a fixed config and seed.
void report(const std::vector<ExperimentCell>& cells, const std::string& out_dir);

// Plain-text config: `[section]` headers, `key = value` pairs, `#`
// comments. Lists are whitespace-separated.
struct ConfigFile {
    std::vector<std::pair<std::string, std::string>> entries;  // "section.key" -> value

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
};

ConfigFile parse_config_file(const std::string& path);

GridConfig grid_config_from_file(const std::string& path);
SynthConfig synth_config_from_file(const ConfigFile& file, std::uint64_t run_seed);

}  // namespace arp
