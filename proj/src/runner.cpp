#include "arp/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "arp/rng.hpp"
#include "arp/segmentation.hpp"

namespace arp {

namespace {

std::string shortest(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw std::runtime_error("value formatting failed");
    return std::string(buf, ptr);
}

// Runs fn(0..n_tasks) on a small worker pool. Task outputs must go to
// per-index slots so the schedule cannot affect results.
template <typename Fn>
void parallel_for(std::size_t n_tasks, std::size_t threads, Fn&& fn) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n_tasks, 1));
    if (threads <= 1 || n_tasks <= 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_index = 0;

    // On failure the lowest-index error wins, so the reported cell does not
    // depend on thread timing. Started tasks always run to completion.
    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n_tasks) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error || i < error_index) {
                    error = std::current_exception();
                    error_index = i;
                }
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

template <typename T, typename Order>
void canonicalize(std::vector<T>& values, Order order, const char* what) {
    std::sort(values.begin(), values.end(), order);
    values.erase(std::unique(values.begin(), values.end(),
                             [&](const T& a, const T& b) {
                                 return !order(a, b) && !order(b, a);
                             }),
                 values.end());
    if (values.empty()) {
        throw std::invalid_argument(std::string("grid config: empty ") + what);
    }
}

}  // namespace

const char* to_string(WindowMode mode) {
    switch (mode) {
        case WindowMode::NONOVERLAP: return "nonoverlap";
        case WindowMode::OVERLAP: return "overlap";
    }
    throw std::logic_error("unknown window mode");
}

WindowMode window_mode_from_string(const std::string& name) {
    if (name == "nonoverlap") return WindowMode::NONOVERLAP;
    if (name == "overlap") return WindowMode::OVERLAP;
    throw std::invalid_argument("unknown window mode: " + name);
}

void GridConfig::normalize() {
    canonicalize(window_sizes_s, std::less<double>(), "window_sizes_s");
    for (double s : window_sizes_s) {
        if (s <= 0.0) throw std::invalid_argument("grid config: window sizes must be > 0");
    }
    auto by_value = [](auto a, auto b) { return static_cast<int>(a) < static_cast<int>(b); };
    canonicalize(modes, by_value, "modes");
    canonicalize(feature_sets, by_value, "feature_sets");
    canonicalize(classifiers, by_value, "classifiers");
    canonicalize(cv_schemes,
                 [](const CvSpec& a, const CvSpec& b) {
                     return static_cast<int>(a.scheme) < static_cast<int>(b.scheme);
                 },
                 "cv_schemes");
    if (overlap_step_s <= 0.0) {
        throw std::invalid_argument("grid config: overlap_step_s must be > 0");
    }
    if (manifest_path.has_value() == synth.has_value()) {
        throw std::invalid_argument(
            "grid config: exactly one data source (manifest or synth) required");
    }
}

std::string cell_name(const ExperimentCell& cell) {
    std::string name = "ws=" + shortest(cell.window_size_s);
    name += ";mode=";
    name += to_string(cell.mode);
    name += ";fs=";
    name += to_string(cell.feature_set);
    name += ";clf=";
    name += to_string(cell.classifier);
    name += ";cv=";
    name += to_string(cell.cv.scheme);
    return name;
}

std::uint64_t cell_seed(std::uint64_t run_seed, double window_size_s, WindowMode mode) {
    const std::string key = "ws=" + shortest(window_size_s) + ";mode=" + to_string(mode);
    return run_seed ^ fnv1a64(key.data(), key.size());
}

std::vector<ExperimentCell> run_grid(const GridConfig& cfg) {
    GridConfig c = cfg;
    c.normalize();
    Dataset data;
    if (c.synth) {
        data = generate(*c.synth);
    } else {
        data = load_dataset_from_manifest_file(*c.manifest_path, c.load_options);
    }
    return run_grid(c, data);
}

std::vector<ExperimentCell> run_grid(const GridConfig& cfg, const Dataset& data) {
    GridConfig c = cfg;
    c.normalize();

    const std::size_t n_sizes = c.window_sizes_s.size();
    const std::size_t n_modes = c.modes.size();
    const std::size_t n_fs = c.feature_sets.size();

    // Windows per (size, mode); cheap enough to build sequentially.
    std::vector<std::vector<Window>> windows(n_sizes * n_modes);
    for (std::size_t si = 0; si < n_sizes; ++si) {
        for (std::size_t mi = 0; mi < n_modes; ++mi) {
            const double size_s = c.window_sizes_s[si];
            const WindowSpec spec = c.modes[mi] == WindowMode::NONOVERLAP
                                        ? WindowSpec::non_overlapping(size_s)
                                        : WindowSpec::overlapping(size_s, c.overlap_step_s);
            try {
                windows[si * n_modes + mi] = segment_dataset(data, spec);
            } catch (const std::exception& e) {
                throw std::runtime_error("segmentation at ws=" + shortest(size_s) +
                                         ";mode=" + to_string(c.modes[mi]) + ": " + e.what());
            }
        }
    }

    // Feature matrices per (size, mode, feature set), shared by all cells.
    std::vector<FeatureMatrix> matrices(n_sizes * n_modes * n_fs);
    parallel_for(matrices.size(), c.threads, [&](std::size_t i) {
        const std::size_t fi = i % n_fs;
        const std::size_t mi = (i / n_fs) % n_modes;
        const std::size_t si = i / (n_fs * n_modes);
        try {
            matrices[i] = extract_features(windows[si * n_modes + mi], data,
                                           c.feature_sets[fi]);
        } catch (const std::exception& e) {
            throw std::runtime_error("features at ws=" + shortest(c.window_sizes_s[si]) +
                                     ";mode=" + to_string(c.modes[mi]) + ";fs=" +
                                     to_string(c.feature_sets[fi]) + ": " + e.what());
        }
    });

    std::vector<ExperimentCell> cells;
    for (std::size_t si = 0; si < n_sizes; ++si) {
        for (std::size_t mi = 0; mi < n_modes; ++mi) {
            for (std::size_t fi = 0; fi < n_fs; ++fi) {
                for (ClassifierKind clf : c.classifiers) {
                    for (const CvSpec& cv : c.cv_schemes) {
                        ExperimentCell cell;
                        cell.window_size_s = c.window_sizes_s[si];
                        cell.mode = c.modes[mi];
                        cell.feature_set = c.feature_sets[fi];
                        cell.classifier = clf;
                        cell.cv = cv;
                        cells.push_back(cell);
                    }
                }
            }
        }
    }

    auto matrix_index = [&](const ExperimentCell& cell) {
        const auto si = static_cast<std::size_t>(
            std::lower_bound(c.window_sizes_s.begin(), c.window_sizes_s.end(),
                             cell.window_size_s) -
            c.window_sizes_s.begin());
        const auto mi = static_cast<std::size_t>(
            std::find(c.modes.begin(), c.modes.end(), cell.mode) - c.modes.begin());
        const auto fi = static_cast<std::size_t>(
            std::find(c.feature_sets.begin(), c.feature_sets.end(), cell.feature_set) -
            c.feature_sets.begin());
        return (si * n_modes + mi) * n_fs + fi;
    };

    parallel_for(cells.size(), c.threads, [&](std::size_t i) {
        ExperimentCell& cell = cells[i];
        const FeatureMatrix& matrix = matrices[matrix_index(cell)];
        try {
            const auto start = std::chrono::steady_clock::now();
            FoldPlan plan;
            if (cell.cv.scheme == CvScheme::KFOLD) {
                plan = kfold_plan(matrix.rows(), cell.cv.kfold_k,
                                  cell_seed(c.seed, cell.window_size_s, cell.mode));
            } else {
                plan = subject_plan(matrix.subject_per_row());
            }
            ClassifierSpec spec = c.classifier_params;
            spec.kind = cell.classifier;
            cell.eval = cross_validate(matrix, plan, spec);
            cell.n_windows = matrix.rows();
            cell.wall_time_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
        } catch (const std::exception& e) {
            throw std::runtime_error("cell " + cell_name(cell) + ": " + e.what());
        }
    });

    return cells;
}

void report(const std::vector<ExperimentCell>& cells, const std::string& out_dir) {
    if (cells.empty()) {
        throw std::invalid_argument("report: no cells");
    }
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    auto open = [&](const char* name) {
        std::ofstream out(fs::path(out_dir) / name);
        if (!out) {
            throw std::runtime_error(std::string("cannot write ") + name + " in " + out_dir);
        }
        return out;
    };
    auto coordinates = [](const ExperimentCell& cell) {
        std::string row = shortest(cell.window_size_s);
        row += ',';
        row += to_string(cell.mode);
        row += ',';
        row += to_string(cell.feature_set);
        row += ',';
        row += to_string(cell.classifier);
        row += ',';
        row += to_string(cell.cv.scheme);
        return row;
    };

    auto summary = open("summary.csv");
    summary << "window_size_s,mode,feature_set,classifier,cv_scheme,"
               "mean_f1,std_f1,n_windows\n";
    for (const auto& cell : cells) {
        summary << coordinates(cell) << ',' << shortest(cell.eval.mean_f1) << ','
                << shortest(cell.eval.std_f1) << ',' << cell.n_windows << "\n";
    }

    auto per_fold = open("per_fold.csv");
    per_fold << "window_size_s,mode,feature_set,classifier,cv_scheme,fold,f1\n";
    for (const auto& cell : cells) {
        for (std::size_t f = 0; f < cell.eval.per_fold_f1.size(); ++f) {
            per_fold << coordinates(cell) << ',' << f << ','
                     << shortest(cell.eval.per_fold_f1[f]) << "\n";
        }
    }

    auto timings = open("timings.csv");
    timings << "window_size_s,mode,feature_set,classifier,cv_scheme,wall_time_s\n";
    for (const auto& cell : cells) {
        timings << coordinates(cell) << ',' << shortest(cell.wall_time_s) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Config files

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::istringstream in(value);
    std::string item;
    while (in >> item) items.push_back(item);
    return items;
}

double to_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key " + key + ": bad number '" + value + "'");
    }
}

std::uint64_t to_u64(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key " + key + ": bad integer '" + value + "'");
    }
}

}  // namespace

bool ConfigFile::has(const std::string& key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return true;
    }
    return false;
}

std::string ConfigFile::get(const std::string& key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return v;
    }
    throw std::invalid_argument("config key missing: " + key);
}

std::string ConfigFile::get_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
}

ConfigFile parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config: " + path);
    }
    ConfigFile file;
    std::string section;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": empty key");
        }
        file.entries.emplace_back(section.empty() ? key : section + "." + key, value);
    }
    return file;
}

SynthConfig synth_config_from_file(const ConfigFile& file, std::uint64_t run_seed) {
    SynthConfig synth;
    synth.n_subjects = to_u64(file.get_or("synth.subjects", "12"), "synth.subjects");
    synth.n_activities = to_u64(file.get_or("synth.activities", "8"), "synth.activities");
    synth.segments_per_activity =
        to_u64(file.get_or("synth.segments_per_activity", "2"), "synth.segments_per_activity");
    synth.segment_len_samples =
        to_u64(file.get_or("synth.segment_len_samples", "208"), "synth.segment_len_samples");
    synth.n_channels = to_u64(file.get_or("synth.channels", "3"), "synth.channels");
    synth.subject_sigma =
        to_double(file.get_or("synth.subject_sigma", "2"), "synth.subject_sigma");
    synth.noise_sigma = to_double(file.get_or("synth.noise_sigma", "1"), "synth.noise_sigma");
    synth.smoothness = to_double(file.get_or("synth.smoothness", "0.9"), "synth.smoothness");
    synth.sampling_rate_hz =
        to_double(file.get_or("synth.sampling_rate_hz", "50"), "synth.sampling_rate_hz");
    if (file.has("synth.seed")) {
        synth.seed = to_u64(file.get("synth.seed"), "synth.seed");
    } else {
        const char tag[] = "synth";
        synth.seed = run_seed ^ fnv1a64(tag, sizeof(tag) - 1);
    }
    return synth;
}

GridConfig grid_config_from_file(const std::string& path) {
    const ConfigFile file = parse_config_file(path);
    GridConfig cfg;

    cfg.seed = to_u64(file.get_or("grid.seed", "42"), "grid.seed");
    cfg.threads = to_u64(file.get_or("grid.threads", "0"), "grid.threads");
    cfg.overlap_step_s =
        to_double(file.get_or("grid.overlap_step_s", "0.2"), "grid.overlap_step_s");

    const std::string default_sizes =
        "0.25 0.5 0.75 1 1.5 2 2.5 3 3.5 4 4.5 5 5.5 6 6.5 7";
    for (const auto& item : split_list(file.get_or("grid.window_sizes_s", default_sizes))) {
        cfg.window_sizes_s.push_back(to_double(item, "grid.window_sizes_s"));
    }
    for (const auto& item :
         split_list(file.get_or("grid.modes", "nonoverlap overlap"))) {
        cfg.modes.push_back(window_mode_from_string(item));
    }
    for (const auto& item :
         split_list(file.get_or("grid.feature_sets", "FS1 FS2 FS3"))) {
        cfg.feature_sets.push_back(feature_set_from_string(item));
    }
    for (const auto& item :
         split_list(file.get_or("grid.classifiers", "KNN DT NB NCC"))) {
        cfg.classifiers.push_back(classifier_from_string(item));
    }
    const auto kfold_k = to_u64(file.get_or("grid.kfold_k", "10"), "grid.kfold_k");
    for (const auto& item : split_list(file.get_or("grid.cv_schemes", "kfold subject"))) {
        cfg.cv_schemes.push_back({scheme_from_string(item), kfold_k});
    }

    cfg.classifier_params.knn_k =
        to_u64(file.get_or("classifier.knn_k", "3"), "classifier.knn_k");
    const auto max_depth =
        to_u64(file.get_or("classifier.dt_max_depth", "0"), "classifier.dt_max_depth");
    if (max_depth > 0) cfg.classifier_params.dt_max_depth = max_depth;
    cfg.classifier_params.dt_min_leaf =
        to_u64(file.get_or("classifier.dt_min_leaf", "1"), "classifier.dt_min_leaf");
    cfg.classifier_params.nb_var_smoothing = to_double(
        file.get_or("classifier.nb_var_smoothing", "1e-9"), "classifier.nb_var_smoothing");

    const bool has_synth =
        std::any_of(file.entries.begin(), file.entries.end(),
                    [](const auto& kv) { return kv.first.rfind("synth.", 0) == 0; });
    if (file.has("data.manifest") && has_synth) {
        throw std::invalid_argument(path +
                                    ": config has both data.manifest and a [synth] section");
    }
    if (file.has("data.manifest")) {
        std::filesystem::path manifest(file.get("data.manifest"));
        if (manifest.is_relative()) {
            manifest = std::filesystem::path(path).parent_path() / manifest;
        }
        cfg.manifest_path = manifest.string();
        for (const auto& item : split_list(file.get_or("data.columns", "0 1 2"))) {
            cfg.load_options.selection.columns.push_back(to_u64(item, "data.columns"));
        }
        cfg.load_options.label_column =
            to_u64(file.get_or("data.label_column", "3"), "data.label_column");
        cfg.load_options.sampling_rate_hz =
            to_double(file.get_or("data.sampling_rate_hz", "50"), "data.sampling_rate_hz");
        if (file.has("data.time_column")) {
            cfg.load_options.time_column = to_u64(file.get("data.time_column"), "data.time_column");
        }
    } else if (has_synth) {
        cfg.synth = synth_config_from_file(file, cfg.seed);
    } else {
        throw std::invalid_argument(path + ": config needs data.manifest or a [synth] section");
    }
    return cfg;
}

}  // namespace arp
