#include "arp/synthgen.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "arp/rng.hpp"

namespace arp {

void SynthConfig::validate() const {
    if (n_subjects < 2) throw std::invalid_argument("synth: need at least 2 subjects");
    if (n_activities < 2) throw std::invalid_argument("synth: need at least 2 activities");
    if (segments_per_activity < 1) {
        throw std::invalid_argument("synth: segments_per_activity must be positive");
    }
    if (segment_len_samples < 1) {
        throw std::invalid_argument("synth: segment_len_samples must be positive");
    }
    if (n_channels < 1) throw std::invalid_argument("synth: n_channels must be positive");
    if (subject_sigma < 0.0) throw std::invalid_argument("synth: subject_sigma must be >= 0");
    if (noise_sigma <= 0.0) throw std::invalid_argument("synth: noise_sigma must be > 0");
    if (smoothness < 0.0 || smoothness >= 1.0) {
        throw std::invalid_argument("synth: smoothness must lie in [0, 1)");
    }
    if (sampling_rate_hz <= 0.0) {
        throw std::invalid_argument("synth: sampling rate must be positive");
    }
}

std::size_t SynthConfig::mean_grid_base() const {
    std::size_t base = 2;
    auto covers = [&](std::size_t b) {
        std::size_t capacity = 1;
        for (std::size_t c = 0; c < n_channels; ++c) {
            if (capacity >= n_activities) return true;
            capacity *= b;
        }
        return capacity >= n_activities;
    };
    while (!covers(base)) ++base;
    return base;
}

double activity_channel_mean(int activity_label, std::size_t channel, std::size_t base) {
    std::size_t index = static_cast<std::size_t>(activity_label - 1);
    for (std::size_t c = 0; c < channel; ++c) index /= base;
    return 2.0 * static_cast<double>(index % base);
}

namespace {

std::string subject_name(std::size_t index) {
    std::string id = std::to_string(index + 1);
    if (id.size() < 2) id.insert(id.begin(), '0');
    return "s" + id;
}

}  // namespace

Dataset generate(const SynthConfig& cfg) {
    cfg.validate();
    SplitMix64 rng(cfg.seed);
    const std::size_t grid_base = cfg.mean_grid_base();

    Dataset ds;
    ds.recordings.reserve(cfg.n_subjects);
    for (std::size_t s = 0; s < cfg.n_subjects; ++s) {
        SubjectRecording rec;
        rec.subject_id = subject_name(s);
        rec.sampling_rate_hz = cfg.sampling_rate_hz;
        rec.samples.reserve(cfg.n_activities * cfg.segments_per_activity *
                            cfg.segment_len_samples);

        std::vector<double> offset(cfg.n_channels);
        for (double& b : offset) b = cfg.subject_sigma * rng.next_gaussian();

        std::vector<double> ar_state(cfg.n_channels, 0.0);
        std::size_t row = 0;
        for (std::size_t a = 0; a < cfg.n_activities; ++a) {
            const int label = static_cast<int>(a) + 1;
            for (std::size_t seg = 0; seg < cfg.segments_per_activity; ++seg) {
                for (std::size_t t = 0; t < cfg.segment_len_samples; ++t) {
                    Sample sample;
                    sample.t = static_cast<double>(row) / cfg.sampling_rate_hz;
                    sample.label = label;
                    sample.values.resize(cfg.n_channels);
                    for (std::size_t c = 0; c < cfg.n_channels; ++c) {
                        ar_state[c] = cfg.smoothness * ar_state[c] +
                                      cfg.noise_sigma * rng.next_gaussian();
                        sample.values[c] = activity_channel_mean(label, c, grid_base) +
                                           offset[c] + ar_state[c];
                    }
                    rec.samples.push_back(std::move(sample));
                    ++row;
                }
            }
        }
        ds.recordings.push_back(std::move(rec));
    }
    return ds;
}

void write_dataset_raw(const Dataset& dataset, const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);

    std::ofstream manifest(fs::path(directory) / "manifest.txt");
    if (!manifest) {
        throw std::runtime_error("cannot write manifest in " + directory);
    }
    manifest << "# subject_id path\n";
    for (const auto& rec : dataset.recordings) {
        const std::string file = rec.subject_id + ".txt";
        write_recording_raw(rec, (fs::path(directory) / file).string());
        manifest << rec.subject_id << ' ' << file << '\n';
    }
    if (!manifest) {
        throw std::runtime_error("manifest write failed in " + directory);
    }
}

}  // namespace arp
