#include "arp/segmentation.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace arp {

std::size_t seconds_to_samples(double seconds, double sampling_rate_hz) {
    if (seconds <= 0.0 || sampling_rate_hz <= 0.0) {
        throw std::invalid_argument("duration and sampling rate must be positive");
    }
    return static_cast<std::size_t>(std::floor(seconds * sampling_rate_hz + 0.5));
}

int window_label(const std::vector<int>& labels) {
    if (labels.empty()) {
        throw std::invalid_argument("window_label: empty label list");
    }
    std::map<int, std::size_t> counts;
    for (int l : labels) ++counts[l];

    std::size_t best_count = 0;
    for (const auto& [label, count] : counts) {
        best_count = std::max(best_count, count);
    }
    // Map iteration is in ascending label order, so the first label at the
    // top count is the smallest one. The null class only keeps the window's
    // label when no real activity matches its count.
    for (const auto& [label, count] : counts) {
        if (count != best_count) continue;
        if (label == 0 && counts.size() > 1) {
            continue;  // prefer a tied real activity over null
        }
        return label;
    }
    return 0;  // null held a strict majority (or was the only label)
}

std::size_t window_count(std::size_t n_samples, std::size_t window_samples,
                         std::size_t step_samples) {
    if (window_samples == 0 || step_samples == 0) {
        throw std::invalid_argument("window and step must be at least one sample");
    }
    if (n_samples < window_samples) return 0;
    return (n_samples - window_samples) / step_samples + 1;
}

std::vector<Window> segment(const SubjectRecording& recording,
                            const WindowSpec& spec,
                            const SegmentOptions& options) {
    if (spec.step_s <= 0.0 || spec.step_s > spec.size_s) {
        throw std::invalid_argument("window spec requires 0 < step_s <= size_s");
    }
    const std::size_t w = seconds_to_samples(spec.size_s, recording.sampling_rate_hz);
    const std::size_t step = seconds_to_samples(spec.step_s, recording.sampling_rate_hz);
    if (w < 1 || step < 1) {
        throw std::invalid_argument("window spec shorter than one sample at this rate");
    }

    const std::size_t n = recording.samples.size();
    std::vector<Window> windows;
    if (n < w) return windows;
    windows.reserve(window_count(n, w, step));

    std::vector<int> labels(w);
    for (std::size_t start = 0; start + w <= n; start += step) {
        for (std::size_t i = 0; i < w; ++i) {
            labels[i] = recording.samples[start + i].label;
        }
        const int label = window_label(labels);
        if (label == 0 && !options.keep_null_windows) continue;
        windows.push_back({recording.subject_id, start, w, label});
    }
    return windows;
}

std::vector<Window> segment_dataset(const Dataset& dataset,
                                    const WindowSpec& spec,
                                    const SegmentOptions& options) {
    std::vector<Window> all;
    for (const auto& rec : dataset.recordings) {
        auto windows = segment(rec, spec, options);
        all.insert(all.end(), windows.begin(), windows.end());
    }
    return all;
}

}  // namespace arp
