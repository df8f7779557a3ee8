#pragma once

#include <cstddef>
#include <vector>

#include "arp/dataset.hpp"

namespace arp {

// step_s == size_s is non-overlapping tiling; step_s < size_s slides.
struct WindowSpec {
    double size_s = 1.0;
    double step_s = 1.0;

    static WindowSpec non_overlapping(double size_s) { return {size_s, size_s}; }
    static WindowSpec overlapping(double size_s, double step_s) { return {size_s, step_s}; }

    bool overlapping_mode() const { return step_s < size_s; }
};

// Seconds-to-samples conversion used everywhere: round half up.
// 0.25 s at 50 Hz is 12.5 and becomes 13 samples.
std::size_t seconds_to_samples(double seconds, double sampling_rate_hz);

struct Window {
    std::string subject_id;
    std::size_t start_index = 0;
    std::size_t length = 0;
    int label = 0;
};

// Majority label of the covered samples. Ties go to the smallest label id,
// except that the null class (0) only wins an outright majority; callers
// discard null-labeled windows.
int window_label(const std::vector<int>& labels);

struct SegmentOptions {
    bool keep_null_windows = false;
};

// Fixed-size windows at starts 0, step, 2*step, ... with start + w <= N.
// Trailing partial windows are dropped. Windows whose majority label is the
// null class are dropped unless keep_null_windows is set.
std::vector<Window> segment(const SubjectRecording& recording,
                            const WindowSpec& spec,
                            const SegmentOptions& options = {});

// Pre-filter window count: floor((N - w) / step) + 1 for N >= w, else 0.
std::size_t window_count(std::size_t n_samples, std::size_t window_samples,
                         std::size_t step_samples);

std::vector<Window> segment_dataset(const Dataset& dataset,
                                    const WindowSpec& spec,
                                    const SegmentOptions& options = {});

}  // namespace arp
