#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "arp/dataset.hpp"
#include "arp/segmentation.hpp"

namespace arp {

// Per-channel statistics, in fixed order:
//   FS1: mean
//   FS2: mean, std
//   FS3: mean, std, max, min, mean crossing rate
// Stds are population form (divide by n). Features are laid out
// channel-major, so FS1 vectors are a prefix projection of FS2, and FS2
// of FS3, once columns are grouped per channel.
enum class FeatureSet { FS1, FS2, FS3 };

std::size_t stats_per_channel(FeatureSet fs);
const char* to_string(FeatureSet fs);
FeatureSet feature_set_from_string(const std::string& name);

// Fraction of consecutive sample pairs lying on opposite strict sides of
// the series mean: c / (n - 1). Values equal to the mean never cross.
double mean_crossing_rate(std::span<const double> series);

// Row-major labeled feature rows. Subject ids are interned; labels are
// positive activity ids.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    explicit FeatureMatrix(std::size_t width) : width_(width) {}

    void add_row(const std::string& subject, int label, std::vector<double> features);

    std::size_t rows() const { return labels_.size(); }
    std::size_t width() const { return width_; }
    bool empty() const { return labels_.empty(); }

    std::span<const double> row(std::size_t i) const& {
        return {values_.data() + i * width_, width_};
    }
    std::span<const double> row(std::size_t i) const&& = delete;  // spans must not dangle
    int label(std::size_t i) const { return labels_[i]; }
    const std::string& subject(std::size_t i) const { return subjects_[subject_idx_[i]]; }

    const std::vector<int>& labels() const { return labels_; }
    std::vector<std::string> subject_per_row() const;

    // New matrix holding the given rows, in the given order.
    FeatureMatrix select(const std::vector<std::size_t>& indices) const;

private:
    std::size_t width_ = 0;
    std::vector<double> values_;
    std::vector<int> labels_;
    std::vector<std::uint32_t> subject_idx_;
    std::vector<std::string> subjects_;  // distinct ids, first-appearance order
};

// One row per window, channel-major feature layout, subject and label
// carried through. Windows must cover at least 2 samples for FS2/FS3.
FeatureMatrix extract_features(const std::vector<Window>& windows,
                               const Dataset& source,
                               FeatureSet fs);

// CSV dump: header `subject,label,f0..f{w-1}`.
void write_feature_csv(const FeatureMatrix& matrix, const std::string& path);

}  // namespace arp
