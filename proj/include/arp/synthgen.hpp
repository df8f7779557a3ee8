#pragma once

#include <cstdint>
#include <string>

#include "arp/dataset.hpp"

namespace arp {

// Multi-subject activity data with two controllable dependence sources:
// a per-subject per-channel constant offset (subject_sigma) and AR(1)
// temporal correlation in the per-sample noise (smoothness). With both at
// zero the samples are i.i.d. around their activity means.
struct SynthConfig {
    std::size_t n_subjects = 2;
    std::size_t n_activities = 2;
    std::size_t segments_per_activity = 1;
    std::size_t segment_len_samples = 100;
    std::size_t n_channels = 3;
    double subject_sigma = 0.0;  // offset scale, >= 0
    double noise_sigma = 1.0;    // per-sample noise scale, > 0
    double smoothness = 0.0;     // AR(1) coefficient, in [0, 1)
    double sampling_rate_hz = 50.0;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t total_samples() const {
        return n_subjects * n_activities * segments_per_activity * segment_len_samples;
    }

    // Smallest digit base whose n_channels-digit patterns cover all
    // activities (see activity_channel_mean).
    std::size_t mean_grid_base() const;
};

// Channel mean for one activity: channel c holds 2x the c-th digit of
// (label - 1) written in the given base, so the activity means occupy
// distinct points of a lattice with 2-unit spacing and any two activities
// differ by at least 2 in some channel. Class separability is controlled
// by noise_sigma alone. Channels beyond the digits needed for
// n_activities have a constant zero mean: they carry the subject offset
// and noise but no activity signal, i.e. subject identity with no class
// content, which is precisely the ingredient k-fold CV can exploit and
// subject CV cannot.
double activity_channel_mean(int activity_label, std::size_t channel, std::size_t base);

// One recording per subject ("s01", "s02", ...). Each recording holds the
// activities in label order (1..n_activities), each as
// segments_per_activity back-to-back segments of segment_len_samples
// samples x_t = activity_mean + subject_offset + e_t, where
// e_t = smoothness * e_{t-1} + Normal(0, noise_sigma^2) runs across the
// whole recording. Identical configs generate identical datasets.
Dataset generate(const SynthConfig& cfg);

// Writes one raw sensor log per subject plus a manifest.txt, in the layout
// load_dataset_from_manifest_file reads back (channels 0..C-1, label in
// column C).
void write_dataset_raw(const Dataset& dataset, const std::string& directory);

}  // namespace arp
