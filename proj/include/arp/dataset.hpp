#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace arp {

// Which raw-file columns become sample channels. Order matters: it fixes
// the channel order everywhere downstream, including feature layout.
struct ChannelSelection {
    std::vector<std::size_t> columns;
    std::vector<std::string> names;  // optional, parallel to columns

    void validate() const;
};

// Activity id 0 is reserved for the null/unlabeled class.
struct Sample {
    double t = 0.0;  // seconds from recording start
    std::vector<double> values;
    int label = 0;
};

struct SubjectRecording {
    std::string subject_id;
    double sampling_rate_hz = 50.0;
    std::vector<Sample> samples;

    std::size_t channel_count() const {
        return samples.empty() ? 0 : samples.front().values.size();
    }
};

struct Dataset {
    std::vector<SubjectRecording> recordings;

    const SubjectRecording* find(const std::string& subject_id) const;
};

struct LoadOptions {
    ChannelSelection selection;
    std::size_t label_column = 0;
    double sampling_rate_hz = 50.0;
    // When set, t is read from this column; otherwise t = row / rate.
    std::optional<std::size_t> time_column;
};

// Raw sensor log: whitespace-delimited numeric columns, one sample per row,
// LF or CRLF endings. Labels parse as non-negative integers. Errors cite
// the 1-based line number. Non-finite values in selected columns are errors.
SubjectRecording load_recording(const std::string& path,
                                const std::string& subject_id,
                                const LoadOptions& options);

// Manifest entries in declaration order; subject ids must be unique.
struct ManifestEntry {
    std::string subject_id;
    std::string path;
};

// Manifest file: one `subject_id <whitespace> path` per line, `#` comments
// and blank lines ignored. Relative paths resolve against the manifest's
// own directory.
std::vector<ManifestEntry> read_manifest(const std::string& path);

Dataset load_dataset(const std::vector<ManifestEntry>& manifest,
                     const LoadOptions& options);

Dataset load_dataset_from_manifest_file(const std::string& manifest_path,
                                        const LoadOptions& options);

// Writes channels in sample order followed by the label as the last column,
// the layout load_recording reads back with selection = [0..C) and
// label_column = C. Values are printed shortest-round-trip, so reloading
// reproduces them bit-exactly.
void write_recording_raw(const SubjectRecording& recording,
                         const std::string& path);

}  // namespace arp
