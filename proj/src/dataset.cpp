#include "arp/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace arp {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

double parse_double(std::string_view token, const std::string& path, std::size_t line_no) {
    double value = 0.0;
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": not a number: '" + std::string(token) + "'");
    }
    return value;
}

int parse_label(std::string_view token, const std::string& path, std::size_t line_no) {
    // Accept "3" and "3.0"-style labels; anything non-integral is an error.
    const double value = parse_double(token, path, line_no);
    const double rounded = std::nearbyint(value);
    if (!std::isfinite(value) || value != rounded || rounded < 0) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": invalid activity label '" + std::string(token) + "'");
    }
    return static_cast<int>(rounded);
}

}  // namespace

void ChannelSelection::validate() const {
    if (columns.empty()) {
        throw std::invalid_argument("channel selection is empty");
    }
    std::set<std::size_t> seen(columns.begin(), columns.end());
    if (seen.size() != columns.size()) {
        throw std::invalid_argument("channel selection contains duplicate columns");
    }
    if (!names.empty() && names.size() != columns.size()) {
        throw std::invalid_argument("channel names do not match selected columns");
    }
}

const SubjectRecording* Dataset::find(const std::string& subject_id) const {
    for (const auto& rec : recordings) {
        if (rec.subject_id == subject_id) return &rec;
    }
    return nullptr;
}

SubjectRecording load_recording(const std::string& path,
                                const std::string& subject_id,
                                const LoadOptions& options) {
    options.selection.validate();
    if (options.sampling_rate_hz <= 0.0) {
        throw std::invalid_argument("sampling rate must be positive");
    }

    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open sensor log: " + path);
    }

    SubjectRecording rec;
    rec.subject_id = subject_id;
    rec.sampling_rate_hz = options.sampling_rate_hz;

    std::size_t max_column = options.label_column;
    for (std::size_t c : options.selection.columns) max_column = std::max(max_column, c);
    if (options.time_column) max_column = std::max(max_column, *options.time_column);

    std::string line;
    std::size_t line_no = 0;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = split_fields(line);
        if (fields.empty()) continue;  // blank line
        if (fields.size() <= max_column) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": row has " + std::to_string(fields.size()) +
                                     " columns, need at least " + std::to_string(max_column + 1));
        }

        Sample s;
        s.values.reserve(options.selection.columns.size());
        for (std::size_t c : options.selection.columns) {
            const double v = parse_double(fields[c], path, line_no);
            if (!std::isfinite(v)) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": non-finite value in column " + std::to_string(c));
            }
            s.values.push_back(v);
        }
        s.label = parse_label(fields[options.label_column], path, line_no);
        if (options.time_column) {
            s.t = parse_double(fields[*options.time_column], path, line_no);
            if (!std::isfinite(s.t)) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": non-finite timestamp");
            }
        } else {
            s.t = static_cast<double>(row) / options.sampling_rate_hz;
        }
        if (!rec.samples.empty() && s.t < rec.samples.back().t) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": timestamps decrease");
        }
        rec.samples.push_back(std::move(s));
        ++row;
    }

    if (rec.samples.empty()) {
        throw std::runtime_error("empty sensor log: " + path);
    }
    return rec;
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open manifest: " + path);
    }
    const auto base_dir = std::filesystem::path(path).parent_path();

    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = split_fields(line);
        if (fields.empty() || fields.front().front() == '#') continue;
        if (fields.size() != 2) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 'subject_id path'");
        }
        std::filesystem::path file{std::string(fields[1])};
        if (file.is_relative()) file = base_dir / file;
        entries.push_back(ManifestEntry{std::string(fields[0]), file.string()});
    }
    return entries;
}

Dataset load_dataset(const std::vector<ManifestEntry>& manifest,
                     const LoadOptions& options) {
    if (manifest.empty()) {
        throw std::invalid_argument("manifest is empty");
    }
    std::set<std::string> seen;
    for (const auto& entry : manifest) {
        if (!seen.insert(entry.subject_id).second) {
            throw std::invalid_argument("duplicate subject id in manifest: " + entry.subject_id);
        }
    }

    Dataset ds;
    ds.recordings.reserve(manifest.size());
    for (const auto& entry : manifest) {
        try {
            ds.recordings.push_back(load_recording(entry.path, entry.subject_id, options));
        } catch (const std::exception& e) {
            throw std::runtime_error("subject '" + entry.subject_id + "': " + e.what());
        }
        if (ds.recordings.size() > 1 &&
            ds.recordings.back().channel_count() != ds.recordings.front().channel_count()) {
            throw std::runtime_error("subject '" + entry.subject_id +
                                     "': channel count differs from previous recordings");
        }
    }
    return ds;
}

Dataset load_dataset_from_manifest_file(const std::string& manifest_path,
                                        const LoadOptions& options) {
    return load_dataset(read_manifest(manifest_path), options);
}

void write_recording_raw(const SubjectRecording& recording, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write sensor log: " + path);
    }
    char buf[64];
    for (const auto& s : recording.samples) {
        std::string line;
        for (double v : s.values) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
            if (ec != std::errc()) throw std::runtime_error("value formatting failed");
            line.append(buf, ptr);
            line.push_back(' ');
        }
        line += std::to_string(s.label);
        line.push_back('\n');
        out << line;
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

}  // namespace arp
