#include "arp/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace arp {

std::size_t stats_per_channel(FeatureSet fs) {
    switch (fs) {
        case FeatureSet::FS1: return 1;
        case FeatureSet::FS2: return 2;
        case FeatureSet::FS3: return 5;
    }
    throw std::logic_error("unknown feature set");
}

const char* to_string(FeatureSet fs) {
    switch (fs) {
        case FeatureSet::FS1: return "FS1";
        case FeatureSet::FS2: return "FS2";
        case FeatureSet::FS3: return "FS3";
    }
    throw std::logic_error("unknown feature set");
}

FeatureSet feature_set_from_string(const std::string& name) {
    if (name == "FS1") return FeatureSet::FS1;
    if (name == "FS2") return FeatureSet::FS2;
    if (name == "FS3") return FeatureSet::FS3;
    throw std::invalid_argument("unknown feature set: " + name);
}

double mean_crossing_rate(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 2) {
        throw std::invalid_argument("mean_crossing_rate needs at least 2 samples");
    }
    double sum = 0.0;
    for (double v : series) sum += v;
    const double mean = sum / static_cast<double>(n);

    std::size_t crossings = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if ((series[i - 1] - mean) * (series[i] - mean) < 0.0) ++crossings;
    }
    return static_cast<double>(crossings) / static_cast<double>(n - 1);
}

void FeatureMatrix::add_row(const std::string& subject, int label,
                            std::vector<double> features) {
    if (features.size() != width_) {
        throw std::invalid_argument("feature row width mismatch");
    }
    auto it = std::find(subjects_.begin(), subjects_.end(), subject);
    if (it == subjects_.end()) {
        subjects_.push_back(subject);
        it = std::prev(subjects_.end());
    }
    subject_idx_.push_back(static_cast<std::uint32_t>(it - subjects_.begin()));
    labels_.push_back(label);
    values_.insert(values_.end(), features.begin(), features.end());
}

std::vector<std::string> FeatureMatrix::subject_per_row() const {
    std::vector<std::string> out;
    out.reserve(rows());
    for (std::size_t i = 0; i < rows(); ++i) out.push_back(subject(i));
    return out;
}

FeatureMatrix FeatureMatrix::select(const std::vector<std::size_t>& indices) const {
    FeatureMatrix out(width_);
    for (std::size_t i : indices) {
        if (i >= rows()) throw std::out_of_range("row index out of range");
        auto r = row(i);
        out.add_row(subject(i), label(i), std::vector<double>(r.begin(), r.end()));
    }
    return out;
}

namespace {

void channel_stats(const Window& win, const SubjectRecording& rec,
                   std::size_t channel, FeatureSet fs,
                   std::vector<double>& out, std::vector<double>& scratch) {
    scratch.clear();
    for (std::size_t i = 0; i < win.length; ++i) {
        scratch.push_back(rec.samples[win.start_index + i].values[channel]);
    }
    double sum = 0.0;
    double lo = scratch.front();
    double hi = scratch.front();
    for (double v : scratch) {
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double n = static_cast<double>(scratch.size());
    const double mean = sum / n;

    out.push_back(mean);
    if (fs == FeatureSet::FS1) return;

    double sq = 0.0;
    for (double v : scratch) {
        const double d = v - mean;
        sq += d * d;
    }
    out.push_back(std::sqrt(sq / n));
    if (fs == FeatureSet::FS2) return;

    out.push_back(hi);
    out.push_back(lo);
    out.push_back(mean_crossing_rate(scratch));
}

}  // namespace

FeatureMatrix extract_features(const std::vector<Window>& windows,
                               const Dataset& source, FeatureSet fs) {
    const std::size_t per_channel = stats_per_channel(fs);
    const SubjectRecording* rec = nullptr;

    FeatureMatrix matrix;
    std::vector<double> scratch;
    for (const auto& win : windows) {
        if (rec == nullptr || rec->subject_id != win.subject_id) {
            rec = source.find(win.subject_id);
            if (rec == nullptr) {
                throw std::invalid_argument("window references unknown subject: " +
                                            win.subject_id);
            }
        }
        if (win.start_index + win.length > rec->samples.size()) {
            throw std::out_of_range("window exceeds recording length for subject " +
                                    win.subject_id);
        }
        if (win.length == 0 || (per_channel > 1 && win.length < 2)) {
            throw std::invalid_argument("window too short for requested statistics");
        }
        if (win.label <= 0) {
            throw std::invalid_argument("null-labeled window in feature extraction");
        }

        const std::size_t channels = rec->channel_count();
        if (matrix.width() == 0 && matrix.rows() == 0) {
            matrix = FeatureMatrix(channels * per_channel);
        }
        std::vector<double> features;
        features.reserve(channels * per_channel);
        for (std::size_t c = 0; c < channels; ++c) {
            channel_stats(win, *rec, c, fs, features, scratch);
        }
        for (double f : features) {
            if (!std::isfinite(f)) {
                throw std::runtime_error("non-finite feature for subject " + win.subject_id);
            }
        }
        matrix.add_row(win.subject_id, win.label, std::move(features));
    }
    return matrix;
}

void write_feature_csv(const FeatureMatrix& matrix, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write feature CSV: " + path);
    }
    out << "subject,label";
    for (std::size_t f = 0; f < matrix.width(); ++f) out << ",f" << f;
    out << "\n";

    char buf[64];
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        out << matrix.subject(i) << ',' << matrix.label(i);
        for (double v : matrix.row(i)) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
            if (ec != std::errc()) throw std::runtime_error("value formatting failed");
            out << ',';
            out.write(buf, ptr - buf);
        }
        out << "\n";
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

}  // namespace arp
