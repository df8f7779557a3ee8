#include "arp/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "arp/rng.hpp"

namespace arp {

const char* to_string(CvScheme scheme) {
    switch (scheme) {
        case CvScheme::KFOLD: return "kfold";
        case CvScheme::SUBJECT: return "subject";
    }
    throw std::logic_error("unknown CV scheme");
}

CvScheme scheme_from_string(const std::string& name) {
    if (name == "kfold") return CvScheme::KFOLD;
    if (name == "subject") return CvScheme::SUBJECT;
    throw std::invalid_argument("unknown CV scheme: " + name);
}

FoldPlan kfold_plan(std::size_t n_rows, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold_plan: k must be >= 2");
    if (k > n_rows) {
        throw std::invalid_argument("kfold_plan: k (" + std::to_string(k) +
                                    ") exceeds row count (" + std::to_string(n_rows) + ")");
    }

    std::vector<std::size_t> order(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) order[i] = i;
    SplitMix64 rng(seed);
    shuffle(order, rng);

    FoldPlan plan;
    plan.scheme = CvScheme::KFOLD;
    plan.folds.resize(k);

    const std::size_t base = n_rows / k;
    const std::size_t extra = n_rows % k;
    std::size_t cursor = 0;
    std::vector<std::pair<std::size_t, std::size_t>> chunks(k);  // [begin, end)
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t size = base + (i < extra ? 1 : 0);
        chunks[i] = {cursor, cursor + size};
        cursor += size;
    }

    for (std::size_t i = 0; i < k; ++i) {
        auto& fold = plan.folds[i];
        fold.test_indices.assign(order.begin() + chunks[i].first,
                                 order.begin() + chunks[i].second);
        fold.train_indices.reserve(n_rows - fold.test_indices.size());
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            fold.train_indices.insert(fold.train_indices.end(),
                                      order.begin() + chunks[j].first,
                                      order.begin() + chunks[j].second);
        }
    }
    return plan;
}

FoldPlan subject_plan(const std::vector<std::string>& subject_per_row) {
    std::vector<std::string> subjects;  // first-appearance order
    for (const auto& s : subject_per_row) {
        if (std::find(subjects.begin(), subjects.end(), s) == subjects.end()) {
            subjects.push_back(s);
        }
    }
    if (subjects.size() < 2) {
        throw std::invalid_argument("subject_plan: need at least 2 distinct subjects");
    }

    FoldPlan plan;
    plan.scheme = CvScheme::SUBJECT;
    plan.folds.resize(subjects.size());
    for (std::size_t f = 0; f < subjects.size(); ++f) {
        for (std::size_t row = 0; row < subject_per_row.size(); ++row) {
            if (subject_per_row[row] == subjects[f]) {
                plan.folds[f].test_indices.push_back(row);
            } else {
                plan.folds[f].train_indices.push_back(row);
            }
        }
    }
    return plan;
}

std::size_t ConfusionMatrix::diagonal() const {
    std::size_t sum = 0;
    for (const auto& [key, count] : counts_) {
        if (key.first == key.second) sum += count;
    }
    return sum;
}

double micro_f1(const ConfusionMatrix& cm) {
    if (cm.total() == 0) {
        throw std::invalid_argument("micro_f1: empty confusion matrix");
    }
    return static_cast<double>(cm.diagonal()) / static_cast<double>(cm.total());
}

EvalResult summarize_folds(const std::vector<double>& per_fold_f1) {
    if (per_fold_f1.empty()) {
        throw std::invalid_argument("summarize_folds: no folds");
    }
    EvalResult result;
    result.per_fold_f1 = per_fold_f1;
    double sum = 0.0;
    for (double f1 : per_fold_f1) sum += f1;
    result.mean_f1 = sum / static_cast<double>(per_fold_f1.size());
    double sq = 0.0;
    for (double f1 : per_fold_f1) {
        const double d = f1 - result.mean_f1;
        sq += d * d;
    }
    result.std_f1 = std::sqrt(sq / static_cast<double>(per_fold_f1.size()));
    return result;
}

EvalResult cross_validate(const FeatureMatrix& matrix, const FoldPlan& plan,
                          const ClassifierSpec& spec) {
    if (plan.folds.empty()) {
        throw std::invalid_argument("cross_validate: empty fold plan");
    }
    std::vector<double> per_fold;
    per_fold.reserve(plan.folds.size());
    ConfusionMatrix pooled;
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        const auto& fold = plan.folds[f];
        if (fold.train_indices.empty() || fold.test_indices.empty()) {
            throw std::invalid_argument("cross_validate: fold " + std::to_string(f) +
                                        " has an empty train or test set");
        }
        const FeatureMatrix train = matrix.select(fold.train_indices);
        const FeatureMatrix test = matrix.select(fold.test_indices);
        const auto model = fit(train, spec);
        const auto predictions = model->predict(test);

        ConfusionMatrix cm;
        for (std::size_t i = 0; i < test.rows(); ++i) {
            cm.record(test.label(i), predictions[i]);
            pooled.record(test.label(i), predictions[i]);
        }
        per_fold.push_back(micro_f1(cm));
    }
    EvalResult result = summarize_folds(per_fold);
    result.pooled_f1 = micro_f1(pooled);
    return result;
}

void write_per_fold_csv(const EvalResult& result, CvScheme scheme,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write per-fold CSV: " + path);
    }
    out << "fold,scheme,f1\n";
    char buf[64];
    for (std::size_t f = 0; f < result.per_fold_f1.size(); ++f) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), result.per_fold_f1[f]);
        if (ec != std::errc()) throw std::runtime_error("value formatting failed");
        out << f << ',' << to_string(scheme) << ',';
        out.write(buf, ptr - buf);
        out << "\n";
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

}  // namespace arp
