#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "arp/classifiers.hpp"
#include "arp/features.hpp"

namespace arp {

enum class CvScheme { KFOLD, SUBJECT };

const char* to_string(CvScheme scheme);
CvScheme scheme_from_string(const std::string& name);

struct Fold {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

// Per fold, train and test are disjoint; test sets partition all rows.
// SUBJECT plans additionally never share a subject between train and test.
struct FoldPlan {
    CvScheme scheme = CvScheme::KFOLD;
    std::vector<Fold> folds;
};

// Rows are shuffled by a seeded SplitMix64 Fisher-Yates pass, then cut into
// k chunks whose sizes differ by at most one (the first n mod k chunks get
// the extra row). Fold i tests chunk i and trains on the rest. Identical
// (n_rows, k, seed) always produce the identical plan.
FoldPlan kfold_plan(std::size_t n_rows, std::size_t k, std::uint64_t seed);

// Leave-one-subject-out: one fold per distinct subject, ordered by first
// appearance; fold s tests exactly the rows of subject s.
FoldPlan subject_plan(const std::vector<std::string>& subject_per_row);

class ConfusionMatrix {
public:
    void record(int true_label, int predicted_label) {
        ++counts_[{true_label, predicted_label}];
        ++total_;
    }

    std::size_t total() const { return total_; }
    std::size_t diagonal() const;
    const std::map<std::pair<int, int>, std::size_t>& counts() const { return counts_; }

private:
    std::map<std::pair<int, int>, std::size_t> counts_;
    std::size_t total_ = 0;
};

// Micro-averaged F1 over pooled counts. With exactly one prediction per
// row, FP and FN both equal total - TP, so precision, recall, and F1 all
// collapse to TP / total.
double micro_f1(const ConfusionMatrix& cm);

// mean_f1/std_f1 aggregate the per-fold scores (unweighted mean,
// population std). pooled_f1 instead pools every prediction into one
// confusion matrix before scoring; the two differ when fold sizes do.
struct EvalResult {
    std::vector<double> per_fold_f1;
    double mean_f1 = 0.0;
    double std_f1 = 0.0;  // population form
    double pooled_f1 = 0.0;
};

EvalResult summarize_folds(const std::vector<double>& per_fold_f1);

// Fit on each fold's train rows, predict its test rows, score micro-F1.
// A single-class training fold is fine; an empty train or test set is not.
EvalResult cross_validate(const FeatureMatrix& matrix, const FoldPlan& plan,
                          const ClassifierSpec& spec);

// Per-fold results CSV: `fold,scheme,f1`.
void write_per_fold_csv(const EvalResult& result, CvScheme scheme,
                        const std::string& path);

}  // namespace arp
