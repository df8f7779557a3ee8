#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arp/features.hpp"

namespace arp {

enum class ClassifierKind { KNN, DT, NB, NCC };

const char* to_string(ClassifierKind kind);
ClassifierKind classifier_from_string(const std::string& name);

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::KNN;
    std::size_t knn_k = 3;
    std::optional<std::size_t> dt_max_depth;  // unlimited when unset
    std::size_t dt_min_leaf = 1;
    // Added to every per-class variance, scaled by the largest per-feature
    // variance of the training data.
    double nb_var_smoothing = 1e-9;
};

// Immutable after fit; concurrent predict calls are safe.
class Model {
public:
    virtual ~Model() = default;
    virtual std::vector<int> predict(const FeatureMatrix& rows) const = 0;
    virtual std::size_t width() const = 0;
};

// Tie rules, applied everywhere a tie can occur so that results are
// deterministic and match the brute-force references in the test suite:
//   - KNN neighbor selection orders by (distance, training row index);
//     vote ties go to the smallest label id.
//   - NCC / NB score ties go to the smallest label id.
//   - DT splits minimize the canonical cost below; equal-cost splits go to
//     the lowest feature index, then the lowest threshold. Leaf ties go to
//     the smallest label id.
std::unique_ptr<Model> fit(const FeatureMatrix& train, const ClassifierSpec& spec);

class KnnModel final : public Model {
public:
    KnnModel(const FeatureMatrix& train, std::size_t k);
    std::vector<int> predict(const FeatureMatrix& rows) const override;
    std::size_t width() const override { return width_; }

private:
    std::size_t width_;
    std::size_t k_;
    std::vector<double> values_;  // row-major training rows
    std::vector<int> labels_;
};

class NearestCentroidModel final : public Model {
public:
    explicit NearestCentroidModel(const FeatureMatrix& train);
    std::vector<int> predict(const FeatureMatrix& rows) const override;
    std::size_t width() const override { return width_; }

    const std::map<int, std::vector<double>>& centroids() const { return centroids_; }

private:
    std::size_t width_;
    std::map<int, std::vector<double>> centroids_;  // label -> mean vector
};

class GaussianNbModel final : public Model {
public:
    GaussianNbModel(const FeatureMatrix& train, double var_smoothing);
    std::vector<int> predict(const FeatureMatrix& rows) const override;
    std::size_t width() const override { return width_; }

    double smoothing_applied() const { return epsilon_; }

private:
    struct ClassParams {
        int label;
        double log_prior;
        std::vector<double> mean;
        std::vector<double> variance;  // smoothed, strictly positive
    };
    std::size_t width_;
    double epsilon_;
    std::vector<ClassParams> classes_;  // ascending label order
};

// CART-style binary tree: Gini impurity, midpoint thresholds, rows with
// feature value <= threshold go left. Zero-gain splits are taken as long
// as they separate distinct feature values, so growth continues until
// leaves are pure or indivisible.
class DecisionTreeModel final : public Model {
public:
    DecisionTreeModel(const FeatureMatrix& train,
                      std::optional<std::size_t> max_depth,
                      std::size_t min_leaf);
    std::vector<int> predict(const FeatureMatrix& rows) const override;
    std::size_t width() const override { return width_; }

    std::size_t depth() const;       // leaf-only tree has depth 0
    std::size_t node_count() const { return nodes_.size(); }

    // Canonical split cost: sum over children of n_c * gini(child), times n,
    // written so that identical integer inputs give bit-identical doubles.
    // sq is the sum over labels of squared class counts inside the child.
    static double split_cost(std::int64_t n_left, std::int64_t sq_left,
                             std::int64_t n_right, std::int64_t sq_right) {
        return (static_cast<double>(n_left) -
                static_cast<double>(sq_left) / static_cast<double>(n_left)) +
               (static_cast<double>(n_right) -
                static_cast<double>(sq_right) / static_cast<double>(n_right));
    }

private:
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        int leaf_label = -1;  // valid when feature < 0
    };

    std::int32_t build(const FeatureMatrix& train, std::vector<std::size_t>& rows,
                       std::size_t depth);

    std::size_t width_ = 0;
    std::optional<std::size_t> max_depth_;
    std::size_t min_leaf_ = 1;
    std::vector<Node> nodes_;
    std::vector<int> class_labels_;  // ascending
};

}  // namespace arp
