#include "arp/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace arp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

void check_fit_input(const FeatureMatrix& train) {
    if (train.empty()) throw std::invalid_argument("fit: empty training set");
    if (train.width() == 0) throw std::invalid_argument("fit: zero-width features");
}

void check_predict_width(std::size_t model_width, const FeatureMatrix& rows) {
    if (rows.width() != model_width) {
        throw std::invalid_argument("predict: row width " + std::to_string(rows.width()) +
                                    " does not match training width " +
                                    std::to_string(model_width));
    }
}

std::vector<int> sorted_unique_labels(const FeatureMatrix& train) {
    std::vector<int> labels = train.labels();
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

}  // namespace

const char* to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::KNN: return "KNN";
        case ClassifierKind::DT: return "DT";
        case ClassifierKind::NB: return "NB";
        case ClassifierKind::NCC: return "NCC";
    }
    throw std::logic_error("unknown classifier kind");
}

ClassifierKind classifier_from_string(const std::string& name) {
    if (name == "KNN") return ClassifierKind::KNN;
    if (name == "DT") return ClassifierKind::DT;
    if (name == "NB") return ClassifierKind::NB;
    if (name == "NCC") return ClassifierKind::NCC;
    throw std::invalid_argument("unknown classifier: " + name);
}

std::unique_ptr<Model> fit(const FeatureMatrix& train, const ClassifierSpec& spec) {
    check_fit_input(train);
    switch (spec.kind) {
        case ClassifierKind::KNN:
            if (spec.knn_k < 1) throw std::invalid_argument("knn_k must be >= 1");
            return std::make_unique<KnnModel>(train, spec.knn_k);
        case ClassifierKind::DT:
            if (spec.dt_min_leaf < 1) throw std::invalid_argument("dt_min_leaf must be >= 1");
            return std::make_unique<DecisionTreeModel>(train, spec.dt_max_depth,
                                                       spec.dt_min_leaf);
        case ClassifierKind::NB:
            return std::make_unique<GaussianNbModel>(train, spec.nb_var_smoothing);
        case ClassifierKind::NCC:
            return std::make_unique<NearestCentroidModel>(train);
    }
    throw std::logic_error("unknown classifier kind");
}

// ---------------------------------------------------------------------------
// KNN

KnnModel::KnnModel(const FeatureMatrix& train, std::size_t k)
    : width_(train.width()), k_(k), labels_(train.labels()) {
    values_.reserve(train.rows() * width_);
    for (std::size_t i = 0; i < train.rows(); ++i) {
        auto r = train.row(i);
        values_.insert(values_.end(), r.begin(), r.end());
    }
}

std::vector<int> KnnModel::predict(const FeatureMatrix& rows) const {
    check_predict_width(width_, rows);
    const std::size_t n_train = labels_.size();
    const std::size_t k = std::min(k_, n_train);

    std::vector<int> out;
    out.reserve(rows.rows());
    std::vector<std::pair<double, std::size_t>> dist(n_train);
    for (std::size_t q = 0; q < rows.rows(); ++q) {
        const auto query = rows.row(q);
        for (std::size_t i = 0; i < n_train; ++i) {
            dist[i] = {squared_distance({values_.data() + i * width_, width_}, query), i};
        }
        // (distance, training index) is a strict total order, so the first k
        // elements after nth_element are exactly the k nearest.
        std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());

        std::map<int, std::size_t> votes;
        for (std::size_t i = 0; i < k; ++i) ++votes[labels_[dist[i].second]];
        int best_label = votes.begin()->first;
        std::size_t best_count = votes.begin()->second;
        for (const auto& [label, count] : votes) {
            if (count > best_count) {
                best_label = label;
                best_count = count;
            }
        }
        out.push_back(best_label);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Nearest centroid

NearestCentroidModel::NearestCentroidModel(const FeatureMatrix& train)
    : width_(train.width()) {
    std::map<int, std::size_t> counts;
    for (std::size_t i = 0; i < train.rows(); ++i) {
        auto& centroid = centroids_[train.label(i)];
        centroid.resize(width_, 0.0);
        auto r = train.row(i);
        for (std::size_t f = 0; f < width_; ++f) centroid[f] += r[f];
        ++counts[train.label(i)];
    }
    for (auto& [label, centroid] : centroids_) {
        const double n = static_cast<double>(counts[label]);
        for (double& v : centroid) v /= n;
    }
}

std::vector<int> NearestCentroidModel::predict(const FeatureMatrix& rows) const {
    check_predict_width(width_, rows);
    std::vector<int> out;
    out.reserve(rows.rows());
    for (std::size_t q = 0; q < rows.rows(); ++q) {
        const auto query = rows.row(q);
        int best_label = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (const auto& [label, centroid] : centroids_) {
            const double d = squared_distance(centroid, query);
            if (d < best_dist) {
                best_dist = d;
                best_label = label;
            }
        }
        out.push_back(best_label);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

GaussianNbModel::GaussianNbModel(const FeatureMatrix& train, double var_smoothing)
    : width_(train.width()) {
    const std::size_t n = train.rows();

    // epsilon scales with the largest per-feature variance of the full
    // training set; an all-constant training set falls back to the raw
    // smoothing value to stay strictly positive.
    double max_var = 0.0;
    for (std::size_t f = 0; f < width_; ++f) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += train.row(i)[f];
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = train.row(i)[f] - mean;
            sq += d * d;
        }
        max_var = std::max(max_var, sq / static_cast<double>(n));
    }
    epsilon_ = var_smoothing * max_var;
    if (epsilon_ <= 0.0) epsilon_ = var_smoothing;

    for (int label : sorted_unique_labels(train)) {
        ClassParams params;
        params.label = label;
        params.mean.assign(width_, 0.0);
        params.variance.assign(width_, 0.0);

        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (train.label(i) != label) continue;
            ++count;
            auto r = train.row(i);
            for (std::size_t f = 0; f < width_; ++f) params.mean[f] += r[f];
        }
        for (double& m : params.mean) m /= static_cast<double>(count);
        for (std::size_t i = 0; i < n; ++i) {
            if (train.label(i) != label) continue;
            auto r = train.row(i);
            for (std::size_t f = 0; f < width_; ++f) {
                const double d = r[f] - params.mean[f];
                params.variance[f] += d * d;
            }
        }
        for (double& v : params.variance) {
            v = v / static_cast<double>(count) + epsilon_;
        }
        params.log_prior = std::log(static_cast<double>(count) / static_cast<double>(n));
        classes_.push_back(std::move(params));
    }
}

std::vector<int> GaussianNbModel::predict(const FeatureMatrix& rows) const {
    check_predict_width(width_, rows);
    std::vector<int> out;
    out.reserve(rows.rows());
    for (std::size_t q = 0; q < rows.rows(); ++q) {
        const auto query = rows.row(q);
        int best_label = classes_.front().label;
        double best_score = -std::numeric_limits<double>::infinity();
        for (const auto& params : classes_) {
            double score = params.log_prior;
            for (std::size_t f = 0; f < width_; ++f) {
                const double var = params.variance[f];
                const double d = query[f] - params.mean[f];
                score += -0.5 * std::log(kTwoPi * var) - (d * d) / (2.0 * var);
            }
            if (score > best_score) {
                best_score = score;
                best_label = params.label;
            }
        }
        out.push_back(best_label);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decision tree

DecisionTreeModel::DecisionTreeModel(const FeatureMatrix& train,
                                     std::optional<std::size_t> max_depth,
                                     std::size_t min_leaf)
    : width_(train.width()), max_depth_(max_depth), min_leaf_(min_leaf),
      class_labels_(sorted_unique_labels(train)) {
    std::vector<std::size_t> rows(train.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    build(train, rows, 0);
}

std::int32_t DecisionTreeModel::build(const FeatureMatrix& train,
                                      std::vector<std::size_t>& rows,
                                      std::size_t depth) {
    const std::size_t n_classes = class_labels_.size();
    std::vector<std::int64_t> counts(n_classes, 0);
    auto class_of = [&](std::size_t row) {
        return static_cast<std::size_t>(
            std::lower_bound(class_labels_.begin(), class_labels_.end(), train.label(row)) -
            class_labels_.begin());
    };
    for (std::size_t r : rows) ++counts[class_of(r)];

    int majority = class_labels_.front();
    std::int64_t majority_count = 0;
    bool pure = false;
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (counts[c] > majority_count) {
            majority_count = counts[c];
            majority = class_labels_[c];
        }
    }
    pure = majority_count == static_cast<std::int64_t>(rows.size());

    auto make_leaf = [&]() {
        Node leaf;
        leaf.leaf_label = majority;
        nodes_.push_back(leaf);
        return static_cast<std::int32_t>(nodes_.size() - 1);
    };

    if (pure || rows.size() < 2 * min_leaf_ ||
        (max_depth_ && depth >= *max_depth_)) {
        return make_leaf();
    }

    // Best split: lowest cost, ties to lowest feature then lowest threshold
    // (guaranteed by scanning features and thresholds in ascending order and
    // only accepting strict improvements).
    const std::size_t n = rows.size();
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_cost = std::numeric_limits<double>::infinity();

    std::vector<std::pair<double, std::size_t>> order(n);  // (value, class index)
    std::vector<std::int64_t> left_counts(n_classes);
    for (std::size_t f = 0; f < width_; ++f) {
        for (std::size_t i = 0; i < n; ++i) {
            order[i] = {train.row(rows[i])[f], class_of(rows[i])};
        }
        std::sort(order.begin(), order.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (order.front().first == order.back().first) continue;

        std::fill(left_counts.begin(), left_counts.end(), 0);
        std::int64_t sq_left = 0;
        std::int64_t sq_right = 0;
        for (std::size_t c = 0; c < n_classes; ++c) sq_right += counts[c] * counts[c];

        for (std::size_t i = 1; i < n; ++i) {
            const std::size_t cls = order[i - 1].second;
            // move row i-1 from the right partition to the left
            sq_left += 2 * left_counts[cls] + 1;
            const std::int64_t right_count = counts[cls] - left_counts[cls];
            sq_right -= 2 * right_count - 1;
            ++left_counts[cls];

            const double lo = order[i - 1].first;
            const double hi = order[i].first;
            if (lo == hi) continue;
            if (i < min_leaf_ || n - i < min_leaf_) continue;

            const double cost = split_cost(static_cast<std::int64_t>(i), sq_left,
                                           static_cast<std::int64_t>(n - i), sq_right);
            if (cost < best_cost) {
                double threshold = lo + (hi - lo) / 2.0;
                if (!(threshold >= lo && threshold < hi)) threshold = lo;
                best_cost = cost;
                best_feature = static_cast<int>(f);
                best_threshold = threshold;
            }
        }
    }

    if (best_feature < 0) {
        return make_leaf();  // all rows identical on every feature
    }

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (std::size_t r : rows) {
        if (train.row(r)[best_feature] <= best_threshold) {
            left_rows.push_back(r);
        } else {
            right_rows.push_back(r);
        }
    }
    rows.clear();
    rows.shrink_to_fit();

    Node node;
    node.feature = best_feature;
    node.threshold = best_threshold;
    nodes_.push_back(node);
    const auto index = static_cast<std::int32_t>(nodes_.size() - 1);
    const std::int32_t left = build(train, left_rows, depth + 1);
    const std::int32_t right = build(train, right_rows, depth + 1);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

std::vector<int> DecisionTreeModel::predict(const FeatureMatrix& rows) const {
    check_predict_width(width_, rows);
    std::vector<int> out;
    out.reserve(rows.rows());
    for (std::size_t q = 0; q < rows.rows(); ++q) {
        const auto query = rows.row(q);
        std::int32_t node = 0;
        while (nodes_[node].feature >= 0) {
            node = query[nodes_[node].feature] <= nodes_[node].threshold
                       ? nodes_[node].left
                       : nodes_[node].right;
        }
        out.push_back(nodes_[node].leaf_label);
    }
    return out;
}

std::size_t DecisionTreeModel::depth() const {
    // Iterative depth: nodes store child indices, root is node 0.
    std::size_t max_depth = 0;
    std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [index, depth] = stack.back();
        stack.pop_back();
        max_depth = std::max(max_depth, depth);
        if (nodes_[index].feature >= 0) {
            stack.push_back({nodes_[index].left, depth + 1});
            stack.push_back({nodes_[index].right, depth + 1});
        }
    }
    return max_depth;
}

}  // namespace arp
