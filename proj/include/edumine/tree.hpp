#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "edumine/dataset.hpp"
#include "edumine/rng.hpp"

namespace edumine::models {

enum class Task { classify, regress };

struct TreeConfig {
    std::optional<std::size_t> max_depth;  // nullopt = unlimited
    std::size_t min_samples_leaf = 1;
};

// Binary CART node. Internal: feature/threshold, go left when x <= threshold.
// Leaf: class distribution (classification) or mean target (regression).
struct TreeNode {
    bool is_leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0;
    std::unique_ptr<TreeNode> left, right;
    std::array<double, 2> distribution{0.0, 0.0};  // [good, bad], sums to 1
    double value = 0.0;                            // regression mean
    std::size_t sample_count = 0;
};

inline double gini_from_counts(std::size_t n_good, std::size_t n_bad) {
    double n = static_cast<double>(n_good + n_bad);
    if (n == 0.0) return 0.0;
    double pg = static_cast<double>(n_good) / n;
    double pb = static_cast<double>(n_bad) / n;
    return 1.0 - pg * pg - pb * pb;
}

namespace detail {

struct SplitChoice {
    std::size_t feature = 0;
    double threshold = 0.0;
    double decrease = -1.0;  // negative = no valid split found
};

// Best split over the given candidate features, classification. Candidates
// are midpoints between consecutive distinct sorted feature values; ties in
// impurity decrease keep the first candidate in (feature, threshold) order.
inline SplitChoice best_split_classify(const std::vector<std::vector<double>>& X,
                                       std::span<const Label> labels,
                                       std::span<const std::size_t> indices,
                                       std::span<const std::size_t> features,
                                       std::size_t min_samples_leaf) {
    std::size_t n = indices.size();
    std::size_t total_bad = 0;
    for (std::size_t i : indices) total_bad += labels[i] == Label::bad;
    std::size_t total_good = n - total_bad;
    double parent = gini_from_counts(total_good, total_bad);

    SplitChoice best;
    std::vector<std::size_t> order(indices.begin(), indices.end());
    for (std::size_t f : features) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return X[a][f] < X[b][f]; });
        std::size_t left_bad = 0, left_good = 0;
        for (std::size_t pos = 0; pos + 1 < n; ++pos) {
            std::size_t i = order[pos];
            if (labels[i] == Label::bad) ++left_bad; else ++left_good;
            double v = X[i][f], next = X[order[pos + 1]][f];
            if (v == next) continue;
            std::size_t n_left = pos + 1, n_right = n - n_left;
            if (n_left < min_samples_leaf || n_right < min_samples_leaf) continue;
            double child =
                (static_cast<double>(n_left) * gini_from_counts(left_good, left_bad) +
                 static_cast<double>(n_right) *
                     gini_from_counts(total_good - left_good, total_bad - left_bad)) /
                static_cast<double>(n);
            double decrease = parent - child;
            if (decrease > best.decrease) {
                best.decrease = decrease;
                best.feature = f;
                best.threshold = v + (next - v) / 2.0;
            }
        }
    }
    if (best.decrease <= 0.0) best.decrease = -1.0;
    return best;
}

inline SplitChoice best_split_regress(const std::vector<std::vector<double>>& X,
                                      std::span<const double> y,
                                      std::span<const std::size_t> indices,
                                      std::span<const std::size_t> features,
                                      std::size_t min_samples_leaf) {
    std::size_t n = indices.size();
    double total_sum = 0.0, total_sum2 = 0.0;
    for (std::size_t i : indices) {
        total_sum += y[i];
        total_sum2 += y[i] * y[i];
    }
    double nd = static_cast<double>(n);
    double parent = total_sum2 / nd - (total_sum / nd) * (total_sum / nd);

    SplitChoice best;
    std::vector<std::size_t> order(indices.begin(), indices.end());
    for (std::size_t f : features) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return X[a][f] < X[b][f]; });
        double left_sum = 0.0, left_sum2 = 0.0;
        for (std::size_t pos = 0; pos + 1 < n; ++pos) {
            std::size_t i = order[pos];
            left_sum += y[i];
            left_sum2 += y[i] * y[i];
            double v = X[i][f], next = X[order[pos + 1]][f];
            if (v == next) continue;
            std::size_t n_left = pos + 1, n_right = n - n_left;
            if (n_left < min_samples_leaf || n_right < min_samples_leaf) continue;
            double nl = static_cast<double>(n_left), nr = static_cast<double>(n_right);
            double var_l = left_sum2 / nl - (left_sum / nl) * (left_sum / nl);
            double rs = total_sum - left_sum, rs2 = total_sum2 - left_sum2;
            double var_r = rs2 / nr - (rs / nr) * (rs / nr);
            double decrease = parent - (nl * var_l + nr * var_r) / nd;
            if (decrease > best.decrease) {
                best.decrease = decrease;
                best.feature = f;
                best.threshold = v + (next - v) / 2.0;
            }
        }
    }
    if (best.decrease <= 0.0) best.decrease = -1.0;
    return best;
}

// mtry features sampled without replacement; mtry == p keeps the natural
// order and draws nothing from the stream.
inline std::vector<std::size_t> sample_features(std::size_t p, std::size_t mtry, Rng* rng) {
    std::vector<std::size_t> all(p);
    for (std::size_t j = 0; j < p; ++j) all[j] = j;
    if (!rng || mtry >= p) return all;
    std::vector<std::size_t> chosen;
    for (std::size_t t = 0; t < mtry; ++t) {
        std::size_t j = t + rng->index(p - t);
        std::swap(all[t], all[j]);
        chosen.push_back(all[t]);
    }
    return chosen;
}

template <typename TargetSpan>
std::unique_ptr<TreeNode> grow(const std::vector<std::vector<double>>& X, TargetSpan target,
                               std::vector<std::size_t> indices, const TreeConfig& cfg,
                               std::size_t mtry, Rng* rng, std::size_t depth) {
    auto node = std::make_unique<TreeNode>();
    node->sample_count = indices.size();

    if constexpr (std::is_same_v<typename TargetSpan::value_type, Label>) {
        std::size_t n_bad = 0;
        for (std::size_t i : indices) n_bad += target[i] == Label::bad;
        double n = static_cast<double>(indices.size());
        node->distribution = {static_cast<double>(indices.size() - n_bad) / n,
                              static_cast<double>(n_bad) / n};
    } else {
        double sum = 0.0;
        for (std::size_t i : indices) sum += target[i];
        node->value = sum / static_cast<double>(indices.size());
    }

    bool at_depth = cfg.max_depth && depth >= *cfg.max_depth;
    if (at_depth || indices.size() < 2 * cfg.min_samples_leaf || indices.size() < 2)
        return node;

    std::size_t p = X.empty() ? 0 : X[0].size();
    auto features = sample_features(p, mtry, rng);

    SplitChoice split;
    if constexpr (std::is_same_v<typename TargetSpan::value_type, Label>) {
        split = best_split_classify(X, target, indices, features, cfg.min_samples_leaf);
    } else {
        split = best_split_regress(X, target, indices, features, cfg.min_samples_leaf);
    }
    if (split.decrease < 0.0) return node;

    std::vector<std::size_t> left_idx, right_idx;
    for (std::size_t i : indices)
        (X[i][split.feature] <= split.threshold ? left_idx : right_idx).push_back(i);
    if (left_idx.empty() || right_idx.empty()) return node;

    node->is_leaf = false;
    node->feature = split.feature;
    node->threshold = split.threshold;
    node->left = grow(X, target, std::move(left_idx), cfg, mtry, rng, depth + 1);
    node->right = grow(X, target, std::move(right_idx), cfg, mtry, rng, depth + 1);
    return node;
}

}  // namespace detail

inline std::unique_ptr<TreeNode> fit_tree_classify(const std::vector<std::vector<double>>& X,
                                                   std::span<const Label> labels,
                                                   const TreeConfig& cfg = {},
                                                   std::size_t mtry = 0, Rng* rng = nullptr) {
    if (X.empty() || X.size() != labels.size())
        throw std::invalid_argument("fit_tree: size mismatch or empty input");
    std::size_t p = X[0].size();
    if (mtry == 0) mtry = p;
    std::vector<std::size_t> indices(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) indices[i] = i;
    return detail::grow(X, labels, std::move(indices), cfg, mtry, rng, 0);
}

inline std::unique_ptr<TreeNode> fit_tree_regress(const std::vector<std::vector<double>>& X,
                                                  std::span<const double> y,
                                                  const TreeConfig& cfg = {},
                                                  std::size_t mtry = 0, Rng* rng = nullptr) {
    if (X.empty() || X.size() != y.size())
        throw std::invalid_argument("fit_tree: size mismatch or empty input");
    std::size_t p = X[0].size();
    if (mtry == 0) mtry = p;
    std::vector<std::size_t> indices(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) indices[i] = i;
    return detail::grow(X, y, std::move(indices), cfg, mtry, rng, 0);
}

inline const TreeNode& descend(const TreeNode& node, std::span<const double> x) {
    const TreeNode* cur = &node;
    while (!cur->is_leaf)
        cur = x[cur->feature] <= cur->threshold ? cur->left.get() : cur->right.get();
    return *cur;
}

// vote ties resolve to `bad`
inline Label predict_tree_classify(const TreeNode& root, std::span<const double> x) {
    const auto& leaf = descend(root, x);
    return leaf.distribution[0] > leaf.distribution[1] ? Label::good : Label::bad;
}

inline double predict_tree_regress(const TreeNode& root, std::span<const double> x) {
    return descend(root, x).value;
}

}  // namespace edumine::models
