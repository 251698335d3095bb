#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "edumine/dataset.hpp"

namespace edumine::models {

// Expects normalized features; distances are plain Euclidean.
struct KnnModel {
    std::vector<std::vector<double>> train;
    std::vector<Label> labels;
    std::size_t k = 5;
};

inline KnnModel fit_knn(std::vector<std::vector<double>> X, std::vector<Label> labels,
                        std::size_t k = 5) {
    if (X.size() != labels.size()) throw std::invalid_argument("fit_knn: size mismatch");
    if (k < 1 || k > X.size()) throw std::invalid_argument("fit_knn: k must be in [1, n]");
    return KnnModel{std::move(X), std::move(labels), k};
}

// Majority among the k nearest; distance ties break toward the lower
// training-row index, vote ties toward `bad`.
inline Label predict_knn_one(const KnnModel& model, std::span<const double> x) {
    std::vector<std::pair<double, std::size_t>> dists;
    dists.reserve(model.train.size());
    for (std::size_t i = 0; i < model.train.size(); ++i) {
        const auto& t = model.train[i];
        if (t.size() != x.size()) throw std::invalid_argument("predict_knn: arity mismatch");
        double d2 = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) d2 += (t[j] - x[j]) * (t[j] - x[j]);
        dists.emplace_back(d2, i);
    }
    std::sort(dists.begin(), dists.end());
    std::size_t votes_bad = 0;
    for (std::size_t t = 0; t < model.k; ++t)
        votes_bad += model.labels[dists[t].second] == Label::bad;
    return model.k - votes_bad > votes_bad ? Label::good : Label::bad;
}

inline std::vector<Label> predict_knn(const KnnModel& model,
                                      const std::vector<std::vector<double>>& X) {
    std::vector<Label> out;
    out.reserve(X.size());
    for (const auto& row : X) out.push_back(predict_knn_one(model, row));
    return out;
}

}  // namespace edumine::models
