#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "edumine/rng.hpp"
#include "edumine/tree.hpp"

namespace edumine::models {

struct ForestConfig {
    std::size_t n_trees = 100;
    std::size_t mtry = 0;  // 0 = task default: ceil(sqrt(p)) classify, max(1, p/3) regress
    bool bootstrap = true;
    std::uint64_t seed = 0;
    TreeConfig tree;
};

struct ForestModel {
    std::vector<std::unique_ptr<TreeNode>> trees;
    Task task = Task::classify;
    ForestConfig config;  // with mtry resolved
};

inline std::size_t default_mtry(std::size_t p, Task task) {
    if (task == Task::classify)
        return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p))));
    return std::max<std::size_t>(1, p / 3);
}

namespace detail {

template <typename TargetSpan>
ForestModel fit_forest_impl(const std::vector<std::vector<double>>& X, TargetSpan target,
                            ForestConfig cfg, Task task) {
    if (X.size() < 2 || X.size() != target.size())
        throw std::invalid_argument("fit_forest: need >= 2 rows and matching target");
    std::size_t p = X[0].size();
    if (cfg.mtry == 0) cfg.mtry = default_mtry(p, task);
    if (cfg.mtry > p) throw std::invalid_argument("fit_forest: mtry exceeds feature count");
    if (cfg.n_trees < 1) throw std::invalid_argument("fit_forest: need at least one tree");

    ForestModel model;
    model.task = task;
    model.config = cfg;
    model.trees.resize(cfg.n_trees);

    // Each tree's stream derives from (forest seed, tree index), so training
    // order or parallel scheduling cannot change the result.
    for (std::size_t t = 0; t < cfg.n_trees; ++t) {
        Rng rng = Rng::derive(cfg.seed, "forest_tree", t);
        std::vector<std::size_t> indices;
        if (cfg.bootstrap) {
            indices.resize(X.size());
            for (auto& i : indices) i = rng.index(X.size());
        } else {
            indices.resize(X.size());
            for (std::size_t i = 0; i < X.size(); ++i) indices[i] = i;
        }
        model.trees[t] =
            models::detail::grow(X, target, std::move(indices), cfg.tree, cfg.mtry, &rng, 0);
    }
    return model;
}

}  // namespace detail

inline ForestModel fit_forest_classify(const std::vector<std::vector<double>>& X,
                                       std::span<const Label> labels, ForestConfig cfg = {}) {
    return detail::fit_forest_impl(X, labels, cfg, Task::classify);
}

inline ForestModel fit_forest_regress(const std::vector<std::vector<double>>& X,
                                      std::span<const double> y, ForestConfig cfg = {}) {
    return detail::fit_forest_impl(X, y, cfg, Task::regress);
}

// majority vote over trees; ties resolve to `bad`
inline Label predict_forest_classify_one(const ForestModel& model, std::span<const double> x) {
    if (model.task != Task::classify)
        throw std::invalid_argument("predict_forest: model is not a classifier");
    std::size_t votes_bad = 0;
    for (const auto& tree : model.trees)
        votes_bad += predict_tree_classify(*tree, x) == Label::bad;
    std::size_t votes_good = model.trees.size() - votes_bad;
    return votes_good > votes_bad ? Label::good : Label::bad;
}

inline double predict_forest_regress_one(const ForestModel& model, std::span<const double> x) {
    if (model.task != Task::regress)
        throw std::invalid_argument("predict_forest: model is not a regressor");
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += predict_tree_regress(*tree, x);
    return sum / static_cast<double>(model.trees.size());
}

inline std::vector<Label> predict_forest_classify(const ForestModel& model,
                                                  const std::vector<std::vector<double>>& X) {
    std::vector<Label> out;
    out.reserve(X.size());
    for (const auto& row : X) out.push_back(predict_forest_classify_one(model, row));
    return out;
}

inline std::vector<double> predict_forest_regress(const ForestModel& model,
                                                  const std::vector<std::vector<double>>& X) {
    std::vector<double> out;
    out.reserve(X.size());
    for (const auto& row : X) out.push_back(predict_forest_regress_one(model, row));
    return out;
}

}  // namespace edumine::models
