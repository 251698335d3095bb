#pragma once

#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "edumine/pipeline.hpp"

namespace edumine::snapshot {

using nlohmann::json;

constexpr int kFormatVersion = 1;

namespace detail {

inline json tree_to_json(const models::TreeNode& node) {
    json j;
    j["leaf"] = node.is_leaf;
    j["n"] = node.sample_count;
    if (node.is_leaf) {
        j["dist"] = {node.distribution[0], node.distribution[1]};
        j["value"] = node.value;
    } else {
        j["feature"] = node.feature;
        j["threshold"] = node.threshold;
        j["left"] = tree_to_json(*node.left);
        j["right"] = tree_to_json(*node.right);
    }
    return j;
}

inline std::unique_ptr<models::TreeNode> tree_from_json(const json& j) {
    auto node = std::make_unique<models::TreeNode>();
    node->is_leaf = j.at("leaf").get<bool>();
    node->sample_count = j.at("n").get<std::size_t>();
    if (node->is_leaf) {
        node->distribution = {j.at("dist")[0].get<double>(), j.at("dist")[1].get<double>()};
        node->value = j.at("value").get<double>();
    } else {
        node->feature = j.at("feature").get<std::size_t>();
        node->threshold = j.at("threshold").get<double>();
        node->left = tree_from_json(j.at("left"));
        node->right = tree_from_json(j.at("right"));
    }
    return node;
}

inline json labels_to_json(const std::vector<Label>& labels) {
    json j = json::array();
    for (Label l : labels) j.push_back(l == Label::bad ? 1 : 0);
    return j;
}

inline std::vector<Label> labels_from_json(const json& j) {
    std::vector<Label> out;
    for (const auto& v : j) out.push_back(v.get<int>() == 1 ? Label::bad : Label::good);
    return out;
}

}  // namespace detail

inline json to_json(const pipeline::TrainedModel& m) {
    json j;
    j["format_version"] = kFormatVersion;
    j["model"] = pipeline::kind_name(m.kind);
    j["task"] = m.task() == models::Task::regress ? "regress" : "classify";
    j["selected_features"] = m.selected_features;
    if (m.normalizer) {
        j["normalizer"] = {{"mean", m.normalizer->mean}, {"sd", m.normalizer->sd}};
    }
    switch (m.kind) {
        case pipeline::ModelKind::mlr:
            j["linear"] = {{"intercept", m.linear.intercept},
                           {"coefficients", m.linear.coefficients}};
            break;
        case pipeline::ModelKind::rfr:
        case pipeline::ModelKind::rf: {
            json trees = json::array();
            for (const auto& t : m.forest.trees) trees.push_back(detail::tree_to_json(*t));
            j["forest"] = {{"trees", std::move(trees)},
                           {"mtry", m.forest.config.mtry},
                           {"n_trees", m.forest.config.n_trees},
                           {"bootstrap", m.forest.config.bootstrap},
                           {"seed", m.forest.config.seed}};
            break;
        }
        case pipeline::ModelKind::dt:
            j["tree"] = detail::tree_to_json(*m.tree);
            break;
        case pipeline::ModelKind::knn:
            j["knn"] = {{"k", m.knn.k},
                        {"train", m.knn.train},
                        {"labels", detail::labels_to_json(m.knn.labels)}};
            break;
        case pipeline::ModelKind::lr:
            j["logistic"] = {{"weights", m.logistic.weights},
                             {"bias", m.logistic.bias},
                             {"threshold", m.logistic.config.threshold}};
            break;
        case pipeline::ModelKind::svm:
            j["svm"] = {{"weights", m.svm.weights}, {"bias", m.svm.bias}};
            break;
    }
    return j;
}

inline pipeline::TrainedModel from_json(const json& j) {
    if (!j.contains("format_version") || j.at("format_version").get<int>() != kFormatVersion)
        throw std::runtime_error("snapshot: unsupported or missing format version");
    auto kind = pipeline::parse_kind(j.at("model").get<std::string>());
    if (!kind) throw std::runtime_error("snapshot: unknown model kind");

    pipeline::TrainedModel m;
    m.kind = *kind;
    m.selected_features = j.at("selected_features").get<std::vector<std::size_t>>();
    if (j.contains("normalizer")) {
        preprocess::NormalizerParams params;
        params.mean = j.at("normalizer").at("mean").get<std::vector<double>>();
        params.sd = j.at("normalizer").at("sd").get<std::vector<double>>();
        m.normalizer = std::move(params);
    }
    switch (m.kind) {
        case pipeline::ModelKind::mlr:
            m.linear.intercept = j.at("linear").at("intercept").get<double>();
            m.linear.coefficients = j.at("linear").at("coefficients").get<std::vector<double>>();
            break;
        case pipeline::ModelKind::rfr:
        case pipeline::ModelKind::rf: {
            const auto& f = j.at("forest");
            m.forest.task = m.kind == pipeline::ModelKind::rf ? models::Task::classify
                                                             : models::Task::regress;
            m.forest.config.mtry = f.at("mtry").get<std::size_t>();
            m.forest.config.n_trees = f.at("n_trees").get<std::size_t>();
            m.forest.config.bootstrap = f.at("bootstrap").get<bool>();
            m.forest.config.seed = f.at("seed").get<std::uint64_t>();
            for (const auto& t : f.at("trees")) m.forest.trees.push_back(detail::tree_from_json(t));
            break;
        }
        case pipeline::ModelKind::dt:
            m.tree = detail::tree_from_json(j.at("tree"));
            break;
        case pipeline::ModelKind::knn:
            m.knn.k = j.at("knn").at("k").get<std::size_t>();
            m.knn.train = j.at("knn").at("train").get<std::vector<std::vector<double>>>();
            m.knn.labels = detail::labels_from_json(j.at("knn").at("labels"));
            break;
        case pipeline::ModelKind::lr:
            m.logistic.weights = j.at("logistic").at("weights").get<std::vector<double>>();
            m.logistic.bias = j.at("logistic").at("bias").get<double>();
            m.logistic.config.threshold = j.at("logistic").at("threshold").get<double>();
            break;
        case pipeline::ModelKind::svm:
            m.svm.weights = j.at("svm").at("weights").get<std::vector<double>>();
            m.svm.bias = j.at("svm").at("bias").get<double>();
            break;
    }
    return m;
}

inline void save(const pipeline::TrainedModel& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("snapshot: cannot open " + path);
    f << to_json(m).dump(2) << "\n";
}

inline pipeline::TrainedModel load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("snapshot: cannot open " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("snapshot: malformed file: ") + e.what());
    }
    return from_json(j);
}

}  // namespace edumine::snapshot
