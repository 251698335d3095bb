#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edumine/dataset.hpp"
#include "edumine/forest.hpp"
#include "edumine/knn.hpp"
#include "edumine/linear.hpp"
#include "edumine/logistic.hpp"
#include "edumine/metrics.hpp"
#include "edumine/preprocess.hpp"
#include "edumine/svm.hpp"
#include "edumine/tree.hpp"

namespace edumine::pipeline {

enum class ModelKind { mlr, rfr, rf, dt, knn, lr, svm };

inline models::Task task_of(ModelKind kind) {
    return (kind == ModelKind::mlr || kind == ModelKind::rfr) ? models::Task::regress
                                                              : models::Task::classify;
}

inline std::string kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::mlr: return "mlr";
        case ModelKind::rfr: return "rfr";
        case ModelKind::rf: return "rf";
        case ModelKind::dt: return "dt";
        case ModelKind::knn: return "knn";
        case ModelKind::lr: return "lr";
        case ModelKind::svm: return "svm";
    }
    return "?";
}

inline std::optional<ModelKind> parse_kind(const std::string& s) {
    for (ModelKind k : {ModelKind::mlr, ModelKind::rfr, ModelKind::rf, ModelKind::dt,
                        ModelKind::knn, ModelKind::lr, ModelKind::svm})
        if (kind_name(k) == s) return k;
    return std::nullopt;
}

struct TrainConfig {
    ModelKind model = ModelKind::rfr;
    double split_ratio = 0.8;
    std::uint64_t seed = 42;
    std::size_t select_k = 0;  // regression path: 0 = keep all 14 predictors
    bool smote = false;        // classification path: oversample the train split
    bool stratify = false;

    models::ForestConfig forest;
    models::TreeConfig tree;
    std::size_t knn_k = 5;
    models::LogisticConfig logistic;
    models::SvmConfig svm;
    preprocess::SmoteConfig smote_cfg;
};

// A fitted model plus everything needed to score raw feature rows: the
// selected predictor subset (regression) and the train-fitted normalizer
// (classification).
struct TrainedModel {
    ModelKind kind = ModelKind::rfr;
    std::vector<std::size_t> selected_features;  // indices into the 14 predictors
    std::optional<preprocess::NormalizerParams> normalizer;

    models::LinearModel linear;
    models::ForestModel forest;
    std::unique_ptr<models::TreeNode> tree;
    models::KnnModel knn;
    models::LogisticModel logistic;
    models::SvmModel svm;

    models::Task task() const { return task_of(kind); }
};

struct Prediction {
    std::string student_id;
    double value = 0.0;  // regression estimate, or 0/1 label code
    std::optional<Label> label;
    std::optional<double> probability;  // P(good), logistic only
};

struct TrainOutcome {
    TrainedModel model;
    SplitResult split;
    std::size_t cleaned_dropped = 0;
    std::optional<preprocess::CorrelationReport> correlation;  // regression path
    std::optional<metrics::RegressionReport> regression;
    std::optional<metrics::ClassificationReport> classification;
    std::size_t smote_synthesized = 0;
};

namespace detail {

inline std::vector<std::vector<double>> select_columns(
    const std::vector<std::vector<double>>& X, const std::vector<std::size_t>& cols) {
    std::vector<std::vector<double>> out;
    out.reserve(X.size());
    for (const auto& row : X) {
        std::vector<double> r;
        r.reserve(cols.size());
        for (std::size_t c : cols) r.push_back(row[c]);
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<std::vector<double>> take_rows(const std::vector<std::vector<double>>& X,
                                                  const std::vector<std::size_t>& idx) {
    std::vector<std::vector<double>> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(X[i]);
    return out;
}

template <typename T>
std::vector<T> take(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

inline std::size_t attribute_index(const std::string& name) {
    const auto& names = attribute_names();
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == name) return j;
    throw std::invalid_argument("unknown attribute: " + name);
}

}  // namespace detail

// Prepared classification training inputs; exposed so tests can verify the
// normalizer and SMOTE touch only the train split.
struct ClassifyPrep {
    std::vector<std::vector<double>> train_x;  // normalized, SMOTE-augmented
    std::vector<Label> train_labels;
    std::vector<std::vector<double>> test_x;  // normalized with train params
    std::vector<Label> test_labels;
    preprocess::NormalizerParams normalizer;
    std::size_t smote_synthesized = 0;
};

inline ClassifyPrep prepare_classification(const std::vector<std::vector<double>>& X,
                                           const std::vector<Label>& labels,
                                           const SplitResult& split, bool smote,
                                           preprocess::SmoteConfig smote_cfg) {
    ClassifyPrep prep;
    auto train_raw = detail::take_rows(X, split.train_indices);
    prep.train_labels = detail::take(labels, split.train_indices);
    prep.test_labels = detail::take(labels, split.test_indices);

    prep.normalizer = preprocess::fit_normalizer(train_raw);
    prep.train_x = preprocess::apply_normalizer(prep.normalizer, train_raw);
    prep.test_x =
        preprocess::apply_normalizer(prep.normalizer, detail::take_rows(X, split.test_indices));

    if (smote) {
        auto balanced = preprocess::smote_oversample(prep.train_x, prep.train_labels, smote_cfg);
        prep.train_x = std::move(balanced.rows);
        prep.train_labels = std::move(balanced.labels);
        prep.smote_synthesized = balanced.synthesized;
    }
    return prep;
}

inline std::vector<Label> predict_labels(const TrainedModel& m,
                                         const std::vector<std::vector<double>>& prepared_x) {
    switch (m.kind) {
        case ModelKind::rf: return models::predict_forest_classify(m.forest, prepared_x);
        case ModelKind::dt: {
            std::vector<Label> out;
            for (const auto& r : prepared_x)
                out.push_back(models::predict_tree_classify(*m.tree, r));
            return out;
        }
        case ModelKind::knn: return models::predict_knn(m.knn, prepared_x);
        case ModelKind::lr: {
            std::vector<Label> out;
            for (const auto& r : prepared_x)
                out.push_back(models::classify_logistic(m.logistic, r).label);
            return out;
        }
        case ModelKind::svm: return models::predict_svm(m.svm, prepared_x);
        default: throw std::invalid_argument("predict_labels: not a classifier");
    }
}

// Clean -> (regress: rank + select -> split -> fit) or (classify: label ->
// split -> normalize on train -> SMOTE on train -> fit) -> evaluate on test.
inline TrainOutcome train(const FeatureTable& raw, const TrainConfig& cfg) {
    TrainOutcome out;
    out.model.kind = cfg.model;

    auto cleaned = clean_missing(raw);
    out.cleaned_dropped = cleaned.dropped;
    const FeatureTable& table = cleaned.table;
    if (table.n() < 5) throw std::runtime_error("train: too few complete rows after cleaning");

    auto X_all = table.predictor_matrix();
    auto y = table.etest_vector();

    if (task_of(cfg.model) == models::Task::regress) {
        std::vector<std::size_t> cols;
        if (cfg.select_k > 0 && cfg.select_k < kNumPredictors) {
            out.correlation = preprocess::rank_features(table);
            for (const auto& name : preprocess::select_top_k(*out.correlation, cfg.select_k))
                cols.push_back(detail::attribute_index(name));
        } else {
            for (std::size_t j = 0; j < kNumPredictors; ++j) cols.push_back(j);
        }
        out.model.selected_features = cols;
        auto X = detail::select_columns(X_all, cols);

        out.split = train_test_split(table.n(), cfg.split_ratio, cfg.seed);
        auto train_x = detail::take_rows(X, out.split.train_indices);
        auto train_y = detail::take(y, out.split.train_indices);
        auto test_x = detail::take_rows(X, out.split.test_indices);
        auto test_y = detail::take(y, out.split.test_indices);

        std::vector<double> pred;
        if (cfg.model == ModelKind::mlr) {
            out.model.linear = models::fit_mlr(train_x, train_y);
            pred = models::predict_mlr(out.model.linear, test_x);
        } else {
            auto fcfg = cfg.forest;
            fcfg.seed = Rng::derive(cfg.seed, "forest").next_u64();
            out.model.forest = models::fit_forest_regress(train_x, train_y, fcfg);
            pred = models::predict_forest_regress(out.model.forest, test_x);
        }
        out.regression = metrics::regression_report(test_y, pred);
        return out;
    }

    // classification path: all 14 predictors
    for (std::size_t j = 0; j < kNumPredictors; ++j) out.model.selected_features.push_back(j);
    auto labels = derive_labels(table);
    out.split = train_test_split(table.n(), cfg.split_ratio, cfg.seed,
                                 cfg.stratify ? &labels : nullptr);
    auto smote_cfg = cfg.smote_cfg;
    smote_cfg.seed = Rng::derive(cfg.seed, "smote").next_u64();
    auto prep = prepare_classification(X_all, labels, out.split, cfg.smote, smote_cfg);
    out.model.normalizer = prep.normalizer;
    out.smote_synthesized = prep.smote_synthesized;

    switch (cfg.model) {
        case ModelKind::rf: {
            auto fcfg = cfg.forest;
            fcfg.seed = Rng::derive(cfg.seed, "forest").next_u64();
            out.model.forest =
                models::fit_forest_classify(prep.train_x, prep.train_labels, fcfg);
            break;
        }
        case ModelKind::dt:
            out.model.tree = models::fit_tree_classify(prep.train_x, prep.train_labels, cfg.tree);
            break;
        case ModelKind::knn:
            out.model.knn = models::fit_knn(prep.train_x, prep.train_labels, cfg.knn_k);
            break;
        case ModelKind::lr:
            out.model.logistic = models::fit_logistic(prep.train_x, prep.train_labels, cfg.logistic);
            break;
        case ModelKind::svm: {
            auto scfg = cfg.svm;
            scfg.seed = Rng::derive(cfg.seed, "svm").next_u64();
            out.model.svm = models::fit_svm(prep.train_x, prep.train_labels, scfg);
            break;
        }
        default: throw std::invalid_argument("train: incompatible task/model");
    }

    auto pred = predict_labels(out.model, prep.test_x);
    out.classification = metrics::classification_report(prep.test_labels, pred);
    return out;
}

// Score raw feature rows with a trained model (selection/normalization applied
// from the stored parameters).
inline std::vector<Prediction> predict(const TrainedModel& m, const FeatureTable& table) {
    auto X_all = table.predictor_matrix();
    std::vector<Prediction> out;
    out.reserve(table.n());

    if (m.task() == models::Task::regress) {
        auto X = detail::select_columns(X_all, m.selected_features);
        for (std::size_t i = 0; i < X.size(); ++i) {
            Prediction p;
            p.student_id = table.rows[i].student_id;
            p.value = m.kind == ModelKind::mlr
                          ? models::predict_mlr_one(m.linear, X[i])
                          : models::predict_forest_regress_one(m.forest, X[i]);
            out.push_back(std::move(p));
        }
        return out;
    }

    if (!m.normalizer) throw std::runtime_error("predict: classifier snapshot lacks normalizer");
    auto X = preprocess::apply_normalizer(*m.normalizer, X_all);
    for (std::size_t i = 0; i < X.size(); ++i) {
        Prediction p;
        p.student_id = table.rows[i].student_id;
        if (m.kind == ModelKind::lr) {
            auto lp = models::classify_logistic(m.logistic, X[i]);
            p.label = lp.label;
            p.probability = lp.probability_good;
        } else {
            p.label = predict_labels(m, {X[i]})[0];
        }
        p.value = p.label == Label::bad ? 1.0 : 0.0;
        out.push_back(std::move(p));
    }
    return out;
}

// Evaluate a trained model against a labeled table.
inline TrainOutcome evaluate(const TrainedModel& m, const FeatureTable& raw) {
    TrainOutcome out;
    out.model.kind = m.kind;
    auto cleaned = clean_missing(raw);
    out.cleaned_dropped = cleaned.dropped;
    const FeatureTable& table = cleaned.table;
    if (table.n() == 0) throw std::runtime_error("evaluate: no complete rows");

    auto preds = predict(m, table);
    if (m.task() == models::Task::regress) {
        auto y = table.etest_vector();
        std::vector<double> yhat;
        for (const auto& p : preds) yhat.push_back(p.value);
        out.regression = metrics::regression_report(y, yhat);
    } else {
        auto labels = derive_labels(table);
        std::vector<Label> yhat;
        for (const auto& p : preds) yhat.push_back(*p.label);
        out.classification = metrics::classification_report(labels, yhat);
    }
    return out;
}

}  // namespace edumine::pipeline
