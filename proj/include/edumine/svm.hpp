#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "edumine/dataset.hpp"
#include "edumine/rng.hpp"

namespace edumine::models {

struct SvmConfig {
    double c = 1.0;  // regularization trade-off; lambda = 1 / (C * n)
    std::size_t epochs = 1000;
    std::uint64_t seed = 0;
};

// Linear hyperplane; prediction = sign(w.x + b), 0 resolves to +1 (good).
struct SvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    SvmConfig config;
};

inline double svm_margin(const SvmModel& model, std::span<const double> x) {
    if (x.size() != model.weights.size()) throw std::invalid_argument("svm: arity mismatch");
    double z = model.bias;
    for (std::size_t j = 0; j < x.size(); ++j) z += model.weights[j] * x[j];
    return z;
}

// lambda/2 * |w|^2 + mean hinge loss, labels good=+1 bad=-1
inline double svm_objective(const SvmModel& model, const std::vector<std::vector<double>>& X,
                            std::span<const Label> labels) {
    double lambda = 1.0 / (model.config.c * static_cast<double>(X.size()));
    double w2 = 0.0;
    for (double w : model.weights) w2 += w * w;
    double hinge = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double y = labels[i] == Label::good ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - y * svm_margin(model, X[i]));
    }
    return lambda / 2.0 * w2 + hinge / static_cast<double>(X.size());
}

// Seeded stochastic subgradient descent with step 1/(lambda*t) on the
// regularized hinge objective. The bias is updated by the hinge subgradient
// only, unregularized.
inline SvmModel fit_svm(const std::vector<std::vector<double>>& X, std::span<const Label> labels,
                        SvmConfig cfg = {}) {
    if (X.empty() || X.size() != labels.size())
        throw std::invalid_argument("fit_svm: size mismatch or empty input");
    bool has_good = false, has_bad = false;
    for (Label l : labels) (l == Label::good ? has_good : has_bad) = true;
    if (!has_good || !has_bad)
        throw std::invalid_argument("fit_svm: both classes must be present");

    std::size_t n = X.size(), p = X[0].size();
    double lambda = 1.0 / (cfg.c * static_cast<double>(n));

    SvmModel model;
    model.weights.assign(p, 0.0);
    model.config = cfg;

    Rng rng = Rng::derive(cfg.seed, "svm");
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t step = 0; step < n; ++step) {
            ++t;
            double eta = 1.0 / (lambda * static_cast<double>(t));
            std::size_t i = rng.index(n);
            double y = labels[i] == Label::good ? 1.0 : -1.0;
            double margin = y * svm_margin(model, X[i]);
            for (std::size_t j = 0; j < p; ++j) model.weights[j] *= 1.0 - eta * lambda;
            if (margin < 1.0) {
                double f = eta * y;
                for (std::size_t j = 0; j < p; ++j) model.weights[j] += f * X[i][j];
                model.bias += y / static_cast<double>(t);  // decaying unregularized bias step
            }
        }
    }
    return model;
}

inline Label predict_svm_one(const SvmModel& model, std::span<const double> x) {
    return svm_margin(model, x) >= 0.0 ? Label::good : Label::bad;
}

inline std::vector<Label> predict_svm(const SvmModel& model,
                                      const std::vector<std::vector<double>>& X) {
    std::vector<Label> out;
    out.reserve(X.size());
    for (const auto& row : X) out.push_back(predict_svm_one(model, row));
    return out;
}

}  // namespace edumine::models
