#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "edumine/dataset.hpp"

namespace edumine::models {

struct LogisticConfig {
    double learning_rate = 0.1;
    std::size_t epochs = 1000;
    double tolerance = 1e-8;  // stop when loss improvement drops below this
    double threshold = 0.5;   // decision threshold on P(good)
};

// P(good | x) = sigmoid(w.x + b)
struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
    LogisticConfig config;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double logistic_probability(const LogisticModel& model, std::span<const double> x) {
    if (x.size() != model.weights.size())
        throw std::invalid_argument("logistic: arity mismatch");
    double z = model.bias;
    for (std::size_t j = 0; j < x.size(); ++j) z += model.weights[j] * x[j];
    return sigmoid(z);
}

// mean binary cross-entropy, y encoded good=1 bad=0
inline double logistic_loss(std::span<const double> weights, double bias,
                            const std::vector<std::vector<double>>& X,
                            std::span<const Label> labels) {
    double loss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double z = bias;
        for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * X[i][j];
        double y = labels[i] == Label::good ? 1.0 : 0.0;
        // log(1+exp(.)) in the stable branch
        loss += z > 0 ? (1.0 - y) * z + std::log1p(std::exp(-z))
                      : -y * z + std::log1p(std::exp(z));
    }
    return loss / static_cast<double>(X.size());
}

// d(mean BCE)/d(w,b); gradient[p] is the bias component
inline std::vector<double> logistic_gradient(std::span<const double> weights, double bias,
                                             const std::vector<std::vector<double>>& X,
                                             std::span<const Label> labels) {
    std::size_t p = weights.size();
    std::vector<double> grad(p + 1, 0.0);
    for (std::size_t i = 0; i < X.size(); ++i) {
        double z = bias;
        for (std::size_t j = 0; j < p; ++j) z += weights[j] * X[i][j];
        double err = sigmoid(z) - (labels[i] == Label::good ? 1.0 : 0.0);
        for (std::size_t j = 0; j < p; ++j) grad[j] += err * X[i][j];
        grad[p] += err;
    }
    for (auto& g : grad) g /= static_cast<double>(X.size());
    return grad;
}

// Full-batch gradient descent on mean binary cross-entropy.
inline LogisticModel fit_logistic(const std::vector<std::vector<double>>& X,
                                  std::span<const Label> labels, LogisticConfig cfg = {}) {
    if (X.empty() || X.size() != labels.size())
        throw std::invalid_argument("fit_logistic: size mismatch or empty input");
    bool has_good = false, has_bad = false;
    for (Label l : labels) (l == Label::good ? has_good : has_bad) = true;
    if (!has_good || !has_bad)
        throw std::invalid_argument("fit_logistic: both classes must be present");

    std::size_t p = X[0].size();
    LogisticModel model;
    model.weights.assign(p, 0.0);
    model.config = cfg;

    double prev_loss = logistic_loss(model.weights, model.bias, X, labels);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto grad = logistic_gradient(model.weights, model.bias, X, labels);
        for (std::size_t j = 0; j < p; ++j) model.weights[j] -= cfg.learning_rate * grad[j];
        model.bias -= cfg.learning_rate * grad[p];
        double loss = logistic_loss(model.weights, model.bias, X, labels);
        if (!std::isfinite(loss))
            throw std::runtime_error(
                "fit_logistic: loss diverged, reduce the learning rate");
        if (prev_loss - loss < cfg.tolerance && loss <= prev_loss) break;
        prev_loss = loss;
    }
    return model;
}

struct LogisticPrediction {
    Label label;
    double probability_good;
};

// good iff P(good) >= threshold
inline LogisticPrediction classify_logistic(const LogisticModel& model,
                                            std::span<const double> x) {
    double p = logistic_probability(model, x);
    return {p >= model.config.threshold ? Label::good : Label::bad, p};
}

}  // namespace edumine::models
