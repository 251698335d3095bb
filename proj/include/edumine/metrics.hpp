#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "edumine/dataset.hpp"

namespace edumine::metrics {

struct RegressionReport {
    double r2 = 0.0;
    double rmse = 0.0;
    double mape = 0.0;  // percent
    std::size_t n = 0;
};

// Positive class is `bad` (at-risk) unless the caller flips it.
struct ConfusionMatrix {
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
    std::size_t total() const { return tp + fn + fp + tn; }
};

struct ClassificationReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    ConfusionMatrix matrix;
};

inline void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("metrics: vector length mismatch");
}

inline double r_squared(std::span<const double> actual, std::span<const double> predicted) {
    check_lengths(actual.size(), predicted.size());
    if (actual.size() < 2) throw std::invalid_argument("r_squared: need at least 2 points");
    double mean = std::accumulate(actual.begin(), actual.end(), 0.0) / actual.size();
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
    }
    if (ss_tot == 0.0) throw std::invalid_argument("r_squared: constant actual values");
    return 1.0 - ss_res / ss_tot;
}

inline double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check_lengths(actual.size(), predicted.size());
    if (actual.empty()) throw std::invalid_argument("rmse: empty input");
    double ss = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i)
        ss += (predicted[i] - actual[i]) * (predicted[i] - actual[i]);
    return std::sqrt(ss / actual.size());
}

inline double mape(std::span<const double> actual, std::span<const double> predicted) {
    check_lengths(actual.size(), predicted.size());
    if (actual.empty()) throw std::invalid_argument("mape: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0)
            throw std::domain_error("mape: actual value is zero, percentage error undefined");
        sum += std::fabs((actual[i] - predicted[i]) / actual[i]);
    }
    return 100.0 / actual.size() * sum;
}

inline ConfusionMatrix confusion(std::span<const Label> actual, std::span<const Label> predicted,
                                 Label positive = Label::bad) {
    check_lengths(actual.size(), predicted.size());
    ConfusionMatrix m;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        bool a = actual[i] == positive;
        bool p = predicted[i] == positive;
        if (a && p) ++m.tp;
        else if (a && !p) ++m.fn;
        else if (!a && p) ++m.fp;
        else ++m.tn;
    }
    return m;
}

inline double accuracy(const ConfusionMatrix& m) {
    if (m.total() == 0) throw std::domain_error("accuracy: empty confusion matrix");
    return static_cast<double>(m.tp + m.tn) / m.total();
}

inline double precision(const ConfusionMatrix& m) {
    if (m.tp + m.fp == 0) throw std::domain_error("precision: no predicted positives");
    return static_cast<double>(m.tp) / (m.tp + m.fp);
}

inline double recall(const ConfusionMatrix& m) {
    if (m.tp + m.fn == 0) throw std::domain_error("recall: no actual positives");
    return static_cast<double>(m.tp) / (m.tp + m.fn);
}

inline double f_score(double precision, double recall) {
    if (precision + recall == 0.0) throw std::domain_error("f_score: precision + recall is zero");
    return 2.0 * precision * recall / (precision + recall);
}

inline double f_score(const ConfusionMatrix& m) { return f_score(precision(m), recall(m)); }

inline ClassificationReport classification_report(std::span<const Label> actual,
                                                  std::span<const Label> predicted,
                                                  Label positive = Label::bad) {
    ClassificationReport r;
    r.matrix = confusion(actual, predicted, positive);
    r.accuracy = accuracy(r.matrix);
    r.precision = precision(r.matrix);
    r.recall = recall(r.matrix);
    r.f_score = f_score(r.precision, r.recall);
    return r;
}

inline RegressionReport regression_report(std::span<const double> actual,
                                          std::span<const double> predicted) {
    RegressionReport r;
    r.r2 = r_squared(actual, predicted);
    r.rmse = rmse(actual, predicted);
    r.mape = mape(actual, predicted);
    r.n = actual.size();
    return r;
}

}  // namespace edumine::metrics
