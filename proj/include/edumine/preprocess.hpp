#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "edumine/dataset.hpp"
#include "edumine/rng.hpp"

namespace edumine::preprocess {

inline double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// sample standard deviation, n-1 denominator
inline double sample_sd(std::span<const double> v) {
    double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// r = (sum(ab) - n*mean(a)*mean(b)) / ((n-1)*sd_a*sd_b)
inline double pearson_r(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("pearson_r: length mismatch");
    if (a.size() < 2) throw std::invalid_argument("pearson_r: need n >= 2");
    double sa = sample_sd(a), sb = sample_sd(b);
    if (sa == 0.0 || sb == 0.0)
        throw std::domain_error("pearson_r: constant vector, correlation undefined");
    double ma = mean(a), mb = mean(b);
    double cross = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) cross += (a[i] - ma) * (b[i] - mb);
    double n1 = static_cast<double>(a.size() - 1);
    return cross / (n1 * sa * sb);
}

struct CorrelationReport {
    // (feature name, r); score missing for constant columns, ranked last.
    std::vector<std::pair<std::string, std::optional<double>>> scores;
};

// Score every predictor against etest and sort descending by signed r
// (absolute mode behind a flag). Ties break by canonical attribute order;
// undefined correlations rank last.
inline CorrelationReport rank_features(const FeatureTable& table, bool absolute = false) {
    if (table.n() < 2) throw std::invalid_argument("rank_features: need >= 2 rows");
    auto y = table.etest_vector();
    auto X = table.predictor_matrix();

    struct Entry {
        std::size_t attr;
        std::optional<double> r;
    };
    std::vector<Entry> entries;
    for (std::size_t j = 0; j < kNumPredictors; ++j) {
        std::vector<double> col(table.n());
        for (std::size_t i = 0; i < table.n(); ++i) col[i] = X[i][j];
        Entry e{j, std::nullopt};
        try {
            e.r = pearson_r(col, y);
        } catch (const std::domain_error&) {
        }
        entries.push_back(e);
    }
    std::stable_sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
        if (a.r.has_value() != b.r.has_value()) return a.r.has_value();
        if (!a.r) return false;
        double ra = absolute ? std::fabs(*a.r) : *a.r;
        double rb = absolute ? std::fabs(*b.r) : *b.r;
        return ra > rb;
    });
    CorrelationReport report;
    for (const auto& e : entries)
        report.scores.emplace_back(attribute_names()[e.attr], e.r);
    return report;
}

inline std::vector<std::string> select_top_k(const CorrelationReport& report, std::size_t k = 11) {
    if (k == 0) throw std::invalid_argument("select_top_k: k must be positive");
    if (k > report.scores.size()) throw std::invalid_argument("select_top_k: k exceeds feature count");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < k; ++i) names.push_back(report.scores[i].first);
    return names;
}

// two-column CSV, 6 decimal places, descending order
inline void write_correlation_csv(const CorrelationReport& report, std::ostream& out) {
    out << "feature,r\n";
    char buf[32];
    for (const auto& [name, r] : report.scores) {
        out << name << ",";
        if (r) {
            std::snprintf(buf, sizeof buf, "%.6f", *r);
            out << buf;
        }
        out << "\n";
    }
}

// ---------------------------------------------------------------------------
// z-score normalization, fit on train only

struct NormalizerParams {
    std::vector<double> mean;
    std::vector<double> sd;  // sample sd; 0 for constant columns
};

inline NormalizerParams fit_normalizer(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2) throw std::invalid_argument("fit_normalizer: need >= 2 rows");
    std::size_t p = rows[0].size();
    NormalizerParams params;
    params.mean.resize(p);
    params.sd.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> col(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) col[i] = rows[i][j];
        params.mean[j] = mean(col);
        params.sd[j] = sample_sd(col);
    }
    return params;
}

// (x - mean) / sd; constant columns (sd = 0) map to 0
inline std::vector<std::vector<double>> apply_normalizer(
    const NormalizerParams& params, const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<double>> out = rows;
    for (auto& r : out) {
        if (r.size() != params.mean.size())
            throw std::invalid_argument("apply_normalizer: arity mismatch");
        for (std::size_t j = 0; j < r.size(); ++j)
            r[j] = params.sd[j] > 0.0 ? (r[j] - params.mean[j]) / params.sd[j] : 0.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// SMOTE

struct SmoteConfig {
    std::size_t k = 5;
    std::uint64_t seed = 0;
};

struct SmoteResult {
    std::vector<std::vector<double>> rows;  // originals first, synthetic appended
    std::vector<Label> labels;
    std::size_t synthesized = 0;
};

// Append synthetic minority rows until the class counts are equal. Each
// synthetic row is x_i + lambda*(x_j - x_i) with lambda uniform in [0,1] and
// x_j drawn uniformly among the k nearest minority neighbors of a uniformly
// chosen minority row x_i.
inline SmoteResult smote_oversample(const std::vector<std::vector<double>>& rows,
                                    const std::vector<Label>& labels, const SmoteConfig& cfg) {
    if (rows.size() != labels.size()) throw std::invalid_argument("smote: length mismatch");
    if (cfg.k < 1) throw std::invalid_argument("smote: k must be >= 1");

    std::vector<std::size_t> good_idx, bad_idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
        (labels[i] == Label::good ? good_idx : bad_idx).push_back(i);
    if (good_idx.empty() || bad_idx.empty())
        throw std::invalid_argument("smote: both classes must be present");

    bool bad_is_minority = bad_idx.size() < good_idx.size();
    const auto& minority = bad_is_minority ? bad_idx : good_idx;
    const auto& majority = bad_is_minority ? good_idx : bad_idx;
    Label minority_label = bad_is_minority ? Label::bad : Label::good;

    if (minority.size() <= cfg.k)
        throw std::invalid_argument("smote: minority class size must exceed k");

    // k nearest minority neighbors of each minority row (Euclidean), self excluded
    std::vector<std::vector<std::size_t>> neighbors(minority.size());
    for (std::size_t a = 0; a < minority.size(); ++a) {
        std::vector<std::pair<double, std::size_t>> dists;
        for (std::size_t b = 0; b < minority.size(); ++b) {
            if (b == a) continue;
            double d2 = 0.0;
            const auto& ra = rows[minority[a]];
            const auto& rb = rows[minority[b]];
            for (std::size_t j = 0; j < ra.size(); ++j) d2 += (ra[j] - rb[j]) * (ra[j] - rb[j]);
            dists.emplace_back(d2, b);
        }
        std::stable_sort(dists.begin(), dists.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        for (std::size_t t = 0; t < cfg.k; ++t) neighbors[a].push_back(dists[t].second);
    }

    SmoteResult out;
    out.rows = rows;
    out.labels = labels;
    Rng rng = Rng::derive(cfg.seed, "smote");
    std::size_t need = majority.size() - minority.size();
    for (std::size_t s = 0; s < need; ++s) {
        std::size_t a = rng.index(minority.size());
        std::size_t b = neighbors[a][rng.index(cfg.k)];
        double lambda = rng.uniform();
        const auto& xi = rows[minority[a]];
        const auto& xj = rows[minority[b]];
        std::vector<double> synth(xi.size());
        for (std::size_t j = 0; j < xi.size(); ++j)
            synth[j] = xi[j] + lambda * (xj[j] - xi[j]);
        out.rows.push_back(std::move(synth));
        out.labels.push_back(minority_label);
        ++out.synthesized;
    }
    return out;
}

}  // namespace edumine::preprocess
