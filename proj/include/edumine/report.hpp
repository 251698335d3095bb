#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "edumine/pipeline.hpp"

namespace edumine::report {

inline std::string fixed6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::string render_text(const pipeline::TrainOutcome& out, const std::string& model_name,
                               std::uint64_t seed) {
    std::ostringstream os;
    if (out.regression) {
        const auto& r = *out.regression;
        os << "Regression results\n";
        os << "Algorithm\tR2\tRMSE\tMAPE\n";
        os << model_name << "\t" << fixed6(r.r2) << "\t" << fixed6(r.rmse) << "\t"
           << fixed6(r.mape) << "\n";
        os << "n_test=" << r.n << " seed=" << seed << "\n";
    }
    if (out.classification) {
        const auto& c = *out.classification;
        os << "Classification results (positive class: bad)\n";
        os << "Algorithm\tAccuracy\tPrecision\tRecall\tF-score\n";
        os << model_name << "\t" << fixed6(c.accuracy) << "\t" << fixed6(c.precision) << "\t"
           << fixed6(c.recall) << "\t" << fixed6(c.f_score) << "\n";
        os << "Confusion matrix: TP=" << c.matrix.tp << " FN=" << c.matrix.fn
           << " FP=" << c.matrix.fp << " TN=" << c.matrix.tn << "\n";
        os << "seed=" << seed << "\n";
    }
    if (out.correlation) {
        os << "Feature ranking (Pearson r vs etest)\n";
        for (const auto& [name, r] : out.correlation->scores) {
            os << name << "\t" << (r ? fixed6(*r) : std::string("undefined")) << "\n";
        }
    }
    return os.str();
}

inline nlohmann::json to_json(const pipeline::TrainOutcome& out, const std::string& model_name,
                              std::uint64_t seed) {
    nlohmann::json j;
    j["model"] = model_name;
    j["seed"] = seed;
    j["rows_dropped_by_cleaning"] = out.cleaned_dropped;
    if (out.regression) {
        j["task"] = "regress";
        j["r2"] = out.regression->r2;
        j["rmse"] = out.regression->rmse;
        j["mape"] = out.regression->mape;
        j["n_test"] = out.regression->n;
    }
    if (out.classification) {
        const auto& c = *out.classification;
        j["task"] = "classify";
        j["accuracy"] = c.accuracy;
        j["precision"] = c.precision;
        j["recall"] = c.recall;
        j["f_score"] = c.f_score;
        j["confusion"] = {{"tp", c.matrix.tp}, {"fn", c.matrix.fn},
                          {"fp", c.matrix.fp}, {"tn", c.matrix.tn}};
        j["smote_synthesized"] = out.smote_synthesized;
    }
    if (out.correlation) {
        nlohmann::json scores = nlohmann::json::array();
        for (const auto& [name, r] : out.correlation->scores) {
            nlohmann::json e;
            e["feature"] = name;
            if (r) e["r"] = *r;
            scores.push_back(std::move(e));
        }
        j["feature_ranking"] = std::move(scores);
    }
    return j;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

}  // namespace edumine::report
