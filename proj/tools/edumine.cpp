// edumine: event-log ingestion, model training, and evaluation for student
// performance prediction. One binary, subcommand style; all randomness flows
// from a single --seed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "edumine/dataset.hpp"
#include "edumine/ingest.hpp"
#include "edumine/pipeline.hpp"
#include "edumine/report.hpp"
#include "edumine/snapshot.hpp"
#include "edumine/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::uint64_t default_seed() {
    if (const char* env = std::getenv("EDUMINE_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
        }
    }
    return 42;
}

void require_readable(const std::string& path) {
    if (!fs::exists(path)) {
        std::cerr << "error: no such file: " << path << "\n";
        std::exit(2);
    }
}

void write_manifest(const std::string& out_path, const std::string& command, const json& config) {
    json m;
    m["tool_version"] = kVersion;
    m["command"] = command;
    m["config"] = config;
    edumine::report::write_file(out_path, m.dump(2) + "\n");
}

// grades CSV: student_id,etest with header
std::map<std::string, double> load_grades(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open grades file: " + path);
    std::map<std::string, double> grades;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto fields = edumine::detail::split_csv_line(line);
        if (first) {
            first = false;
            if (!edumine::parse_double(fields.size() > 1 ? fields[1] : "")) continue;
        }
        if (fields.size() != 2) throw std::runtime_error("grades file: bad line: " + line);
        auto v = edumine::parse_double(fields[1]);
        if (!v) throw std::runtime_error("grades file: non-numeric grade for " + fields[0]);
        grades[fields[0]] = *v;
    }
    return grades;
}

int run(int argc, char** argv) {
    CLI::App app{"student performance prediction pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "aggregate an event log into a feature CSV");
    std::string ingest_log, ingest_out, grades_path;
    double max_gap = 600.0;
    ingest_cmd->add_option("log", ingest_log, "event log path")->required();
    ingest_cmd->add_option("out", ingest_out, "output feature CSV")->required();
    ingest_cmd->add_option("--max-gap", max_gap, "idle gap cap in seconds");
    ingest_cmd->add_option("--grades", grades_path, "student_id,etest CSV to join");

    // train
    auto* train_cmd = app.add_subcommand("train", "train a model and report test metrics");
    std::string task_str, model_str, train_data, model_out;
    double split_ratio = 0.8;
    std::uint64_t seed = default_seed();
    std::size_t select_k = 0;
    bool use_smote = false, stratify = false;
    std::size_t n_trees = 100, knn_k = 5;
    train_cmd->add_option("--task", task_str, "classify | regress")->required();
    train_cmd->add_option("--model", model_str, "mlr|rfr|rf|dt|knn|lr|svm")->required();
    train_cmd->add_option("--split", split_ratio, "train fraction");
    train_cmd->add_option("--seed", seed, "random seed");
    train_cmd->add_option("--select-k", select_k, "keep top-k correlated features (regression)");
    train_cmd->add_flag("--smote", use_smote, "SMOTE-balance the training split");
    train_cmd->add_flag("--stratify", stratify, "stratified split");
    train_cmd->add_option("--trees", n_trees, "forest size");
    train_cmd->add_option("--knn-k", knn_k, "KNN neighbor count");
    train_cmd->add_option("data", train_data, "feature CSV")->required();
    train_cmd->add_option("model_out", model_out, "model snapshot path")->required();

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a snapshot on labeled data");
    std::string eval_model, eval_data, eval_report;
    eval_cmd->add_option("model", eval_model, "model snapshot")->required();
    eval_cmd->add_option("data", eval_data, "feature CSV")->required();
    eval_cmd->add_option("--report", eval_report, "also write the report here");

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "per-student predictions CSV");
    std::string pred_model, pred_data, pred_out;
    predict_cmd->add_option("model", pred_model, "model snapshot")->required();
    predict_cmd->add_option("data", pred_data, "feature CSV")->required();
    predict_cmd->add_option("out", pred_out, "predictions CSV")->required();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    edumine::synth::SynthConfig synth_cfg;
    std::string synth_out = "synthetic";
    synth_cmd->add_option("--n", synth_cfg.n_students, "number of students");
    synth_cmd->add_option("--bad-fraction", synth_cfg.bad_fraction, "target share of bad labels");
    synth_cmd->add_option("--noise-sd", synth_cfg.noise_sd, "etest noise (points)");
    std::uint64_t synth_seed = default_seed();
    synth_cmd->add_option("--seed", synth_seed, "random seed");
    synth_cmd->add_flag("--events", synth_cfg.emit_events, "also emit an event log + expected CSV");
    synth_cmd->add_option("--out", synth_out, "output path prefix");

    CLI11_PARSE(app, argc, argv);

    if (ingest_cmd->parsed()) {
        require_readable(ingest_log);
        std::ifstream f(ingest_log, std::ios::binary);
        auto parsed = edumine::ingest::parse_events(f);
        if (parsed.malformed_count > 0)
            std::cerr << "warning: " << parsed.malformed_count << " malformed line(s) skipped\n";
        edumine::ingest::SessionRule rule{max_gap};
        std::map<std::string, double> grades;
        if (!grades_path.empty()) {
            require_readable(grades_path);
            grades = load_grades(grades_path);
        }
        auto built = edumine::ingest::build_feature_table(
            parsed.events, rule, grades_path.empty() ? nullptr : &grades);
        for (const auto& sid : built.unknown_grade_students)
            std::cerr << "warning: grade for unknown student " << sid << "\n";
        edumine::save_csv(built.table, ingest_out);
        json cfg{{"log", ingest_log}, {"out", ingest_out}, {"max_gap", max_gap},
                 {"grades", grades_path}};
        write_manifest(ingest_out + ".manifest.json", "ingest", cfg);
        return 0;
    }

    if (train_cmd->parsed()) {
        auto kind = edumine::pipeline::parse_kind(model_str);
        if (!kind) {
            std::cerr << "error: unknown model '" << model_str << "'\n";
            return 2;
        }
        bool want_regress = task_str == "regress";
        if (task_str != "regress" && task_str != "classify") {
            std::cerr << "error: --task must be classify or regress\n";
            return 2;
        }
        bool model_regress = edumine::pipeline::task_of(*kind) == edumine::models::Task::regress;
        if (want_regress != model_regress) {
            std::cerr << "error: model '" << model_str << "' is incompatible with task '"
                      << task_str << "'\n";
            return 2;
        }
        require_readable(train_data);

        edumine::pipeline::TrainConfig cfg;
        cfg.model = *kind;
        cfg.split_ratio = split_ratio;
        cfg.seed = seed;
        cfg.select_k = select_k;
        cfg.smote = use_smote;
        cfg.stratify = stratify;
        cfg.forest.n_trees = n_trees;
        cfg.knn_k = knn_k;

        auto table = edumine::load_csv(train_data);
        auto outcome = edumine::pipeline::train(table, cfg);

        edumine::snapshot::save(outcome.model, model_out);
        auto text = edumine::report::render_text(outcome, model_str, seed);
        std::cout << text;
        edumine::report::write_file(model_out + ".report.txt", text);
        edumine::report::write_file(
            model_out + ".report.json",
            edumine::report::to_json(outcome, model_str, seed).dump(2) + "\n");
        json mc{{"task", task_str},       {"model", model_str}, {"split", split_ratio},
                {"seed", seed},           {"select_k", select_k}, {"smote", use_smote},
                {"stratify", stratify},   {"trees", n_trees},   {"knn_k", knn_k},
                {"data", train_data},     {"model_out", model_out}};
        write_manifest(model_out + ".manifest.json", "train", mc);
        return 0;
    }

    if (eval_cmd->parsed()) {
        require_readable(eval_model);
        require_readable(eval_data);
        auto model = edumine::snapshot::load(eval_model);
        auto table = edumine::load_csv(eval_data);
        auto outcome = edumine::pipeline::evaluate(model, table);
        auto text = edumine::report::render_text(outcome, edumine::pipeline::kind_name(model.kind), 0);
        std::cout << text;
        if (!eval_report.empty()) edumine::report::write_file(eval_report, text);
        return 0;
    }

    if (predict_cmd->parsed()) {
        require_readable(pred_model);
        require_readable(pred_data);
        auto model = edumine::snapshot::load(pred_model);
        auto table = edumine::load_csv(pred_data);
        auto preds = edumine::pipeline::predict(model, table);
        std::ofstream out(pred_out, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << pred_out << "\n";
            return 1;
        }
        bool classify = model.task() == edumine::models::Task::classify;
        out << (classify ? "student_id,label,probability_good\n" : "student_id,predicted_etest\n");
        for (const auto& p : preds) {
            out << p.student_id << ",";
            if (classify) {
                out << edumine::to_string(*p.label) << ",";
                if (p.probability) out << edumine::format_double(*p.probability);
            } else {
                out << edumine::format_double(p.value);
            }
            out << "\n";
        }
        json cfg{{"model", pred_model}, {"data", pred_data}, {"out", pred_out}};
        write_manifest(pred_out + ".manifest.json", "predict", cfg);
        return 0;
    }

    if (synth_cmd->parsed()) {
        synth_cfg.seed = synth_seed;
        synth_cfg.validate();
        auto generated = edumine::synth::generate_dataset(synth_cfg);
        edumine::save_csv(generated.table, synth_out + ".csv");
        if (synth_cfg.emit_events) {
            auto log = edumine::synth::generate_event_log(synth_cfg);
            std::ofstream ev(synth_out + ".events.csv", std::ios::binary);
            edumine::synth::write_event_log(log.events, ev);
            edumine::save_csv(log.expected, synth_out + ".expected.csv");
        }
        json cfg{{"n", synth_cfg.n_students},
                 {"bad_fraction", synth_cfg.bad_fraction},
                 {"noise_sd", synth_cfg.noise_sd},
                 {"seed", synth_seed},
                 {"events", synth_cfg.emit_events},
                 {"out", synth_out}};
        write_manifest(synth_out + ".manifest.json", "synth", cfg);
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
