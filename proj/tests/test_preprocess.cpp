#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "edumine/preprocess.hpp"
#include "edumine/rng.hpp"

using namespace edumine;
using namespace edumine::preprocess;
using Catch::Approx;

namespace {

TableRow row_from(const std::vector<double>& predictors, double etest) {
    TableRow r;
    for (std::size_t j = 0; j < kNumPredictors; ++j) r.cells[j] = predictors[j];
    r.cells[kEtestIndex] = etest;
    return r;
}

}  // namespace

TEST_CASE("pearson_r known values") {
    std::vector<double> x = {1.0, 2.0, 3.0};
    CHECK(pearson_r(x, x) == Approx(1.0).margin(1e-12));

    std::vector<double> y = {3.0, 2.0, 1.0};
    CHECK(pearson_r(x, y) == Approx(-1.0).margin(1e-12));

    std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> b = {2.0, 1.0, 4.0, 3.0};
    CHECK(pearson_r(a, b) == Approx(0.6).margin(1e-12));

    std::vector<double> constant = {5.0, 5.0, 5.0};
    CHECK_THROWS_AS(pearson_r(constant, x), std::domain_error);
}

TEST_CASE("pearson_r symmetry / translation / scale properties") {
    Rng rng(13);
    for (int t = 0; t < 30; ++t) {
        std::vector<double> a, b;
        for (int i = 0; i < 20; ++i) {
            a.push_back(rng.normal());
            b.push_back(rng.normal());
        }
        double r = pearson_r(a, b);
        CHECK(std::fabs(r) <= 1.0 + 1e-12);
        CHECK(pearson_r(b, a) == Approx(r).margin(1e-12));

        auto shifted = a;
        for (auto& v : shifted) v += 7.5;
        CHECK(pearson_r(shifted, b) == Approx(r).margin(1e-12));

        auto scaled = a;
        for (auto& v : scaled) v *= -3.0;
        CHECK(pearson_r(scaled, b) == Approx(-r).margin(1e-12));
    }
}

TEST_CASE("rank_features puts an etest clone first") {
    Rng rng(21);
    FeatureTable t;
    for (int i = 0; i < 40; ++i) {
        double etest = 30.0 + 60.0 * rng.uniform();
        std::vector<double> preds(kNumPredictors);
        for (auto& p : preds) p = rng.normal();
        preds[4] = etest;  // PE_exercise equals etest
        t.rows.push_back(row_from(preds, etest));
    }
    auto report = rank_features(t);
    REQUIRE(report.scores.size() == kNumPredictors);
    CHECK(report.scores[0].first == "PE_exercise");
    CHECK(*report.scores[0].second == Approx(1.0).margin(1e-12));
}

TEST_CASE("rank_features: noisy-copy predictor dominates pure noise") {
    Rng rng(33);
    FeatureTable t;
    for (int i = 0; i < 100; ++i) {
        double etest = 30.0 + 60.0 * rng.uniform();
        std::vector<double> preds(kNumPredictors);
        for (auto& p : preds) p = rng.normal();
        preds[4] = etest + rng.normal(0.0, 0.5);
        t.rows.push_back(row_from(preds, etest));
    }
    auto report = rank_features(t);
    CHECK(report.scores[0].first == "PE_exercise");
}

TEST_CASE("constant feature ranks last with missing score") {
    Rng rng(5);
    FeatureTable t;
    for (int i = 0; i < 20; ++i) {
        double etest = 40.0 + 30.0 * rng.uniform();
        std::vector<double> preds(kNumPredictors);
        for (auto& p : preds) p = rng.normal();
        preds[2] = 9.0;  // PE_reset constant
        t.rows.push_back(row_from(preds, etest));
    }
    auto report = rank_features(t);
    CHECK(report.scores.back().first == "PE_reset");
    CHECK_FALSE(report.scores.back().second.has_value());
}

TEST_CASE("ranking invariant under positive affine transforms of etest") {
    Rng rng(44);
    FeatureTable t1, t2;
    for (int i = 0; i < 50; ++i) {
        double etest = 20.0 + 70.0 * rng.uniform();
        std::vector<double> preds(kNumPredictors);
        for (auto& p : preds) p = rng.normal(etest / 30.0, 1.0);
        t1.rows.push_back(row_from(preds, etest));
        t2.rows.push_back(row_from(preds, 3.0 * etest + 11.0));
    }
    auto r1 = rank_features(t1);
    auto r2 = rank_features(t2);
    for (std::size_t i = 0; i < r1.scores.size(); ++i)
        CHECK(r1.scores[i].first == r2.scores[i].first);
}

TEST_CASE("select_top_k") {
    Rng rng(3);
    FeatureTable t;
    for (int i = 0; i < 30; ++i) {
        double etest = 30.0 + 50.0 * rng.uniform();
        std::vector<double> preds(kNumPredictors);
        for (auto& p : preds) p = rng.normal();
        t.rows.push_back(row_from(preds, etest));
    }
    auto report = rank_features(t);
    CHECK(select_top_k(report, kNumPredictors).size() == kNumPredictors);
    CHECK(select_top_k(report, 11).size() == 11);
    CHECK(select_top_k(report, 1)[0] == report.scores[0].first);
    CHECK_THROWS_AS(select_top_k(report, 0), std::invalid_argument);
    CHECK_THROWS_AS(select_top_k(report, kNumPredictors + 1), std::invalid_argument);
}

TEST_CASE("correlation report csv") {
    CorrelationReport r;
    r.scores = {{"a", 0.5}, {"b", std::nullopt}};
    std::ostringstream os;
    write_correlation_csv(r, os);
    CHECK(os.str() == "feature,r\na,0.500000\nb,\n");
}

TEST_CASE("normalizer hits mean 0 sd 1 on fit data") {
    std::vector<std::vector<double>> rows = {{2.0, 10.0}, {4.0, 30.0}, {6.0, 15.0}};
    auto params = fit_normalizer(rows);
    auto scaled = apply_normalizer(params, rows);
    CHECK(scaled[0][0] == Approx(-1.0));
    CHECK(scaled[1][0] == Approx(0.0).margin(1e-12));
    CHECK(scaled[2][0] == Approx(1.0));
    for (std::size_t j = 0; j < 2; ++j) {
        std::vector<double> col;
        for (const auto& r : scaled) col.push_back(r[j]);
        CHECK(std::fabs(mean(col)) < 1e-9);
        CHECK(std::fabs(sample_sd(col) - 1.0) < 1e-9);
    }
    // idempotent on already-normalized data
    auto params2 = fit_normalizer(scaled);
    auto rescaled = apply_normalizer(params2, scaled);
    for (std::size_t i = 0; i < scaled.size(); ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(rescaled[i][j] == Approx(scaled[i][j]).margin(1e-9));
}

TEST_CASE("constant column maps to zero") {
    std::vector<std::vector<double>> rows = {{5.0}, {5.0}, {5.0}};
    auto params = fit_normalizer(rows);
    auto scaled = apply_normalizer(params, rows);
    for (const auto& r : scaled) CHECK(r[0] == 0.0);
}

TEST_CASE("normalizer is affine and invertible for sd > 0") {
    std::vector<std::vector<double>> rows = {{1.0}, {3.0}, {8.0}, {2.0}};
    auto params = fit_normalizer(rows);
    auto scaled = apply_normalizer(params, rows);
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(scaled[i][0] * params.sd[0] + params.mean[0] == Approx(rows[i][0]).margin(1e-12));
}

TEST_CASE("smote degenerate identical minority points") {
    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;
    for (int i = 0; i < 10; ++i) {
        rows.push_back({static_cast<double>(i), 5.0});
        labels.push_back(Label::good);
    }
    for (int i = 0; i < 3; ++i) {
        rows.push_back({1.0, 1.0});
        labels.push_back(Label::bad);
    }
    auto out = smote_oversample(rows, labels, {.k = 2, .seed = 9});
    REQUIRE(out.rows.size() == 20);
    for (std::size_t i = 13; i < out.rows.size(); ++i) {
        CHECK(out.rows[i][0] == Approx(1.0));
        CHECK(out.rows[i][1] == Approx(1.0));
        CHECK(out.labels[i] == Label::bad);
    }
}

TEST_CASE("smote balances 181/14 to 181/181") {
    Rng rng(2);
    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;
    for (int i = 0; i < 181; ++i) {
        rows.push_back({rng.normal(), rng.normal()});
        labels.push_back(Label::good);
    }
    for (int i = 0; i < 14; ++i) {
        rows.push_back({rng.normal(5.0, 1.0), rng.normal(5.0, 1.0)});
        labels.push_back(Label::bad);
    }
    auto out = smote_oversample(rows, labels, {.k = 5, .seed = 1});
    std::size_t bad = 0, good = 0;
    for (Label l : out.labels) (l == Label::bad ? bad : good)++;
    CHECK(bad == 181);
    CHECK(good == 181);
    CHECK(out.synthesized == 167);
    // originals untouched
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(out.rows[i] == rows[i]);
}

TEST_CASE("smote synthetic point lies on the segment, reproducibly") {
    std::vector<std::vector<double>> rows = {{0.0, 0.0}, {2.0, 2.0},
                                             {10.0, 0.0}, {11.0, 0.0}, {12.0, 0.0}};
    std::vector<Label> labels = {Label::bad, Label::bad, Label::good, Label::good, Label::good};
    auto out = smote_oversample(rows, labels, {.k = 1, .seed = 77});
    REQUIRE(out.synthesized == 1);
    const auto& s = out.rows.back();
    CHECK(s[0] == Approx(s[1]).margin(1e-12));  // on the diagonal segment
    CHECK(s[0] >= 0.0);
    CHECK(s[0] <= 2.0);
    // seeded convex-combination oracle: replay the same derived stream
    Rng replay = Rng::derive(77, "smote");
    std::size_t a = replay.index(2);
    (void)replay.index(1);
    double lambda = replay.uniform();
    double expected = a == 0 ? 0.0 + lambda * 2.0 : 2.0 + lambda * (0.0 - 2.0);
    CHECK(s[0] == expected);

    auto again = smote_oversample(rows, labels, {.k = 1, .seed = 77});
    CHECK(again.rows.back() == s);
}

TEST_CASE("smote contract errors") {
    std::vector<std::vector<double>> rows = {{0.0}, {1.0}, {2.0}};
    std::vector<Label> one_class = {Label::good, Label::good, Label::good};
    CHECK_THROWS_AS(smote_oversample(rows, one_class, {}), std::invalid_argument);
    std::vector<Label> tiny_minority = {Label::good, Label::good, Label::bad};
    CHECK_THROWS_AS(smote_oversample(rows, tiny_minority, {.k = 5, .seed = 0}),
                    std::invalid_argument);
}
