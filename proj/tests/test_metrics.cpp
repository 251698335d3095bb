#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "edumine/metrics.hpp"
#include "edumine/rng.hpp"

using namespace edumine;
using namespace edumine::metrics;
using Catch::Approx;

TEST_CASE("r_squared basics") {
    std::vector<double> actual = {1.0, 2.0, 3.0};
    CHECK(r_squared(actual, actual) == Approx(1.0));

    std::vector<double> baseline = {2.0, 2.0, 2.0};  // mean of actual
    CHECK(r_squared(actual, baseline) == Approx(0.0).margin(1e-12));

    std::vector<double> predicted = {1.0, 2.0, 4.0};  // ss_res=1, ss_tot=2
    CHECK(r_squared(actual, predicted) == Approx(0.5));

    std::vector<double> constant = {5.0, 5.0, 5.0};
    CHECK_THROWS_AS(r_squared(constant, actual), std::invalid_argument);
}

TEST_CASE("r_squared can be negative for poor models") {
    std::vector<double> actual = {1.0, 2.0, 3.0};
    std::vector<double> predicted = {10.0, -10.0, 10.0};
    CHECK(r_squared(actual, predicted) < 0.0);
}

TEST_CASE("rmse") {
    std::vector<double> a = {1.0, 2.0};
    CHECK(rmse(a, a) == 0.0);

    std::vector<double> zeros = {0.0, 0.0}, p = {3.0, 4.0};
    CHECK(rmse(zeros, p) == Approx(3.535534).epsilon(1e-6));  // sqrt(12.5)

    std::vector<double> one_a = {1.0}, one_p = {4.0};
    CHECK(rmse(one_a, one_p) == Approx(3.0));

    CHECK(rmse(p, zeros) == rmse(zeros, p));
}

TEST_CASE("mape") {
    std::vector<double> a = {100.0, 50.0};
    CHECK(mape(a, a) == 0.0);

    std::vector<double> p = {90.0, 55.0};
    CHECK(mape(a, p) == Approx(10.0));

    std::vector<double> with_zero = {100.0, 0.0};
    CHECK_THROWS_AS(mape(with_zero, p), std::domain_error);
}

TEST_CASE("mape is not symmetric") {
    std::vector<double> a = {100.0, 50.0}, p = {90.0, 55.0};
    CHECK(mape(a, p) != mape(p, a));
}

TEST_CASE("confusion matrix counts") {
    using L = Label;
    std::vector<L> actual = {L::bad, L::bad, L::good, L::good, L::bad,
                             L::good, L::good, L::bad, L::good, L::good};
    std::vector<L> pred = {L::bad, L::good, L::good, L::bad, L::bad,
                           L::good, L::good, L::bad, L::good, L::bad};
    auto m = confusion(actual, pred);
    // hand tally: positives (bad) at 0,1,4,7; predicted bad at 0,3,4,7,9
    CHECK(m.tp == 3);
    CHECK(m.fn == 1);
    CHECK(m.fp == 2);
    CHECK(m.tn == 4);
    CHECK(m.total() == actual.size());

    auto perfect = confusion(actual, actual);
    CHECK(perfect.fp == 0);
    CHECK(perfect.fn == 0);

    std::vector<L> flipped;
    for (L l : pred) flipped.push_back(l == L::bad ? L::good : L::bad);
    auto f = confusion(actual, flipped);
    CHECK(f.tp == m.fn);
    CHECK(f.fn == m.tp);
    CHECK(f.fp == m.tn);
    CHECK(f.tn == m.fp);
}

TEST_CASE("derived metrics") {
    ConfusionMatrix m{9, 1, 1, 9};
    CHECK(accuracy(m) == Approx(0.9));

    CHECK(f_score(1.0, 0.85) == Approx(0.918919).epsilon(1e-6));
    CHECK(f_score(0.8965, 0.6341) == Approx(0.7428).margin(5e-5));

    ConfusionMatrix none{0, 0, 0, 0};
    CHECK_THROWS_AS(accuracy(none), std::domain_error);
    ConfusionMatrix no_pred_pos{0, 3, 0, 7};
    CHECK_THROWS_AS(precision(no_pred_pos), std::domain_error);
    ConfusionMatrix no_actual_pos{0, 0, 3, 7};
    CHECK_THROWS_AS(recall(no_actual_pos), std::domain_error);
}

TEST_CASE("metric permutation invariance") {
    Rng rng(99);
    std::vector<double> a, p;
    for (int i = 0; i < 40; ++i) {
        a.push_back(10.0 + rng.uniform() * 90.0);
        p.push_back(10.0 + rng.uniform() * 90.0);
    }
    double r2 = r_squared(a, p), rm = rmse(a, p), mp = mape(a, p);

    std::vector<std::size_t> perm(a.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<double> a2, p2;
    for (std::size_t i : perm) {
        a2.push_back(a[i]);
        p2.push_back(p[i]);
    }
    CHECK(r_squared(a2, p2) == Approx(r2).epsilon(1e-12));
    CHECK(rmse(a2, p2) == Approx(rm).epsilon(1e-12));
    CHECK(mape(a2, p2) == Approx(mp).epsilon(1e-12));
}

TEST_CASE("cross-metric consistency: r2 vs rmse") {
    Rng rng(7);
    std::vector<double> a, p;
    for (int i = 0; i < 25; ++i) {
        a.push_back(rng.uniform() * 50.0 + 20.0);
        p.push_back(rng.uniform() * 50.0 + 20.0);
    }
    double mean = 0.0;
    for (double v : a) mean += v;
    mean /= a.size();
    double ss_tot = 0.0;
    for (double v : a) ss_tot += (v - mean) * (v - mean);
    double r2 = r_squared(a, p);
    double rm = rmse(a, p);
    CHECK(r2 == Approx(1.0 - rm * rm * a.size() / ss_tot).epsilon(1e-10));
}

TEST_CASE("f_score identities") {
    // harmonic mean never exceeds the arithmetic mean
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        double p = 0.05 + 0.95 * rng.uniform();
        double r = 0.05 + 0.95 * rng.uniform();
        double f = f_score(p, r);
        CHECK(f == Approx(2.0 * p * r / (p + r)).epsilon(1e-12));
        CHECK(f <= (p + r) / 2.0 + 1e-12);
    }
}
