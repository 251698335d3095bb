#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "edumine/dataset.hpp"
#include "edumine/ingest.hpp"
#include "edumine/metrics.hpp"
#include "edumine/rng.hpp"

namespace edumine::synth {

struct SynthConfig {
    std::size_t n_students = 200;
    double noise_sd = 2.0;       // etest points, pre-calibration
    double bad_fraction = 0.07;  // target share of `bad` students
    std::uint64_t seed = 0;
    bool emit_events = false;

    void validate() const {
        if (n_students < 10) throw std::invalid_argument("synth: need n_students >= 10");
        if (!(bad_fraction > 0.0 && bad_fraction < 0.5))
            throw std::invalid_argument("synth: bad_fraction must be in (0, 0.5)");
        if (noise_sd < 0.0) throw std::invalid_argument("synth: noise_sd must be >= 0");
        if (round_count(bad_fraction * static_cast<double>(n_students)) == 0)
            throw std::invalid_argument("synth: bad_fraction infeasible for this n");
    }
};

struct GroundTruth {
    std::vector<double> ability;     // in [0,1]
    std::vector<double> engagement;  // in [0,1]
    std::vector<double> predicted_etest;  // noiseless generative prediction per student
    // etest = clamp(65 + scale * (score - pivot), 0, 100), score = raw + noise
    double pivot = 0.0;
    double scale = 1.0;
};

namespace detail {

// regularized incomplete beta I_x(a,b) by continued fraction
inline double betacf(double a, double b, double x) {
    const double eps = 3e-14, fpmin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                b * std::log(1.0 - x);
    double front = std::exp(ln);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

// Beta(a,b) quantile by bisection
inline double beta_quantile(double a, double b, double u) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        double mid = (lo + hi) / 2.0;
        (incomplete_beta(a, b, mid) < u ? lo : hi) = mid;
    }
    return (lo + hi) / 2.0;
}

inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace detail

struct GeneratedDataset {
    FeatureTable table;
    GroundTruth truth;
};

// Ability ~ Beta(5,2), engagement ~ Beta(2,2), correlated 0.5 through a
// Gaussian copula. etest is a noisy linear blend of the two, recalibrated per
// seed so that exactly round(bad_fraction*n) students land at or below the
// grade threshold.
inline GeneratedDataset generate_dataset(const SynthConfig& cfg) {
    cfg.validate();
    std::size_t n = cfg.n_students;
    GeneratedDataset out;
    out.truth.ability.resize(n);
    out.truth.engagement.resize(n);
    out.truth.predicted_etest.resize(n);

    Rng latent = Rng::derive(cfg.seed, "latent");
    Rng noise = Rng::derive(cfg.seed, "etest_noise");
    Rng feat = Rng::derive(cfg.seed, "features");

    std::vector<double> raw(n), score(n);
    const double rho = 0.5;
    for (std::size_t i = 0; i < n; ++i) {
        double z1 = latent.normal();
        double z2 = latent.normal();
        double zb = rho * z1 + std::sqrt(1.0 - rho * rho) * z2;
        double a = detail::beta_quantile(5.0, 2.0, detail::std_normal_cdf(z1));
        double e = detail::beta_quantile(2.0, 2.0, detail::std_normal_cdf(zb));
        out.truth.ability[i] = a;
        out.truth.engagement[i] = e;
        raw[i] = 100.0 * std::clamp(0.7 * a + 0.25 * e + 0.05, 0.0, 1.0);
        score[i] = raw[i] + noise.normal(0.0, cfg.noise_sd);
    }

    // per-seed numeric calibration: the bad_fraction quantile of the noisy
    // score maps onto the grade threshold
    std::size_t k = round_count(cfg.bad_fraction * static_cast<double>(n));
    std::vector<double> sorted = score;
    std::sort(sorted.begin(), sorted.end());
    double pivot = sorted[k - 1];
    double spread_hi = sorted.back() - pivot;
    double scale = spread_hi > 1e-9 ? (99.0 - kGradeThreshold) / spread_hi : 1.0;
    out.truth.pivot = pivot;
    out.truth.scale = scale;

    auto calibrated = [&](double s) {
        return std::clamp(kGradeThreshold + scale * (s - pivot), 0.0, 100.0);
    };

    for (std::size_t i = 0; i < n; ++i) {
        double a = out.truth.ability[i], e = out.truth.engagement[i];
        out.truth.predicted_etest[i] = calibrated(raw[i]);

        auto count = [&](double mean, double sd) {
            return std::max(0.0, std::round(mean + feat.normal(0.0, sd)));
        };
        ingest::FeatureRow r;
        r.pe_exercise = count(24.0 * (0.7 * a + 0.25 * e), 0.5);
        r.pe_total_attempts = count(40.0 * a + 15.0 * e, 2.0);
        r.pe_reset = count(6.0 * (1.0 - a) + 4.0 * e, 1.0);
        r.pe_model = count(8.0 * (1.0 - a) * e, 1.0);
        r.total_attempts = count(30.0 * (0.6 * a + 0.4 * e), 1.5);
        r.total_hints = count(20.0 * (1.0 - a) * e, 1.5);
        r.gaming = count(12.0 * (0.5 * a + 0.5 * e), 1.0);
        r.exercise = count(28.0 * (0.6 * a + 0.3 * e), 2.0);
        r.slide = count(15.0 * e, 1.0);
        r.ss_total_visit = r.slide + count(8.0 * e, 1.0);
        r.pe_total_time = std::max(0.0, 3600.0 * (0.5 * a + 0.5 * e) + feat.normal(0.0, 120.0));
        r.ss_total_time = std::max(0.0, 2400.0 * e + feat.normal(0.0, 120.0));
        double other_time = std::max(0.0, 1800.0 * e + feat.normal(0.0, 300.0));
        r.total_time = r.pe_total_time + r.ss_total_time + other_time;
        r.interaction = r.pe_total_attempts + r.total_attempts + r.total_hints + r.gaming +
                        r.ss_total_visit + count(40.0 * e, 3.0);
        r.etest = calibrated(score[i]);

        char id[32];
        std::snprintf(id, sizeof id, "S%04zu", i);
        out.table.rows.push_back(r.to_table_row(id));
    }
    return out;
}

inline double oracle_r2(const GroundTruth& truth, const FeatureTable& table) {
    auto actual = table.etest_vector();
    return metrics::r_squared(actual, truth.predicted_etest);
}

struct GeneratedEventLog {
    std::vector<ingest::EventRecord> events;  // in emission (timestamp) order
    FeatureTable expected;                    // what ingest must reproduce
    ingest::SessionRule rule;
};

// Scripted activity whose aggregate is known at emission time. The expected
// table is tallied by the generator itself, so it is an independent oracle
// for the ingest module.
inline GeneratedEventLog generate_event_log(const SynthConfig& cfg) {
    cfg.validate();
    GeneratedEventLog out;
    out.rule.max_gap_seconds = 600.0;

    Rng rng = Rng::derive(cfg.seed, "event_log");
    std::int64_t base_ms = 1'500'000'000'000;

    for (std::size_t s = 0; s < cfg.n_students; ++s) {
        char id[32];
        std::snprintf(id, sizeof id, "S%04zu", s);
        std::string sid(id);
        ingest::FeatureRow expect;
        std::int64_t ts = base_ms + static_cast<std::int64_t>(s) * 86'400'000;
        bool first = true;
        ingest::EventKind prev_kind = ingest::EventKind::navigation;

        auto emit = [&](ingest::EventKind kind, const std::string& obj,
                        std::optional<std::uint32_t> attempt = std::nullopt,
                        std::optional<std::uint32_t> hint = std::nullopt) {
            if (!first) {
                // gap chosen by the generator; occasionally beyond the cap
                double gap = rng.uniform() < 0.1 ? 700.0 + rng.uniform() * 300.0
                                                 : 5.0 + rng.uniform() * 120.0;
                auto gap_ms = static_cast<std::int64_t>(gap * 1000.0);
                ts += gap_ms;
                double credited =
                    std::min(static_cast<double>(gap_ms) / 1000.0, out.rule.max_gap_seconds);
                expect.total_time += credited;
                using K = ingest::EventKind;
                if (prev_kind == K::pe_attempt || prev_kind == K::pe_reset ||
                    prev_kind == K::pe_model_answer || prev_kind == K::pe_complete)
                    expect.pe_total_time += credited;
                else if (prev_kind == K::slideshow_step || prev_kind == K::slideshow_load)
                    expect.ss_total_time += credited;
            }
            first = false;
            prev_kind = kind;
            expect.interaction += 1;
            out.events.push_back({sid, ts, kind, obj, attempt, hint});
        };

        bool minimal_activity = rng.index(20) == 0;  // some students barely log in
        emit(ingest::EventKind::auth, "login");
        if (!minimal_activity) {
            std::size_t n_pe = 1 + rng.index(4);
            for (std::size_t x = 0; x < n_pe; ++x) {
                std::string obj = "pe" + std::to_string(x);
                std::uint32_t attempts = 1 + static_cast<std::uint32_t>(rng.index(4));
                for (std::uint32_t a = 0; a < attempts; ++a)
                    emit(ingest::EventKind::pe_attempt, obj, a);
                expect.pe_total_attempts += attempts;
                if (rng.uniform() < 0.3) {
                    emit(ingest::EventKind::pe_reset, obj);
                    expect.pe_reset += 1;
                }
                if (rng.uniform() < 0.25) {
                    emit(ingest::EventKind::pe_model_answer, obj);
                    expect.pe_model += 1;
                }
                if (rng.uniform() < 0.7) {
                    emit(ingest::EventKind::pe_complete, obj);
                    expect.pe_exercise += 1;
                    expect.exercise += 1;
                }
            }
            std::size_t n_se = 1 + rng.index(5);
            for (std::size_t x = 0; x < n_se; ++x) {
                std::string obj = "se" + std::to_string(x);
                std::uint32_t attempts = 1 + static_cast<std::uint32_t>(rng.index(3));
                for (std::uint32_t a = 0; a < attempts; ++a)
                    emit(ingest::EventKind::se_attempt, obj, a);
                expect.total_attempts += attempts;
                if (rng.uniform() < 0.4) {
                    std::uint32_t hints = 1 + static_cast<std::uint32_t>(rng.index(3));
                    for (std::uint32_t h = 0; h < hints; ++h)
                        emit(ingest::EventKind::se_hint, obj, std::nullopt, h);
                    expect.total_hints += hints;
                }
                if (rng.uniform() < 0.6) {
                    emit(ingest::EventKind::se_correct, obj);
                    expect.exercise += 1;
                }
            }
            std::size_t n_ss = rng.index(4);
            for (std::size_t x = 0; x < n_ss; ++x) {
                std::string obj = "ss" + std::to_string(x);
                std::size_t visits = 1 + rng.index(3);
                for (std::size_t v = 0; v < visits; ++v) {
                    emit(ingest::EventKind::slideshow_load, obj);
                    expect.ss_total_visit += 1;
                    std::size_t steps = rng.index(4);
                    for (std::size_t st = 0; st < steps; ++st)
                        emit(ingest::EventKind::slideshow_step, obj);
                }
                expect.slide += 1;
            }
            std::size_t reloads = rng.index(4);
            for (std::size_t x = 0; x < reloads; ++x) {
                emit(ingest::EventKind::page_reload, "page");
                expect.gaming += 1;
            }
        }
        out.expected.rows.push_back(expect.to_table_row(sid));
    }
    return out;
}

inline void write_event_log(const std::vector<ingest::EventRecord>& events, std::ostream& os) {
    os << "timestamp_ms,student_id,kind,object_id,attempt_index,hint_index\n";
    for (const auto& ev : events) {
        os << ev.timestamp_ms << "," << ev.student_id << "," << ingest::kind_name(ev.kind) << ","
           << ev.object_id << ",";
        if (ev.attempt_index) os << *ev.attempt_index;
        os << ",";
        if (ev.hint_index) os << *ev.hint_index;
        os << "\n";
    }
}

}  // namespace edumine::synth
