#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edumine/dataset.hpp"

namespace edumine::ingest {

enum class EventKind {
    module_load,
    navigation,
    slideshow_step,
    slideshow_load,
    pe_attempt,
    pe_reset,
    pe_model_answer,
    pe_complete,
    se_attempt,
    se_hint,
    se_correct,
    page_reload,
    gradebook_load,
    auth,
};

inline const std::vector<std::pair<std::string, EventKind>>& event_kind_names() {
    static const std::vector<std::pair<std::string, EventKind>> names = {
        {"module_load", EventKind::module_load},
        {"navigation", EventKind::navigation},
        {"slideshow_step", EventKind::slideshow_step},
        {"slideshow_load", EventKind::slideshow_load},
        {"pe_attempt", EventKind::pe_attempt},
        {"pe_reset", EventKind::pe_reset},
        {"pe_model_answer", EventKind::pe_model_answer},
        {"pe_complete", EventKind::pe_complete},
        {"se_attempt", EventKind::se_attempt},
        {"se_hint", EventKind::se_hint},
        {"se_correct", EventKind::se_correct},
        {"page_reload", EventKind::page_reload},
        {"gradebook_load", EventKind::gradebook_load},
        {"auth", EventKind::auth},
    };
    return names;
}

// Unrecognized kinds fall back to `navigation`; they still count as an
// interaction but drive no exercise/slideshow counter.
inline EventKind parse_kind(std::string_view s) {
    for (const auto& [name, kind] : event_kind_names())
        if (name == s) return kind;
    return EventKind::navigation;
}

inline std::string kind_name(EventKind k) {
    for (const auto& [name, kind] : event_kind_names())
        if (kind == k) return name;
    return "navigation";
}

struct EventRecord {
    std::string student_id;
    std::int64_t timestamp_ms = 0;
    EventKind kind = EventKind::navigation;
    std::string object_id;
    std::optional<std::uint32_t> attempt_index;
    std::optional<std::uint32_t> hint_index;
};

struct ParseResult {
    std::vector<EventRecord> events;
    std::size_t malformed_count = 0;
};

// One event per line: timestamp_ms,student_id,kind,object_id,attempt_index,hint_index
// Empty trailing fields for inapplicable columns. A header row is detected by
// a non-numeric first field and skipped.
inline ParseResult parse_events(std::istream& in) {
    ParseResult out;
    std::string line;
    std::size_t lines_seen = 0;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (first) {
            first = false;
            if (fields.empty() || !parse_double(fields[0])) continue;  // header row
        }
        ++lines_seen;
        if (fields.size() < 4 || fields.size() > 6) {
            ++out.malformed_count;
            continue;
        }
        EventRecord ev;
        auto ts = parse_double(fields[0]);
        if (!ts || *ts < 0 || fields[1].empty()) {
            ++out.malformed_count;
            continue;
        }
        ev.timestamp_ms = static_cast<std::int64_t>(*ts);
        ev.student_id = fields[1];
        ev.kind = parse_kind(fields[2]);
        ev.object_id = fields[3];
        bool bad = false;
        auto opt_index = [&](const std::string& s) -> std::optional<std::uint32_t> {
            if (s.empty()) return std::nullopt;
            auto v = parse_double(s);
            if (!v || *v < 0 || *v != std::floor(*v)) {
                bad = true;
                return std::nullopt;
            }
            return static_cast<std::uint32_t>(*v);
        };
        if (fields.size() > 4) ev.attempt_index = opt_index(fields[4]);
        if (fields.size() > 5) ev.hint_index = opt_index(fields[5]);
        if (bad) {
            ++out.malformed_count;
            continue;
        }
        out.events.push_back(std::move(ev));
    }
    if (lines_seen > 0 && out.malformed_count * 2 > lines_seen)
        throw std::runtime_error("parse_events: more than half of the lines are malformed");
    return out;
}

// Inter-event gap above which elapsed time is not credited to any activity.
struct SessionRule {
    double max_gap_seconds = 600.0;
};

// Aggregated per-student attributes before CSV typing.
struct FeatureRow {
    double pe_total_time = 0.0;
    double pe_total_attempts = 0.0;
    double pe_reset = 0.0;
    double pe_model = 0.0;
    double pe_exercise = 0.0;
    double ss_total_time = 0.0;
    double ss_total_visit = 0.0;
    double slide = 0.0;
    double interaction = 0.0;
    double total_time = 0.0;
    double total_attempts = 0.0;
    double total_hints = 0.0;
    double gaming = 0.0;
    double exercise = 0.0;
    std::optional<double> etest;

    TableRow to_table_row(std::string student_id = {}) const {
        TableRow r;
        r.student_id = std::move(student_id);
        r.cells = {pe_total_time, pe_total_attempts, pe_reset,      pe_model,
                   pe_exercise,   ss_total_time,     ss_total_visit, slide,
                   interaction,   total_time,        total_attempts, total_hints,
                   gaming,        exercise,          std::nullopt};
        r.cells[kEtestIndex] = etest;
        return r;
    }
};

// Attempt/hint counters follow the max-per-object rule: the counter for each
// exercise is max(index)+1; an event without an index counts as one attempt.
inline FeatureRow aggregate_student(std::vector<EventRecord> events, const SessionRule& rule) {
    if (rule.max_gap_seconds <= 0)
        throw std::invalid_argument("aggregate_student: max_gap must be > 0");
    FeatureRow row;
    if (events.empty()) return row;

    const std::string& sid = events.front().student_id;
    for (const auto& ev : events)
        if (ev.student_id != sid)
            throw std::invalid_argument("aggregate_student: mixed student_ids");

    std::stable_sort(events.begin(), events.end(),
                     [](const EventRecord& a, const EventRecord& b) {
                         return a.timestamp_ms < b.timestamp_ms;
                     });

    std::map<std::string, std::uint32_t> pe_attempts;  // object -> count
    std::map<std::string, std::uint32_t> se_attempts;
    std::map<std::string, std::uint32_t> se_hints;
    std::set<std::string> slideshows_loaded;
    std::set<std::string> pe_completed;
    std::set<std::string> completed_any;

    auto bump = [](std::map<std::string, std::uint32_t>& m, const std::string& obj,
                   std::optional<std::uint32_t> index) {
        std::uint32_t count = index ? *index + 1 : 1;
        auto& cur = m[obj];
        cur = std::max(cur, count);
    };

    for (const auto& ev : events) {
        row.interaction += 1;
        switch (ev.kind) {
            case EventKind::pe_attempt:
                bump(pe_attempts, ev.object_id, ev.attempt_index);
                break;
            case EventKind::pe_reset:
                row.pe_reset += 1;
                break;
            case EventKind::pe_model_answer:
                row.pe_model += 1;
                break;
            case EventKind::pe_complete:
                pe_completed.insert(ev.object_id);
                completed_any.insert(ev.object_id);
                break;
            case EventKind::se_attempt:
                bump(se_attempts, ev.object_id, ev.attempt_index);
                break;
            case EventKind::se_hint:
                bump(se_hints, ev.object_id, ev.hint_index);
                break;
            case EventKind::se_correct:
                completed_any.insert(ev.object_id);
                break;
            case EventKind::slideshow_load:
                row.ss_total_visit += 1;
                slideshows_loaded.insert(ev.object_id);
                break;
            case EventKind::page_reload:
                row.gaming += 1;
                break;
            default:
                break;
        }
    }
    for (const auto& [obj, c] : pe_attempts) row.pe_total_attempts += c;
    for (const auto& [obj, c] : se_attempts) row.total_attempts += c;
    for (const auto& [obj, c] : se_hints) row.total_hints += c;
    row.slide = static_cast<double>(slideshows_loaded.size());
    row.pe_exercise = static_cast<double>(pe_completed.size());
    row.exercise = static_cast<double>(completed_any.size());

    // Time on task: inter-event gaps capped at max_gap, attributed to the
    // content type of the earlier event. Total_time covers all events.
    auto is_pe = [](EventKind k) {
        return k == EventKind::pe_attempt || k == EventKind::pe_reset ||
               k == EventKind::pe_model_answer || k == EventKind::pe_complete;
    };
    auto is_ss = [](EventKind k) {
        return k == EventKind::slideshow_step || k == EventKind::slideshow_load;
    };
    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
        double gap = static_cast<double>(events[i + 1].timestamp_ms - events[i].timestamp_ms) / 1000.0;
        gap = std::min(gap, rule.max_gap_seconds);
        row.total_time += gap;
        if (is_pe(events[i].kind)) row.pe_total_time += gap;
        else if (is_ss(events[i].kind)) row.ss_total_time += gap;
    }
    return row;
}

struct BuildResult {
    FeatureTable table;  // rows sorted by student_id, ids attached
    std::vector<std::string> unknown_grade_students;  // grades with no events
};

inline BuildResult build_feature_table(const std::vector<EventRecord>& events,
                                       const SessionRule& rule,
                                       const std::map<std::string, double>* grades = nullptr) {
    std::map<std::string, std::vector<EventRecord>> by_student;
    for (const auto& ev : events) by_student[ev.student_id].push_back(ev);

    BuildResult out;
    for (auto& [sid, evs] : by_student) {
        FeatureRow row = aggregate_student(std::move(evs), rule);
        if (grades) {
            auto it = grades->find(sid);
            if (it != grades->end()) row.etest = it->second;
        }
        out.table.rows.push_back(row.to_table_row(sid));
    }
    if (grades)
        for (const auto& [sid, g] : *grades)
            if (!by_student.count(sid)) out.unknown_grade_students.push_back(sid);
    return out;
}

}  // namespace edumine::ingest
