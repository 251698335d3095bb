#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edumine/rng.hpp"

namespace edumine {

// The 15 attributes of the student feature table, in canonical column order.
inline const std::array<std::string, 15>& attribute_names() {
    static const std::array<std::string, 15> names = {
        "PE_total_time", "PE_total_attempts", "PE_reset",    "PE_model",
        "PE_exercise",   "SS_total_time",     "SS_total_visit", "slide",
        "Interaction",   "Total_time",        "Total_attempts", "Total_hints",
        "gaming",        "exercise",          "etest"};
    return names;
}

constexpr std::size_t kNumAttributes = 15;
constexpr std::size_t kNumPredictors = 14;  // everything except etest
constexpr std::size_t kEtestIndex = 14;
constexpr double kGradeThreshold = 65.0;  // good iff etest > 65

enum class Label : std::uint8_t { good = 0, bad = 1 };

inline std::string to_string(Label l) { return l == Label::good ? "good" : "bad"; }

// Shortest round-trippable decimal representation.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// One student's attribute vector. Cells may be missing (empty in CSV).
struct TableRow {
    std::string student_id;  // optional, empty when the source had none
    std::array<std::optional<double>, kNumAttributes> cells{};

    std::optional<double> etest() const { return cells[kEtestIndex]; }
    bool complete() const {
        return std::all_of(cells.begin(), cells.end(), [](auto& c) { return c.has_value(); });
    }
};

struct FeatureTable {
    std::vector<TableRow> rows;

    std::size_t n() const { return rows.size(); }

    // Predictor matrix (first 14 columns); throws on missing cells.
    std::vector<std::vector<double>> predictor_matrix() const {
        std::vector<std::vector<double>> m;
        m.reserve(rows.size());
        for (const auto& r : rows) {
            std::vector<double> v(kNumPredictors);
            for (std::size_t j = 0; j < kNumPredictors; ++j) {
                if (!r.cells[j]) throw std::invalid_argument("predictor_matrix: missing cell");
                v[j] = *r.cells[j];
            }
            m.push_back(std::move(v));
        }
        return m;
    }

    std::vector<double> etest_vector() const {
        std::vector<double> y;
        y.reserve(rows.size());
        for (const auto& r : rows) {
            if (!r.etest()) throw std::invalid_argument("etest_vector: missing etest");
            y.push_back(*r.etest());
        }
        return y;
    }
};

// ---------------------------------------------------------------------------
// CSV persistence
//
// Comma-separated, header row with the Table-1 attribute names (any order),
// optional leading student_id column, '.' decimal separator, empty cell =
// missing, UTF-8, LF line endings.

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}
}  // namespace detail

inline FeatureTable load_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) return {};  // empty file -> empty table
    auto header = detail::split_csv_line(line);

    bool has_id = !header.empty() && header[0] == "student_id";
    std::size_t first_attr = has_id ? 1 : 0;

    // column position -> attribute index
    std::vector<std::size_t> col_attr;
    for (std::size_t c = first_attr; c < header.size(); ++c) {
        const auto& names = attribute_names();
        auto it = std::find(names.begin(), names.end(), header[c]);
        if (it == names.end())
            throw std::runtime_error("load_csv: unknown column '" + header[c] + "'");
        std::size_t idx = static_cast<std::size_t>(it - names.begin());
        for (std::size_t seen : col_attr)
            if (seen == idx)
                throw std::runtime_error("load_csv: duplicate column '" + header[c] + "'");
        col_attr.push_back(idx);
    }

    FeatureTable table;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error("load_csv: row " + std::to_string(row_no) +
                                     " has wrong field count");
        TableRow row;
        if (has_id) row.student_id = fields[0];
        for (std::size_t c = 0; c < col_attr.size(); ++c) {
            const std::string& cell = fields[first_attr + c];
            if (cell.empty()) continue;
            auto v = parse_double(cell);
            if (!v)
                throw std::runtime_error("load_csv: non-numeric cell at row " +
                                         std::to_string(row_no) + " col " +
                                         attribute_names()[col_attr[c]]);
            row.cells[col_attr[c]] = *v;
        }
        table.rows.push_back(std::move(row));
        ++row_no;
    }
    return table;
}

inline FeatureTable load_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_csv: cannot open " + path);
    return load_csv(f);
}

inline void save_csv(const FeatureTable& table, std::ostream& out) {
    bool has_ids = std::any_of(table.rows.begin(), table.rows.end(),
                               [](const TableRow& r) { return !r.student_id.empty(); });
    if (has_ids) out << "student_id,";
    const auto& names = attribute_names();
    for (std::size_t j = 0; j < names.size(); ++j) out << names[j] << (j + 1 < names.size() ? "," : "\n");
    for (const auto& r : table.rows) {
        if (has_ids) out << r.student_id << ",";
        for (std::size_t j = 0; j < kNumAttributes; ++j) {
            if (r.cells[j]) out << format_double(*r.cells[j]);
            out << (j + 1 < kNumAttributes ? "," : "\n");
        }
    }
}

inline void save_csv(const FeatureTable& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_csv: cannot open " + path);
    save_csv(table, f);
}

// ---------------------------------------------------------------------------
// Cleaning, labeling, splitting

struct CleanResult {
    FeatureTable table;
    std::size_t dropped = 0;
};

// Keep only rows with no missing predictor or etest value.
inline CleanResult clean_missing(const FeatureTable& table) {
    CleanResult out;
    for (const auto& r : table.rows) {
        if (r.complete())
            out.table.rows.push_back(r);
        else
            ++out.dropped;
    }
    return out;
}

inline Label label_for(double etest) {
    return etest > kGradeThreshold ? Label::good : Label::bad;
}

inline std::vector<Label> derive_labels(const FeatureTable& table) {
    std::vector<Label> labels;
    labels.reserve(table.n());
    for (const auto& r : table.rows) {
        if (!r.etest()) throw std::invalid_argument("derive_labels: missing etest");
        labels.push_back(label_for(*r.etest()));
    }
    return labels;
}

struct SplitResult {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;
    double ratio = 0.0;
};

// round-half-to-even
inline std::size_t round_count(double x) {
    return static_cast<std::size_t>(std::nearbyint(x));
}

inline SplitResult train_test_split(std::size_t n, double ratio, std::uint64_t seed,
                                    const std::vector<Label>* stratify = nullptr) {
    if (n < 2) throw std::invalid_argument("train_test_split: need n >= 2");
    if (!(ratio > 0.0 && ratio < 1.0))
        throw std::invalid_argument("train_test_split: ratio must be in (0,1)");
    if (stratify && stratify->size() != n)
        throw std::invalid_argument("train_test_split: stratify size mismatch");

    SplitResult out;
    out.seed = seed;
    out.ratio = ratio;

    auto split_group = [&](std::vector<std::size_t> idx, Rng& rng) {
        rng.shuffle(idx);
        std::size_t n_train = round_count(ratio * static_cast<double>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < n_train ? out.train_indices : out.test_indices).push_back(idx[i]);
    };

    Rng rng = Rng::derive(seed, "train_test_split");
    if (!stratify) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        split_group(std::move(idx), rng);
    } else {
        for (Label cls : {Label::good, Label::bad}) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < n; ++i)
                if ((*stratify)[i] == cls) idx.push_back(i);
            if (idx.empty()) throw std::invalid_argument("train_test_split: empty stratum");
            split_group(std::move(idx), rng);
        }
    }
    std::sort(out.train_indices.begin(), out.train_indices.end());
    std::sort(out.test_indices.begin(), out.test_indices.end());
    return out;
}

}  // namespace edumine
