#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pearsonq/errors.hpp"
#include "pearsonq/summation.hpp"

namespace pearsonq {

enum class Case { continuous, discrete };

[[nodiscard]] inline const char* to_string(Case c) {
    return c == Case::continuous ? "continuous" : "discrete";
}

/// An ordered batch of finite observations plus the case flag.
struct Sample {
    std::vector<double> values;
    Case kind = Case::continuous;

    [[nodiscard]] std::size_t n() const { return values.size(); }
};

/// Validates and normalizes raw values into a Sample. Discrete values must be
/// integers up to 1e-9 absolute (CSV round-trip noise) and are rounded.
[[nodiscard]] inline Sample make_sample(std::vector<double> values, Case kind) {
    if (values.empty()) throw DataError("sample is empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        double& v = values[i];
        if (!std::isfinite(v)) {
            throw DataError("non-finite value at position " + std::to_string(i + 1));
        }
        if (kind == Case::discrete) {
            const double r = std::round(v);
            if (std::fabs(v - r) > 1e-9) {
                throw DataError("discrete sample requires integer values; got " +
                                std::to_string(v) + " at position " + std::to_string(i + 1));
            }
            v = r;
        }
    }
    return Sample{std::move(values), kind};
}

/// Sample central moments m_2..m_8 (divisor n), the mean, and
/// Theta-hat = m4 m2 - m3^2 - m2^3.
struct MomentSet {
    double mean = 0.0;
    int max_order = 0;
    std::array<double, 9> m{};  // m[k], k = 2..max_order; m[0] = 1, m[1] = 0
    double theta = std::numeric_limits<double>::quiet_NaN();
    std::size_t n = 0;

    [[nodiscard]] double operator[](int k) const { return m[static_cast<std::size_t>(k)]; }
};

/// Numerical floor below which Theta-hat is treated as zero.
[[nodiscard]] inline double theta_epsilon(double m2) {
    return 1e-12 * std::max(1.0, m2 * m2 * m2);
}

/// Two-pass central moments with compensated summation; eighth powers of
/// centered values are hostile to one-pass updates.
[[nodiscard]] inline MomentSet central_moments(const Sample& s, int max_order) {
    if (max_order < 2 || max_order > 8) {
        throw std::invalid_argument("central_moments: max_order must be in 2..8");
    }
    if (s.values.empty()) throw DataError("sample is empty");
    const auto n = static_cast<double>(s.values.size());

    CompensatedSum total;
    for (double x : s.values) total.add(x);
    const double mean = total.value() / n;

    std::array<CompensatedSum, 9> acc{};
    CompensatedSum residual;  // sum of (x - mean); corrects m2 for mean rounding
    for (double x : s.values) {
        const double d = x - mean;
        residual.add(d);
        double p = d;
        for (int k = 2; k <= max_order; ++k) {
            p *= d;
            acc[static_cast<std::size_t>(k)].add(p);
        }
    }

    MomentSet ms;
    ms.mean = mean;
    ms.max_order = max_order;
    ms.n = s.values.size();
    ms.m[0] = 1.0;
    ms.m[1] = 0.0;
    const double r = residual.value();
    for (int k = 2; k <= max_order; ++k) {
        ms.m[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(k)].value() / n;
    }
    ms.m[2] -= (r / n) * (r / n);
    if (ms.m[2] < 0.0) ms.m[2] = 0.0;
    if (max_order >= 4) {
        ms.theta = ms.m[4] * ms.m[2] - ms.m[3] * ms.m[3] - ms.m[2] * ms.m[2] * ms.m[2];
    }
    return ms;
}

[[nodiscard]] inline std::size_t distinct_value_count(const Sample& s) {
    std::vector<double> sorted = s.values;
    std::sort(sorted.begin(), sorted.end());
    std::size_t count = sorted.empty() ? 0 : 1;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] != sorted[i - 1]) ++count;
    }
    return count;
}

/// Passes iff the moment estimators are defined: at least three distinct
/// values and Theta-hat above the numerical floor.
inline void assert_nondegenerate(const MomentSet& ms, const Sample& s) {
    const std::size_t distinct = distinct_value_count(s);
    if (distinct < 3 || !(ms.theta > theta_epsilon(ms.m[2]))) {
        throw ThetaDegenerate(distinct, ms.theta);
    }
}

/// Column selector for CSV ingestion: by header name or 0-based index.
struct ColumnRef {
    std::optional<std::string> name;
    std::optional<std::size_t> index;

    [[nodiscard]] static ColumnRef parse(const std::string& spec) {
        ColumnRef ref;
        if (spec.empty()) return ref;
        bool numeric = !spec.empty() &&
                       spec.find_first_not_of("0123456789") == std::string::npos;
        if (numeric) {
            ref.index = static_cast<std::size_t>(std::stoul(spec));
        } else {
            ref.name = spec;
        }
        return ref;
    }
};

struct IngestReport {
    Sample sample;
    std::size_t rows_parsed = 0;
    std::size_t lines_skipped = 0;  // comments, blanks, header
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool parse_number(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

}  // namespace detail

/// Reads one value per line (or one CSV column), skipping '#' comments, blank
/// lines, and an optional single header row.
[[nodiscard]] inline IngestReport ingest_csv(const std::string& path,
                                             const ColumnRef& column,
                                             Case kind) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    IngestReport report;
    std::vector<double> values;
    std::size_t line_no = 0;
    bool header_checked = false;
    std::optional<std::size_t> col_index = column.index;

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#') {
            ++report.lines_skipped;
            continue;
        }
        const auto cells = detail::split_csv_line(t);

        if (!header_checked) {
            header_checked = true;
            if (column.name) {
                // A named column requires a header row to resolve it.
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    if (detail::trim(cells[i]) == *column.name) col_index = i;
                }
                if (!col_index) {
                    throw DataError("column '" + *column.name + "' not found in header of " + path);
                }
                ++report.lines_skipped;
                continue;
            }
            double probe;
            const std::size_t idx = col_index.value_or(0);
            if (idx >= cells.size() || !detail::parse_number(cells[idx], probe)) {
                ++report.lines_skipped;  // header row
                continue;
            }
        }

        const std::size_t idx = col_index.value_or(0);
        if (idx >= cells.size()) {
            throw DataError(path + ": row " + std::to_string(line_no) +
                            " has no column " + std::to_string(idx));
        }
        double v;
        if (!detail::parse_number(cells[idx], v)) {
            throw DataError(path + ": non-numeric cell at row " + std::to_string(line_no) +
                            ": '" + detail::trim(cells[idx]) + "'");
        }
        values.push_back(v);
        ++report.rows_parsed;
    }

    if (values.empty()) throw DataError(path + ": no data rows");
    report.sample = make_sample(std::move(values), kind);
    return report;
}

}  // namespace pearsonq
