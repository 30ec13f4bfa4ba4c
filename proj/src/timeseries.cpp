#include "v2g/timeseries.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "v2g/errors.hpp"

namespace v2g {

namespace {

// Column order is part of the file contract; do not reorder.
using Field = double TimeSeriesRow::*;
constexpr std::array<Field, kTimeSeriesColumns> kFields = {
    &TimeSeriesRow::t,
    &TimeSeriesRow::v_ga, &TimeSeriesRow::v_gb, &TimeSeriesRow::v_gc,
    &TimeSeriesRow::v_ia, &TimeSeriesRow::v_ib, &TimeSeriesRow::v_ic,
    &TimeSeriesRow::i_ia, &TimeSeriesRow::i_ib, &TimeSeriesRow::i_ic,
    &TimeSeriesRow::v_bridge_a, &TimeSeriesRow::v_bridge_b, &TimeSeriesRow::v_bridge_c,
    &TimeSeriesRow::v_dc, &TimeSeriesRow::soc, &TimeSeriesRow::mode_c,
    &TimeSeriesRow::mv_a, &TimeSeriesRow::mv_b, &TimeSeriesRow::mv_c,
};

std::string header_line() {
    const auto& names = timeseries_column_names();
    std::string h = names[0];
    for (int i = 1; i < kTimeSeriesColumns; ++i) {
        h += ',';
        h += names[static_cast<std::size_t>(i)];
    }
    return h;
}

}  // namespace

const std::array<std::string, kTimeSeriesColumns>& timeseries_column_names() {
    static const std::array<std::string, kTimeSeriesColumns> names = {
        "t",
        "v_ga", "v_gb", "v_gc",
        "v_ia", "v_ib", "v_ic",
        "i_ia", "i_ib", "i_ic",
        "v_bridge_a", "v_bridge_b", "v_bridge_c",
        "v_dc", "soc", "mode_c",
        "mv_a", "mv_b", "mv_c",
    };
    return names;
}

double TimeSeries::sample_rate() const {
    if (rows_.size() < 2) throw IoError("timeseries: need at least 2 rows for a sample rate");
    const double dt = rows_[1].t - rows_[0].t;
    if (!(dt > 0.0)) throw IoError("timeseries: non-increasing time column");
    return 1.0 / dt;
}

std::vector<double> TimeSeries::column(const std::string& name) const {
    const auto& names = timeseries_column_names();
    for (int i = 0; i < kTimeSeriesColumns; ++i) {
        if (names[static_cast<std::size_t>(i)] != name) continue;
        std::vector<double> out;
        out.reserve(rows_.size());
        const Field f = kFields[static_cast<std::size_t>(i)];
        for (const auto& row : rows_) out.push_back(row.*f);
        return out;
    }
    throw IoError("timeseries: unknown column '" + name + "'");
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_csv(const TimeSeries& ts, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: identical bytes on every platform
    if (!out) throw IoError("timeseries: cannot open '" + path + "' for writing");
    out << header_line() << '\n';
    std::string line;
    for (const auto& row : ts.rows()) {
        line.clear();
        for (int i = 0; i < kTimeSeriesColumns; ++i) {
            if (i) line += ',';
            line += format_value(row.*kFields[static_cast<std::size_t>(i)]);
        }
        line += '\n';
        out << line;
    }
    out.flush();
    if (!out) throw IoError("timeseries: write to '" + path + "' failed");
}

TimeSeries read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("timeseries: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("timeseries: '" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header_line())
        throw IoError("timeseries: '" + path + "' header does not match the fixed schema");

    TimeSeries ts;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        TimeSeriesRow row;
        const char* p = line.c_str();
        for (int i = 0; i < kTimeSeriesColumns; ++i) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p)
                throw IoError("timeseries: '" + path + "' line " + std::to_string(lineno) +
                              ": malformed value in column " + std::to_string(i + 1));
            row.*kFields[static_cast<std::size_t>(i)] = v;
            p = end;
            if (i + 1 < kTimeSeriesColumns) {
                if (*p != ',')
                    throw IoError("timeseries: '" + path + "' line " + std::to_string(lineno) +
                                  ": expected " + std::to_string(kTimeSeriesColumns) + " columns");
                ++p;
            }
        }
        if (*p != '\0')
            throw IoError("timeseries: '" + path + "' line " + std::to_string(lineno) +
                          ": trailing characters after last column");
        ts.push_back(row);
    }
    return ts;
}

}  // namespace v2g
