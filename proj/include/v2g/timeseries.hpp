#pragma once

#include <array>
#include <string>
#include <vector>

namespace v2g {

/// One logged simulation sample. Field order matches the CSV column order.
struct TimeSeriesRow {
    double t = 0.0;
    double v_ga = 0.0, v_gb = 0.0, v_gc = 0.0;        ///< grid reference voltages
    double v_ia = 0.0, v_ib = 0.0, v_ic = 0.0;        ///< inverter output voltages (after filter cap)
    double i_ia = 0.0, i_ib = 0.0, i_ic = 0.0;        ///< delivered (grid-side) currents
    double v_bridge_a = 0.0, v_bridge_b = 0.0, v_bridge_c = 0.0;  ///< raw pole voltages
    double v_dc = 0.0;                                ///< loaded battery terminal voltage
    double soc = 0.0;
    double mode_c = 0.0;                              ///< supervisor logic, 0 or 1
    double mv_a = 0.0, mv_b = 0.0, mv_c = 0.0;        ///< modulating signals
};

inline constexpr int kTimeSeriesColumns = 19;

/// CSV header, fixed column order.
const std::array<std::string, kTimeSeriesColumns>& timeseries_column_names();

class TimeSeries {
public:
    TimeSeries() = default;

    void reserve(std::size_t n) { rows_.reserve(n); }
    void push_back(const TimeSeriesRow& row) { rows_.push_back(row); }

    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }
    const TimeSeriesRow& operator[](std::size_t i) const { return rows_[i]; }
    const std::vector<TimeSeriesRow>& rows() const { return rows_; }

    /// Sample rate implied by the first two rows, hertz.
    double sample_rate() const;

    /// One column as a contiguous vector, by CSV column name.
    std::vector<double> column(const std::string& name) const;

private:
    std::vector<TimeSeriesRow> rows_;
};

/// Writes the fixed 19-column CSV with header; every value is formatted with
/// %.12g so equal runs produce byte-identical files. Throws IoError.
void write_csv(const TimeSeries& ts, const std::string& path);

/// Reads a CSV produced by write_csv (or any file with the exact header).
/// Throws IoError on missing file, wrong header, or malformed rows.
TimeSeries read_csv(const std::string& path);

/// %.12g rendering used for every CSV value.
std::string format_value(double v);

}  // namespace v2g
