#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "v2g/powertrain.hpp"
#include "v2g/timeseries.hpp"

namespace v2g {

/// Fraction of the record (from the end) used for steady-state measurements.
inline constexpr double kSteadyStateFraction = 0.2;

/// One Table-style comparison row. The measurement fields pin down exactly
/// which CSV columns and harmonic limit produced the numbers, so `analyze`
/// on the written CSVs reproduces them.
struct ReportRow {
    std::string signal_name;
    double thd_without_mpc = 0.0;
    double thd_with_mpc = 0.0;
    double improvement_percent = 0.0;
    std::vector<std::string> columns_without;
    std::vector<std::string> columns_with;
    int n_max = 50;
    std::string note;
};

struct ComparisonReport {
    std::vector<ReportRow> rows;  ///< grid voltage, grid current, inverter voltage, inverter current
    double grid_frequency_without = 0.0;  ///< hertz, estimated from v_ia
    double grid_frequency_with = 0.0;
    std::vector<std::pair<double, int>> mode_transition_log;  ///< (t, c) of the with-MPC run
    double f0_hz = 0.0;
    double window_fraction = kSteadyStateFraction;
};

/// Mean of the per-phase THDs of a column group over the steady-state tail.
double group_thd(const TimeSeries& ts, const std::vector<std::string>& columns, double f0,
                 int n_max, double window_fraction = kSteadyStateFraction);

/// Assembles the four-row report from a without/with pair of runs.
ComparisonReport build_report(const TimeSeries& without_mpc, const TimeSeries& with_mpc,
                              double f0);

/// Executes the scenario twice (mpc enabled false, then true, all else
/// identical), writes without_mpc.csv, with_mpc.csv and report.json into
/// out_dir (plus mpc_log.csv when V2GLAB_VERBOSE is set), and returns the
/// report. Simulation and IO errors are re-thrown with the run phase named.
ComparisonReport run(const Scenario& sc, const std::string& out_dir);

/// Writes one time series plus the report; refuses an empty series. Returns
/// the paths written.
std::vector<std::string> write_outputs(const TimeSeries& ts, const ComparisonReport& report,
                                       const std::string& out_dir,
                                       const std::string& csv_name = "with_mpc.csv");

nlohmann::ordered_json report_to_json(const ComparisonReport& report);

/// Per-column THD/frequency/spectrum report for any schema-conforming CSV.
/// Columns whose analysis fails (e.g. all-zero) carry an "error" entry.
nlohmann::ordered_json analyze_csv(const std::string& csv_path, double f0, int n_max = 50,
                                   double window_fraction = kSteadyStateFraction);

}  // namespace v2g
