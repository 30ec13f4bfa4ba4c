#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "v2g/errors.hpp"
#include "v2g/runner.hpp"
#include "v2g/scenario.hpp"

namespace {

void print_report(const v2g::ComparisonReport& rep, const std::string& out_dir) {
    std::printf("%-26s %16s %16s %14s\n", "signal", "thd_without_mpc", "thd_with_mpc",
                "improvement");
    for (const auto& row : rep.rows)
        std::printf("%-26s %15.6f%% %15.6f%% %13.4f%%\n", row.signal_name.c_str(),
                    row.thd_without_mpc, row.thd_with_mpc, row.improvement_percent);
    std::printf("grid frequency: without=%.6f Hz  with=%.6f Hz\n", rep.grid_frequency_without,
                rep.grid_frequency_with);
    std::printf("mode transitions:");
    for (const auto& [t, c] : rep.mode_transition_log) std::printf(" (t=%g, c=%d)", t, c);
    std::printf("\noutputs: %s/without_mpc.csv %s/with_mpc.csv %s/report.json\n", out_dir.c_str(),
                out_dir.c_str(), out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-loop G2V/V2G inverter laboratory: simulate, compare, analyze"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    const auto add_run_options = [&](CLI::App* cmd) {
        cmd->add_option("scenario", scenario_path, "Scenario file (JSON)")->required();
        cmd->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
    };
    CLI::App* run_cmd = app.add_subcommand(
        "run", "Simulate a scenario without and with MPC, write CSVs and the comparison report");
    add_run_options(run_cmd);
    CLI::App* compare_cmd =
        app.add_subcommand("compare", "Alias of run: the same two-mode comparison");
    add_run_options(compare_cmd);

    std::string csv_path;
    double f0 = 50.0;
    int n_max = 50;
    double window = v2g::kSteadyStateFraction;
    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "Per-column THD report for a time-series CSV");
    analyze_cmd->add_option("csv", csv_path, "Time-series CSV path")->required();
    analyze_cmd->add_option("--f0", f0, "Fundamental frequency hint, Hz")->required();
    analyze_cmd->add_option("--nmax", n_max, "Highest harmonic order")->capture_default_str();
    analyze_cmd->add_option("--window", window, "Tail fraction analyzed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run_cmd->parsed() || compare_cmd->parsed()) {
            const v2g::Scenario sc = v2g::parse_scenario(scenario_path);
            const v2g::ComparisonReport rep = v2g::run(sc, out_dir);
            print_report(rep, out_dir);
        } else {
            std::cout << v2g::analyze_csv(csv_path, f0, n_max, window).dump(2) << '\n';
        }
        return 0;
    } catch (const v2g::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const v2g::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 4;
    } catch (const v2g::SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
