#include "v2g/scenario.hpp"

#include <fstream>
#include <set>
#include <utility>

#include "v2g/errors.hpp"

namespace v2g {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

// Strict-schema accessor: every child must be consumed exactly once, and
// finish() rejects whatever was never asked for, by full field path.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
        for (const auto& item : j_.items()) remaining_.insert(item.key());
    }

    const json& child(const std::string& key) {
        remaining_.erase(key);
        if (!j_.contains(key)) fail(path_ + "." + key, "missing required key");
        return j_.at(key);
    }

    const json* opt_child(const std::string& key) {
        remaining_.erase(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    double number(const std::string& key) { return as_number(child(key), path_ + "." + key); }

    double number_or(const std::string& key, double def) {
        const json* v = opt_child(key);
        return v ? as_number(*v, path_ + "." + key) : def;
    }

    int integer(const std::string& key) {
        const json& v = child(key);
        if (!v.is_number_integer()) fail(path_ + "." + key, "expected an integer");
        return v.get<int>();
    }

    std::int64_t integer64_or(const std::string& key, std::int64_t def) {
        const json* v = opt_child(key);
        if (!v) return def;
        if (!v->is_number_integer()) fail(path_ + "." + key, "expected an integer");
        return v->get<std::int64_t>();
    }

    bool boolean_or(const std::string& key, bool def) {
        const json* v = opt_child(key);
        if (!v) return def;
        if (!v->is_boolean()) fail(path_ + "." + key, "expected a boolean");
        return v->get<bool>();
    }

    const std::string& path() const { return path_; }

    void finish() {
        if (!remaining_.empty()) fail(path_ + "." + *remaining_.begin(), "unknown key");
    }

private:
    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) fail(path, "expected a number");
        return v.get<double>();
    }

    const json& j_;
    std::string path_;
    std::set<std::string> remaining_;
};

Eigen::MatrixXd parse_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    Eigen::MatrixXd m;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j.at(static_cast<std::size_t>(r));
        if (!row.is_array() || row.empty()) fail(path, "expected rows to be non-empty arrays");
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            m.resize(rows, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            fail(path, "rows have inconsistent lengths");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const json& v = row.at(static_cast<std::size_t>(c));
            if (!v.is_number()) fail(path, "expected numeric entries");
            m(r, c) = v.get<double>();
        }
    }
    return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

PowerProfile parse_profile(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of [t, watts] pairs");
    PowerProfile p;
    for (const json& entry : j) {
        if (!entry.is_array() || entry.size() != 2 || !entry.at(0).is_number() ||
            !entry.at(1).is_number())
            fail(path, "expected [t, watts] pairs");
        p.points.emplace_back(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
    return p;
}

json profile_to_json(const PowerProfile& p) {
    json out = json::array();
    for (const auto& [t, w] : p.points) out.push_back(json::array({t, w}));
    return out;
}

void parse_plant(const json& j, Scenario& sc) {
    Section plant(j, "plant");
    if (plant.has("matrices")) {
        Section mats(plant.child("matrices"), "plant.matrices");
        const Eigen::MatrixXd a = parse_matrix(mats.child("A"), "plant.matrices.A");
        const Eigen::MatrixXd b = parse_matrix(mats.child("B"), "plant.matrices.B");
        const Eigen::MatrixXd c = parse_matrix(mats.child("C"), "plant.matrices.C");
        try {
            sc.plant = ContinuousStateSpace(a, b, c);
        } catch (const std::invalid_argument& e) {
            fail("plant.matrices", e.what());
        }
        const Eigen::Index n = sc.plant.num_states();
        sc.c_current = Eigen::MatrixXd::Zero(3, n);
        sc.c_bridge = Eigen::MatrixXd::Zero(3, n);
        if (const json* cc = mats.opt_child("C_current"))
            sc.c_current = parse_matrix(*cc, "plant.matrices.C_current");
        if (const json* cb = mats.opt_child("C_bridge"))
            sc.c_bridge = parse_matrix(*cb, "plant.matrices.C_bridge");
        mats.finish();
        sc.lcl.reset();
    } else {
        LclParams p;
        p.l1 = plant.number("l1");
        p.c = plant.number("c");
        p.l2 = plant.number("l2");
        p.r_damp = plant.number("r_damp");
        p.r1 = plant.number_or("r1", p.r1);
        p.r2 = plant.number_or("r2", p.r2);
        p.r_load = plant.number_or("r_load", p.r_load);
        try {
            p.validate();
            sc.plant = lcl_three_phase_plant(p);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            fail("plant", e.what());
        }
        sc.c_current = lcl_current_output(p);
        sc.c_bridge = lcl_bridge_current_output(p);
        sc.lcl = p;
    }
    plant.finish();
}

}  // namespace

Scenario parse_scenario_json(const nlohmann::ordered_json& j) {
    Scenario sc;
    Section top(j, "scenario");

    {
        Section grid(top.child("grid"), "grid");
        sc.grid.amplitude = grid.number("amplitude");
        sc.grid.frequency = grid.number("frequency");
        grid.finish();
    }
    {
        Section battery(top.child("battery"), "battery");
        sc.battery.v_rated = battery.number("v_rated");
        sc.battery.capacity_ah = battery.number("capacity_ah");
        sc.battery.soc = battery.number("soc0");
        sc.battery.r_int = battery.number("r_int");
        sc.charge_current_a = battery.number_or("charge_current_a", sc.charge_current_a);
        battery.finish();
    }
    parse_plant(top.child("plant"), sc);
    {
        Section spwm(top.child("spwm"), "spwm");
        sc.spwm.carrier_frequency = spwm.number("carrier_hz");
        sc.spwm.dead_time = spwm.number_or("dead_time", 0.0);
        spwm.finish();
    }
    {
        Section profiles(top.child("profiles"), "profiles");
        sc.p_load = parse_profile(profiles.child("p_load"), "profiles.p_load");
        sc.p_source = parse_profile(profiles.child("p_source"), "profiles.p_source");
        profiles.finish();
    }
    {
        Section mpc(top.child("mpc"), "mpc");
        sc.mpc.prediction_horizon = mpc.integer("N_p");
        sc.mpc.control_horizon = mpc.integer("N_c");
        sc.mpc.move_weight = mpc.number("r_w");
        sc.mpc.sample_time = mpc.number("T_s");
        sc.mpc_enabled = mpc.boolean_or("enabled", true);
        mpc.finish();
        if (sc.mpc.prediction_horizon < 1) fail("mpc.N_p", "must be >= 1");
        if (sc.mpc.control_horizon < 1) fail("mpc.N_c", "must be >= 1");
        if (sc.mpc.control_horizon > sc.mpc.prediction_horizon)
            fail("mpc.N_c", "must not exceed mpc.N_p");
    }
    {
        Section sim(top.child("sim"), "sim");
        sc.sim_step = sim.number("step");
        sc.duration = sim.number("duration");
        sc.seed = sim.integer64_or("seed", 0);
        sim.finish();
    }
    if (const json* sup = top.opt_child("supervisor")) {
        Section supervisor(*sup, "supervisor");
        sc.hysteresis = supervisor.number_or("hysteresis", 0.0);
        supervisor.finish();
    }
    top.finish();

    sc.validate();
    return sc;
}

Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("scenario: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario: '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_scenario_json(j);
}

nlohmann::ordered_json serialize_scenario(const Scenario& sc) {
    json j;
    j["grid"] = {{"amplitude", sc.grid.amplitude}, {"frequency", sc.grid.frequency}};
    j["battery"] = {{"v_rated", sc.battery.v_rated},
                    {"capacity_ah", sc.battery.capacity_ah},
                    {"soc0", sc.battery.soc},
                    {"r_int", sc.battery.r_int},
                    {"charge_current_a", sc.charge_current_a}};
    if (sc.lcl) {
        j["plant"] = {{"l1", sc.lcl->l1},       {"c", sc.lcl->c},
                      {"l2", sc.lcl->l2},       {"r_damp", sc.lcl->r_damp},
                      {"r1", sc.lcl->r1},       {"r2", sc.lcl->r2},
                      {"r_load", sc.lcl->r_load}};
    } else {
        j["plant"] = {{"matrices",
                       {{"A", matrix_to_json(sc.plant.A)},
                        {"B", matrix_to_json(sc.plant.B)},
                        {"C", matrix_to_json(sc.plant.C)},
                        {"C_current", matrix_to_json(sc.c_current)},
                        {"C_bridge", matrix_to_json(sc.c_bridge)}}}};
    }
    j["spwm"] = {{"carrier_hz", sc.spwm.carrier_frequency}, {"dead_time", sc.spwm.dead_time}};
    j["profiles"] = {{"p_load", profile_to_json(sc.p_load)},
                     {"p_source", profile_to_json(sc.p_source)}};
    j["mpc"] = {{"N_p", sc.mpc.prediction_horizon},
                {"N_c", sc.mpc.control_horizon},
                {"r_w", sc.mpc.move_weight},
                {"T_s", sc.mpc.sample_time},
                {"enabled", sc.mpc_enabled}};
    j["sim"] = {{"step", sc.sim_step}, {"duration", sc.duration}, {"seed", sc.seed}};
    j["supervisor"] = {{"hysteresis", sc.hysteresis}};
    return j;
}

void save_scenario(const Scenario& sc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("scenario: cannot open '" + path + "' for writing");
    out << serialize_scenario(sc).dump(2) << '\n';
    if (!out) throw IoError("scenario: write to '" + path + "' failed");
}

Scenario default_scenario() {
    Scenario sc;
    sc.grid = GridSource{325.0, 50.0};
    sc.battery = Battery{800.0, 2.0, 0.9, 0.05};
    sc.charge_current_a = 10.0;
    LclParams lcl;  // header defaults
    sc.lcl = lcl;
    sc.plant = lcl_three_phase_plant(lcl);
    sc.c_current = lcl_current_output(lcl);
    sc.c_bridge = lcl_bridge_current_output(lcl);
    sc.spwm = SpwmConfig{5000.0, 2e-6};
    sc.p_load.points = {{0.0, 100e3}};
    sc.p_source.points = {{0.0, 80e3}};
    sc.mpc = MpcConfig{10, 3, 0.0, 10e-6};
    sc.mpc_enabled = true;
    sc.sim_step = 1e-6;
    sc.duration = 0.5;
    sc.seed = 0;
    sc.hysteresis = 0.0;
    return sc;
}

}  // namespace v2g
