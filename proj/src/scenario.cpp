#include "vti/scenario.hpp"

#include <fstream>
#include <set>

#include "vti/errors.hpp"
#include "vti/trace.hpp"

namespace vti {

std::map<std::string, std::string> read_flat_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open config " + file.string());
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("missing '=' in " + file.string() + " line " +
                             std::to_string(lineno));
        auto trim = [](std::string s) {
            auto b2 = s.find_first_not_of(" \t\r");
            auto e2 = s.find_last_not_of(" \t\r");
            return b2 == std::string::npos ? std::string() : s.substr(b2, e2 - b2 + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key in " + file.string());
        out[key] = value;
    }
    return out;
}

Scenario load_scenario(const std::filesystem::path& file) {
    auto kv = read_flat_config(file);
    std::set<std::string> known = {
        "vehicle.m_s", "vehicle.m_w", "vehicle.k_p", "vehicle.c_p", "vehicle.C_H",
        "vehicle.V", "track.model_dir", "profile.file", "run.approach", "run.transport",
        "run.m_c", "run.dt", "run.dt_target", "run.t_end", "run.s_start",
        "run.output_stride", "run.output", "run.exchange_dir", "run.cfl_constant"};
    for (const auto& [key, _] : kv)
        if (!known.count(key))
            throw ParseError("unknown scenario key '" + key + "' in " + file.string());

    auto get = [&](const std::string& key, double fallback) {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : std::stod(it->second);
    };
    auto get_str = [&](const std::string& key, const std::string& fallback) {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    };

    Scenario sc;
    sc.vehicle.m_s = get("vehicle.m_s", 7500.0);
    sc.vehicle.m_w = get("vehicle.m_w", 900.0);
    sc.vehicle.k_p = get("vehicle.k_p", 1.2e6);
    sc.vehicle.c_p = get("vehicle.c_p", 3.0e4);
    // soft desk-scale contact: keeps the contact frequency well below the
    // explicit track dt on the demo model
    sc.vehicle.C_H = get("vehicle.C_H", 2.0e8);
    sc.vehicle.V = get("vehicle.V", 40.0);
    if (sc.vehicle.m_s <= 0 || sc.vehicle.m_w <= 0 || sc.vehicle.k_p <= 0 ||
        sc.vehicle.C_H <= 0 || sc.vehicle.V <= 0)
        throw ParseError("vehicle parameters must be positive in " + file.string());

    auto model_dir = kv.find("track.model_dir");
    if (model_dir == kv.end())
        throw ParseError("scenario " + file.string() + " is missing track.model_dir");
    sc.model_dir = model_dir->second;
    // relative paths resolve against the scenario file's directory
    auto resolve = [&](const std::filesystem::path& p) {
        return p.is_absolute() ? p : file.parent_path() / p;
    };
    sc.model_dir = resolve(sc.model_dir);
    std::string profile = get_str("profile.file", "");
    if (!profile.empty()) sc.profile_file = resolve(profile);

    std::string approach = get_str("run.approach", "new");
    if (approach == "standard") sc.approach = Approach::standard;
    else if (approach == "new") sc.approach = Approach::new_embedded;
    else throw ParseError("run.approach must be 'standard' or 'new', got '" + approach + "'");

    std::string transport = get_str("run.transport", "in_process");
    if (transport == "in_process") sc.config.transport = TransportKind::in_process;
    else if (transport == "file_exchange") sc.config.transport = TransportKind::file_exchange;
    else throw ParseError("run.transport must be 'in_process' or 'file_exchange'");

    sc.config.m_c = get("run.m_c", 0.0);
    sc.config.dt = get("run.dt", 0.0);
    if (kv.count("run.dt_target")) sc.config.dt_target = std::stod(kv.at("run.dt_target"));
    sc.config.t_end = get("run.t_end", 0.0);
    sc.config.s_start = get("run.s_start", 0.0);
    sc.config.output_stride = long(get("run.output_stride", 1.0));
    sc.config.cfl_constant = get("run.cfl_constant", kDefaultCflConstant);
    if (sc.config.t_end <= 0.0)
        throw ParseError("run.t_end must be positive in " + file.string());
    if (sc.config.output_stride < 1)
        throw ParseError("run.output_stride must be >= 1 in " + file.string());
    if (sc.approach == Approach::standard && sc.config.dt <= 0.0)
        throw ParseError("run.dt must be positive for the standard approach");

    std::string exchange = get_str("run.exchange_dir", "");
    if (!exchange.empty()) sc.config.exchange_dir = exchange;
    std::string output = get_str("run.output", "");
    if (!output.empty()) sc.output = output;
    return sc;
}

CoSimRun run_scenario(const Scenario& scenario) {
    RawModel raw = load_model(scenario.model_dir);
    TrackModel track = build_track_model(raw);
    RailProfile profile = scenario.profile_file.empty()
                              ? RailProfile::flat()
                              : RailProfile::from_file(scenario.profile_file);
    CoSimRun run = scenario.approach == Approach::standard
                       ? run_standard(scenario.vehicle, track, profile, scenario.config)
                       : run_new(scenario.vehicle, track, profile, scenario.config);
    if (!scenario.output.empty()) write_trace(scenario.output, run.trace);
    return run;
}

}  // namespace vti
