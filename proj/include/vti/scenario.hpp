#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "vti/coupling.hpp"

namespace vti {

// Flat key-value scenario file (`vehicle.m_s = 7500`, `run.approach = new`,
// ...). Unknown keys are an error; missing keys fall back to the defaults
// documented in scenario.cpp.
struct Scenario {
    VehicleModel vehicle;
    std::filesystem::path model_dir;
    std::filesystem::path profile_file;  // empty = flat profile
    Approach approach = Approach::new_embedded;
    CoSimConfig config;
    std::filesystem::path output;
};

Scenario load_scenario(const std::filesystem::path& file);

std::map<std::string, std::string> read_flat_config(const std::filesystem::path& file);

// Execute the scenario end to end (model load, build, run, trace write).
CoSimRun run_scenario(const Scenario& scenario);

}  // namespace vti
