#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include "vti/demo.hpp"
#include "vti/raw_model.hpp"
#include "vti/track_model.hpp"

namespace vti::test {

// fresh scratch directory per call
inline std::filesystem::path temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("vti_test_" + tag + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// one unblocked translation dof; no elements
inline RawModel single_dof(double m, double k, double c = 0.0) {
    RawModel raw;
    raw.n_dofs = 1;
    raw.mass_triplets = {{0, 0, m}};
    raw.stiffness_triplets = {{0, 0, k}};
    if (c != 0.0) raw.damping_triplets = {{0, 0, c}};
    raw.node_table = {{0, 0.0, 0, -1, false, false}};
    return raw;
}

// mass dof -- k1 -- massless dof -- k2 -- blocked dof
inline RawModel series_springs(double m, double k1, double k2) {
    RawModel raw;
    raw.n_dofs = 3;
    raw.mass_triplets = {{0, 0, m}};
    raw.stiffness_triplets = {{0, 0, k1},      {0, 1, -k1}, {1, 0, -k1},
                              {1, 1, k1 + k2}, {1, 2, -k2}, {2, 1, -k2},
                              {2, 2, k2}};
    raw.node_table = {{0, 0.0, 0, -1, false, false},
                      {1, 1.0, 1, -1, false, false},
                      {2, 2.0, 2, -1, true, false}};
    return raw;
}

// demo model generated on disk, loaded back and condensed
inline TrackModel demo_track(const DemoModelOptions& opt, const std::string& tag) {
    auto dir = temp_dir(tag);
    generate_demo_model(dir, opt);
    return build_track_model(load_model(dir));
}

inline Eigen::VectorXd random_vector(std::mt19937& rng, int n, double scale) {
    std::uniform_real_distribution<double> d(-scale, scale);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

}  // namespace vti::test
