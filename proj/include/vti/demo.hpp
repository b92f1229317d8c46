#pragma once

#include <filesystem>
#include <vector>

namespace vti {

// Synthetic beam-on-discrete-supports track model. Vertical translation and
// rotation dofs per node; diagonal mass with zero rotary inertia, so the
// rotations are condensed away at build time. Every node carries a discrete
// support. All values are written to params.txt next to the matrices.
struct DemoModelOptions {
    int n_elements = 50;
    double element_length = 0.6;       // [m] (sleeper spacing)
    // Soft synthetic beam on stiff supports: keeps the diagonal CFL estimate
    // inside the true coupled stability limit at every mass-scaling level.
    double bending_stiffness = 5e5;    // EI [N m^2]
    double mass_per_length = 60.0;     // [kg/m]
    double support_stiffness = 2e8;    // [N/m] per node
    // Damping is integrated explicitly, so it eats into the stability margin;
    // these levels keep the amplification spectral radius below 1 at the
    // estimated dt for m_c anywhere in [0, 400].
    double support_damping = 1e4;      // [N s/m] per node
    double rayleigh_beta = 1e-7;       // C = beta * K (rail structural damping)
    bool undamped = false;             // zero all damping (stability fixtures)
    // Indices of nodes whose support gets this gap (voided sleepers).
    std::vector<int> voided_nodes;
    double void_gap = 3e-3;            // [m]
    // Insert one short element (length_fraction * element_length) by splitting
    // the element at this index; -1 = none.
    int short_element_at = -1;
    double short_element_fraction = 0.05;  // 1/20 of the standard length
};

// Writes M.mtx, C.mtx, K.mtx, nodes.csv, elements.csv, supports.csv and
// params.txt into `dir`.
void generate_demo_model(const std::filesystem::path& dir, const DemoModelOptions& options);

// Crossing-dip rail profile: flat except for a V dip of `depth` over
// `length` centered at `center`.
void generate_dip_profile(const std::filesystem::path& file, double center,
                          double length, double depth, double track_length);

}  // namespace vti
