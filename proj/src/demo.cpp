#include "vti/demo.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "vti/coupling.hpp"
#include "vti/errors.hpp"
#include "vti/raw_model.hpp"

namespace vti {

void generate_demo_model(const std::filesystem::path& dir, const DemoModelOptions& opt) {
    std::filesystem::create_directories(dir);

    // node positions; optionally split one element to create a short one
    std::vector<double> positions;
    for (int i = 0; i <= opt.n_elements; ++i)
        positions.push_back(i * opt.element_length);
    if (opt.short_element_at >= 0) {
        if (opt.short_element_at >= opt.n_elements)
            throw ModelError("short_element_at out of range");
        double s_split = positions[opt.short_element_at] +
                         opt.short_element_fraction * opt.element_length;
        positions.insert(positions.begin() + opt.short_element_at + 1, s_split);
    }
    const int n_nodes = int(positions.size());
    const int n_dofs = 2 * n_nodes;

    std::vector<NodeRecord> nodes;
    for (int i = 0; i < n_nodes; ++i) {
        bool end = (i == 0 || i == n_nodes - 1);
        nodes.push_back({i, positions[i], 2 * i, 2 * i + 1, end, end});
    }
    std::vector<ElementRecord> elements;
    for (int i = 0; i + 1 < n_nodes; ++i) elements.push_back({i, i, i + 1});

    // Euler-Bernoulli beam stiffness, dofs (w_a, theta_a, w_b, theta_b)
    std::vector<Triplet> k_triplets;
    for (int e = 0; e + 1 < n_nodes; ++e) {
        double l = positions[e + 1] - positions[e];
        double c = opt.bending_stiffness / (l * l * l);
        double ke[4][4] = {
            {12 * c, 6 * c * l, -12 * c, 6 * c * l},
            {6 * c * l, 4 * c * l * l, -6 * c * l, 2 * c * l * l},
            {-12 * c, -6 * c * l, 12 * c, -6 * c * l},
            {6 * c * l, 2 * c * l * l, -6 * c * l, 4 * c * l * l}};
        int dofs[4] = {2 * e, 2 * e + 1, 2 * (e + 1), 2 * (e + 1) + 1};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (ke[i][j] != 0.0) k_triplets.push_back({dofs[i], dofs[j], ke[i][j]});
    }

    // diagonal mass: half the adjacent element mass per translation, zero
    // rotary inertia (those dofs get condensed at build time)
    std::vector<Triplet> m_triplets;
    for (int i = 0; i < n_nodes; ++i) {
        double l_left = i > 0 ? positions[i] - positions[i - 1] : 0.0;
        double l_right = i + 1 < n_nodes ? positions[i + 1] - positions[i] : 0.0;
        double mass = opt.mass_per_length * 0.5 * (l_left + l_right);
        m_triplets.push_back({2 * i, 2 * i, mass});
    }

    std::vector<Triplet> c_triplets;
    if (!opt.undamped && opt.rayleigh_beta > 0.0)
        for (const auto& t : k_triplets)
            c_triplets.push_back({t.row, t.col, opt.rayleigh_beta * t.value});

    std::vector<SupportRecord> supports;
    for (int i = 1; i + 1 < n_nodes; ++i) {
        bool voided = std::find(opt.voided_nodes.begin(), opt.voided_nodes.end(), i) !=
                      opt.voided_nodes.end();
        supports.push_back({2 * i, opt.support_stiffness,
                            opt.undamped ? 0.0 : opt.support_damping,
                            voided ? opt.void_gap : 0.0});
    }

    write_matrix_file(dir / "K.mtx", n_dofs, k_triplets, true);
    write_matrix_file(dir / "M.mtx", n_dofs, m_triplets, true);
    write_matrix_file(dir / "C.mtx", n_dofs, c_triplets, true);
    write_node_table(dir / "nodes.csv", nodes);
    write_element_table(dir / "elements.csv", elements);
    write_support_table(dir / "supports.csv", supports);

    std::ofstream params(dir / "params.txt");
    params << "n_elements=" << opt.n_elements << "\n"
           << "element_length=" << opt.element_length << "\n"
           << "bending_stiffness=" << opt.bending_stiffness << "\n"
           << "mass_per_length=" << opt.mass_per_length << "\n"
           << "support_stiffness=" << opt.support_stiffness << "\n"
           << "support_damping=" << (opt.undamped ? 0.0 : opt.support_damping) << "\n"
           << "rayleigh_beta=" << (opt.undamped ? 0.0 : opt.rayleigh_beta) << "\n"
           << "void_gap=" << opt.void_gap << "\n"
           << "short_element_at=" << opt.short_element_at << "\n"
           << "short_element_fraction=" << opt.short_element_fraction << "\n";
    params << "voided_nodes=";
    for (std::size_t i = 0; i < opt.voided_nodes.size(); ++i)
        params << (i ? "," : "") << opt.voided_nodes[i];
    params << "\n";
}

void generate_dip_profile(const std::filesystem::path& file, double center, double length,
                          double depth, double track_length) {
    RailProfile profile;
    profile.s = {0.0, center - 0.5 * length, center, center + 0.5 * length, track_length};
    profile.r = {0.0, 0.0, -depth, 0.0, 0.0};
    profile.to_file(file);
}

}  // namespace vti
