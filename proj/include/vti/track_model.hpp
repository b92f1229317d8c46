#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "vti/raw_model.hpp"

namespace vti {

// Gap-type discrete support on a retained vertical dof. g = 0 degenerates to
// a plain linear spring/damper. Displacements are positive upward, so the
// support engages once the dof has moved down past the gap (x <= -g).
struct SupportElement {
    int dof;       // retained dof index
    double k;      // [N/m]
    double c;      // [N s/m]
    double gap;    // [m], >= 0
    bool linear = false;  // force the linear k*x + c*v law regardless of gap
};

// Dense stiffness/damping block over a small set of retained free dofs.
// Element blocks carry only unblocked dofs; blocked-dof rows and columns are
// dropped at build time so the element loop never touches them.
struct DofBlock {
    std::vector<int> dofs;   // retained dof indices
    Eigen::MatrixXd K;
    Eigen::MatrixXd C;
};

// Mapping between raw-model dofs and the retained set, plus the Guyan
// recovery matrix for the condensed (massless) dofs: x_Z = T * x_retained.
struct CondensationMap {
    std::vector<int> retained_to_raw;          // size n_retained
    std::vector<int> raw_to_retained;          // size n_raw, -1 if condensed
    std::vector<int> condensed_dofs;           // raw indices, size n_Z
    Eigen::SparseMatrix<double, Eigen::RowMajor> recovery;  // n_Z x n_retained
};

struct RailSegment {
    int element;     // index into elements
    int node_a;      // indices into node table
    int node_b;
    double s_a;      // arclength of node_a [m]
    double length;   // [m]
};

// Ordered arclength -> element map for the moving contact.
struct RailLine {
    std::vector<RailSegment> segments;
    double s_min = 0.0;
    double s_max = 0.0;

    // Returns (segment index, local coordinate xi in [0,1]). At shared nodes
    // the downstream (larger-index) element wins. Throws OutOfRangeError
    // outside [s_min, s_max].
    std::pair<int, double> locate(double s) const;
};

// Condensed, lumped, explicit-ready track model. Immutable after construction.
struct TrackModel {
    int n_retained = 0;
    Eigen::VectorXd lumped_mass;           // per retained dof; 0 on blocked dofs
    std::vector<DofBlock> blocks;          // element blocks + condensation fill-in
    std::vector<char> blocked;             // per retained dof
    std::vector<int> free_dofs;            // retained indices with blocked[i] == 0
    std::vector<char> is_translation;      // per retained dof
    RailLine rail_line;
    std::vector<SupportElement> supports;
    CondensationMap cmap;
    std::vector<NodeRecord> node_table;    // raw node table (raw dof ids)

    // Assembled condensed matrices over retained dofs (used by the implicit
    // solver and the CFL diagonal; the explicit path uses `blocks`).
    Eigen::SparseMatrix<double> K;
    Eigen::SparseMatrix<double> C;

    // Diagonal of K plus support stiffness (closed-gap worst case), per
    // retained dof. This is the K_ii the CFL estimate uses.
    Eigen::VectorXd stiffness_diagonal() const;

    // Map a load given on raw dofs onto retained dofs: blocked entries are
    // dropped, condensed entries are carried over statically (F_r += T^T F_Z).
    void project_raw_force(const std::vector<std::pair<int, double>>& raw_loads,
                           Eigen::VectorXd& retained_force) const;

    // Displacement of a raw dof given the retained state (condensed dofs are
    // reconstructed through the recovery matrix, blocked dofs are 0).
    double raw_dof_displacement(int raw_dof, const Eigen::VectorXd& x) const;

    TrackModel with_scaled_mass(const Eigen::VectorXd& added_mass) const;
};

// Row-sum lumping of the assembled consistent mass matrix. Throws ModelError
// if an unblocked dof ends up with negative lumped mass.
Eigen::VectorXd lump_mass(const RawModel& model);

RailLine build_rail_line(const RawModel& model);

// Guyan condensation of the zero-lumped-mass unblocked dofs, applied to K and
// C alike, followed by element-block extraction. Inter-element coupling goes
// to the element owning the lower-indexed node; condensation fill-in that no
// element covers is kept in extra pairwise blocks so the assembled blocks
// reproduce the condensed matrices exactly.
TrackModel condense_massless(const RawModel& model, const Eigen::VectorXd& lumped);

// load_model + lump_mass + condense_massless in one go.
TrackModel build_track_model(const RawModel& model);

}  // namespace vti
