#pragma once

#include <Eigen/Sparse>
#include <filesystem>
#include <string>
#include <vector>

namespace vti {

struct Triplet {
    int row;
    int col;
    double value;
};

struct NodeRecord {
    int node_id;
    double s;        // arclength position [m]
    int dof_w;       // vertical translation dof, -1 if absent
    int dof_theta;   // rotation dof, -1 if absent
    bool blocked_w;
    bool blocked_theta;
};

struct ElementRecord {
    int element_id;
    int node_a;
    int node_b;
};

struct SupportRecord {
    int dof;     // dof index in the raw model
    double k;    // [N/m]
    double c;    // [N s/m]
    double gap;  // [m], downward; 0 = plain linear support
};

// FE matrices and topology as exported by a third-party FE code.
struct RawModel {
    int n_dofs = 0;
    std::vector<Triplet> mass_triplets;
    std::vector<Triplet> damping_triplets;
    std::vector<Triplet> stiffness_triplets;
    std::vector<NodeRecord> node_table;
    std::vector<ElementRecord> element_table;
    std::vector<SupportRecord> supports;

    Eigen::SparseMatrix<double> assemble_mass() const;
    Eigen::SparseMatrix<double> assemble_damping() const;
    Eigen::SparseMatrix<double> assemble_stiffness() const;

    bool dof_is_blocked(int dof) const;
};

// Coordinate-format sparse text reader. Accepts a MatrixMarket-style header
// (`%%MatrixMarket matrix coordinate real general|symmetric`), `%` comments,
// a `rows cols nnz` size line and 1-based `row col value` entries. Symmetric
// storage is expanded to full triplet lists; duplicate entries are kept (they
// sum on assembly). Indices are converted to 0-based.
std::vector<Triplet> read_matrix_file(const std::filesystem::path& file, int n_dofs);

std::vector<NodeRecord> read_node_table(const std::filesystem::path& file);
std::vector<ElementRecord> read_element_table(const std::filesystem::path& file);
std::vector<SupportRecord> read_support_table(const std::filesystem::path& file);

// Load M.mtx, C.mtx, K.mtx, nodes.csv, elements.csv and (if present)
// supports.csv from `model_dir`. n_dofs is taken from the matrix size lines;
// all dof indices are validated against it. Checks the RawModel invariants
// (symmetry, positive stiffness diagonal on unblocked dofs, element tiling).
RawModel load_model(const std::filesystem::path& model_dir);

RawModel load_model(const std::filesystem::path& mass_file,
                    const std::filesystem::path& damping_file,
                    const std::filesystem::path& stiffness_file,
                    const std::filesystem::path& node_table_file,
                    const std::filesystem::path& element_table_file,
                    const std::filesystem::path& support_file = {});

// Writers for the same formats (used by the demo generator and round-trip tests).
void write_matrix_file(const std::filesystem::path& file, int n_dofs,
                       const std::vector<Triplet>& triplets,
                       bool symmetric_storage = false);
void write_node_table(const std::filesystem::path& file, const std::vector<NodeRecord>& nodes);
void write_element_table(const std::filesystem::path& file, const std::vector<ElementRecord>& elements);
void write_support_table(const std::filesystem::path& file, const std::vector<SupportRecord>& supports);

void validate_raw_model(const RawModel& model);

}  // namespace vti
