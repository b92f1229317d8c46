#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <map>
#include <memory>
#include <vector>

#include "vti/explicit_solver.hpp"
#include "vti/track_model.hpp"

namespace vti {

struct NewmarkConfig {
    double dt = 0.0;
    double gamma = 0.5;
    double beta = 0.25;
    int max_support_iterations = 20;
    double residual_tolerance = 1e-8;  // [N]
};

// Newmark constant-average-acceleration solver with gap supports handled by
// fixed-point iteration on the support status set. Factorizations are cached
// per status bitset, since closed supports change the effective matrix.
class NewmarkSolver {
public:
    NewmarkSolver(const TrackModel& model, NewmarkConfig config);

    // Advance one step under the given external force (sampled at t + dt).
    void step(StateVector& state, const Eigen::VectorXd& external_force,
              long step_index = -1);

    const NewmarkConfig& config() const { return config_; }

    // status iterations spent in the most recent step()
    int last_support_iterations() const { return last_support_iterations_; }

private:
    using Factorization = Eigen::SparseLU<Eigen::SparseMatrix<double>>;

    const Factorization& factorization_for(const std::vector<char>& status);

    const TrackModel& model_;
    NewmarkConfig config_;
    std::map<std::vector<char>, std::unique_ptr<Factorization>> cache_;
    int last_support_iterations_ = 0;
};

// K x = F with gap supports resolved by the same status iteration.
Eigen::VectorXd static_solve(const TrackModel& model, const Eigen::VectorXd& force);

}  // namespace vti
