#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "vti/track_model.hpp"

namespace vti {

struct StateVector {
    Eigen::VectorXd x;  // [m] or [rad], positive upward
    Eigen::VectorXd v;
    Eigen::VectorXd a;
    double t = 0.0;     // [s]

    static StateVector zero(int n_dofs);
};

enum class ExplicitScheme {
    // Velocity from current acceleration, then position from the new
    // velocity. Conditionally stable under the CFL bound.
    semi_implicit,
    // The forward-Euler update with every right-hand quantity taken at the
    // previous step. Kept for fidelity experiments; unstable on undamped
    // modes at any dt.
    literal_paper,
};

struct ExplicitConfig {
    double dt = 0.0;
    long n_steps = 0;
    long output_stride = 1;
    ExplicitScheme scheme = ExplicitScheme::semi_implicit;
    // Divergence guard: abort when |x|_inf exceeds this many times
    // displacement_scale, or on any non-finite entry.
    double displacement_scale = 1.0;
    double divergence_factor = 1e6;
};

// C*v + K*x accumulated element-block by element-block, plus gap-support
// forces. Blocked dofs never receive contributions.
Eigen::VectorXd internal_force(const TrackModel& model,
                               const Eigen::VectorXd& x,
                               const Eigen::VectorXd& v);

// Support force on the support's dof (same sign convention as K*x):
// linear: k*x + c*v; gap: 0 while the dof sits above -g, else k*(x+g) + c*v.
double support_internal_force(const SupportElement& s, double x, double v);

// One explicit step. `external_force` is sampled at the state's current time.
// Blocked dofs are pinned to zero after the update. `step_index` only labels
// the DivergenceError.
void step(StateVector& state, const TrackModel& model,
          const Eigen::VectorXd& external_force,
          const ExplicitConfig& config, long step_index = -1);

struct ExplicitTrace {
    std::vector<double> t;
    std::vector<std::vector<double>> probes;  // one row per emitted sample
};

using ForceFunction = std::function<void(double t, Eigen::VectorXd& force)>;

// Drive `step` from a zero initial state; emit probe-dof samples every
// output_stride steps (including the initial state).
std::pair<StateVector, ExplicitTrace>
run_explicit(const TrackModel& model, const ForceFunction& excitation,
             const ExplicitConfig& config, const std::vector<int>& probe_dofs = {});

}  // namespace vti
