#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "vti/track_model.hpp"

namespace vti {

// Stability constant of the per-dof CFL estimate dt = c * min sqrt(M_i/K_ii).
inline constexpr double kDefaultCflConstant = 5.0 / 3.14159265358979323846;

struct MassScalingReport {
    double base_dt = 0.0;       // [s]
    double achieved_dt = 0.0;   // [s]
    Eigen::VectorXd added_mass; // per retained dof [kg]
    double total_added_mass = 0.0;
    std::vector<int> limiting_dofs;  // dofs at the achieved minimum ratio
};

struct MassScalingOptions {
    double m_c = 0.0;                      // max added mass per dof [kg]
    std::optional<double> dt_target;       // [s]; default: best feasible
    bool scale_rotational = false;         // default: translational dofs only
    double cfl_constant = kDefaultCflConstant;
};

// dt = cfl_constant * min over free dofs of sqrt(M_i / K_ii).
double stable_timestep(const Eigen::VectorXd& lumped_mass,
                       const Eigen::VectorXd& stiffness_diagonal,
                       const std::vector<int>& free_dofs,
                       double cfl_constant = kDefaultCflConstant);

double stable_timestep(const TrackModel& model,
                       double cfl_constant = kDefaultCflConstant);

// Per-dof capped mass scaling. Each dof below the target ratio receives
// added_mass_i = K_ii * (dt/c)^2 - M_i, clamped to m_c; dofs already at or
// above the target receive zero. Throws InfeasibleTargetError if dt_target
// exceeds the best feasible dt under the cap.
std::pair<TrackModel, MassScalingReport>
mass_scale(const TrackModel& model, const MassScalingOptions& opts);

void write_mass_scaling_report(const std::filesystem::path& file,
                               const TrackModel& model,
                               const MassScalingReport& report,
                               double cfl_constant = kDefaultCflConstant);

}  // namespace vti
