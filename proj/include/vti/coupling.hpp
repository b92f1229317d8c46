#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vti/explicit_solver.hpp"
#include "vti/implicit_solver.hpp"
#include "vti/timestep.hpp"
#include "vti/trace.hpp"
#include "vti/track_model.hpp"

namespace vti {

inline constexpr double kGravity = 9.81;  // [m/s^2]

// 2-dof vertical quarter vehicle: sprung mass on a suspension over an
// unsprung wheel mass in Hertzian contact with the rail.
struct VehicleModel {
    double m_s;   // sprung mass [kg]
    double m_w;   // unsprung (wheel) mass [kg]
    double k_p;   // suspension stiffness [N/m]
    double c_p;   // suspension damping [N s/m]
    double C_H;   // Hertz constant [N/m^1.5]
    double V;     // forward speed [m/s]
    double gravity = kGravity;

    double static_axle_load() const { return (m_s + m_w) * gravity; }
};

struct VehicleState {
    double z_s = 0.0;  // sprung displacement [m], positive upward
    double v_s = 0.0;
    double z_w = 0.0;  // wheel displacement [m]
    double v_w = 0.0;
    double s = 0.0;    // wheel arclength position [m]
};

// Piecewise-linear vertical rail surface deviation r(s) [m], positive upward
// (a crossing dip is a negative excursion). Knots strictly increasing in s.
struct RailProfile {
    std::vector<double> s;
    std::vector<double> r;

    double operator()(double position) const;  // clamped at the ends

    static RailProfile flat();
    static RailProfile from_file(const std::filesystem::path& file);
    void to_file(const std::filesystem::path& file) const;
};

// Cubic Hermite beam shape functions on [0,1], element length L.
std::array<double, 4> hermite_weights(double xi, double length);

// Spread a point load at arclength s onto the nodal dofs of the containing
// element: (F*N1, F*N2, F*N3, F*N4) on (w_a, theta_a, w_b, theta_b), as raw
// dof loads. Nodes without a rotation dof degrade to linear interpolation.
std::vector<std::pair<int, double>>
distribute_force(double force, double s, const RailLine& rail_line,
                 const std::vector<NodeRecord>& nodes);

// Rail deflection under the wheel, interpolated with the same weights.
double displacement_under_wheel(const TrackModel& model,
                                const Eigen::VectorXd& x, double s);

// Hertz normal contact: penetration delta = (u + r) - z_w, F = C_H*delta^1.5
// for delta > 0, else 0 (loss of contact).
double contact_force(double z_w, double u, double r, double hertz_constant);

// Semi-implicit Euler update of the 2-dof vehicle under gravity, suspension
// and the given (upward) contact force on the wheel.
void vehicle_step(VehicleState& state, const VehicleModel& vehicle,
                  double contact, double dt, long step_index = -1);

// Vehicle initial state: static equilibrium over an undeflected rail at s0.
VehicleState vehicle_static_state(const VehicleModel& vehicle, double s0,
                                  double rail_surface);

enum class Approach { standard, new_embedded };
enum class TransportKind { in_process, file_exchange };

struct CoSimConfig {
    double s_start = 0.0;
    double t_end = 0.0;
    double dt = 0.0;                 // standard approach: shared MBS/FE step
    double m_c = 0.0;                // new approach: mass-scaling cap
    std::optional<double> dt_target; // new approach: optional explicit dt goal
    long output_stride = 1;
    TransportKind transport = TransportKind::in_process;
    std::filesystem::path exchange_dir;  // scratch dir for file_exchange
    std::vector<int> probe_raw_dofs;
    double cfl_constant = kDefaultCflConstant;
};

struct CoSimRun {
    Approach approach;
    double dt_used = 0.0;
    Trace trace;
    double wall_total = 0.0;      // time loop only [s]
    double wall_vehicle = 0.0;
    double wall_track = 0.0;
    double wall_transport = 0.0;
    StateVector final_track_state;
    MassScalingReport scaling;    // new approach only
};

// Standard approach: per step the vehicle contact force travels to the
// implicit (Newmark) track solver and the displacement under the wheel comes
// back, through the selected transport. file_exchange serializes both values
// through files each step.
CoSimRun run_standard(const VehicleModel& vehicle, const TrackModel& track,
                      const RailProfile& profile, const CoSimConfig& config);

// New approach: the explicit track solver shares a single time loop with the
// vehicle at the mass-scaled stable dt; no transport.
CoSimRun run_new(const VehicleModel& vehicle, const TrackModel& track,
                 const RailProfile& profile, const CoSimConfig& config);

}  // namespace vti
