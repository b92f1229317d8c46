#include "vti/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "vti/errors.hpp"

namespace vti {

double stable_timestep(const Eigen::VectorXd& lumped_mass,
                       const Eigen::VectorXd& stiffness_diagonal,
                       const std::vector<int>& free_dofs, double cfl_constant) {
    if (free_dofs.empty()) throw ModelError("no free dofs");
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int i : free_dofs) {
        if (stiffness_diagonal[i] <= 0.0)
            throw ModelError("indefinite stiffness diagonal on dof " + std::to_string(i));
        if (lumped_mass[i] <= 0.0)
            throw ModelError("non-positive mass on free dof " + std::to_string(i));
        min_ratio = std::min(min_ratio, std::sqrt(lumped_mass[i] / stiffness_diagonal[i]));
    }
    return cfl_constant * min_ratio;
}

double stable_timestep(const TrackModel& model, double cfl_constant) {
    return stable_timestep(model.lumped_mass, model.stiffness_diagonal(),
                           model.free_dofs, cfl_constant);
}

std::pair<TrackModel, MassScalingReport>
mass_scale(const TrackModel& model, const MassScalingOptions& opts) {
    if (opts.m_c < 0.0) throw InfeasibleTargetError("negative mass-scaling cap");
    const double c = opts.cfl_constant;
    const Eigen::VectorXd k_diag = model.stiffness_diagonal();

    MassScalingReport report;
    report.base_dt = stable_timestep(model.lumped_mass, k_diag, model.free_dofs, c);

    auto scalable = [&](int dof) {
        return opts.scale_rotational || model.is_translation[dof];
    };

    // best feasible dt under the per-dof cap
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int i : model.free_dofs) {
        double mass = model.lumped_mass[i] + (scalable(i) ? opts.m_c : 0.0);
        min_ratio = std::min(min_ratio, std::sqrt(mass / k_diag[i]));
    }
    double dt_feasible = c * min_ratio;

    double dt_used = dt_feasible;
    if (opts.dt_target) {
        if (*opts.dt_target > dt_feasible * (1.0 + 1e-12))
            throw InfeasibleTargetError(
                "target dt " + std::to_string(*opts.dt_target) +
                " exceeds the feasible dt " + std::to_string(dt_feasible) +
                " under cap m_c = " + std::to_string(opts.m_c));
        dt_used = *opts.dt_target;
    }

    const double target_ratio = dt_used / c;
    report.added_mass = Eigen::VectorXd::Zero(model.n_retained);
    for (int i : model.free_dofs) {
        if (!scalable(i)) continue;
        double needed = k_diag[i] * target_ratio * target_ratio - model.lumped_mass[i];
        // dofs already at the target up to roundoff receive nothing
        if (needed <= 1e-12 * model.lumped_mass[i]) continue;
        report.added_mass[i] = std::min(needed, opts.m_c);
    }
    report.total_added_mass = report.added_mass.sum();

    TrackModel scaled = model.with_scaled_mass(report.added_mass);
    report.achieved_dt = stable_timestep(scaled.lumped_mass, k_diag, scaled.free_dofs, c);

    for (int i : model.free_dofs) {
        double ratio = std::sqrt(scaled.lumped_mass[i] / k_diag[i]);
        if (ratio <= (report.achieved_dt / c) * (1.0 + 1e-12))
            report.limiting_dofs.push_back(i);
    }
    return {std::move(scaled), std::move(report)};
}

void write_mass_scaling_report(const std::filesystem::path& file, const TrackModel& model,
                               const MassScalingReport& report, double cfl_constant) {
    std::ofstream out(file);
    if (!out) throw ParseError("cannot write " + file.string());
    char buf[160];
    std::snprintf(buf, sizeof(buf), "# base_dt=%.16e,achieved_dt=%.16e,total_added_mass=%.16e\n",
                  report.base_dt, report.achieved_dt, report.total_added_mass);
    out << buf;
    out << "dof,base_ratio,added_mass\n";
    const Eigen::VectorXd k_diag = model.stiffness_diagonal();
    for (int i : model.free_dofs) {
        double base_ratio =
            std::sqrt((model.lumped_mass[i] - report.added_mass[i]) / k_diag[i]);
        std::snprintf(buf, sizeof(buf), "%d,%.16e,%.16e\n", i, base_ratio,
                      report.added_mass[i]);
        out << buf;
    }
}

}  // namespace vti
