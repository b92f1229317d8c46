#include "vti/explicit_solver.hpp"

#include <cmath>

#include "vti/errors.hpp"

namespace vti {

StateVector StateVector::zero(int n_dofs) {
    StateVector s;
    s.x = Eigen::VectorXd::Zero(n_dofs);
    s.v = Eigen::VectorXd::Zero(n_dofs);
    s.a = Eigen::VectorXd::Zero(n_dofs);
    return s;
}

double support_internal_force(const SupportElement& s, double x, double v) {
    // g = 0 is a plain bilateral spring/damper; a positive gap makes the
    // support unilateral: open until the dof has moved down past the gap,
    // damping active only while closed
    if (s.linear || s.gap == 0.0) return s.k * x + s.c * v;
    if (-x < s.gap) return 0.0;
    return s.k * (x + s.gap) + s.c * v;
}

Eigen::VectorXd internal_force(const TrackModel& model, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& v) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(model.n_retained);
    for (const auto& block : model.blocks) {
        const int n = int(block.dofs.size());
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                const int dj = block.dofs[j];
                acc += block.K(i, j) * x[dj] + block.C(i, j) * v[dj];
            }
            f[block.dofs[i]] += acc;
        }
    }
    for (const auto& s : model.supports)
        f[s.dof] += support_internal_force(s, x[s.dof], v[s.dof]);
    return f;
}

namespace {

void check_finite(const StateVector& state, const ExplicitConfig& config, long step_index) {
    double bound = config.divergence_factor * config.displacement_scale;
    for (int i = 0; i < state.x.size(); ++i) {
        if (!std::isfinite(state.x[i]) || !std::isfinite(state.v[i]) ||
            !std::isfinite(state.a[i]) || std::abs(state.x[i]) > bound)
            throw DivergenceError("explicit solver diverged at step " +
                                      std::to_string(step_index) + " (dof " +
                                      std::to_string(i) + ")",
                                  step_index);
    }
}

}  // namespace

void step(StateVector& state, const TrackModel& model,
          const Eigen::VectorXd& external_force, const ExplicitConfig& config,
          long step_index) {
    const double dt = config.dt;
    if (config.scheme == ExplicitScheme::semi_implicit) {
        Eigen::VectorXd f_int = internal_force(model, state.x, state.v);
        for (int i : model.free_dofs) {
            state.a[i] = (external_force[i] - f_int[i]) / model.lumped_mass[i];
            state.v[i] += dt * state.a[i];
            state.x[i] += dt * state.v[i];
        }
    } else {
        // the forward-Euler ordering with every quantity at t - dt
        Eigen::VectorXd f_int = internal_force(model, state.x, state.v);
        Eigen::VectorXd x_old = state.x;
        for (int i : model.free_dofs) {
            state.x[i] = x_old[i] + dt * state.v[i];
            state.v[i] += dt * state.a[i];
            state.a[i] = (external_force[i] - f_int[i]) / model.lumped_mass[i];
        }
    }
    for (int i = 0; i < model.n_retained; ++i)
        if (model.blocked[i]) {
            state.x[i] = 0.0;
            state.v[i] = 0.0;
            state.a[i] = 0.0;
        }
    state.t += dt;
    check_finite(state, config, step_index);
}

std::pair<StateVector, ExplicitTrace>
run_explicit(const TrackModel& model, const ForceFunction& excitation,
             const ExplicitConfig& config, const std::vector<int>& probe_dofs) {
    StateVector state = StateVector::zero(model.n_retained);
    ExplicitTrace trace;
    Eigen::VectorXd force(model.n_retained);

    auto emit = [&]() {
        trace.t.push_back(state.t);
        std::vector<double> row;
        row.reserve(probe_dofs.size());
        for (int d : probe_dofs) row.push_back(state.x[d]);
        trace.probes.push_back(std::move(row));
    };
    if (config.n_steps > 0) emit();

    for (long n = 0; n < config.n_steps; ++n) {
        force.setZero();
        if (excitation) excitation(state.t, force);
        step(state, model, force, config, n);
        if ((n + 1) % config.output_stride == 0) emit();
    }
    return {std::move(state), std::move(trace)};
}

}  // namespace vti
