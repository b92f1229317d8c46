#include "vti/implicit_solver.hpp"

#include <cmath>

#include "vti/errors.hpp"

namespace vti {

namespace {

bool support_is_bilateral(const SupportElement& s) {
    return s.linear || s.gap == 0.0;
}

// closed-status vector for the gapped supports, given retained displacements
std::vector<char> support_status(const TrackModel& model, const Eigen::VectorXd& x) {
    std::vector<char> status(model.supports.size(), 1);
    for (std::size_t i = 0; i < model.supports.size(); ++i) {
        const auto& s = model.supports[i];
        if (!support_is_bilateral(s)) status[i] = (-x[s.dof] >= s.gap) ? 1 : 0;
    }
    return status;
}

}  // namespace

NewmarkSolver::NewmarkSolver(const TrackModel& model, NewmarkConfig config)
    : model_(model), config_(config) {
    if (config_.dt <= 0.0) throw ModelError("Newmark dt must be positive");
    if (config_.beta <= 0.0 || config_.beta > 0.5 || config_.gamma < 0.0 ||
        config_.gamma > 1.0)
        throw ModelError("Newmark parameters out of range");
}

const NewmarkSolver::Factorization&
NewmarkSolver::factorization_for(const std::vector<char>& status) {
    auto it = cache_.find(status);
    if (it != cache_.end()) return *it->second;

    const double dt = config_.dt;
    const double beta = config_.beta;
    const double gamma = config_.gamma;
    const int n_free = int(model_.free_dofs.size());

    std::vector<int> free_index(model_.n_retained, -1);
    for (int i = 0; i < n_free; ++i) free_index[model_.free_dofs[i]] = i;

    std::vector<Eigen::Triplet<double>> ts;
    auto add_matrix = [&](const Eigen::SparseMatrix<double>& m, double factor) {
        for (int k = 0; k < m.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it2(m, k); it2; ++it2) {
                int i = free_index[it2.row()];
                int j = free_index[it2.col()];
                if (i >= 0 && j >= 0) ts.emplace_back(i, j, factor * it2.value());
            }
    };
    add_matrix(model_.K, 1.0);
    add_matrix(model_.C, gamma / (beta * dt));
    for (int i = 0; i < n_free; ++i)
        ts.emplace_back(i, i, model_.lumped_mass[model_.free_dofs[i]] / (beta * dt * dt));
    for (std::size_t i = 0; i < model_.supports.size(); ++i) {
        if (!status[i]) continue;
        const auto& s = model_.supports[i];
        int fi = free_index[s.dof];
        ts.emplace_back(fi, fi, s.k + s.c * gamma / (beta * dt));
    }

    Eigen::SparseMatrix<double> k_eff(n_free, n_free);
    k_eff.setFromTriplets(ts.begin(), ts.end());
    auto fact = std::make_unique<Factorization>();
    fact->compute(k_eff);
    if (fact->info() != Eigen::Success)
        throw ModelError("Newmark effective matrix factorization failed");
    auto [pos, inserted] = cache_.emplace(status, std::move(fact));
    return *pos->second;
}

void NewmarkSolver::step(StateVector& state, const Eigen::VectorXd& external_force,
                         long step_index) {
    const double dt = config_.dt;
    const double beta = config_.beta;
    const double gamma = config_.gamma;
    const int n_free = int(model_.free_dofs.size());

    Eigen::VectorXd x0(n_free), v0(n_free), a0(n_free);
    for (int i = 0; i < n_free; ++i) {
        int d = model_.free_dofs[i];
        x0[i] = state.x[d];
        v0[i] = state.v[d];
        a0[i] = state.a[d];
    }

    std::vector<int> free_index(model_.n_retained, -1);
    for (int i = 0; i < n_free; ++i) free_index[model_.free_dofs[i]] = i;

    // fixed-point iteration on the gap-support status set
    std::vector<char> status = support_status(model_, state.x);
    Eigen::VectorXd x1;
    for (int iter = 0;; ++iter) {
        if (iter >= config_.max_support_iterations)
            throw ConvergenceError("support status iteration did not converge at step " +
                                       std::to_string(step_index),
                                   step_index);
        const auto& fact = factorization_for(status);

        Eigen::VectorXd rhs(n_free);
        for (int i = 0; i < n_free; ++i) {
            int d = model_.free_dofs[i];
            double m = model_.lumped_mass[d];
            rhs[i] = external_force[d] +
                     m * (x0[i] / (beta * dt * dt) + v0[i] / (beta * dt) +
                          (1.0 / (2.0 * beta) - 1.0) * a0[i]);
        }
        // damping history terms: C_eff * (gamma/(beta dt) x0 + ...)
        {
            Eigen::VectorXd hist = (gamma / (beta * dt)) * x0 +
                                   (gamma / beta - 1.0) * v0 +
                                   dt * (gamma / (2.0 * beta) - 1.0) * a0;
            Eigen::VectorXd full = Eigen::VectorXd::Zero(model_.n_retained);
            for (int i = 0; i < n_free; ++i) full[model_.free_dofs[i]] = hist[i];
            Eigen::VectorXd damped = model_.C * full;
            for (int i = 0; i < n_free; ++i) rhs[i] += damped[model_.free_dofs[i]];
            for (std::size_t s = 0; s < model_.supports.size(); ++s) {
                if (!status[s]) continue;
                const auto& sup = model_.supports[s];
                rhs[free_index[sup.dof]] += sup.c * hist[free_index[sup.dof]];
            }
        }
        // constant part of the closed gap-support force, k*g
        for (std::size_t s = 0; s < model_.supports.size(); ++s) {
            const auto& sup = model_.supports[s];
            if (status[s] && !support_is_bilateral(sup))
                rhs[free_index[sup.dof]] -= sup.k * sup.gap;
        }

        x1 = fact.solve(rhs);

        Eigen::VectorXd x1_full = Eigen::VectorXd::Zero(model_.n_retained);
        for (int i = 0; i < n_free; ++i) x1_full[model_.free_dofs[i]] = x1[i];
        std::vector<char> new_status = support_status(model_, x1_full);
        if (new_status == status) {
            last_support_iterations_ = iter + 1;
            break;
        }
        status = new_status;
    }

    Eigen::VectorXd a1 = (x1 - x0) / (beta * dt * dt) - v0 / (beta * dt) -
                         (1.0 / (2.0 * beta) - 1.0) * a0;
    Eigen::VectorXd v1 = v0 + dt * ((1.0 - gamma) * a0 + gamma * a1);

    for (int i = 0; i < n_free; ++i) {
        int d = model_.free_dofs[i];
        state.x[d] = x1[i];
        state.v[d] = v1[i];
        state.a[d] = a1[i];
        if (!std::isfinite(x1[i]))
            throw DivergenceError("Newmark solver diverged at step " +
                                      std::to_string(step_index),
                                  step_index);
    }
    state.t += dt;
}

Eigen::VectorXd static_solve(const TrackModel& model, const Eigen::VectorXd& force) {
    const int n_free = int(model.free_dofs.size());
    std::vector<int> free_index(model.n_retained, -1);
    for (int i = 0; i < n_free; ++i) free_index[model.free_dofs[i]] = i;

    std::vector<char> status(model.supports.size(), 1);
    for (std::size_t i = 0; i < model.supports.size(); ++i)
        if (!support_is_bilateral(model.supports[i])) status[i] = 0;  // start open

    Eigen::VectorXd x_full = Eigen::VectorXd::Zero(model.n_retained);
    for (int iter = 0;; ++iter) {
        if (iter >= 20)
            throw ConvergenceError("static support status iteration did not converge", -1);

        std::vector<Eigen::Triplet<double>> ts;
        for (int k = 0; k < model.K.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(model.K, k); it; ++it) {
                int i = free_index[it.row()];
                int j = free_index[it.col()];
                if (i >= 0 && j >= 0) ts.emplace_back(i, j, it.value());
            }
        Eigen::VectorXd rhs(n_free);
        for (int i = 0; i < n_free; ++i) rhs[i] = force[model.free_dofs[i]];
        for (std::size_t s = 0; s < model.supports.size(); ++s) {
            if (!status[s]) continue;
            const auto& sup = model.supports[s];
            int fi = free_index[sup.dof];
            ts.emplace_back(fi, fi, sup.k);
            if (!support_is_bilateral(sup)) rhs[fi] -= sup.k * sup.gap;
        }
        Eigen::SparseMatrix<double> k_eff(n_free, n_free);
        k_eff.setFromTriplets(ts.begin(), ts.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(k_eff);
        if (lu.info() != Eigen::Success)
            throw ModelError("singular stiffness matrix in static solve");
        Eigen::VectorXd x = lu.solve(rhs);

        x_full.setZero();
        for (int i = 0; i < n_free; ++i) x_full[model.free_dofs[i]] = x[i];
        std::vector<char> new_status = support_status(model, x_full);
        if (new_status == status) break;
        status = new_status;
    }
    return x_full;
}

}  // namespace vti
