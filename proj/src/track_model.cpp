#include "vti/track_model.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <map>
#include <set>

#include "vti/errors.hpp"

namespace vti {

Eigen::VectorXd lump_mass(const RawModel& model) {
    Eigen::SparseMatrix<double> m = model.assemble_mass();
    Eigen::VectorXd lumped = Eigen::VectorXd::Zero(model.n_dofs);
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
            lumped[it.row()] += it.value();
    for (int i = 0; i < model.n_dofs; ++i)
        if (lumped[i] < 0.0 && !model.dof_is_blocked(i))
            throw ModelError("mass lumping produced negative mass " +
                             std::to_string(lumped[i]) + " on unblocked dof " +
                             std::to_string(i));
    return lumped;
}

RailLine build_rail_line(const RawModel& model) {
    RailLine line;
    std::map<int, int> node_index;
    for (std::size_t i = 0; i < model.node_table.size(); ++i)
        node_index[model.node_table[i].node_id] = int(i);

    double cumulative = 0.0;
    for (std::size_t e = 0; e < model.element_table.size(); ++e) {
        const auto& el = model.element_table[e];
        int ia = node_index.at(el.node_a);
        int ib = node_index.at(el.node_b);
        const auto& na = model.node_table[ia];
        const auto& nb = model.node_table[ib];
        double length = nb.s - na.s;
        if (length <= 0.0)
            throw ModelError("element " + std::to_string(el.element_id) +
                             " has non-positive length");
        if (!line.segments.empty() && na.s <= line.segments.back().s_a)
            throw ModelError("rail line arclength not strictly increasing at element " +
                             std::to_string(el.element_id));
        line.segments.push_back({int(e), ia, ib, na.s, length});
        cumulative = nb.s;
    }
    if (!line.segments.empty()) {
        line.s_min = line.segments.front().s_a;
        line.s_max = cumulative;
    }
    return line;
}

std::pair<int, double> RailLine::locate(double s) const {
    if (segments.empty()) throw OutOfRangeError("rail line is empty");
    if (s < s_min || s > s_max)
        throw OutOfRangeError("arclength " + std::to_string(s) + " outside rail line [" +
                              std::to_string(s_min) + ", " + std::to_string(s_max) + "]");
    // first segment whose start lies beyond s, then step back; this lands on
    // the downstream element at shared nodes
    auto it = std::upper_bound(segments.begin(), segments.end(), s,
                               [](double value, const RailSegment& seg) {
                                   return value < seg.s_a;
                               });
    int idx = int(it - segments.begin()) - 1;
    if (idx < 0) idx = 0;
    const auto& seg = segments[idx];
    double xi = (s - seg.s_a) / seg.length;
    if (xi < 0.0) xi = 0.0;
    if (xi > 1.0) xi = 1.0;
    return {idx, xi};
}

namespace {

struct Partition {
    std::vector<int> retained_to_raw;
    std::vector<int> raw_to_retained;
    std::vector<int> condensed;           // raw dof ids
    std::vector<int> raw_to_condensed;    // -1 if retained
};

Partition make_partition(const RawModel& model, const Eigen::VectorXd& lumped) {
    Partition p;
    p.raw_to_retained.assign(model.n_dofs, -1);
    p.raw_to_condensed.assign(model.n_dofs, -1);
    for (int i = 0; i < model.n_dofs; ++i) {
        bool massless = lumped[i] == 0.0;
        if (massless && !model.dof_is_blocked(i)) {
            p.raw_to_condensed[i] = int(p.condensed.size());
            p.condensed.push_back(i);
        } else {
            p.raw_to_retained[i] = int(p.retained_to_raw.size());
            p.retained_to_raw.push_back(i);
        }
    }
    return p;
}

// slice rows I, cols J out of a sparse matrix (dense result)
Eigen::MatrixXd slice(const Eigen::SparseMatrix<double>& m, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
    std::vector<int> row_of(m.rows(), -1), col_of(m.cols(), -1);
    for (std::size_t i = 0; i < rows.size(); ++i) row_of[rows[i]] = int(i);
    for (std::size_t j = 0; j < cols.size(); ++j) col_of[cols[j]] = int(j);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows.size(), cols.size());
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
            if (row_of[it.row()] >= 0 && col_of[it.col()] >= 0)
                out(row_of[it.row()], col_of[it.col()]) += it.value();
    return out;
}

Eigen::SparseMatrix<double> to_sparse(const Eigen::MatrixXd& m) {
    Eigen::SparseMatrix<double> out(m.rows(), m.cols());
    std::vector<Eigen::Triplet<double>> ts;
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0.0) ts.emplace_back(i, j, m(i, j));
    out.setFromTriplets(ts.begin(), ts.end());
    return out;
}

}  // namespace

TrackModel condense_massless(const RawModel& model, const Eigen::VectorXd& lumped) {
    Partition part = make_partition(model, lumped);
    const int n_ret = int(part.retained_to_raw.size());
    const int n_z = int(part.condensed.size());

    Eigen::SparseMatrix<double> k_raw = model.assemble_stiffness();
    Eigen::SparseMatrix<double> c_raw = model.assemble_damping();

    TrackModel track;
    track.n_retained = n_ret;
    track.node_table = model.node_table;
    track.cmap.retained_to_raw = part.retained_to_raw;
    track.cmap.raw_to_retained = part.raw_to_retained;
    track.cmap.condensed_dofs = part.condensed;

    track.blocked.assign(n_ret, 0);
    track.is_translation.assign(n_ret, 1);
    for (const auto& n : model.node_table) {
        if (n.dof_w >= 0 && part.raw_to_retained[n.dof_w] >= 0 && n.blocked_w)
            track.blocked[part.raw_to_retained[n.dof_w]] = 1;
        if (n.dof_theta >= 0 && part.raw_to_retained[n.dof_theta] >= 0) {
            int r = part.raw_to_retained[n.dof_theta];
            track.is_translation[r] = 0;
            if (n.blocked_theta) track.blocked[r] = 1;
        }
    }
    for (int i = 0; i < n_ret; ++i)
        if (!track.blocked[i]) track.free_dofs.push_back(i);

    track.lumped_mass = Eigen::VectorXd::Zero(n_ret);
    for (int i = 0; i < n_ret; ++i)
        track.lumped_mass[i] = track.blocked[i] ? 0.0 : lumped[part.retained_to_raw[i]];
    for (int i : track.free_dofs)
        if (track.lumped_mass[i] <= 0.0)
            throw ModelError("retained free dof " + std::to_string(part.retained_to_raw[i]) +
                             " has non-positive lumped mass");

    // free retained raw dofs (blocked dofs carry zero displacement and take no
    // part in the condensation algebra)
    std::vector<int> free_raw;
    for (int i : track.free_dofs) free_raw.push_back(part.retained_to_raw[i]);

    Eigen::MatrixXd t_dense;  // n_z x n_free, x_Z = t_dense * x_free
    if (n_z > 0) {
        Eigen::SparseMatrix<double> k_zz =
            to_sparse(slice(k_raw, part.condensed, part.condensed));
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(k_zz);
        if (lu.info() != Eigen::Success) {
            std::string msg = "singular stiffness block among massless dofs:";
            for (int d : part.condensed) msg += " " + std::to_string(d);
            throw SingularBlockError(msg, part.condensed);
        }
        Eigen::MatrixXd k_zf = slice(k_raw, part.condensed, free_raw);
        t_dense = -lu.solve(k_zf);
    } else {
        t_dense.resize(0, int(free_raw.size()));
    }

    // recovery matrix over all retained dofs (blocked columns stay zero)
    {
        std::vector<Eigen::Triplet<double>> ts;
        for (int z = 0; z < n_z; ++z)
            for (std::size_t j = 0; j < track.free_dofs.size(); ++j)
                if (t_dense(z, int(j)) != 0.0)
                    ts.emplace_back(z, track.free_dofs[j], t_dense(z, int(j)));
        track.cmap.recovery.resize(n_z, n_ret);
        track.cmap.recovery.setFromTriplets(ts.begin(), ts.end());
    }

    // condensed K and C over the free retained dofs, embedded into the full
    // retained indexing with blocked rows/cols zero
    auto condense = [&](const Eigen::SparseMatrix<double>& raw) {
        Eigen::MatrixXd ff = slice(raw, free_raw, free_raw);
        if (n_z > 0) {
            Eigen::MatrixXd fz = slice(raw, free_raw, part.condensed);
            Eigen::MatrixXd zf = slice(raw, part.condensed, free_raw);
            Eigen::MatrixXd zz = slice(raw, part.condensed, part.condensed);
            ff += fz * t_dense + t_dense.transpose() * zf +
                  t_dense.transpose() * zz * t_dense;
        }
        std::vector<Eigen::Triplet<double>> ts;
        for (std::size_t j = 0; j < track.free_dofs.size(); ++j)
            for (std::size_t i = 0; i < track.free_dofs.size(); ++i)
                if (ff(int(i), int(j)) != 0.0)
                    ts.emplace_back(track.free_dofs[i], track.free_dofs[j], ff(int(i), int(j)));
        Eigen::SparseMatrix<double> out(n_ret, n_ret);
        out.setFromTriplets(ts.begin(), ts.end());
        return out;
    };
    track.K = condense(k_raw);
    track.C = condense(c_raw);

    // note: for massless eliminated dofs the congruent transform above equals
    // the Schur complement K_ff - K_fz K_zz^-1 K_zf, and applies the same
    // reduction to C

    track.rail_line = build_rail_line(model);

    // element blocks: slice the condensed matrices onto each element's free
    // retained dofs; every (i,j) pair is assigned to exactly one block, the
    // first element (lowest node) that covers it
    std::set<std::pair<int, int>> assigned;
    for (const auto& seg : track.rail_line.segments) {
        DofBlock block;
        for (int node : {seg.node_a, seg.node_b}) {
            const auto& rec = model.node_table[node];
            for (int raw_dof : {rec.dof_w, rec.dof_theta}) {
                if (raw_dof < 0) continue;
                int r = part.raw_to_retained[raw_dof];
                if (r >= 0 && !track.blocked[r]) block.dofs.push_back(r);
            }
        }
        const int nb = int(block.dofs.size());
        block.K = Eigen::MatrixXd::Zero(nb, nb);
        block.C = Eigen::MatrixXd::Zero(nb, nb);
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) {
                auto key = std::make_pair(block.dofs[i], block.dofs[j]);
                if (assigned.count(key)) continue;
                assigned.insert(key);
                block.K(i, j) = track.K.coeff(block.dofs[i], block.dofs[j]);
                block.C(i, j) = track.C.coeff(block.dofs[i], block.dofs[j]);
            }
        if (nb > 0) track.blocks.push_back(std::move(block));
    }

    // condensation fill-in (or dofs outside any element) not covered above
    std::map<std::pair<int, int>, std::pair<double, double>> orphans;
    auto collect = [&](const Eigen::SparseMatrix<double>& m, bool is_k) {
        for (int k = 0; k < m.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
                auto key = std::make_pair(int(it.row()), int(it.col()));
                if (assigned.count(key)) continue;
                auto& entry = orphans[key];
                (is_k ? entry.first : entry.second) = it.value();
            }
    };
    collect(track.K, true);
    collect(track.C, false);
    for (const auto& [key, kc] : orphans) {
        DofBlock block;
        if (key.first == key.second) {
            block.dofs = {key.first};
            block.K = Eigen::MatrixXd::Constant(1, 1, kc.first);
            block.C = Eigen::MatrixXd::Constant(1, 1, kc.second);
        } else {
            block.dofs = {key.first, key.second};
            block.K = Eigen::MatrixXd::Zero(2, 2);
            block.C = Eigen::MatrixXd::Zero(2, 2);
            block.K(0, 1) = kc.first;
            block.C(0, 1) = kc.second;
            auto mirror = orphans.find({key.second, key.first});
            if (mirror != orphans.end()) {
                block.K(1, 0) = mirror->second.first;
                block.C(1, 0) = mirror->second.second;
                orphans.erase(mirror);  // safe: map iteration order, erase ahead
            }
        }
        track.blocks.push_back(std::move(block));
    }

    // supports act on retained free dofs
    for (const auto& s : model.supports) {
        int r = part.raw_to_retained[s.dof];
        if (r < 0)
            throw ModelError("support on condensed massless dof " + std::to_string(s.dof));
        if (track.blocked[r])
            throw ModelError("support on blocked dof " + std::to_string(s.dof));
        track.supports.push_back({r, s.k, s.c, s.gap, false});
    }

    return track;
}

TrackModel build_track_model(const RawModel& model) {
    return condense_massless(model, lump_mass(model));
}

Eigen::VectorXd TrackModel::stiffness_diagonal() const {
    Eigen::VectorXd diag = K.diagonal();
    for (const auto& s : supports) diag[s.dof] += s.k;
    return diag;
}

void TrackModel::project_raw_force(const std::vector<std::pair<int, double>>& raw_loads,
                                   Eigen::VectorXd& retained_force) const {
    for (const auto& [raw_dof, value] : raw_loads) {
        if (value == 0.0) continue;
        int r = cmap.raw_to_retained[raw_dof];
        if (r >= 0) {
            if (!blocked[r]) retained_force[r] += value;
            continue;
        }
        // condensed dof: carry the load over statically, F_r += T^T F_Z
        int z = -1;
        for (std::size_t i = 0; i < cmap.condensed_dofs.size(); ++i)
            if (cmap.condensed_dofs[i] == raw_dof) { z = int(i); break; }
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
                 it(cmap.recovery, z); it; ++it)
            retained_force[it.col()] += it.value() * value;
    }
}

double TrackModel::raw_dof_displacement(int raw_dof, const Eigen::VectorXd& x) const {
    int r = cmap.raw_to_retained[raw_dof];
    if (r >= 0) return blocked[r] ? 0.0 : x[r];
    int z = -1;
    for (std::size_t i = 0; i < cmap.condensed_dofs.size(); ++i)
        if (cmap.condensed_dofs[i] == raw_dof) { z = int(i); break; }
    double value = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
             it(cmap.recovery, z); it; ++it)
        value += it.value() * x[it.col()];
    return value;
}

TrackModel TrackModel::with_scaled_mass(const Eigen::VectorXd& added_mass) const {
    TrackModel out = *this;
    out.lumped_mass += added_mass;
    return out;
}

}  // namespace vti
