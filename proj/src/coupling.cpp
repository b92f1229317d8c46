#include "vti/coupling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "vti/errors.hpp"

namespace vti {

double RailProfile::operator()(double position) const {
    if (s.empty()) return 0.0;
    if (position <= s.front()) return r.front();
    if (position >= s.back()) return r.back();
    auto it = std::upper_bound(s.begin(), s.end(), position);
    std::size_t i = std::size_t(it - s.begin());
    double w = (position - s[i - 1]) / (s[i] - s[i - 1]);
    return r[i - 1] + w * (r[i] - r[i - 1]);
}

RailProfile RailProfile::flat() { return RailProfile{}; }

RailProfile RailProfile::from_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open profile " + file.string());
    RailProfile p;
    std::string line;
    if (!std::getline(in, line) || line.rfind("s,r", 0) != 0)
        throw ParseError("bad profile header in " + file.string());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double sv, rv;
        if (std::sscanf(line.c_str(), "%lf,%lf", &sv, &rv) != 2)
            throw ParseError("bad profile row in " + file.string() + ": " + line);
        if (!p.s.empty() && sv <= p.s.back())
            throw ParseError("profile knots not strictly increasing in " + file.string());
        p.s.push_back(sv);
        p.r.push_back(rv);
    }
    return p;
}

void RailProfile::to_file(const std::filesystem::path& file) const {
    std::ofstream out(file);
    if (!out) throw ParseError("cannot write profile " + file.string());
    out << "s,r\n";
    char buf[80];
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.16e,%.16e\n", s[i], r[i]);
        out << buf;
    }
}

std::array<double, 4> hermite_weights(double xi, double length) {
    if (xi < 0.0 || xi > 1.0)
        throw OutOfRangeError("hermite local coordinate " + std::to_string(xi) +
                              " outside [0,1]");
    const double xi2 = xi * xi;
    const double xi3 = xi2 * xi;
    return {1.0 - 3.0 * xi2 + 2.0 * xi3,
            length * (xi - 2.0 * xi2 + xi3),
            3.0 * xi2 - 2.0 * xi3,
            length * (xi3 - xi2)};
}

namespace {

struct ContactKinematics {
    const RailSegment* seg;
    std::array<double, 4> weights;   // on (w_a, theta_a, w_b, theta_b)
    bool has_rotations;
};

ContactKinematics contact_kinematics(double s, const RailLine& rail_line,
                                     const std::vector<NodeRecord>& nodes) {
    auto [elem, xi] = rail_line.locate(s);
    const RailSegment& seg = rail_line.segments[elem];
    const NodeRecord& na = nodes[seg.node_a];
    const NodeRecord& nb = nodes[seg.node_b];
    ContactKinematics k{&seg, {}, na.dof_theta >= 0 && nb.dof_theta >= 0};
    if (k.has_rotations) {
        k.weights = hermite_weights(xi, seg.length);
    } else {
        // documented fallback when rotation dofs are absent
        k.weights = {1.0 - xi, 0.0, xi, 0.0};
    }
    return k;
}

}  // namespace

std::vector<std::pair<int, double>>
distribute_force(double force, double s, const RailLine& rail_line,
                 const std::vector<NodeRecord>& nodes) {
    ContactKinematics k = contact_kinematics(s, rail_line, nodes);
    const NodeRecord& na = nodes[k.seg->node_a];
    const NodeRecord& nb = nodes[k.seg->node_b];
    std::vector<std::pair<int, double>> loads;
    loads.reserve(4);
    loads.emplace_back(na.dof_w, force * k.weights[0]);
    if (na.dof_theta >= 0) loads.emplace_back(na.dof_theta, force * k.weights[1]);
    loads.emplace_back(nb.dof_w, force * k.weights[2]);
    if (nb.dof_theta >= 0) loads.emplace_back(nb.dof_theta, force * k.weights[3]);
    return loads;
}

double displacement_under_wheel(const TrackModel& model, const Eigen::VectorXd& x,
                                double s) {
    ContactKinematics k = contact_kinematics(s, model.rail_line, model.node_table);
    const NodeRecord& na = model.node_table[k.seg->node_a];
    const NodeRecord& nb = model.node_table[k.seg->node_b];
    double u = k.weights[0] * model.raw_dof_displacement(na.dof_w, x) +
               k.weights[2] * model.raw_dof_displacement(nb.dof_w, x);
    if (na.dof_theta >= 0)
        u += k.weights[1] * model.raw_dof_displacement(na.dof_theta, x);
    if (nb.dof_theta >= 0)
        u += k.weights[3] * model.raw_dof_displacement(nb.dof_theta, x);
    return u;
}

double contact_force(double z_w, double u, double r, double hertz_constant) {
    double penetration = (u + r) - z_w;
    if (penetration <= 0.0) return 0.0;
    return hertz_constant * penetration * std::sqrt(penetration);
}

void vehicle_step(VehicleState& state, const VehicleModel& vehicle, double contact,
                  double dt, long step_index) {
    double suspension = vehicle.k_p * (state.z_s - state.z_w) +
                        vehicle.c_p * (state.v_s - state.v_w);
    double a_s = -suspension / vehicle.m_s - vehicle.gravity;
    double a_w = (suspension + contact) / vehicle.m_w - vehicle.gravity;
    state.v_s += dt * a_s;
    state.v_w += dt * a_w;
    state.z_s += dt * state.v_s;
    state.z_w += dt * state.v_w;
    state.s += vehicle.V * dt;
    if (!std::isfinite(state.z_s) || !std::isfinite(state.z_w))
        throw DivergenceError("vehicle diverged at step " + std::to_string(step_index),
                              step_index);
}

VehicleState vehicle_static_state(const VehicleModel& vehicle, double s0,
                                  double rail_surface) {
    double w = vehicle.static_axle_load();
    double penetration = std::pow(w / vehicle.C_H, 2.0 / 3.0);
    VehicleState state;
    state.s = s0;
    state.z_w = rail_surface - penetration;
    state.z_s = state.z_w - vehicle.m_s * vehicle.gravity / vehicle.k_p;
    return state;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Half-duplex exchange of one scalar per direction per step. The file
// transport writes each value to a fresh file (atomic rename) and reads it
// back, realizing the per-step I/O cost of the standard coupling.
class Transport {
public:
    virtual ~Transport() = default;
    virtual double exchange(const char* kind, long step, double value) = 0;
};

class InProcessTransport : public Transport {
public:
    double exchange(const char*, long, double value) override { return value; }
};

class FileTransport : public Transport {
public:
    explicit FileTransport(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw TransportError("cannot create exchange dir " + dir_.string());
    }

    double exchange(const char* kind, long step, double value) override {
        auto name = dir_ / (std::string(kind) + "_" + std::to_string(step) + ".txt");
        auto tmp = dir_ / (std::string(kind) + "_" + std::to_string(step) + ".tmp");
        {
            std::ofstream out(tmp);
            if (!out) throw TransportError("cannot write exchange file " + tmp.string());
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.16e\n", value);
            out << buf;
        }
        std::error_code ec;
        std::filesystem::rename(tmp, name, ec);
        if (ec) throw TransportError("cannot publish exchange file " + name.string());
        std::ifstream in(name);
        double read_back = 0.0;
        if (!(in >> read_back))
            throw TransportError("cannot read exchange file " + name.string());
        std::filesystem::remove(name, ec);
        return read_back;
    }

private:
    std::filesystem::path dir_;
};

std::unique_ptr<Transport> make_transport(const CoSimConfig& config) {
    if (config.transport == TransportKind::in_process)
        return std::make_unique<InProcessTransport>();
    auto dir = config.exchange_dir.empty()
                   ? std::filesystem::temp_directory_path() / "vti_exchange"
                   : config.exchange_dir;
    return std::make_unique<FileTransport>(dir);
}

Trace make_cosim_trace(const CoSimConfig& config) {
    Trace trace;
    trace.columns = {"s_wheel", "F_contact", "u_under_wheel"};
    for (int d : config.probe_raw_dofs)
        trace.columns.push_back("u_dof_" + std::to_string(d));
    return trace;
}

void emit_sample(Trace& trace, const TrackModel& track, const CoSimConfig& config,
                 double t, double s, double force, double u, const Eigen::VectorXd& x) {
    std::vector<double> row{s, force, u};
    for (int d : config.probe_raw_dofs) row.push_back(track.raw_dof_displacement(d, x));
    trace.append(t, row);
}

}  // namespace

CoSimRun run_standard(const VehicleModel& vehicle, const TrackModel& track,
                      const RailProfile& profile, const CoSimConfig& config) {
    if (config.dt <= 0.0) throw ModelError("standard approach requires run.dt > 0");
    const double dt = config.dt;  // same step for the MBS and the FE side
    const long n_steps = std::lround(config.t_end / dt);

    NewmarkConfig newmark_config;
    newmark_config.dt = dt;
    NewmarkSolver solver(track, newmark_config);

    auto transport = make_transport(config);

    CoSimRun run;
    run.approach = Approach::standard;
    run.dt_used = dt;
    run.trace = make_cosim_trace(config);

    StateVector state = StateVector::zero(track.n_retained);
    VehicleState veh = vehicle_static_state(vehicle, config.s_start, profile(config.s_start));
    Eigen::VectorXd f_ext(track.n_retained);

    double u_feedback = 0.0;
    auto t0 = Clock::now();
    for (long n = 0; n < n_steps; ++n) {
        double s_contact = veh.s;

        auto tv = Clock::now();
        double force = contact_force(veh.z_w, u_feedback, profile(s_contact), vehicle.C_H);
        vehicle_step(veh, vehicle, force, dt, n);
        run.wall_vehicle += seconds_since(tv);

        auto tt = Clock::now();
        double force_received = transport->exchange("force", n, force);
        run.wall_transport += seconds_since(tt);

        auto tk = Clock::now();
        f_ext.setZero();
        // wheel pushes the rail down: minus the (upward-on-wheel) contact force
        track.project_raw_force(
            distribute_force(-force_received, s_contact, track.rail_line, track.node_table),
            f_ext);
        solver.step(state, f_ext, n);
        double u_under_wheel = displacement_under_wheel(track, state.x, s_contact);
        run.wall_track += seconds_since(tk);

        tt = Clock::now();
        u_feedback = transport->exchange("disp", n, u_under_wheel);
        run.wall_transport += seconds_since(tt);

        if ((n + 1) % config.output_stride == 0)
            emit_sample(run.trace, track, config, state.t, s_contact, force, u_feedback,
                        state.x);
    }
    run.wall_total = seconds_since(t0);
    run.final_track_state = std::move(state);

    run.trace.metadata["approach"] = "standard";
    run.trace.metadata["transport"] =
        config.transport == TransportKind::in_process ? "in_process" : "file_exchange";
    run.trace.metadata["dt"] = std::to_string(dt);
    run.trace.metadata["wall_time_s"] = std::to_string(run.wall_total);
    return run;
}

CoSimRun run_new(const VehicleModel& vehicle, const TrackModel& track,
                 const RailProfile& profile, const CoSimConfig& config) {
    MassScalingOptions opts;
    opts.m_c = config.m_c;
    opts.dt_target = config.dt_target;
    opts.cfl_constant = config.cfl_constant;
    auto [scaled, report] = mass_scale(track, opts);

    CoSimRun run;
    run.approach = Approach::new_embedded;
    run.scaling = report;
    run.dt_used = report.achieved_dt;
    run.trace = make_cosim_trace(config);

    const double dt = run.dt_used;
    const long n_steps = long(std::ceil(config.t_end / dt));

    ExplicitConfig ex;
    ex.dt = dt;
    ex.displacement_scale = 1e-3;  // rail deflections are mm-scale

    StateVector state = StateVector::zero(scaled.n_retained);
    VehicleState veh = vehicle_static_state(vehicle, config.s_start, profile(config.s_start));
    Eigen::VectorXd f_ext(scaled.n_retained);

    auto t0 = Clock::now();
    for (long n = 0; n < n_steps; ++n) {
        double s_contact = veh.s;
        double u_under_wheel = displacement_under_wheel(scaled, state.x, s_contact);
        double force = contact_force(veh.z_w, u_under_wheel, profile(s_contact), vehicle.C_H);

        vehicle_step(veh, vehicle, force, dt, n);

        f_ext.setZero();
        scaled.project_raw_force(
            distribute_force(-force, s_contact, scaled.rail_line, scaled.node_table),
            f_ext);
        step(state, scaled, f_ext, ex, n);

        if ((n + 1) % config.output_stride == 0)
            emit_sample(run.trace, scaled, config, state.t, s_contact, force,
                        u_under_wheel, state.x);
    }
    run.wall_total = seconds_since(t0);
    run.wall_track = run.wall_total;
    run.final_track_state = std::move(state);

    run.trace.metadata["approach"] = "new";
    run.trace.metadata["dt"] = std::to_string(dt);
    run.trace.metadata["m_c"] = std::to_string(config.m_c);
    run.trace.metadata["wall_time_s"] = std::to_string(run.wall_total);
    return run;
}

}  // namespace vti
