#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "test_helpers.hpp"
#include "vti/coupling.hpp"
#include "vti/errors.hpp"
#include "vti/scenario.hpp"
#include "vti/timestep.hpp"

using namespace vti;

namespace {

VehicleModel desk_vehicle() {
    VehicleModel v;
    v.m_s = 7500.0;
    v.m_w = 900.0;
    v.k_p = 1.2e6;
    v.c_p = 3.0e4;
    v.C_H = 2.0e8;
    v.V = 40.0;
    return v;
}

DemoModelOptions small_track_options() {
    DemoModelOptions opt;
    opt.n_elements = 20;  // 12 m of track
    return opt;
}

}  // namespace

TEST_CASE("hermite weights: endpoints and midpoint") {
    auto n0 = hermite_weights(0.0, 0.6);
    CHECK(n0[0] == 1.0);
    CHECK(n0[1] == 0.0);
    CHECK(n0[2] == 0.0);
    CHECK(n0[3] == 0.0);

    auto n1 = hermite_weights(1.0, 0.6);
    CHECK(n1[0] == 0.0);
    CHECK(n1[2] == 1.0);

    auto nm = hermite_weights(0.5, 0.6);
    CHECK(nm[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(nm[1] == doctest::Approx(0.075).epsilon(1e-15));
    CHECK(nm[2] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(nm[3] == doctest::Approx(-0.075).epsilon(1e-15));

    CHECK_THROWS_AS(hermite_weights(-0.01, 0.6), OutOfRangeError);
    CHECK_THROWS_AS(hermite_weights(1.01, 0.6), OutOfRangeError);
}

TEST_CASE("hermite weights: static equivalence over random points") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    const double length = 0.6;
    for (int trial = 0; trial < 1000; ++trial) {
        double xi = d(rng);
        auto n = hermite_weights(xi, length);
        // force balance and moment balance about node a
        CHECK(n[0] + n[2] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(n[1] + n[3] + n[2] * length == doctest::Approx(xi * length).epsilon(1e-12));
    }
    // midpoint spot value: xi = 0.5 puts the moment at L/2
    auto nm = hermite_weights(0.5, 0.6);
    CHECK(nm[1] + nm[3] + nm[2] * 0.6 == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("hermite weights: cubic displacement fields interpolate exactly") {
    // w(s) = a + b s + c s^2 + d s^3 on an element of length L is reproduced
    // from nodal values and slopes
    const double length = 0.6;
    const double a = 1.1, b = -0.7, c = 2.3, d = -1.9;
    auto w = [&](double s) { return a + b * s + c * s * s + d * s * s * s; };
    auto dw = [&](double s) { return b + 2.0 * c * s + 3.0 * d * s * s; };
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        double xi = dist(rng);
        auto n = hermite_weights(xi, length);
        double interp = n[0] * w(0.0) + n[1] * dw(0.0) + n[2] * w(length) + n[3] * dw(length);
        CHECK(interp == doctest::Approx(w(xi * length)).epsilon(1e-12));
    }
}

TEST_CASE("distribute_force: a load at a node goes entirely to that node") {
    TrackModel track = test::demo_track(small_track_options(), "dist_node");
    auto loads = distribute_force(-1e5, 1.2, track.rail_line, track.node_table);
    double total = 0.0;
    for (auto [dof, value] : loads) {
        total += value;
        if (dof == 2 * 2) CHECK(value == doctest::Approx(-1e5).epsilon(1e-14));
        else CHECK(value == doctest::Approx(0.0).scale(1e5).epsilon(1e-15));
    }
    CHECK(total == doctest::Approx(-1e5).epsilon(1e-14));
}

TEST_CASE("distribute_force and displacement_under_wheel are dual") {
    TrackModel track = test::demo_track(small_track_options(), "dist_dual");
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> pos(0.0, 12.0);
    for (int trial = 0; trial < 50; ++trial) {
        double s = pos(rng);
        Eigen::VectorXd x = test::random_vector(rng, track.n_retained, 1e-3);
        for (int i = 0; i < track.n_retained; ++i)
            if (track.blocked[i]) x[i] = 0.0;
        auto loads = distribute_force(1.0, s, track.rail_line, track.node_table);
        double u_from_loads = 0.0;
        for (auto [dof, value] : loads)
            u_from_loads += value * track.raw_dof_displacement(dof, x);
        CHECK(displacement_under_wheel(track, x, s) ==
              doctest::Approx(u_from_loads).epsilon(1e-12));
    }
}

TEST_CASE("contact force: spot values and loss of contact") {
    CHECK(contact_force(-1e-4, 0.0, 0.0, 1e11) == doctest::Approx(1e5).epsilon(1e-13));
    CHECK(contact_force(0.0, 0.0, 0.0, 1e11) == 0.0);
    CHECK(contact_force(1e-4, 0.0, 0.0, 1e11) == 0.0);   // wheel above the rail
    CHECK(contact_force(-1e-4, -2e-4, 0.0, 1e11) == 0.0);  // rail dropped away
    // penetration adds u and r with the upward sign convention
    CHECK(contact_force(-2e-4, 0.5e-4, 0.5e-4, 1e11) ==
          doctest::Approx(1e11 * std::pow(3e-4, 1.5)).epsilon(1e-13));
}

TEST_CASE("vehicle static state inverts the contact law") {
    VehicleModel vehicle = desk_vehicle();
    VehicleState state = vehicle_static_state(vehicle, 3.0, 0.0);
    double w = vehicle.static_axle_load();
    CHECK(contact_force(state.z_w, 0.0, 0.0, vehicle.C_H) ==
          doctest::Approx(w).epsilon(1e-12));
    // suspension carries the sprung mass
    CHECK(vehicle.k_p * (state.z_s - state.z_w) ==
          doctest::Approx(-vehicle.m_s * vehicle.gravity).epsilon(1e-12));
    CHECK(state.s == 3.0);
}

TEST_CASE("vehicle step: zero gravity, zero state, zero contact stays zero") {
    VehicleModel vehicle = desk_vehicle();
    vehicle.gravity = 0.0;
    VehicleState state;
    for (int n = 0; n < 1000; ++n) vehicle_step(state, vehicle, 0.0, 1e-4, n);
    CHECK(state.z_s == 0.0);
    CHECK(state.z_w == 0.0);
    CHECK(state.v_s == 0.0);
    CHECK(state.v_w == 0.0);
    CHECK(state.s == doctest::Approx(1000 * 1e-4 * vehicle.V).epsilon(1e-12));
}

TEST_CASE("vehicle on a rigid rail holds the static axle load") {
    VehicleModel vehicle = desk_vehicle();
    VehicleState state = vehicle_static_state(vehicle, 0.0, 0.0);
    const double dt = 1e-5;
    const double w = vehicle.static_axle_load();
    double worst = 0.0;
    for (int n = 0; n < 200000; ++n) {  // 2 s
        double force = contact_force(state.z_w, 0.0, 0.0, vehicle.C_H);
        vehicle_step(state, vehicle, force, dt, n);
        if (n > 1000) worst = std::max(worst, std::abs(force - w) / w);
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("rail profile: clamped piecewise-linear interpolation and file round trip") {
    RailProfile p;
    p.s = {0.0, 1.0, 2.0};
    p.r = {0.0, -3e-3, 0.0};
    CHECK(p(-5.0) == 0.0);
    CHECK(p(0.5) == doctest::Approx(-1.5e-3).epsilon(1e-14));
    CHECK(p(1.0) == -3e-3);
    CHECK(p(10.0) == 0.0);

    auto file = test::temp_dir("profile") / "p.csv";
    p.to_file(file);
    RailProfile back = RailProfile::from_file(file);
    REQUIRE(back.s.size() == 3);
    CHECK(back.r[1] == -3e-3);
}

TEST_CASE("co-simulation: new approach settles to the static axle load") {
    TrackModel track = test::demo_track(small_track_options(), "cosim_settle");
    VehicleModel vehicle = desk_vehicle();
    CoSimConfig config;
    config.s_start = 2.0;
    config.t_end = 0.15;  // 6 m of travel
    config.m_c = 5.0;
    CoSimRun run = run_new(vehicle, track, RailProfile::flat(), config);

    // after settling the force rides on the static axle load, modulated by
    // the sleeper-passing excitation (discrete supports at 0.6 m spacing)
    auto force = run.trace.column("F_contact");
    const double w = vehicle.static_axle_load();
    std::size_t settle = force.size() / 2;
    double mean = 0.0;
    for (std::size_t i = settle; i < force.size(); ++i) {
        CHECK(std::abs(force[i] - w) / w <= 0.06);
        mean += force[i];
    }
    mean /= double(force.size() - settle);
    CHECK(std::abs(mean - w) / w <= 0.01);
}

TEST_CASE("co-simulation: file transport reproduces the in-process run") {
    TrackModel track = test::demo_track(small_track_options(), "cosim_transport");
    VehicleModel vehicle = desk_vehicle();

    CoSimConfig config;
    config.s_start = 2.0;
    config.t_end = 0.02;
    config.dt = 1e-4;

    CoSimRun in_process = run_standard(vehicle, track, RailProfile::flat(), config);

    config.transport = TransportKind::file_exchange;
    config.exchange_dir = test::temp_dir("exchange");
    CoSimRun file_based = run_standard(vehicle, track, RailProfile::flat(), config);

    REQUIRE(in_process.trace.size() == file_based.trace.size());
    for (std::size_t i = 0; i < in_process.trace.size(); ++i)
        for (std::size_t j = 0; j < in_process.trace.columns.size(); ++j) {
            double a = in_process.trace.rows[i][j];
            double b = file_based.trace.rows[i][j];
            CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
        }
}

TEST_CASE("co-simulation traces carry metadata and probe columns") {
    TrackModel track = test::demo_track(small_track_options(), "cosim_meta");
    VehicleModel vehicle = desk_vehicle();
    CoSimConfig config;
    config.s_start = 2.0;
    config.t_end = 0.01;
    config.m_c = 5.0;
    config.probe_raw_dofs = {2 * 10};
    CoSimRun run = run_new(vehicle, track, RailProfile::flat(), config);

    CHECK(run.trace.metadata.at("approach") == "new");
    CHECK(run.trace.metadata.count("wall_time_s") == 1);
    CHECK(run.trace.metadata.count("dt") == 1);
    CHECK(run.trace.column_index("u_dof_20") >= 0);
    CHECK(run.dt_used == run.scaling.achieved_dt);
    CHECK(run.dt_used > run.scaling.base_dt);
}

TEST_CASE("scenario files: defaults, unknown keys, relative paths") {
    auto dir = test::temp_dir("scenario");
    DemoModelOptions opt = small_track_options();
    generate_demo_model(dir / "model", opt);

    {
        std::ofstream out(dir / "ok.cfg");
        out << "# comment\n"
            << "track.model_dir = model\n"
            << "run.approach = new\n"
            << "run.m_c = 5\n"
            << "run.t_end = 0.01\n"
            << "run.s_start = 2\n";
    }
    Scenario sc = load_scenario(dir / "ok.cfg");
    CHECK(sc.vehicle.m_s == 7500.0);  // default
    CHECK(sc.model_dir == dir / "model");
    CHECK(sc.approach == Approach::new_embedded);
    CoSimRun run = run_scenario(sc);
    CHECK(run.trace.size() > 0);

    {
        std::ofstream out(dir / "bad.cfg");
        out << "track.model_dir = model\nrun.t_end = 0.01\nrun.mistyped = 1\n";
    }
    CHECK_THROWS_AS(load_scenario(dir / "bad.cfg"), ParseError);

    {
        std::ofstream out(dir / "no_dt.cfg");
        out << "track.model_dir = model\nrun.approach = standard\nrun.t_end = 0.01\n";
    }
    CHECK_THROWS_AS(load_scenario(dir / "no_dt.cfg"), ParseError);
}
