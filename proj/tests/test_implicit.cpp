#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "test_helpers.hpp"
#include "vti/errors.hpp"
#include "vti/explicit_solver.hpp"
#include "vti/implicit_solver.hpp"
#include "vti/timestep.hpp"

using namespace vti;

TEST_CASE("newmark: zero force keeps a zero state") {
    DemoModelOptions opt;
    opt.n_elements = 10;
    TrackModel track = test::demo_track(opt, "nm_zero");
    NewmarkConfig config;
    config.dt = 1e-4;
    NewmarkSolver solver(track, config);
    StateVector state = StateVector::zero(track.n_retained);
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(track.n_retained);
    for (int n = 0; n < 100; ++n) solver.step(state, zero, n);
    CHECK(state.x.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("newmark: undamped oscillator keeps period and amplitude") {
    // m = 1, k = 1: period 2*pi; constant-average acceleration conserves
    // energy, so after one period the state is back within the phase error
    RawModel raw = test::single_dof(1.0, 1.0);
    TrackModel track = build_track_model(raw);
    NewmarkConfig config;
    config.dt = 0.01;
    NewmarkSolver solver(track, config);

    StateVector state = StateVector::zero(1);
    state.x[0] = 1.0;
    state.a[0] = -1.0;  // consistent initial acceleration
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);

    const double period = 2.0 * M_PI;
    const long n_steps = std::lround(period / config.dt);
    double max_amp = 0.0;
    for (long n = 0; n < n_steps; ++n) {
        solver.step(state, zero, n);
        max_amp = std::max(max_amp, std::abs(state.x[0]));
    }
    CHECK(max_amp == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(state.x[0] == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("newmark: gap support status flip converges in a few iterations") {
    // bare spring k1 plus a damped gapped support; drive the dof down across
    // the gap and let it settle into the closed state
    RawModel raw = test::single_dof(1.0, 1e4);
    raw.supports.push_back({0, 1e6, 2e3, 1e-3});
    TrackModel track = build_track_model(raw);

    NewmarkConfig config;
    config.dt = 1e-4;  // resolves the closed-support dynamics
    NewmarkSolver solver(track, config);
    StateVector state = StateVector::zero(1);
    Eigen::VectorXd force(1);
    force[0] = -100.0;

    int worst = 0;
    double lowest = 0.0;
    for (int n = 0; n < 2000; ++n) {
        solver.step(state, force, n);
        worst = std::max(worst, solver.last_support_iterations());
        lowest = std::min(lowest, state.x[0]);
    }
    CHECK(lowest < -1e-3);  // crossed the gap
    CHECK(worst >= 2);      // at least one flip happened
    CHECK(worst <= 3);
    // settled onto the closed static solution
    CHECK(state.x[0] == doctest::Approx(-1100.0 / 1.01e6).epsilon(1e-6));
}

TEST_CASE("static solve: series springs") {
    RawModel raw = test::series_springs(1.0, 2.0, 3.0);
    TrackModel track = build_track_model(raw);
    Eigen::VectorXd force = Eigen::VectorXd::Zero(track.n_retained);
    force[0] = 1.0;
    Eigen::VectorXd x = static_solve(track, force);
    CHECK(x[0] == doctest::Approx(1.0 / 1.2).epsilon(1e-14));
}

TEST_CASE("static solve: closed gap support equilibrium") {
    // k1 = 1e4 spring plus k2 = 1e6 support with 1 mm gap under F = -100 N:
    // (k1 + k2) x = F - k2 g  ->  x = -1100 / 1.01e6
    RawModel raw = test::single_dof(1.0, 1e4);
    raw.supports.push_back({0, 1e6, 0.0, 1e-3});
    TrackModel track = build_track_model(raw);
    Eigen::VectorXd force(1);
    force[0] = -100.0;
    Eigen::VectorXd x = static_solve(track, force);
    CHECK(x[0] == doctest::Approx(-1100.0 / 1.01e6).epsilon(1e-12));
    // equilibrium check: spring + support force balances the load
    CHECK(1e4 * x[0] + 1e6 * (x[0] + 1e-3) == doctest::Approx(-100.0).epsilon(1e-9));
}

TEST_CASE("static solve: open gap support stays open") {
    // load too small to close the 1 mm gap: only the bare spring carries it
    RawModel raw = test::single_dof(1.0, 1e6);
    raw.supports.push_back({0, 1e9, 0.0, 1e-3});
    TrackModel track = build_track_model(raw);
    Eigen::VectorXd force(1);
    force[0] = -100.0;
    Eigen::VectorXd x = static_solve(track, force);
    CHECK(x[0] == doctest::Approx(-1e-4).epsilon(1e-12));
}

TEST_CASE("newmark: gap = 0 equals the linear-support flag") {
    DemoModelOptions opt;
    opt.n_elements = 10;
    TrackModel track = test::demo_track(opt, "nm_gap0");
    TrackModel track_linear = track;
    for (auto& s : track_linear.supports) s.linear = true;

    NewmarkConfig config;
    config.dt = 1e-4;
    NewmarkSolver a(track, config), b(track_linear, config);
    StateVector sa = StateVector::zero(track.n_retained);
    StateVector sb = StateVector::zero(track.n_retained);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(track.n_retained);
    load[track.cmap.raw_to_retained[2 * 5]] = -8e4;
    for (int n = 0; n < 500; ++n) {
        a.step(sa, load, n);
        b.step(sb, load, n);
    }
    CHECK((sa.x - sb.x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("newmark: dt refinement converges to the explicit trajectory") {
    DemoModelOptions opt;
    opt.n_elements = 10;
    TrackModel track = test::demo_track(opt, "nm_order");

    Eigen::VectorXd load = Eigen::VectorXd::Zero(track.n_retained);
    int probe = track.cmap.raw_to_retained[2 * 5];
    load[probe] = -8e4;
    const double t_end = 0.02;

    // reference: explicit run far below its stability limit, sampled on the
    // coarsest Newmark grid
    const double dt_sample = 4e-4;
    const long n_samples = std::lround(t_end / dt_sample);
    ExplicitConfig fine;
    std::vector<double> reference;
    {
        StateVector state = StateVector::zero(track.n_retained);
        long per_sample = std::lround(dt_sample / (stable_timestep(track) / 256.0));
        fine.dt = dt_sample / double(per_sample);
        for (long i = 0; i < n_samples; ++i) {
            for (long n = 0; n < per_sample; ++n) step(state, track, load, fine, n);
            reference.push_back(state.x[probe]);
        }
    }
    double ref_scale = 0.0;
    for (double v : reference) ref_scale = std::max(ref_scale, std::abs(v));

    std::vector<double> errors;
    for (double dt : {4e-4, 2e-4, 1e-4, 5e-5}) {
        NewmarkConfig config;
        config.dt = dt;
        NewmarkSolver solver(track, config);
        StateVector state = StateVector::zero(track.n_retained);
        // consistent initial acceleration for the step load
        for (int i : track.free_dofs) state.a[i] = load[i] / track.lumped_mass[i];
        long per_sample = std::lround(dt_sample / dt);
        double error = 0.0;
        for (long i = 0; i < n_samples; ++i) {
            for (long n = 0; n < per_sample; ++n) solver.step(state, load, n);
            error = std::max(error, std::abs(state.x[probe] - reference[std::size_t(i)]));
        }
        errors.push_back(error);
    }
    double order_sum = 0.0;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        CHECK(errors[i + 1] < errors[i]);
        order_sum += std::log2(errors[i] / errors[i + 1]);
    }
    CHECK(order_sum / double(errors.size() - 1) >= 1.0);  // observed order
    CHECK(errors.back() <= 0.05 * ref_scale);
}
