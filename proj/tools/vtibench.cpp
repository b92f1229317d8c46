#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "vti/demo.hpp"
#include "vti/errors.hpp"
#include "vti/metrics.hpp"
#include "vti/scenario.hpp"
#include "vti/timestep.hpp"

namespace {

// distinct exit codes per error category
constexpr int kExitParse = 3;
constexpr int kExitModel = 4;
constexpr int kExitDivergence = 5;
constexpr int kExitOutOfRange = 6;
constexpr int kExitInfeasible = 7;
constexpr int kExitTransport = 8;
constexpr int kExitConvergence = 9;

void print_metrics(const vti::ComparisonMetrics& m) {
    std::printf("max_rel_disp_dev_percent %.6g\n", 100.0 * m.max_rel_disp_dev);
    std::printf("max_force %.6g\n", m.max_force);
    std::printf("max_force_ref %.6g\n", m.max_force_ref);
    std::printf("cpu_ratio %.6g\n", m.cpu_ratio);
    std::printf("peaks %zu\n", m.peaks.size());
    for (const auto& p : m.peaks)
        std::printf("peak t=%.6g s=%.6g F=%.6g\n", p.t, p.s, p.value);
    std::printf("peaks_ref %zu\n", m.peaks_ref.size());
    for (const auto& p : m.peaks_ref)
        std::printf("peak_ref t=%.6g s=%.6g F=%.6g\n", p.t, p.s, p.value);
}

int run_cli(int argc, char** argv) {
    CLI::App app{"vehicle/track co-simulation benchmark tool"};
    app.require_subcommand(1);

    unsigned seed = 0;
    bool serial = false;
    app.add_option("--seed", seed, "seed for randomized fixtures");
    app.add_flag("--serial", serial, "force deterministic serial execution");

    // run
    auto* cmd_run = app.add_subcommand("run", "execute one scenario");
    std::string run_config;
    std::string run_output;
    cmd_run->add_option("--config", run_config, "scenario config file")->required();
    cmd_run->add_option("--output", run_output, "override run.output trace path");

    // compare
    auto* cmd_compare = app.add_subcommand("compare", "compare two trace files");
    std::string trace_a, trace_b;
    double skip_fraction = 0.0;
    double peak_threshold = -1.0;
    cmd_compare->add_option("trace", trace_a, "candidate trace CSV")->required();
    cmd_compare->add_option("reference", trace_b, "reference trace CSV")->required();
    cmd_compare->add_option("--skip", skip_fraction, "fraction of the window to skip");
    cmd_compare->add_option("--peak-threshold", peak_threshold,
                            "absolute force threshold for peak detection [N]");

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "mass-scaling sweep against the standard run");
    std::string sweep_config;
    std::vector<double> sweep_mc;
    std::string sweep_out = "sweep.csv";
    double sweep_skip = 0.2;
    cmd_sweep->add_option("--config", sweep_config, "scenario config file")->required();
    cmd_sweep->add_option("--mc", sweep_mc, "m_c values [kg]")->required()->expected(-1);
    cmd_sweep->add_option("--out", sweep_out, "output table CSV");
    cmd_sweep->add_option("--skip", sweep_skip, "settling fraction skipped in comparisons");

    // analyze
    auto* cmd_analyze = app.add_subcommand("analyze", "CFL / mass-scaling report, no dynamics");
    std::string analyze_model;
    double analyze_mc = 0.0;
    double analyze_dt_target = -1.0;
    bool analyze_rotational = false;
    std::string analyze_out;
    cmd_analyze->add_option("--model", analyze_model, "model directory")->required();
    cmd_analyze->add_option("--mc", analyze_mc, "max added mass per dof [kg]");
    cmd_analyze->add_option("--dt-target", analyze_dt_target, "target dt [s]");
    cmd_analyze->add_flag("--scale-rotational", analyze_rotational,
                          "also add inertia to rotation dofs");
    cmd_analyze->add_option("--report", analyze_out, "report CSV path");

    // make-demo
    auto* cmd_demo = app.add_subcommand("make-demo", "generate the synthetic demo model");
    std::string demo_out;
    vti::DemoModelOptions demo_opt;
    std::string demo_profile;
    double dip_depth = 1e-3, dip_length = 1.0, dip_center = -1.0;
    cmd_demo->add_option("--out", demo_out, "output model directory")->required();
    cmd_demo->add_option("--elements", demo_opt.n_elements, "number of beam elements");
    cmd_demo->add_option("--length", demo_opt.element_length, "element length [m]");
    cmd_demo->add_flag("--undamped", demo_opt.undamped, "zero all damping");
    cmd_demo->add_option("--voided", demo_opt.voided_nodes, "voided sleeper node indices");
    cmd_demo->add_option("--void-gap", demo_opt.void_gap, "void gap [m]");
    cmd_demo->add_option("--short-element-at", demo_opt.short_element_at,
                         "split this element to insert a short one");
    cmd_demo->add_option("--profile", demo_profile, "also write a crossing-dip profile here");
    cmd_demo->add_option("--dip-depth", dip_depth, "dip depth [m]");
    cmd_demo->add_option("--dip-length", dip_length, "dip length [m]");
    cmd_demo->add_option("--dip-center", dip_center, "dip center [m]; default mid-track");

    CLI11_PARSE(app, argc, argv);

    if (cmd_run->parsed()) {
        vti::Scenario scenario = vti::load_scenario(run_config);
        if (!run_output.empty()) scenario.output = run_output;
        vti::CoSimRun result = vti::run_scenario(scenario);
        std::printf("steps %zu\n", result.trace.size());
        std::printf("dt_used %.10g\n", result.dt_used);
        std::printf("wall_total_s %.6g\n", result.wall_total);
        std::printf("wall_transport_s %.6g\n", result.wall_transport);
        if (!scenario.output.empty())
            std::printf("trace %s\n", scenario.output.string().c_str());
    } else if (cmd_compare->parsed()) {
        vti::CompareOptions opts;
        opts.skip_fraction = skip_fraction;
        if (peak_threshold >= 0.0) opts.peaks.threshold = peak_threshold;
        auto metrics = vti::compare_traces(vti::read_trace(trace_a), vti::read_trace(trace_b), opts);
        print_metrics(metrics);
    } else if (cmd_sweep->parsed()) {
        vti::Scenario scenario = vti::load_scenario(sweep_config);
        vti::RawModel raw = vti::load_model(scenario.model_dir);
        vti::TrackModel track = vti::build_track_model(raw);
        vti::RailProfile profile = scenario.profile_file.empty()
                                       ? vti::RailProfile::flat()
                                       : vti::RailProfile::from_file(scenario.profile_file);

        vti::CoSimRun reference =
            vti::run_standard(scenario.vehicle, track, profile, scenario.config);

        std::ofstream table(sweep_out);
        if (!table) throw vti::ParseError("cannot write " + sweep_out);
        table << "m_c,dt,cpu_ratio,max_rel_disp_dev,status\n";
        double prev_dt = 0.0;
        bool dt_monotone = true;
        for (double mc : sweep_mc) {
            vti::CoSimConfig config = scenario.config;
            config.m_c = mc;
            char buf[200];
            try {
                vti::CoSimRun run = vti::run_new(scenario.vehicle, track, profile, config);
                vti::CompareOptions copts;
                copts.skip_fraction = sweep_skip;
                auto m = vti::compare_traces(run.trace, reference.trace, copts);
                double ratio = reference.wall_total / run.wall_total;
                std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.6g,%.10g,ok\n", mc,
                              run.dt_used, ratio, m.max_rel_disp_dev);
                if (run.dt_used <= prev_dt) dt_monotone = false;
                prev_dt = run.dt_used;
            } catch (const vti::DivergenceError& e) {
                std::snprintf(buf, sizeof(buf), "%.10g,,,,failed\n", mc);
            }
            table << buf;
            std::fputs(buf, stdout);
        }
        if (!dt_monotone) {
            std::fprintf(stderr, "error: achieved dt is not strictly increasing over the sweep\n");
            return kExitModel;
        }
    } else if (cmd_analyze->parsed()) {
        vti::RawModel raw = vti::load_model(analyze_model);
        vti::TrackModel track = vti::build_track_model(raw);
        vti::MassScalingOptions opts;
        opts.m_c = analyze_mc;
        opts.scale_rotational = analyze_rotational;
        if (analyze_dt_target > 0.0) opts.dt_target = analyze_dt_target;
        auto [scaled, report] = vti::mass_scale(track, opts);
        std::printf("base_dt %.10g\n", report.base_dt);
        std::printf("achieved_dt %.10g\n", report.achieved_dt);
        std::printf("total_added_mass %.10g\n", report.total_added_mass);
        std::printf("limiting_dofs");
        for (int d : report.limiting_dofs) std::printf(" %d", d);
        std::printf("\n");
        if (!analyze_out.empty())
            vti::write_mass_scaling_report(analyze_out, scaled, report);
    } else if (cmd_demo->parsed()) {
        vti::generate_demo_model(demo_out, demo_opt);
        if (!demo_profile.empty()) {
            double track_length = demo_opt.n_elements * demo_opt.element_length;
            double center = dip_center >= 0.0 ? dip_center : 0.5 * track_length;
            vti::generate_dip_profile(demo_profile, center, dip_length, dip_depth,
                                      track_length);
        }
        std::printf("model written to %s\n", demo_out.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const vti::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitParse;
    } catch (const vti::InfeasibleTargetError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInfeasible;
    } catch (const vti::OutOfRangeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitOutOfRange;
    } catch (const vti::DivergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDivergence;
    } catch (const vti::TransportError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitTransport;
    } catch (const vti::ConvergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConvergence;
    } catch (const vti::ModelError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitModel;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
