#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vti/coupling.hpp"
#include "vti/demo.hpp"
#include "vti/metrics.hpp"
#include "vti/scenario.hpp"
#include "vti/timestep.hpp"
#include "vti/trace.hpp"

namespace py = pybind11;
using namespace vti;

PYBIND11_MODULE(pyvti, m) {
    m.doc() = "vehicle/track co-simulation engine (explicit embedded vs. standard coupling)";

    py::class_<RawModel>(m, "RawModel")
        .def_readonly("n_dofs", &RawModel::n_dofs);

    py::class_<TrackModel>(m, "TrackModel")
        .def_readonly("n_retained", &TrackModel::n_retained)
        .def_property_readonly("lumped_mass",
                               [](const TrackModel& t) { return t.lumped_mass; })
        .def_property_readonly("free_dofs",
                               [](const TrackModel& t) { return t.free_dofs; })
        .def("stiffness_diagonal", &TrackModel::stiffness_diagonal);

    py::class_<MassScalingReport>(m, "MassScalingReport")
        .def_readonly("base_dt", &MassScalingReport::base_dt)
        .def_readonly("achieved_dt", &MassScalingReport::achieved_dt)
        .def_readonly("total_added_mass", &MassScalingReport::total_added_mass)
        .def_readonly("limiting_dofs", &MassScalingReport::limiting_dofs)
        .def_property_readonly("added_mass",
                               [](const MassScalingReport& r) { return r.added_mass; });

    py::class_<VehicleModel>(m, "VehicleModel")
        .def(py::init([](double m_s, double m_w, double k_p, double c_p, double c_h,
                         double v) {
                 return VehicleModel{m_s, m_w, k_p, c_p, c_h, v};
             }),
             py::arg("m_s"), py::arg("m_w"), py::arg("k_p"), py::arg("c_p"),
             py::arg("C_H"), py::arg("V"))
        .def_readwrite("m_s", &VehicleModel::m_s)
        .def_readwrite("V", &VehicleModel::V)
        .def("static_axle_load", &VehicleModel::static_axle_load);

    py::class_<Trace>(m, "Trace")
        .def_readonly("columns", &Trace::columns)
        .def_readonly("t", &Trace::t)
        .def_readonly("metadata", &Trace::metadata)
        .def("column", &Trace::column)
        .def("__len__", &Trace::size);

    py::class_<CoSimRun>(m, "CoSimRun")
        .def_readonly("dt_used", &CoSimRun::dt_used)
        .def_readonly("trace", &CoSimRun::trace)
        .def_readonly("wall_total", &CoSimRun::wall_total)
        .def_readonly("wall_transport", &CoSimRun::wall_transport);

    py::class_<ComparisonMetrics>(m, "ComparisonMetrics")
        .def_readonly("max_rel_disp_dev", &ComparisonMetrics::max_rel_disp_dev)
        .def_readonly("max_force", &ComparisonMetrics::max_force)
        .def_readonly("max_force_ref", &ComparisonMetrics::max_force_ref)
        .def_readonly("cpu_ratio", &ComparisonMetrics::cpu_ratio);

    m.def("load_model", py::overload_cast<const std::filesystem::path&>(&load_model),
          py::arg("model_dir"));
    m.def("build_track_model", &build_track_model);
    m.def("lump_mass", &lump_mass);
    m.def(
        "stable_timestep",
        [](const TrackModel& t, double c) { return stable_timestep(t, c); },
        py::arg("model"), py::arg("cfl_constant") = kDefaultCflConstant);
    m.def(
        "mass_scale",
        [](const TrackModel& t, double m_c, std::optional<double> dt_target,
           bool scale_rotational) {
            MassScalingOptions opts;
            opts.m_c = m_c;
            opts.dt_target = dt_target;
            opts.scale_rotational = scale_rotational;
            return mass_scale(t, opts);
        },
        py::arg("model"), py::arg("m_c"), py::arg("dt_target") = std::nullopt,
        py::arg("scale_rotational") = false);
    m.def("hermite_weights", &hermite_weights, py::arg("xi"), py::arg("length"));
    m.def("contact_force", &contact_force, py::arg("z_w"), py::arg("u"), py::arg("r"),
          py::arg("hertz_constant"));
    m.def("load_scenario", &load_scenario, py::arg("file"));
    m.def("run_scenario", [](const std::filesystem::path& config) {
        return run_scenario(load_scenario(config));
    });
    m.def("read_trace", &read_trace);
    m.def(
        "compare_traces",
        [](const Trace& a, const Trace& ref, double skip_fraction) {
            CompareOptions opts;
            opts.skip_fraction = skip_fraction;
            return compare_traces(a, ref, opts);
        },
        py::arg("trace"), py::arg("reference"), py::arg("skip_fraction") = 0.0);
    m.def(
        "generate_demo_model",
        [](const std::filesystem::path& dir, int n_elements, bool undamped,
           std::vector<int> voided_nodes, int short_element_at) {
            DemoModelOptions opt;
            opt.n_elements = n_elements;
            opt.undamped = undamped;
            opt.voided_nodes = std::move(voided_nodes);
            opt.short_element_at = short_element_at;
            generate_demo_model(dir, opt);
        },
        py::arg("dir"), py::arg("n_elements") = 50, py::arg("undamped") = false,
        py::arg("voided_nodes") = std::vector<int>{}, py::arg("short_element_at") = -1);
    m.def("generate_dip_profile", &generate_dip_profile, py::arg("file"),
          py::arg("center"), py::arg("length"), py::arg("depth"), py::arg("track_length"));
}
