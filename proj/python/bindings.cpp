#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>

#include "vservo/config.hpp"
#include "vservo/harness.hpp"
#include "vservo/report.hpp"

namespace py = pybind11;
using namespace vservo;

namespace {

Pose make_pose(const Vec3& position, const Mat3& rotation) { return Pose{position, rotation}; }

py::dict trajectory_dict(const Trajectory& t) {
  py::list records;
  for (const auto& r : t.records) {
    py::dict d;
    d["cycle"] = r.cycle;
    d["tracked"] = r.tracked;
    d["visible"] = r.visible;
    d["pixel_error"] = r.pixel_error;
    d["depth"] = r.depth;
    d["flange_position"] = r.flange_position;
    d["joints"] = r.joints;
    d["orientation_drift"] = r.orientation_drift;
    records.append(d);
  }
  py::dict out;
  out["records"] = records;
  out["termination"] = std::string(to_string(t.termination));
  out["final_joints"] = t.final_state.joints;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Eye-in-hand visual servoing simulator for a UR5e arm";

  py::class_<Pose>(m, "Pose")
      .def(py::init<>())
      .def(py::init(&make_pose), py::arg("position"), py::arg("rotation"))
      .def_readwrite("position", &Pose::position)
      .def_readwrite("rotation", &Pose::rotation)
      .def_static("from_homogeneous", &Pose::from_homogeneous)
      .def("homogeneous", &Pose::homogeneous)
      .def("inverse", &Pose::inverse)
      .def("transform_point", &Pose::transform_point)
      .def("__mul__", [](const Pose& a, const Pose& b) { return a * b; })
      .def("__repr__", [](const Pose& p) {
        return "Pose(position=[" + format_double(p.position.x()) + ", " + format_double(p.position.y()) + ", " +
               format_double(p.position.z()) + "])";
      });

  py::class_<PoseError>(m, "PoseError")
      .def_readonly("position_error", &PoseError::position_error)
      .def_readonly("orientation_error", &PoseError::orientation_error)
      .def("stacked", &PoseError::stacked);

  py::class_<IkConfig>(m, "IkConfig")
      .def(py::init<>())
      .def_readwrite("damping", &IkConfig::damping)
      .def_readwrite("max_iterations", &IkConfig::max_iterations)
      .def_readwrite("position_tolerance", &IkConfig::position_tolerance)
      .def_readwrite("orientation_tolerance", &IkConfig::orientation_tolerance)
      .def_readwrite("step_clamp", &IkConfig::step_clamp)
      .def_readwrite("singularity_threshold", &IkConfig::singularity_threshold)
      .def_readwrite("step_base", &IkConfig::step_base)
      .def_readwrite("step_min", &IkConfig::step_min)
      .def_readwrite("step_max", &IkConfig::step_max)
      .def_readwrite("jacobian_perturbation", &IkConfig::jacobian_perturbation);

  py::class_<IkResult>(m, "IkResult")
      .def_readonly("joints", &IkResult::joints)
      .def_readonly("converged", &IkResult::converged)
      .def_readonly("iterations", &IkResult::iterations)
      .def_readonly("final_error", &IkResult::final_error);

  m.def("forward_kinematics", [](const JointVector& q) { return forward_kinematics(q, ur5e_dh()); }, py::arg("q"));
  m.def("so3_exp", &so3_exp, py::arg("w"));
  m.def("so3_log", &so3_log, py::arg("r"));
  m.def("pose_error", &pose_error, py::arg("current"), py::arg("target"));
  m.def(
      "numerical_jacobian",
      [](const JointVector& q, double h) { return numerical_jacobian(q, ur5e_dh(), h); }, py::arg("q"),
      py::arg("perturbation") = 1e-6);
  m.def("dls_step", py::overload_cast<const Mat6&, const Vec6&, double>(&dls_step), py::arg("jacobian"),
        py::arg("error"), py::arg("damping"));
  m.def("adaptive_step_size", &adaptive_step_size, py::arg("error_norm"), py::arg("near_singular"),
        py::arg("config") = IkConfig{});
  m.def("clamp_step", &clamp_step, py::arg("step"), py::arg("limit"));
  m.def(
      "solve_ik",
      [](const JointVector& q_init, const Pose& target, const IkConfig& config) {
        return solve_ik(q_init, target, ArmModel{}, config);
      },
      py::arg("q_init"), py::arg("target"), py::arg("config") = IkConfig{});

  py::class_<CameraIntrinsics>(m, "CameraIntrinsics")
      .def(py::init<>())
      .def_readwrite("fx", &CameraIntrinsics::fx)
      .def_readwrite("fy", &CameraIntrinsics::fy)
      .def_readwrite("cx", &CameraIntrinsics::cx)
      .def_readwrite("cy", &CameraIntrinsics::cy)
      .def_readwrite("width", &CameraIntrinsics::width)
      .def_readwrite("height", &CameraIntrinsics::height)
      .def("center", &CameraIntrinsics::center);

  m.def("camera_pose", [](const Pose& flange) { return camera_pose(flange, MountTransform{}); }, py::arg("flange"));
  m.def(
      "project",
      [](const Vec3& point, const Pose& camera, const CameraIntrinsics& k) {
        const Projection p = project(point, camera, k);
        return py::make_tuple(p.pixel, p.depth, p.in_frame);
      },
      py::arg("point"), py::arg("camera"), py::arg("intrinsics") = CameraIntrinsics{});
  m.def("depth_of", &depth_of, py::arg("point"), py::arg("camera"));
  m.def("unproject", &unproject, py::arg("pixel"), py::arg("depth"), py::arg("intrinsics") = CameraIntrinsics{});

  m.def(
      "pixel_error",
      [](const Vec2& tracked, const CameraIntrinsics& k) { return pixel_error({tracked.x(), tracked.y(), true, 1.0}, k); },
      py::arg("tracked"), py::arg("intrinsics") = CameraIntrinsics{});
  m.def(
      "control_law",
      [](const Vec2& error, double kp_x, double kp_z, double dy_forward) {
        const MotionCommand c = control_law(error, {kp_x, kp_z, dy_forward});
        return Vec3(c.dx, c.dy, c.dz);
      },
      py::arg("error"), py::arg("kp_x") = 5e-4, py::arg("kp_z") = 5e-4, py::arg("dy_forward") = 5e-3);
  m.def("home_joints", &home_joints);
  m.def(
      "run_servo",
      [](const JointVector& initial_joints, const Vec3& target, const std::string& tracker, std::uint64_t seed,
         const std::optional<std::string>& config_text) {
        const ProtocolConfig config = config_text ? parse_config(*config_text) : ProtocolConfig{};
        TrackerNoiseModel noise = config.noise;
        noise.seed = seed;
        const auto t = make_tracker(tracker_kind_from_string(tracker), config.setup.camera, noise);
        Trajectory out;
        {
          py::gil_scoped_release release;
          out = run_servo(initial_joints, target, *t, config.setup);
        }
        return trajectory_dict(out);
      },
      py::arg("initial_joints"), py::arg("target"), py::arg("tracker") = "ideal", py::arg("seed") = 0,
      py::arg("config_text") = py::none());

  m.def("e_pos", &e_pos, py::arg("ee"), py::arg("target"));
  m.def("e_pixel", &e_pixel, py::arg("tracked"), py::arg("center"));

  py::class_<TrialResult>(m, "TrialResult")
      .def(py::init<>())
      .def_readwrite("trial_id", &TrialResult::trial_id)
      .def_readwrite("seed", &TrialResult::seed)
      .def_readwrite("target_position", &TrialResult::target_position)
      .def_readwrite("initial_pixel", &TrialResult::initial_pixel)
      .def_readwrite("initial_offset_px", &TrialResult::initial_offset_px)
      .def_readwrite("cycles", &TrialResult::cycles)
      .def_property(
          "termination", [](const TrialResult& r) { return std::string(to_string(r.termination)); },
          [](TrialResult& r, const std::string& s) { r.termination = servo_status_from_string(s); })
      .def_readwrite("final_pixel_error_px", &TrialResult::final_pixel_error_px)
      .def_readwrite("final_ee_error_mm", &TrialResult::final_ee_error_mm);

  py::class_<MetricsSummary>(m, "MetricsSummary")
      .def_readonly("trial_count", &MetricsSummary::trial_count)
      .def_readonly("mean_pixel_error_px", &MetricsSummary::mean_pixel_error_px)
      .def_readonly("std_pixel_error_px", &MetricsSummary::std_pixel_error_px)
      .def_readonly("mean_ee_error_mm", &MetricsSummary::mean_ee_error_mm)
      .def_readonly("std_ee_error_mm", &MetricsSummary::std_ee_error_mm)
      .def_readonly("success_rate_5mm_pct", &MetricsSummary::success_rate_5mm_pct)
      .def_readonly("success_rate_10mm_pct", &MetricsSummary::success_rate_10mm_pct)
      .def("to_json", [](const MetricsSummary& s) { return summary_to_json(s).dump(); })
      .def("__eq__", [](const MetricsSummary& a, const MetricsSummary& b) { return a == b; });

  m.def("summarize", [](const std::vector<TrialResult>& r) { return summarize(r); }, py::arg("results"));
  m.def("read_trials_csv", &read_trials_csv, py::arg("path"));
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("trial_id"));

  m.def("default_config", [] { return format_config(ProtocolConfig{}); });
  m.def("check_config", [](const std::string& text) { return format_config(parse_config(text)); },
        py::arg("text"), "Parse, validate and return the fully expanded configuration.");
  m.def(
      "run_trials",
      [](const std::string& config_text, const std::optional<std::filesystem::path>& out_dir) {
        const ProtocolConfig config = parse_config(config_text);
        TrialsRun run;
        {
          py::gil_scoped_release release;
          run = run_trials(config, out_dir);
        }
        return py::make_tuple(run.summary, run.results);
      },
      py::arg("config_text") = "", py::arg("out_dir") = py::none());
}
