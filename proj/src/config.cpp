#include "vservo/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "vservo/report.hpp"

namespace vservo {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_numbers(std::string_view value) {
  std::vector<double> out;
  std::istringstream ss{std::string(value)};
  std::string tok;
  while (ss >> tok) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) throw std::invalid_argument("not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

double one(std::string_view value) {
  const auto v = parse_numbers(value);
  if (v.size() != 1) throw std::invalid_argument("expected one number");
  return v[0];
}

template <typename Int>
Int integer(std::string_view value) {
  Int v{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw std::invalid_argument("expected an integer, got '" + std::string(value) + "'");
  return v;
}

template <int N>
Eigen::Matrix<double, N, 1> vec(std::string_view value) {
  const auto v = parse_numbers(value);
  if (v.size() != N) throw std::invalid_argument("expected " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out[i] = v[static_cast<std::size_t>(i)];
  return out;
}

using Setter = std::function<void(ProtocolConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto real = [&t](const char* key, auto member) {
      t[key] = [member](ProtocolConfig& c, std::string_view v) { member(c) = one(v); };
    };
    t["trials"] = [](ProtocolConfig& c, std::string_view v) { c.trials = integer<int>(v); };
    t["seed"] = [](ProtocolConfig& c, std::string_view v) { c.seed = integer<std::uint64_t>(v); };
    t["threads"] = [](ProtocolConfig& c, std::string_view v) { c.threads = integer<int>(v); };
    t["tracker"] = [](ProtocolConfig& c, std::string_view v) { c.tracker = tracker_kind_from_string(v); };
    real("histogram_bin_mm", [](ProtocolConfig& c) -> double& { return c.histogram_bin_mm; });

    real("pixel_sigma", [](ProtocolConfig& c) -> double& { return c.noise.pixel_sigma; });
    real("occlusion_probability", [](ProtocolConfig& c) -> double& { return c.noise.occlusion_probability; });
    real("occlusion_duration_mean", [](ProtocolConfig& c) -> double& { return c.noise.occlusion_duration_mean; });
    t["occlusion_behavior"] = [](ProtocolConfig& c, std::string_view v) {
      if (v == "infer") c.noise.occlusion_behavior = OcclusionBehavior::InferPosition;
      else if (v == "hold") c.noise.occlusion_behavior = OcclusionBehavior::HoldLast;
      else throw std::invalid_argument("occlusion_behavior must be 'infer' or 'hold'");
    };

    real("kp_x", [](ProtocolConfig& c) -> double& { return c.setup.servo.gains.kp_x; });
    real("kp_z", [](ProtocolConfig& c) -> double& { return c.setup.servo.gains.kp_z; });
    real("dy_forward", [](ProtocolConfig& c) -> double& { return c.setup.servo.gains.dy_forward; });
    real("stop_depth", [](ProtocolConfig& c) -> double& { return c.setup.servo.stop_depth; });
    real("tool_offset", [](ProtocolConfig& c) -> double& { return c.setup.servo.tool_offset; });
    t["max_cycles"] = [](ProtocolConfig& c, std::string_view v) { c.setup.servo.max_cycles = integer<int>(v); };
    t["track_lost_patience"] = [](ProtocolConfig& c, std::string_view v) {
      c.setup.servo.track_lost_patience = integer<int>(v);
    };

    real("fx", [](ProtocolConfig& c) -> double& { return c.setup.camera.fx; });
    real("fy", [](ProtocolConfig& c) -> double& { return c.setup.camera.fy; });
    real("cx", [](ProtocolConfig& c) -> double& { return c.setup.camera.cx; });
    real("cy", [](ProtocolConfig& c) -> double& { return c.setup.camera.cy; });
    t["width"] = [](ProtocolConfig& c, std::string_view v) { c.setup.camera.width = integer<int>(v); };
    t["height"] = [](ProtocolConfig& c, std::string_view v) { c.setup.camera.height = integer<int>(v); };
    t["mount_position"] = [](ProtocolConfig& c, std::string_view v) {
      c.setup.mount.camera_in_flange.position = vec<3>(v);
    };
    t["mount_rotation"] = [](ProtocolConfig& c, std::string_view v) {
      c.setup.mount.camera_in_flange.rotation = so3_exp(vec<3>(v));
    };

    real("ik_damping", [](ProtocolConfig& c) -> double& { return c.setup.ik.damping; });
    t["ik_max_iterations"] = [](ProtocolConfig& c, std::string_view v) { c.setup.ik.max_iterations = integer<int>(v); };
    real("ik_position_tolerance", [](ProtocolConfig& c) -> double& { return c.setup.ik.position_tolerance; });
    real("ik_orientation_tolerance", [](ProtocolConfig& c) -> double& { return c.setup.ik.orientation_tolerance; });
    real("ik_step_clamp", [](ProtocolConfig& c) -> double& { return c.setup.ik.step_clamp; });
    real("ik_singularity_threshold", [](ProtocolConfig& c) -> double& { return c.setup.ik.singularity_threshold; });
    real("ik_step_base", [](ProtocolConfig& c) -> double& { return c.setup.ik.step_base; });
    real("ik_step_min", [](ProtocolConfig& c) -> double& { return c.setup.ik.step_min; });
    real("ik_step_max", [](ProtocolConfig& c) -> double& { return c.setup.ik.step_max; });
    real("ik_jacobian_perturbation", [](ProtocolConfig& c) -> double& { return c.setup.ik.jacobian_perturbation; });

    for (int i = 0; i < 6; ++i) {
      t["dh" + std::to_string(i + 1)] = [i](ProtocolConfig& c, std::string_view v) {
        const auto row = vec<4>(v);
        c.setup.arm.dh[static_cast<std::size_t>(i)] = {row[0], row[1], row[2], row[3]};
      };
    }
    t["joint_lower"] = [](ProtocolConfig& c, std::string_view v) { c.setup.arm.limits.lower = vec<6>(v); };
    t["joint_upper"] = [](ProtocolConfig& c, std::string_view v) { c.setup.arm.limits.upper = vec<6>(v); };
    real("wrist_excursion", [](ProtocolConfig& c) -> double& { return c.setup.arm.limits.wrist_excursion; });
    t["initial_joints"] = [](ProtocolConfig& c, std::string_view v) { c.initial_joints = vec<6>(v); };

    real("offset_min_px", [](ProtocolConfig& c) -> double& { return c.bounds.offset_min_px; });
    real("offset_max_px", [](ProtocolConfig& c) -> double& { return c.bounds.offset_max_px; });
    real("depth_min_m", [](ProtocolConfig& c) -> double& { return c.bounds.depth_min_m; });
    real("depth_max_m", [](ProtocolConfig& c) -> double& { return c.bounds.depth_max_m; });
    return t;
  }();
  return table;
}

template <typename Derived>
std::string join(const Eigen::MatrixBase<Derived>& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

ProtocolConfig parse_config(std::string_view text, const std::string& origin) {
  ProtocolConfig config;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto where = origin + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw std::runtime_error(where + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw std::runtime_error(where + "unknown key '" + std::string(key) + "'");
    try {
      it->second(config, value);
    } catch (const std::exception& e) {
      throw std::runtime_error(where + std::string(key) + ": " + e.what());
    }
  }
  return config;
}

ProtocolConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string format_config(const ProtocolConfig& c) {
  std::ostringstream o;
  const auto& s = c.setup;
  o << "trials = " << c.trials << '\n'
    << "seed = " << c.seed << '\n'
    << "threads = " << c.threads << '\n'
    << "tracker = " << to_string(c.tracker) << '\n'
    << "histogram_bin_mm = " << format_double(c.histogram_bin_mm) << '\n'
    << "pixel_sigma = " << format_double(c.noise.pixel_sigma) << '\n'
    << "occlusion_probability = " << format_double(c.noise.occlusion_probability) << '\n'
    << "occlusion_duration_mean = " << format_double(c.noise.occlusion_duration_mean) << '\n'
    << "occlusion_behavior = "
    << (c.noise.occlusion_behavior == OcclusionBehavior::HoldLast ? "hold" : "infer") << '\n'
    << "kp_x = " << format_double(s.servo.gains.kp_x) << '\n'
    << "kp_z = " << format_double(s.servo.gains.kp_z) << '\n'
    << "dy_forward = " << format_double(s.servo.gains.dy_forward) << '\n'
    << "stop_depth = " << format_double(s.servo.stop_depth) << '\n'
    << "max_cycles = " << s.servo.max_cycles << '\n'
    << "tool_offset = " << format_double(s.servo.tool_offset) << '\n'
    << "track_lost_patience = " << s.servo.track_lost_patience << '\n'
    << "fx = " << format_double(s.camera.fx) << '\n'
    << "fy = " << format_double(s.camera.fy) << '\n'
    << "cx = " << format_double(s.camera.cx) << '\n'
    << "cy = " << format_double(s.camera.cy) << '\n'
    << "width = " << s.camera.width << '\n'
    << "height = " << s.camera.height << '\n'
    << "mount_position = " << join(s.mount.camera_in_flange.position) << '\n'
    << "mount_rotation = " << join(so3_log(s.mount.camera_in_flange.rotation)) << '\n'
    << "ik_damping = " << format_double(s.ik.damping) << '\n'
    << "ik_max_iterations = " << s.ik.max_iterations << '\n'
    << "ik_position_tolerance = " << format_double(s.ik.position_tolerance) << '\n'
    << "ik_orientation_tolerance = " << format_double(s.ik.orientation_tolerance) << '\n'
    << "ik_step_clamp = " << format_double(s.ik.step_clamp) << '\n'
    << "ik_singularity_threshold = " << format_double(s.ik.singularity_threshold) << '\n'
    << "ik_step_base = " << format_double(s.ik.step_base) << '\n'
    << "ik_step_min = " << format_double(s.ik.step_min) << '\n'
    << "ik_step_max = " << format_double(s.ik.step_max) << '\n'
    << "ik_jacobian_perturbation = " << format_double(s.ik.jacobian_perturbation) << '\n';
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& r = s.arm.dh[i];
    o << "dh" << i + 1 << " = " << format_double(r.a) << ' ' << format_double(r.alpha) << ' '
      << format_double(r.d) << ' ' << format_double(r.theta_offset) << '\n';
  }
  o << "joint_lower = " << join(s.arm.limits.lower) << '\n'
    << "joint_upper = " << join(s.arm.limits.upper) << '\n'
    << "wrist_excursion = " << format_double(s.arm.limits.wrist_excursion) << '\n'
    << "initial_joints = " << join(c.initial_joints) << '\n'
    << "offset_min_px = " << format_double(c.bounds.offset_min_px) << '\n'
    << "offset_max_px = " << format_double(c.bounds.offset_max_px) << '\n'
    << "depth_min_m = " << format_double(c.bounds.depth_min_m) << '\n'
    << "depth_max_m = " << format_double(c.bounds.depth_max_m) << '\n';
  return o.str();
}

}  // namespace vservo
