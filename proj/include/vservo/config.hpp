#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "vservo/harness.hpp"

namespace vservo {

// Flat `key = value` text, one entry per line, `#` starts a comment. Vector
// values are whitespace-separated. Keys left out keep their defaults.
//
//   trials, seed, threads, tracker (ideal|noisy), histogram_bin_mm
//   pixel_sigma, occlusion_probability, occlusion_duration_mean,
//   occlusion_behavior (infer|hold)
//   kp_x, kp_z, dy_forward, stop_depth, max_cycles, tool_offset, track_lost_patience
//   fx, fy, cx, cy, width, height
//   mount_position (x y z), mount_rotation (axis-angle, rad)
//   ik_damping, ik_max_iterations, ik_position_tolerance, ik_orientation_tolerance,
//   ik_step_clamp, ik_singularity_threshold, ik_step_base, ik_step_min,
//   ik_step_max, ik_jacobian_perturbation
//   dh1 .. dh6 (a alpha d theta_offset), joint_lower, joint_upper (6 values),
//   wrist_excursion, initial_joints (6 values)
//   offset_min_px, offset_max_px, depth_min_m, depth_max_m

/// Throws std::runtime_error with "<origin>:<line>" context on bad input.
ProtocolConfig parse_config(std::string_view text, const std::string& origin = "<config>");
ProtocolConfig load_config(const std::filesystem::path& path);

/// Every key with its current value; parse_config(format_config(c)) == c.
std::string format_config(const ProtocolConfig& config);

}  // namespace vservo
