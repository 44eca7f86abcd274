#include "vservo/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace vservo {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error(path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
T parse_field(const std::string& text, const std::filesystem::path& path, int line_no) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": bad value '" + text + "'");
  return value;
}

constexpr const char* kTrialsHeader =
    "trial_id,seed,target_x_m,target_y_m,target_z_m,init_offset_px,cycles,termination,"
    "final_pixel_err_px,final_ee_err_mm";

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return {buf, ptr};
}

std::vector<HistogramBin> ee_error_histogram(const std::vector<TrialResult>& results, double bin_mm) {
  if (!(bin_mm > 0.0)) throw std::invalid_argument("ee_error_histogram: bin width must be positive");
  double largest = 0.0;
  for (const auto& r : results) largest = std::max(largest, r.final_ee_error_mm);
  const int min_bins = static_cast<int>(std::ceil(10.0 / bin_mm));
  const int bins = std::max(min_bins, static_cast<int>(std::floor(largest / bin_mm)) + 1);

  std::vector<HistogramBin> hist(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; ++i) hist[static_cast<std::size_t>(i)] = {i * bin_mm, (i + 1) * bin_mm, 0};
  for (const auto& r : results) {
    const int idx = std::clamp(static_cast<int>(std::floor(r.final_ee_error_mm / bin_mm)), 0, bins - 1);
    ++hist[static_cast<std::size_t>(idx)].count;
  }
  return hist;
}

nlohmann::ordered_json summary_to_json(const MetricsSummary& s) {
  nlohmann::ordered_json j;
  j["trial_count"] = s.trial_count;
  j["mean_pixel_error_px"] = s.mean_pixel_error_px;
  j["std_pixel_error_px"] = s.std_pixel_error_px;
  j["mean_ee_error_mm"] = s.mean_ee_error_mm;
  j["std_ee_error_mm"] = s.std_ee_error_mm;
  j["success_rate_5mm_pct"] = s.success_rate_5mm_pct;
  j["success_rate_10mm_pct"] = s.success_rate_10mm_pct;
  return j;
}

MetricsSummary summary_from_json(const nlohmann::json& j) {
  MetricsSummary s;
  s.trial_count = j.at("trial_count").get<int>();
  s.mean_pixel_error_px = j.at("mean_pixel_error_px").get<double>();
  s.std_pixel_error_px = j.at("std_pixel_error_px").get<double>();
  s.mean_ee_error_mm = j.at("mean_ee_error_mm").get<double>();
  s.std_ee_error_mm = j.at("std_ee_error_mm").get<double>();
  s.success_rate_5mm_pct = j.at("success_rate_5mm_pct").get<double>();
  s.success_rate_10mm_pct = j.at("success_rate_10mm_pct").get<double>();
  return s;
}

void write_trials_csv(const std::vector<TrialResult>& results, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kTrialsHeader << '\n';
  for (const auto& r : results) {
    out << r.trial_id << ',' << r.seed << ',' << format_double(r.target_position.x()) << ','
        << format_double(r.target_position.y()) << ',' << format_double(r.target_position.z()) << ','
        << format_double(r.initial_offset_px) << ',' << r.cycles << ',' << to_string(r.termination) << ','
        << format_double(r.final_pixel_error_px) << ',' << format_double(r.final_ee_error_mm) << '\n';
  }
  finish(out, path);
}

std::vector<TrialResult> read_trials_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  const auto header = split_csv(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const auto* name : {"trial_id", "seed", "target_x_m", "target_y_m", "target_z_m", "init_offset_px",
                           "cycles", "termination", "final_pixel_err_px", "final_ee_err_mm"})
    if (!col.contains(name)) throw std::runtime_error(path.string() + ": missing column '" + name + "'");

  std::vector<TrialResult> results;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size())
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields");
    auto get = [&](const char* name) -> const std::string& { return f[col.at(name)]; };
    TrialResult r;
    r.trial_id = parse_field<int>(get("trial_id"), path, line_no);
    r.seed = parse_field<std::uint64_t>(get("seed"), path, line_no);
    r.target_position = {parse_field<double>(get("target_x_m"), path, line_no),
                         parse_field<double>(get("target_y_m"), path, line_no),
                         parse_field<double>(get("target_z_m"), path, line_no)};
    r.initial_offset_px = parse_field<double>(get("init_offset_px"), path, line_no);
    r.cycles = parse_field<int>(get("cycles"), path, line_no);
    try {
      r.termination = servo_status_from_string(get("termination"));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    r.final_pixel_error_px = parse_field<double>(get("final_pixel_err_px"), path, line_no);
    r.final_ee_error_mm = parse_field<double>(get("final_ee_err_mm"), path, line_no);
    results.push_back(r);
  }
  return results;
}

void write_summary_json(const MetricsSummary& summary, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << summary_to_json(summary).dump(2) << '\n';
  finish(out, path);
}

MetricsSummary read_summary_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  try {
    return summary_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_scatter_csv(const std::vector<TrialResult>& results, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "init_u_px,init_v_px,final_ee_err_mm\n";
  for (const auto& r : results)
    out << format_double(r.initial_pixel.x()) << ',' << format_double(r.initial_pixel.y()) << ','
        << format_double(r.final_ee_error_mm) << '\n';
  finish(out, path);
}

void write_histogram_csv(const std::vector<HistogramBin>& bins, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "bin_low_mm,bin_high_mm,count\n";
  for (const auto& b : bins) out << format_double(b.low_mm) << ',' << format_double(b.high_mm) << ',' << b.count << '\n';
  finish(out, path);
}

void write_trajectories_csv(const std::vector<TrialOutcome>& outcomes, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "trial_id,cycle,tracked_u_px,tracked_v_px,visible,err_x_px,err_y_px,depth_m,"
         "flange_x_m,flange_y_m,flange_z_m,q1,q2,q3,q4,q5,q6,orientation_drift_rad\n";
  for (const auto& o : outcomes) {
    for (const auto& c : o.trajectory.records) {
      out << o.result.trial_id << ',' << c.cycle << ',' << format_double(c.tracked.x()) << ','
          << format_double(c.tracked.y()) << ',' << (c.visible ? 1 : 0) << ','
          << format_double(c.pixel_error.x()) << ',' << format_double(c.pixel_error.y()) << ','
          << format_double(c.depth) << ',' << format_double(c.flange_position.x()) << ','
          << format_double(c.flange_position.y()) << ',' << format_double(c.flange_position.z());
      for (Eigen::Index i = 0; i < 6; ++i) out << ',' << format_double(c.joints[i]);
      out << ',' << format_double(c.orientation_drift) << '\n';
    }
  }
  finish(out, path);
}

void emit_report(const MetricsSummary& summary, const std::vector<TrialResult>& results,
                 const std::filesystem::path& dir, double histogram_bin_mm) {
  write_trials_csv(results, dir / "trials.csv");
  write_summary_json(summary, dir / "summary.json");
  write_scatter_csv(results, dir / "scatter.csv");
  write_histogram_csv(ee_error_histogram(results, histogram_bin_mm), dir / "histogram.csv");
}

}  // namespace vservo
