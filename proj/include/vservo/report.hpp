#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vservo/harness.hpp"

namespace vservo {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

struct HistogramBin {
  double low_mm = 0.0;
  double high_mm = 0.0;
  int count = 0;
};

/// Fixed-width bins from 0 mm covering at least [0, 10) mm and every result.
std::vector<HistogramBin> ee_error_histogram(const std::vector<TrialResult>& results, double bin_mm);

nlohmann::ordered_json summary_to_json(const MetricsSummary& summary);
MetricsSummary summary_from_json(const nlohmann::json& j);

// Writers and readers throw std::runtime_error naming the offending path.
void write_trials_csv(const std::vector<TrialResult>& results, const std::filesystem::path& path);
std::vector<TrialResult> read_trials_csv(const std::filesystem::path& path);
void write_summary_json(const MetricsSummary& summary, const std::filesystem::path& path);
MetricsSummary read_summary_json(const std::filesystem::path& path);
void write_scatter_csv(const std::vector<TrialResult>& results, const std::filesystem::path& path);
void write_histogram_csv(const std::vector<HistogramBin>& bins, const std::filesystem::path& path);
void write_trajectories_csv(const std::vector<TrialOutcome>& outcomes, const std::filesystem::path& path);

/// trials.csv, summary.json, scatter.csv and histogram.csv under dir.
void emit_report(const MetricsSummary& summary, const std::vector<TrialResult>& results,
                 const std::filesystem::path& dir, double histogram_bin_mm = 1.0);

}  // namespace vservo
