// vservo: run the visual-servoing trial protocol and post-process its reports.
//
//   vservo run     --config FILE --trials N --seed S --tracker ideal|noisy --out DIR
//   vservo metrics --trials-csv FILE [--out summary.json]
//   vservo sweep   --kp 3e-4,5e-4 --sigma 0,2,4 --out DIR

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vservo/config.hpp"
#include "vservo/harness.hpp"
#include "vservo/report.hpp"

namespace fs = std::filesystem;
using namespace vservo;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> tracker;
  std::optional<int> threads;
  std::string out = "results";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--trials", o.trials, "number of trials")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--tracker", o.tracker, "tracker model")->check(CLI::IsMember({"ideal", "noisy"}));
  cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
}

ProtocolConfig resolve(const CommonOptions& o) {
  ProtocolConfig c = o.config_path.empty() ? ProtocolConfig{} : load_config(o.config_path);
  if (o.trials) c.trials = *o.trials;
  if (o.seed) c.seed = *o.seed;
  if (o.tracker) c.tracker = tracker_kind_from_string(*o.tracker);
  if (o.threads) c.threads = *o.threads;
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
}

void print_summary(const MetricsSummary& s, std::ostream& os) {
  char line[160];
  std::snprintf(line, sizeof line, "trials %d | pixel %.2f +/- %.2f px | ee %.2f +/- %.2f mm | <5mm %.2f%% | <10mm %.2f%%\n",
                s.trial_count, s.mean_pixel_error_px, s.std_pixel_error_px, s.mean_ee_error_mm, s.std_ee_error_mm,
                s.success_rate_5mm_pct, s.success_rate_10mm_pct);
  os << line;
}

int cmd_run(const CommonOptions& o) {
  const ProtocolConfig c = resolve(o);
  const fs::path out = o.out;
  const TrialsRun run = run_trials(c, out);
  write_text(out / "config.txt", format_config(c));

  int failed = 0;
  for (const auto& r : run.results)
    if (r.termination != ServoStatus::DepthReached) {
      ++failed;
      std::cerr << "trial " << r.trial_id << ": " << to_string(r.termination) << " after " << r.cycles << " cycles\n";
    }
  print_summary(run.summary, std::cout);
  if (failed) std::cout << failed << " trial(s) did not reach the stop depth\n";
  std::cout << "reports written to " << out.string() << '\n';
  return 0;
}

int cmd_metrics(const std::string& trials_csv, const std::string& out) {
  const MetricsSummary s = summarize(read_trials_csv(trials_csv));
  if (!out.empty()) write_summary_json(s, out);
  std::cout << summary_to_json(s).dump(2) << '\n';
  return 0;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
  if (values.empty()) throw std::invalid_argument("empty value list");
  return values;
}

int cmd_sweep(const CommonOptions& o, const std::string& kp_list, const std::string& sigma_list) {
  const ProtocolConfig base = resolve(o);
  const auto kps = kp_list.empty() ? std::vector<double>{base.setup.servo.gains.kp_x} : parse_list(kp_list);
  const auto sigmas = sigma_list.empty() ? std::vector<double>{base.noise.pixel_sigma} : parse_list(sigma_list);

  const fs::path root = o.out;
  fs::create_directories(root);
  std::ofstream grid(root / "sweep.csv", std::ios::binary | std::ios::trunc);
  if (!grid) throw std::runtime_error((root / "sweep.csv").string() + ": cannot open for writing");
  grid << "cell,kp,pixel_sigma,mean_pixel_error_px,std_pixel_error_px,mean_ee_error_mm,std_ee_error_mm,"
          "success_rate_5mm_pct,success_rate_10mm_pct\n";

  for (double kp : kps) {
    for (double sigma : sigmas) {
      ProtocolConfig c = base;
      c.setup.servo.gains.kp_x = kp;
      c.setup.servo.gains.kp_z = kp;
      c.noise.pixel_sigma = sigma;
      const std::string cell = "kp_" + format_double(kp) + "_sigma_" + format_double(sigma);
      const TrialsRun run = run_trials(c, root / cell);
      write_text(root / cell / "config.txt", format_config(c));
      const auto& s = run.summary;
      grid << cell << ',' << format_double(kp) << ',' << format_double(sigma) << ','
           << format_double(s.mean_pixel_error_px) << ',' << format_double(s.std_pixel_error_px) << ','
           << format_double(s.mean_ee_error_mm) << ',' << format_double(s.std_ee_error_mm) << ','
           << format_double(s.success_rate_5mm_pct) << ',' << format_double(s.success_rate_10mm_pct) << '\n';
      std::cout << cell << ": ";
      print_summary(s, std::cout);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Image-based visual servoing simulation harness"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "execute the trial protocol and write reports");
  add_common(run, run_opts);

  std::string trials_csv, metrics_out;
  auto* metrics = app.add_subcommand("metrics", "recompute the summary from trials.csv");
  metrics->add_option("--trials-csv", trials_csv, "trials.csv from a previous run")->required()->check(CLI::ExistingFile);
  metrics->add_option("--out", metrics_out, "write summary JSON here");

  CommonOptions sweep_opts;
  std::string kp_list, sigma_list;
  auto* sweep = app.add_subcommand("sweep", "grid over proportional gain and tracker noise");
  add_common(sweep, sweep_opts);
  sweep->add_option("--kp", kp_list, "comma-separated gains (m/px), applied to both axes");
  sweep->add_option("--sigma", sigma_list, "comma-separated tracker pixel sigmas");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_opts);
    if (*metrics) return cmd_metrics(trials_csv, metrics_out);
    if (*sweep) return cmd_sweep(sweep_opts, kp_list, sigma_list);
  } catch (const std::exception& e) {
    std::cerr << "vservo: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
