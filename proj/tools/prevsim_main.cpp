// Command-line front end: metrics, sweep, synth, config print-defaults.
#include <CLI11.hpp>
#include <iostream>

#include "prevsim/commands.hpp"
#include "prevsim/config.hpp"
#include "prevsim/error.hpp"

namespace {

int run(int argc, char** argv) {
  CLI::App app{"Prevalence sensitivity of binary classification metrics"};
  app.require_subcommand(1);

  auto* metrics = app.add_subcommand("metrics", "Metric report for a score,label predictions CSV");
  std::string predictions;
  double threshold = 0.5;
  std::vector<double> betas{0.5, 2.0};
  metrics->add_option("predictions", predictions, "CSV with columns score and label")->required();
  metrics->add_option("--threshold", threshold, "Scores at or above this are predicted positive");
  metrics->add_option("--betas", betas, "FBeta weights")->delimiter(',');

  auto* sweep = app.add_subcommand("sweep", "Run a prevalence sweep and write every report");
  std::string config_path, out_dir, mode;
  std::optional<std::uint64_t> sweep_seed;
  sweep->add_option("--config", config_path, "Configuration file (defaults otherwise)");
  sweep->add_option("--seed", sweep_seed, "Overrides the configured seed");
  sweep->add_option("--out", out_dir, "Overrides the configured output directory");
  sweep->add_option("--threshold-mode", mode, "cutoff or full")
      ->check(CLI::IsMember({"cutoff", "full"}));

  auto* synth = app.add_subcommand("synth", "Write a synthetic two-class Gaussian dataset");
  std::size_t n = 3000, features = 5;
  double prevalence = 0.45, separation = prevsim::RunConfig{}.synth_separation;
  std::uint64_t synth_seed = prevsim::kDefaultSeed;
  std::string synth_out;
  synth->add_option("--n", n, "Rows");
  synth->add_option("--features", features, "Feature columns");
  synth->add_option("--prevalence", prevalence, "Share of positives");
  synth->add_option("--separation", separation, "Mean shift of positives");
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--out", synth_out, "Output CSV")->required();

  auto* config = app.add_subcommand("config", "Configuration helpers");
  config->require_subcommand(1);
  auto* defaults = config->add_subcommand("print-defaults", "Print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (*metrics) {
    prevsim::cmd_metrics(predictions, threshold, betas, std::cout);
  } else if (*sweep) {
    auto cfg = config_path.empty() ? prevsim::RunConfig{} : prevsim::load_config(config_path);
    if (sweep_seed) cfg.sweep.seed = prevsim::Seed{*sweep_seed};
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!mode.empty()) {
      cfg.sweep.threshold_mode =
          mode == "full" ? prevsim::ThresholdMode::FullGrid : prevsim::ThresholdMode::CutoffOnly;
    }
    const auto outputs = prevsim::cmd_sweep(cfg);
    std::cout << outputs.scenarios << " scenarios, " << outputs.records << " records\n";
    for (const auto& f : outputs.files) std::cout << f.string() << '\n';
  } else if (*synth) {
    prevsim::cmd_synth(n, features, prevalence, separation, prevsim::Seed{synth_seed}, synth_out);
  } else if (*defaults) {
    std::cout << prevsim::print_defaults();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const prevsim::Error& e) {
    std::cerr << "error (" << prevsim::errc_name(e.code()) << "): " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 1;
}
