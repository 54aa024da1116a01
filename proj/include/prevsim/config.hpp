#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "prevsim/sweep.hpp"

namespace prevsim {

/// Settings of a `sweep` run.
///
/// The file format is one `key = value` pair per line. Blank lines and lines
/// starting with `#` are ignored; lists are comma separated. Unknown or
/// repeated keys are errors. `print_defaults()` emits every key with its
/// default value and parses back to `RunConfig{}`.
struct RunConfig {
  /// Empty means: generate a synthetic dataset from the synth.* keys.
  std::string dataset;
  std::string label_column = "label";
  std::string positive_label = "1";
  std::string output_dir = "prevsim_out";

  std::size_t synth_n = 3000;
  std::size_t synth_features = 5;
  double synth_prevalence = 0.45;
  double synth_separation = 0.5;

  SweepConfig sweep;
};

/// Parses the whole document, collecting every problem before throwing one
/// Errc::InvalidConfig error that lists them all.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

std::string format_config(const RunConfig& cfg);
std::string print_defaults();

/// Semantic checks (ranges, model list, champion) on top of parsing; returns
/// every problem found.
std::vector<std::string> validate_config(const RunConfig& cfg);

}  // namespace prevsim
