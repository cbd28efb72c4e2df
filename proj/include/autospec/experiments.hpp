#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autospec/dataset.hpp"
#include "autospec/models.hpp"
#include "autospec/stats.hpp"

namespace autospec {

// One row of the experiment battery: what the model does, how wide it is,
// which nonlinearity it uses, and whether group-difference statistics are
// part of the run's output.
struct PanelSpec {
  char id = 'A';
  Task task = Task::autoencode;
  std::vector<std::size_t> hidden_dims{32};
  Activation activation = Activation::relu;
  bool group_differences = false;
};

// The full battery, ids 'A'..'H' ascending.
const std::vector<PanelSpec>& panel_table();
PanelSpec panel_by_id(char id);  // ConfigError on unknown ids

// A complete run description: panel + dataset recipe + training knobs.
// Serializes to flat key=value text (one key per line, '#' comments).
struct ExperimentConfig {
  char panel = 'A';
  std::string experiment_id;  // defaults to panel<id>_<dataset>_<arch>

  // dataset recipe: "mnist" reads the idx pair, "sinusoid" and "tabular"
  // generate synthetic data from the seed below
  std::string dataset = "mnist";
  std::string images;                     // mnist idx paths
  std::string labels;
  std::vector<int> keep_classes{0, 1, 2, 3};
  std::size_t cap_per_class = 64;
  std::size_t classes = 4;                // generator class/group count
  std::size_t per_class = 16;             // generator samples per class
  std::size_t length = 32;                // sinusoid length / tabular dim
  double effect = 5.0;                    // tabular planted effect size

  Arch architecture = Arch::mlp;

  double lr = 1e-3;
  long epochs = 1000;
  std::uint64_t seed = 1;
  std::size_t seed_sweep = 1;             // >1 expands into that many seeded runs
  std::size_t cadence = 1;                // probe every k-th epoch
  double alpha = 0.05;
  Correction correction = Correction::bonferroni;
  std::string out_dir = "runs";

  void validate() const;
  std::string resolved_id() const;  // experiment_id or the derived default
};

std::string to_config_text(const ExperimentConfig& cfg);
ExperimentConfig config_from_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Training is one-shot by default (seed_sweep = 1, the config comes back
// unchanged). A sweep expands into consecutive seeds with "_s<seed>" id
// suffixes, ready for run_battery.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& cfg);

// Materializes the configured dataset (file load or seeded generation).
Dataset load_experiment_dataset(const ExperimentConfig& cfg);

// Executes one panel end to end and returns the run directory
// (out_dir/experiment_id). Artifacts: config.txt, loss.csv, spectra.csv,
// significance.csv (group-difference panels only) and manifest.txt with an
// FNV-1a 64 content hash per file. The directory is staged under a ".tmp"
// suffix and renamed into place only when complete; a pre-existing run
// directory is replaced, and failures remove the stage.
std::string run_panel(const ExperimentConfig& cfg);

// Runs several panels, at most AUTOSPEC_WORKERS (default: hardware threads)
// at a time. Returns the run directories in input order; the first panel
// failure is rethrown after every worker has finished.
std::vector<std::string> run_battery(const std::vector<ExperimentConfig>& cfgs);

// Recomputes every hash in dir/manifest.txt; ContractError on any mismatch,
// missing file, or file missing from the manifest.
void verify_manifest(const std::string& dir);

}  // namespace autospec
