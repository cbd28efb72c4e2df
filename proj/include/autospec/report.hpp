#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "autospec/probe.hpp"
#include "autospec/stats.hpp"

namespace autospec {

// One singular value at one (epoch, layer, statistic, group) coordinate.
// The flat schema of spectra.csv.
struct SpectraRow {
  std::string experiment_id;
  long epoch = 0;
  int layer_id = -1;
  Statistic statistic = Statistic::grad;
  int group = SpectrumSnapshot::kAllGroups;  // written as "all"
  std::size_t sv_index = 0;
  double value = 0.0;
};

// One row per singular value, key order preserved from the snapshot stream.
std::vector<SpectraRow> rows_from_snapshots(const std::string& experiment_id,
                                            const std::vector<SpectrumSnapshot>& snapshots);

// Writes header + rows sorted by (experiment_id, epoch, layer_id, statistic,
// group, sv_index). Values are shortest round-trip decimals; non-finite
// values and duplicate keys are rejected. Returns the row count written.
std::size_t write_spectra_csv(const std::vector<SpectraRow>& rows, const std::string& path);

// Parses a file written by write_spectra_csv. FormatError names the line on
// any malformed field; values round-trip bit-exactly.
std::vector<SpectraRow> read_spectra_csv(const std::string& path);

// Regroups rows into snapshots (sigma vectors). The rows must cover
// contiguous sv indices 0..k-1 per snapshot and belong to one experiment.
// Matrix shape and effective rank are not serialized, so those fields are 0.
std::vector<SpectrumSnapshot> snapshots_from_rows(const std::vector<SpectraRow>& rows);

// Flattened SignificanceReport stream: one row per (epoch index | sv index)
// with its p-value and presentation-corrected flag.
std::size_t write_significance_csv(const std::vector<SignificanceReport>& reports,
                                   const std::string& path);
std::vector<SignificanceReport> read_significance_csv(const std::string& path);

struct SvgOptions {
  bool log_y = true;  // plot log10(value + 1e-300); spectra span many decades
  int width = 860;
  int height = 520;
};

// One polyline per sv_index across epochs for a single (layer, statistic,
// group) series. Empty input renders a placeholder; a single epoch renders
// markers instead of lines. Always well-formed XML, deterministic bytes.
std::string render_trajectory_svg(const std::vector<SpectraRow>& rows,
                                  const SvgOptions& options = {});

// Heat strip of per-epoch p-values plus a bar strip of per-sv p-values.
// Cells that clear the report's corrected threshold at level `alpha` carry
// class="sig", so significance is countable from the markup.
std::string render_significance_svg(SignificanceReport report, double alpha);

}  // namespace autospec
