#pragma once

#include <map>
#include <string>
#include <vector>

#include "autospec/autodiff.hpp"

namespace autospec {

// Maps each sample row to a group (class label, cohort, ...). Groups are the
// unit of spectral comparison downstream.
struct GroupLabeling {
  std::vector<int> group_ids;              // one entry per sample
  std::map<int, std::string> group_names;  // optional display names

  static GroupLabeling single(std::size_t n);  // everything in group 0

  std::size_t size() const { return group_ids.size(); }
  std::vector<int> distinct() const;  // sorted unique ids
  // ConfigError on: no samples, more than 16 distinct groups, or a named
  // group with no samples (an empty group).
  void validate() const;
};

enum class Statistic { grad, activation, adjoint };

std::string to_string(Statistic s);
Statistic statistic_from_string(const std::string& s);

// One decomposed matrix at one epoch. group == kAllGroups means the whole
// batch; otherwise the group id whose rows were used.
struct SpectrumSnapshot {
  static constexpr int kAllGroups = -1;

  long epoch = 0;
  int layer_id = -1;
  std::string layer_name;
  Statistic statistic = Statistic::grad;
  int group = kAllGroups;
  std::size_t rows = 0, cols = 0;  // shape of the decomposed matrix
  std::vector<double> sigma;       // descending
  std::size_t rank = 0;            // effective rank of sigma
};

struct ProbeConfig {
  std::size_t cadence = 1;         // snapshot every k-th epoch
  bool per_group_grads = true;     // per-group gradient spectra
  bool per_group_factors = false;  // per-group activation/adjoint spectra too
};

// Restriction of each gradient to its sample groups: for group c,
// grad_c = a_c^T delta_c over the rows of samples in c (row r belongs to
// sample r mod batch). Summing the map over groups recovers record.grad_w.
std::map<int, Tensor> group_gradients(const LayerRecord& record, const GroupLabeling& labeling);

// Per-slice gradient spectra of a weight-tied record: sigma of
// slice_a(t)^T slice_delta(t) for each slice. ContractError on untied records.
std::vector<std::vector<double>> tying_spectra(const LayerRecord& record);

// Probes the claim that gradient singular values factor into the products of
// the factor-matrix singular values. Reports, never asserts: the deviation
// and subspace misalignment are the measurement.
struct AlignmentReport {
  std::vector<double> sigma_grad;     // spectrum of grad_w, k = min(h_in, h_out)
  std::vector<double> sigma_a;        // spectrum of the input factor
  std::vector<double> sigma_delta;    // spectrum of the adjoint factor
  std::vector<double> claimed_sigma;  // sigma_a[i] * sigma_delta[i], zero-padded to k
  double max_abs_deviation = 0.0;     // max_i |sigma_grad[i] - claimed_sigma[i]|
  double alignment_offdiag = 0.0;     // ||U_a^T U_delta - I||_F over the shared columns
};

AlignmentReport factorization_alignment(const LayerRecord& record);

// Spectra of one backward pass: per record the whole-batch grad / activation /
// adjoint spectra, then per-group gradient spectra for each group ascending
// (when enabled). Deterministic order: records by layer_id, statistics in
// {grad, activation, adjoint}, then groups.
std::vector<SpectrumSnapshot> snapshot(const std::vector<LayerRecord>& records,
                                       const GroupLabeling& labeling, long epoch,
                                       const ProbeConfig& config = {});

// Cadence-aware wrapper used by training loops.
class SpectralProbe {
public:
  explicit SpectralProbe(GroupLabeling labeling, ProbeConfig config = {});

  bool due(long epoch) const;
  // Snapshots for this epoch, or empty when the epoch is off-cadence.
  std::vector<SpectrumSnapshot> observe(const std::vector<LayerRecord>& records, long epoch) const;

  const GroupLabeling& labeling() const { return labeling_; }
  const ProbeConfig& config() const { return config_; }

private:
  GroupLabeling labeling_;
  ProbeConfig config_;
};

}  // namespace autospec
