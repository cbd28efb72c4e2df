#pragma once

#include <string>
#include <vector>

#include "autospec/probe.hpp"
#include "autospec/tensor.hpp"

namespace autospec {

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  // Zero-variance inputs make the statistic ill-defined; the result is pinned
  // (equal means: t=0, p=1; unequal: p=0) and flagged instead of dividing by zero.
  bool degenerate = false;
};

// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of freedom
// and a two-tailed p. Each side needs at least two observations (DomainError).
WelchResult welch_t(const std::vector<double>& xs, const std::vector<double>& ys);

// Student-t CDF through the regularized incomplete beta function (modified
// Lentz continued fraction). Absolute error <= 1e-10. df > 0 (DomainError).
double t_cdf(double t, double df);

enum class Correction { none, bonferroni };

Correction correction_from_string(const std::string& s);
std::string to_string(Correction c);

// One spectral series: values.at(e, k) is singular value k at epochs[e].
struct TrajectoryMatrix {
  int layer_id = -1;
  std::string layer_name;
  Statistic statistic = Statistic::grad;
  int group = SpectrumSnapshot::kAllGroups;
  std::vector<long> epochs;  // ascending
  Tensor values;             // E x K
};

// Collates a snapshot stream into per-(layer, statistic, group) trajectories,
// epochs ascending. Inconsistent spectrum lengths or duplicate epochs within
// a series are contract violations.
std::vector<TrajectoryMatrix> trajectories_from_snapshots(
    const std::vector<SpectrumSnapshot>& snapshots);

// p-value per epoch, treating the K singular values at that epoch as the two
// samples. Needs K >= 2 on both sides and identical epoch grids.
//
// Caveat: singular values at one epoch are ordered, mutually dependent
// quantities, not i.i.d. draws; these p-values are a screening heuristic for
// "do the spectra differ now", not calibrated inference. The per-sv direction
// treats epochs as repeated measurements and is the better-behaved axis.
std::vector<double> per_epoch_significance(const TrajectoryMatrix& a, const TrajectoryMatrix& b);

// p-value per singular value index over the shared indices, treating the E
// epochs as the two samples. Needs E >= 2 on both sides.
std::vector<double> per_sv_significance(const TrajectoryMatrix& a, const TrajectoryMatrix& b);

struct SignificanceReport {
  int layer_id = -1;
  std::string layer_name;
  Statistic statistic = Statistic::grad;
  int group_a = 0;
  int group_b = 0;
  std::vector<long> epochs;  // grid behind per_epoch_p (may be empty for ad-hoc reports)
  std::vector<double> per_epoch_p;
  std::vector<double> per_sv_p;
  double alpha = 0.05;
  Correction correction = Correction::none;
};

// Every group pair within each (layer, statistic) series set, groups ascending,
// pairs lexicographic. Whole-batch series (group = all) are not compared.
std::vector<SignificanceReport> pairwise_reports(const std::vector<TrajectoryMatrix>& trajectories,
                                                 double alpha, Correction correction);

// Correction is applied here, at presentation time: bonferroni divides alpha
// by the number of tests in the vector.
std::vector<bool> epoch_flags(const SignificanceReport& report);
std::vector<bool> sv_flags(const SignificanceReport& report);

}  // namespace autospec
