#include "autospec/probe.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "autospec/linalg.hpp"

namespace autospec {

GroupLabeling GroupLabeling::single(std::size_t n) {
  GroupLabeling out;
  out.group_ids.assign(n, 0);
  return out;
}

std::vector<int> GroupLabeling::distinct() const {
  std::set<int> s(group_ids.begin(), group_ids.end());
  return {s.begin(), s.end()};
}

void GroupLabeling::validate() const {
  if (group_ids.empty()) throw ConfigError("labeling error: no samples");
  const std::vector<int> groups = distinct();
  if (groups.size() > 16) {
    throw ConfigError("labeling error: " + std::to_string(groups.size()) +
                      " groups exceed the supported 16");
  }
  for (const auto& [id, name] : group_names) {
    if (!std::binary_search(groups.begin(), groups.end(), id)) {
      throw ConfigError("labeling error: group " + std::to_string(id) + " ('" + name +
                        "') is empty");
    }
  }
}

std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::grad: return "grad";
    case Statistic::activation: return "activation";
    case Statistic::adjoint: return "adjoint";
  }
  throw ConfigError("unhandled statistic enum value");
}

Statistic statistic_from_string(const std::string& s) {
  if (s == "grad") return Statistic::grad;
  if (s == "activation") return Statistic::activation;
  if (s == "adjoint") return Statistic::adjoint;
  throw ConfigError("unknown statistic '" + s + "'");
}

namespace {

void check_alignment(const LayerRecord& record, const GroupLabeling& labeling) {
  labeling.validate();
  if (labeling.size() != record.batch) {
    throw ConfigError("labeling error: " + std::to_string(labeling.size()) +
                      " labels for a batch of " + std::to_string(record.batch) +
                      " (record '" + record.name + "')");
  }
}

// Rows of record.a / record.delta belonging to group c: slice-major layout
// puts sample i at rows { t * batch + i }.
std::pair<Tensor, Tensor> gather_group_rows(const LayerRecord& record,
                                            const std::vector<int>& ids, int group) {
  std::size_t count = 0;
  for (int id : ids) {
    if (id == group) ++count;
  }
  const std::size_t total = count * record.slices;
  Tensor a({total, record.a.cols()});
  Tensor d({total, record.delta.cols()});
  std::size_t out_row = 0;
  for (std::size_t r = 0; r < record.row_count(); ++r) {
    if (ids[r % record.batch] != group) continue;
    std::copy(record.a.data() + r * record.a.cols(), record.a.data() + (r + 1) * record.a.cols(),
              a.data() + out_row * a.cols());
    std::copy(record.delta.data() + r * record.delta.cols(),
              record.delta.data() + (r + 1) * record.delta.cols(),
              d.data() + out_row * d.cols());
    ++out_row;
  }
  return {std::move(a), std::move(d)};
}

SpectrumSnapshot make_snapshot(const LayerRecord& record, long epoch, Statistic stat, int group,
                               const Tensor& matrix) {
  SpectrumSnapshot snap;
  snap.epoch = epoch;
  snap.layer_id = record.layer_id;
  snap.layer_name = record.name;
  snap.statistic = stat;
  snap.group = group;
  snap.rows = matrix.rows();
  snap.cols = matrix.cols();
  snap.sigma = singular_values(matrix);
  snap.rank = effective_rank(snap.sigma, snap.rows, snap.cols);
  return snap;
}

}  // namespace

std::map<int, Tensor> group_gradients(const LayerRecord& record, const GroupLabeling& labeling) {
  check_alignment(record, labeling);
  std::map<int, Tensor> out;
  for (int g : labeling.distinct()) {
    auto [a, d] = gather_group_rows(record, labeling.group_ids, g);
    out.emplace(g, matmul_at_b(a, d));
  }
  return out;
}

std::vector<std::vector<double>> tying_spectra(const LayerRecord& record) {
  if (!record.tied) {
    throw ContractError("tying_spectra: record '" + record.name + "' has no tied slices");
  }
  std::vector<std::vector<double>> out;
  out.reserve(record.slices);
  for (std::size_t t = 0; t < record.slices; ++t) {
    out.push_back(singular_values(matmul_at_b(record.slice_a(t), record.slice_delta(t))));
  }
  return out;
}

AlignmentReport factorization_alignment(const LayerRecord& record) {
  AlignmentReport rep;
  rep.sigma_grad = singular_values(record.grad_w);
  const SvdResult sa = svd(record.a);
  const SvdResult sd = svd(record.delta);
  rep.sigma_a = sa.sigma;
  rep.sigma_delta = sd.sigma;

  const std::size_t k = rep.sigma_grad.size();
  rep.claimed_sigma.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (i < rep.sigma_a.size() && i < rep.sigma_delta.size()) {
      rep.claimed_sigma[i] = rep.sigma_a[i] * rep.sigma_delta[i];
    }
  }
  rep.max_abs_deviation = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    rep.max_abs_deviation =
        std::max(rep.max_abs_deviation, std::fabs(rep.sigma_grad[i] - rep.claimed_sigma[i]));
  }

  // Left-subspace agreement over the columns both factors can offer.
  const std::size_t k_eff = std::min({k, sa.u.cols(), sd.u.cols()});
  double acc = 0.0;
  for (std::size_t i = 0; i < k_eff; ++i) {
    for (std::size_t j = 0; j < k_eff; ++j) {
      double dot = 0.0;
      for (std::size_t r = 0; r < sa.u.rows(); ++r) dot += sa.u.at(r, i) * sd.u.at(r, j);
      const double target = i == j ? 1.0 : 0.0;
      acc += (dot - target) * (dot - target);
    }
  }
  rep.alignment_offdiag = std::sqrt(acc);
  return rep;
}

std::vector<SpectrumSnapshot> snapshot(const std::vector<LayerRecord>& records,
                                       const GroupLabeling& labeling, long epoch,
                                       const ProbeConfig& config) {
  std::vector<SpectrumSnapshot> out;
  const std::vector<int> groups = labeling.distinct();
  for (const LayerRecord& rec : records) {
    check_alignment(rec, labeling);
    out.push_back(make_snapshot(rec, epoch, Statistic::grad, SpectrumSnapshot::kAllGroups,
                                rec.grad_w));
    out.push_back(make_snapshot(rec, epoch, Statistic::activation, SpectrumSnapshot::kAllGroups,
                                rec.a));
    out.push_back(make_snapshot(rec, epoch, Statistic::adjoint, SpectrumSnapshot::kAllGroups,
                                rec.delta));
    if (config.per_group_grads) {
      for (int g : groups) {
        auto [a, d] = gather_group_rows(rec, labeling.group_ids, g);
        out.push_back(make_snapshot(rec, epoch, Statistic::grad, g, matmul_at_b(a, d)));
      }
    }
    if (config.per_group_factors) {
      for (int g : groups) {
        auto [a, d] = gather_group_rows(rec, labeling.group_ids, g);
        out.push_back(make_snapshot(rec, epoch, Statistic::activation, g, a));
        out.push_back(make_snapshot(rec, epoch, Statistic::adjoint, g, d));
      }
    }
  }
  return out;
}

SpectralProbe::SpectralProbe(GroupLabeling labeling, ProbeConfig config)
    : labeling_(std::move(labeling)), config_(config) {
  labeling_.validate();
  if (config_.cadence == 0) throw ConfigError("probe cadence must be at least 1");
}

bool SpectralProbe::due(long epoch) const {
  return epoch % static_cast<long>(config_.cadence) == 0;
}

std::vector<SpectrumSnapshot> SpectralProbe::observe(const std::vector<LayerRecord>& records,
                                                     long epoch) const {
  if (!due(epoch)) return {};
  return snapshot(records, labeling_, epoch, config_);
}

}  // namespace autospec
