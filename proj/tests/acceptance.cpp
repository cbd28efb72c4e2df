// Acceptance gates for the whole library: one line per criterion, exit 0 only
// when every gate passes. Each gate carries its own tolerances and time
// budget; failures print the measured value instead of asserting silently.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "autospec/autodiff.hpp"
#include "autospec/experiments.hpp"
#include "autospec/linalg.hpp"
#include "autospec/loss.hpp"
#include "autospec/probe.hpp"
#include "autospec/report.hpp"
#include "autospec/stats.hpp"
#include "oracles.hpp"

using namespace autospec;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Gate {
  int id;
  std::string label;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

double elapsed(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("autospec_accept_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Tensor random_tensor(const std::vector<std::size_t>& shape, std::mt19937_64& rng, double lo = -1.0,
                     double hi = 1.0) {
  Tensor t(shape);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(rng);
  return t;
}

// independent of Tensor::matmul_at_b: plain triple loop over a^T * delta
Tensor naive_at_b(const Tensor& a, const Tensor& delta) {
  const std::size_t r = a.rows(), in = a.cols(), out = delta.cols();
  Tensor g({in, out});
  for (std::size_t i = 0; i < in; ++i) {
    for (std::size_t j = 0; j < out; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < r; ++k) acc += a.at(k, i) * delta.at(k, j);
      g.at(i, j) = acc;
    }
  }
  return g;
}

// the four reference architectures at probe scale
std::vector<ModelConfig> arch_configs(Task task) {
  std::vector<ModelConfig> out;
  {
    ModelConfig mc;
    mc.architecture = Arch::mlp;
    mc.hidden_dims = {5, 4};
    mc.input_dim = 6;
    out.push_back(mc);
  }
  {
    ModelConfig mc;
    mc.architecture = Arch::conv1d;
    mc.hidden_dims = {3};
    mc.in_channels = 2;
    mc.in_width = 9;
    out.push_back(mc);
  }
  {
    ModelConfig mc;
    mc.architecture = Arch::conv2d;
    mc.hidden_dims = {3};
    mc.in_channels = 1;
    mc.in_height = 6;
    mc.in_width = 6;
    out.push_back(mc);
  }
  {
    ModelConfig mc;
    mc.architecture = Arch::rnn;
    mc.hidden_dims = {4};
    mc.seq_len = 5;
    mc.step_dim = 2;
    out.push_back(mc);
  }
  for (ModelConfig& mc : out) {
    mc.task = task;
    mc.activation = Activation::tanh;
    mc.class_count = 3;
  }
  return out;
}

std::vector<std::size_t> batch_shape(const ModelConfig& mc, std::size_t n) {
  switch (mc.architecture) {
    case Arch::mlp:
      return {n, mc.input_dim};
    case Arch::conv1d:
      return {n, mc.in_channels, mc.in_width};
    case Arch::conv2d:
      return {n, mc.in_channels, mc.in_height, mc.in_width};
    case Arch::rnn:
      return {n, mc.seq_len, mc.step_dim};
  }
  throw ConfigError("unhandled architecture");
}

// forward + loss + backward with a synthetic target; returns the records
std::vector<LayerRecord> run_backward(Model& model, const ModelConfig& mc, const Tensor& batch,
                                      LossKind loss, std::mt19937_64& rng) {
  Tape tape;
  const Tensor pred = model.forward(batch, tape);
  LossResult lr;
  if (loss == LossKind::mse) {
    lr = mse_loss(pred, random_tensor(pred.shape(), rng));
  } else {
    std::vector<int> labels(batch.extent(0));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(mc.class_count) - 1);
    for (int& l : labels) l = pick(rng);
    lr = cross_entropy_loss(pred, labels);
  }
  return model.backward(tape, lr.grad);
}

// ---------------------------------------------------------------------------

Gate criterion_1() {
  Gate g{1, "backward factorization identity (grad = A^T D)"};
  double worst = 0.0;
  std::size_t records_checked = 0;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    std::mt19937_64 rng(seed);
    for (LossKind loss : {LossKind::mse, LossKind::cross_entropy}) {
      const Task task = loss == LossKind::mse ? Task::autoencode : Task::classify;
      for (const ModelConfig& mc : arch_configs(task)) {
        for (std::size_t n : {1u, 3u, 8u}) {
          Model model = build_model(mc, seed * 131 + n);
          const Tensor batch = random_tensor(batch_shape(mc, n), rng);
          for (const LayerRecord& rec : run_backward(model, mc, batch, loss, rng)) {
            const double dev = frobenius_distance(rec.grad_w, naive_at_b(rec.a, rec.delta)) /
                               std::max(1.0, frobenius_norm(rec.grad_w));
            worst = std::max(worst, dev);
            ++records_checked;
          }
        }
      }
    }
  }
  g.pass = worst <= 1e-10;
  g.detail = "max rel deviation " + num(worst) + " over " + std::to_string(records_checked) +
             " records (tol 1e-10)";
  return g;
}

Gate criterion_2() {
  Gate g{2, "finite-difference gradient check, all architectures, both losses"};
  double worst = 0.0;
  std::string worst_case = "-";
  for (LossKind loss : {LossKind::mse, LossKind::cross_entropy}) {
    const Task task = loss == LossKind::mse ? Task::autoencode : Task::classify;
    for (const ModelConfig& mc : arch_configs(task)) {
      std::mt19937_64 rng(404 + static_cast<int>(mc.architecture));
      Model model = build_model(mc, 17);
      const Tensor batch = random_tensor(batch_shape(mc, 3), rng);
      const double err = gradient_check(model, batch, loss, 23);
      if (err > worst) {
        worst = err;
        worst_case = to_string(mc.architecture) + "/" + to_string(loss);
      }
    }
  }
  g.pass = worst < 1e-4;
  g.detail = "max relative error " + num(worst) + " (" + worst_case + ", tol 1e-4)";
  return g;
}

Gate criterion_3() {
  Gate g{3, "svd equals the Gram-matrix eigenvalue oracle"};
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> dim(1, 16);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  double worst_sigma = 0.0, worst_recon = 0.0, worst_orth = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = dim(rng), n = dim(rng);
    Tensor a({m, n});
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = val(rng);
    const SvdResult r = svd(a);
    const std::vector<double> expect = oracle::gram_singular_values(a);
    const double scale = std::max(1.0, expect.empty() ? 0.0 : expect[0]);
    for (std::size_t i = 0; i < r.sigma.size(); ++i) {
      worst_sigma = std::max(worst_sigma, std::abs(r.sigma[i] - expect[i]) / scale);
    }

    const std::size_t k = r.sigma.size();
    Tensor us = r.u;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < k; ++j) us.at(i, j) *= r.sigma[j];
    }
    worst_recon = std::max(worst_recon, frobenius_distance(a, matmul_a_bt(us, r.v)) /
                                            std::max(1.0, frobenius_norm(a)));
    for (const Tensor* q : {&r.u, &r.v}) {
      const Tensor gram = matmul_at_b(*q, *q);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          worst_orth = std::max(worst_orth, std::abs(gram.at(i, j) - (i == j ? 1.0 : 0.0)));
        }
      }
    }
  }
  g.pass = worst_sigma <= 1e-9 && worst_recon <= 1e-9 && worst_orth <= 1e-9;
  g.detail = "200 matrices: sigma dev " + num(worst_sigma) + ", reconstruction " +
             num(worst_recon) + ", orthogonality " + num(worst_orth) + " (tol 1e-9)";
  return g;
}

Gate criterion_4() {
  Gate g{4, "batch of 2 restricts gradient rank to 2 on dense 32x32 layers"};
  const Dataset data = gen_grouped_tabular(2, 1, 32, 0.0, 7);
  ModelConfig mc;
  mc.architecture = Arch::mlp;
  mc.task = Task::autoencode;
  mc.hidden_dims = {32};
  mc.activation = Activation::tanh;
  mc.input_dim = 32;
  Model model = build_model(mc, 3);
  ProbeConfig pc;
  pc.per_group_grads = false;
  const SpectralProbe probe(GroupLabeling::single(2), pc);
  TrainConfig tc;
  tc.lr = 1e-3;
  tc.epochs = 50;
  const RunLog log = train(model, mc, data, tc, probe);

  std::size_t grad_snaps = 0, max_rank = 0;
  for (const SpectrumSnapshot& s : log.snapshots) {
    if (s.statistic != Statistic::grad) continue;
    ++grad_snaps;
    max_rank = std::max(max_rank, s.rank);
  }
  g.pass = grad_snaps == 50 * 2 && max_rank <= 2;
  g.detail = "max effective rank " + std::to_string(max_rank) + " over " +
             std::to_string(grad_snaps) + " gradient spectra (bound 2)";
  return g;
}

Gate criterion_5() {
  Gate g{5, "per-group gradients sum to the whole-batch gradient"};
  double worst = 0.0;
  std::size_t checks = 0;
  std::mt19937_64 rng(61);
  const std::size_t n = 12;
  for (std::size_t c : {2u, 3u, 4u}) {
    // random partition with every group inhabited
    GroupLabeling labeling;
    labeling.group_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) labeling.group_ids[i] = static_cast<int>(i % c);
    std::shuffle(labeling.group_ids.begin(), labeling.group_ids.end(), rng);
    labeling.validate();

    for (Arch arch : {Arch::mlp, Arch::rnn}) {
      ModelConfig mc;
      mc.architecture = arch;
      mc.task = Task::autoencode;
      mc.activation = Activation::tanh;
      mc.hidden_dims = {8, 5};
      mc.input_dim = 6;
      mc.seq_len = 3;
      mc.step_dim = 2;
      Model model = build_model(mc, 71 + c);
      Tensor batch = random_tensor(batch_shape(mc, n), rng);
      for (int epoch = 0; epoch < 20; ++epoch) {
        const auto records = run_backward(model, mc, batch, LossKind::mse, rng);
        for (const LayerRecord& rec : records) {
          Tensor sum(rec.grad_w.shape());
          for (const auto& [gid, grad] : group_gradients(rec, labeling)) sum += grad;
          worst = std::max(worst, frobenius_distance(sum, rec.grad_w) /
                                      std::max(1.0, frobenius_norm(rec.grad_w)));
          ++checks;
        }
        gd_step(model, records, 1e-3);
      }
    }
  }
  g.pass = worst <= 1e-10;
  g.detail = "max rel deviation " + num(worst) + " over " + std::to_string(checks) +
             " layer-epochs, C in {2,3,4} (tol 1e-10)";
  return g;
}

Gate criterion_6() {
  Gate g{6, "multiplicative spectral bound on a panel-A run"};
  const fs::path out = fresh_dir("c6");
  ExperimentConfig cfg;
  cfg.panel = 'A';
  cfg.dataset = "tabular";
  cfg.classes = 2;
  cfg.per_class = 8;
  cfg.length = 16;
  cfg.effect = 3.0;
  cfg.epochs = 30;
  cfg.seed = 5;
  cfg.out_dir = out.string();
  const std::string dir = run_panel(cfg);
  const auto snaps = snapshots_from_rows(read_spectra_csv((fs::path(dir) / "spectra.csv").string()));

  // collate the whole-batch spectra per (epoch, layer)
  std::map<std::pair<long, int>, std::map<Statistic, std::vector<double>>> panels;
  for (const SpectrumSnapshot& s : snaps) {
    if (s.group != SpectrumSnapshot::kAllGroups) continue;
    panels[{s.epoch, s.layer_id}][s.statistic] = s.sigma;
  }
  auto sv = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : 0.0; };
  double worst = -1e300;
  std::size_t checks = 0, triples = 0;
  for (const auto& [key, stats] : panels) {
    const auto git = stats.find(Statistic::grad);
    const auto ait = stats.find(Statistic::activation);
    const auto dit = stats.find(Statistic::adjoint);
    if (git == stats.end() || ait == stats.end() || dit == stats.end()) continue;
    ++triples;
    for (std::size_t i = 0; i < git->second.size(); ++i) {
      const double bound =
          std::min(sv(ait->second, 0) * sv(dit->second, i), sv(ait->second, i) * sv(dit->second, 0));
      worst = std::max(worst, git->second[i] - bound);
      ++checks;
    }
  }
  g.pass = triples == 30 * 2 && worst <= 1e-10;
  g.detail = "max (sigma_i(grad) - bound) = " + num(worst) + " over " + std::to_string(checks) +
             " singular values in " + std::to_string(triples) + " snapshots (tol 1e-10)";
  return g;
}

Gate criterion_7() {
  Gate g{7, "welch calibration and t_cdf accuracy"};
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::size_t rejections = 0;
  const std::size_t pairs = 10000, n = 8;
  std::vector<double> xs(n), ys(n);
  for (std::size_t trial = 0; trial < pairs; ++trial) {
    for (double& v : xs) v = gauss(rng);
    for (double& v : ys) v = gauss(rng);
    if (welch_t(xs, ys).p < 0.05) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / static_cast<double>(pairs);

  double worst_cdf = 0.0;
  const double dfs[] = {0.5, 1, 2, 3, 5, 8, 13, 30, 80, 200};
  const double ts[] = {0, 0.4, -0.4, 1, -1, 2, -2, 3.5, -3.5, 6};
  for (double df : dfs) {
    for (double t : ts) {
      worst_cdf = std::max(worst_cdf, std::abs(t_cdf(t, df) - oracle::t_cdf_quadrature(t, df)));
    }
  }
  g.pass = rate >= 0.04 && rate <= 0.06 && worst_cdf <= 1e-10;
  g.detail = "null rejection rate " + num(rate) + " (window [0.04, 0.06]); t_cdf dev " +
             num(worst_cdf) + " on 100 points (tol 1e-10)";
  return g;
}

std::size_t epochs_below_alpha(const std::string& run_dir, double alpha) {
  std::size_t hits = 0;
  for (const SignificanceReport& rep :
       read_significance_csv((fs::path(run_dir) / "significance.csv").string())) {
    for (double p : rep.per_epoch_p) hits += p < alpha;
  }
  return hits;
}

Gate criterion_8() {
  Gate g{8, "planted group difference outflags the null by 10x"};
  const fs::path out = fresh_dir("c8");
  // The per-epoch test compares the two groups' singular values index for
  // index, so it only fires when the difference is spread across much of the
  // spectrum, not parked in sigma_0. A 32-dim classifier stepped hard enough
  // to reshape the relu gating within 20 epochs gives the shift that reach;
  // the same step size leaves the effect-0 run silent.
  ExperimentConfig cfg;
  cfg.panel = 'H';
  cfg.dataset = "tabular";
  cfg.classes = 2;
  cfg.per_class = 32;
  cfg.length = 32;
  cfg.lr = 1.2;
  cfg.epochs = 20;
  cfg.seed = 1;
  cfg.out_dir = out.string();

  cfg.effect = 5.0;
  cfg.experiment_id = "planted";
  const std::size_t planted = epochs_below_alpha(run_panel(cfg), cfg.alpha);
  cfg.effect = 0.0;
  cfg.experiment_id = "null";
  const std::size_t null_hits = epochs_below_alpha(run_panel(cfg), cfg.alpha);

  g.pass = planted >= 1 && planted >= 10 * null_hits;
  g.detail = "planted run: " + std::to_string(planted) + " epochs with p < 0.05, null run: " +
             std::to_string(null_hits) + " (need 10x)";
  return g;
}

// Seeded stand-in for the MNIST idx pair: 28x28 byte images whose per-class
// structure is a banded sine pattern with random phase plus pixel noise.
// Learnable by a small autoencoder and separable by class, like the original.
void write_synthetic_mnist(const fs::path& images, const fs::path& labels) {
  constexpr std::size_t kClasses = 4, kPerClass = 64, kSide = 28;
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  std::normal_distribution<double> noise(0.0, 12.0);
  std::vector<std::uint8_t> img_bytes, lbl_bytes;
  img_bytes.reserve(kClasses * kPerClass * kSide * kSide);
  for (std::size_t c = 0; c < kClasses; ++c) {
    for (std::size_t i = 0; i < kPerClass; ++i) {
      const double phi = phase(rng);
      for (std::size_t r = 0; r < kSide; ++r) {
        for (std::size_t col = 0; col < kSide; ++col) {
          const double angle = 6.283185307179586 * static_cast<double>(c + 1) *
                                   static_cast<double>(r + col) / static_cast<double>(kSide) +
                               phi;
          const double v = 127.5 + 110.0 * std::sin(angle) + noise(rng);
          img_bytes.push_back(static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0)));
        }
      }
      lbl_bytes.push_back(static_cast<std::uint8_t>(c));
    }
  }
  write_idx_pair(img_bytes, kClasses * kPerClass, kSide, kSide, lbl_bytes, images.string(),
                 labels.string());
}

std::vector<ExperimentConfig> battery_configs(const fs::path& images, const fs::path& labels,
                                              const fs::path& out_root) {
  std::vector<ExperimentConfig> cfgs;
  for (const PanelSpec& panel : panel_table()) {
    ExperimentConfig cfg;
    cfg.panel = panel.id;
    cfg.dataset = "mnist";
    cfg.images = images.string();
    cfg.labels = labels.string();
    cfg.keep_classes = {0, 1, 2, 3};
    cfg.cap_per_class = 64;
    cfg.epochs = 200;
    cfg.seed = 1;
    cfg.out_dir = out_root.string();
    cfgs.push_back(cfg);
  }
  return cfgs;
}

std::pair<double, double> loss_endpoints(const std::string& run_dir) {
  std::istringstream in(slurp(fs::path(run_dir) / "loss.csv"));
  std::string line;
  std::getline(in, line);  // header
  double first = 0.0, last = 0.0;
  bool have_first = false;
  while (std::getline(in, line)) {
    const std::size_t comma = line.find(',');
    const double v = std::stod(line.substr(comma + 1));
    if (!have_first) {
      first = v;
      have_first = true;
    }
    last = v;
  }
  if (!have_first) throw ContractError("loss.csv has no data rows");
  return {first, last};
}

struct BatteryResult {
  std::vector<std::string> dirs;
  double seconds = 0.0;
};

Gate criterion_9(BatteryResult& battery, const std::vector<ExperimentConfig>& cfgs) {
  Gate g{9, "8-panel battery on synthetic mnist, 200 epochs"};
  const auto start = Clock::now();
  battery.dirs = run_battery(cfgs);
  battery.seconds = elapsed(start);

  std::string failures;
  for (const std::string& dir : battery.dirs) {
    verify_manifest(dir);
    const auto [first, last] = loss_endpoints(dir);
    if (!(last < first)) {
      failures += " " + fs::path(dir).filename().string() + " (loss " + num(first) + " -> " +
                  num(last) + ")";
    }
  }
  g.pass = failures.empty() && battery.seconds < 900.0;
  g.detail = "8 panels, manifests valid, " +
             std::string(failures.empty() ? "loss decreased in all" : "loss stalled in:" + failures) +
             ", " + num(battery.seconds) + " s (budget 900)";
  return g;
}

Gate criterion_10(const BatteryResult& battery, const std::vector<ExperimentConfig>& cfgs) {
  Gate g{10, "battery rerun reproduces spectra.csv byte for byte"};
  std::map<std::string, std::string> before;
  for (const std::string& dir : battery.dirs) {
    before[dir] = slurp(fs::path(dir) / "spectra.csv");
  }
  run_battery(cfgs);  // same seeds, same out_root: replaces every run dir
  std::size_t matched = 0;
  for (const auto& [dir, bytes] : before) {
    matched += slurp(fs::path(dir) / "spectra.csv") == bytes;
  }
  g.pass = matched == battery.dirs.size();
  g.detail = std::to_string(matched) + "/" + std::to_string(battery.dirs.size()) +
             " spectra files byte-identical after rerun";
  return g;
}

Gate criterion_11() {
  Gate g{11, "alignment probe separates aligned from generic factorizations"};
  std::mt19937_64 rng(55);
  double max_generic = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    LayerRecord rec;
    rec.name = "generic";
    rec.batch = 2 + static_cast<std::size_t>(trial % 5);
    rec.slices = 1;
    rec.a = random_tensor({rec.batch, 3 + static_cast<std::size_t>(trial % 4)}, rng);
    rec.delta = random_tensor({rec.batch, 3 + static_cast<std::size_t>((trial + 1) % 4)}, rng);
    rec.grad_w = matmul_at_b(rec.a, rec.delta);
    max_generic = std::max(max_generic, factorization_alignment(rec).max_abs_deviation);
  }

  // single sample: grad = x^T d is rank one and exactly aligned
  ModelConfig mc;
  mc.architecture = Arch::mlp;
  mc.task = Task::autoencode;
  mc.hidden_dims = {3};
  mc.activation = Activation::identity;
  mc.input_dim = 4;
  Model model = build_model(mc, 81);
  const Tensor batch = random_tensor({1, 4}, rng);
  const auto records = run_backward(model, mc, batch, LossKind::mse, rng);
  const AlignmentReport aligned = factorization_alignment(records.front());
  const double aligned_dev =
      aligned.max_abs_deviation / std::max(1.0, aligned.sigma_grad.empty() ? 0.0 : aligned.sigma_grad[0]);

  g.pass = max_generic > 1e-3 && aligned_dev <= 1e-10;
  g.detail = "generic max deviation " + num(max_generic) + " (> 1e-3); aligned rank-1 deviation " +
             num(aligned_dev) + " (tol 1e-10)";
  return g;
}

void report(Gate& gate, Gate (*fn)()) {
  const auto start = Clock::now();
  try {
    gate = fn();
  } catch (const std::exception& e) {
    gate.pass = false;
    gate.detail = std::string("exception: ") + e.what();
  }
  gate.seconds = elapsed(start);
}

}  // namespace

int main() {
  std::vector<Gate> gates(11);
  report(gates[0], criterion_1);
  report(gates[1], criterion_2);
  report(gates[2], criterion_3);
  report(gates[3], criterion_4);
  report(gates[4], criterion_5);
  report(gates[5], criterion_6);
  report(gates[6], criterion_7);
  report(gates[7], criterion_8);

  // criteria 9 and 10 share one battery
  {
    const fs::path data_dir = fresh_dir("mnist");
    const fs::path out_root = fresh_dir("battery");
    const fs::path images = data_dir / "images.idx";
    const fs::path labels = data_dir / "labels.idx";
    BatteryResult battery;
    std::vector<ExperimentConfig> cfgs;
    auto start = Clock::now();
    try {
      write_synthetic_mnist(images, labels);
      cfgs = battery_configs(images, labels, out_root);
      gates[8] = criterion_9(battery, cfgs);
    } catch (const std::exception& e) {
      gates[8] = Gate{9, "8-panel battery on synthetic mnist, 200 epochs", false,
                      std::string("exception: ") + e.what(), 0.0};
    }
    gates[8].seconds = elapsed(start);

    start = Clock::now();
    if (gates[8].pass) {
      try {
        gates[9] = criterion_10(battery, cfgs);
      } catch (const std::exception& e) {
        gates[9] = Gate{10, "battery rerun reproduces spectra.csv byte for byte", false,
                        std::string("exception: ") + e.what(), 0.0};
      }
    } else {
      gates[9] = Gate{10, "battery rerun reproduces spectra.csv byte for byte", false,
                      "skipped: criterion 9 failed", 0.0};
    }
    gates[9].seconds = elapsed(start);
  }

  report(gates[10], criterion_11);

  std::size_t passed = 0;
  for (const Gate& gate : gates) {
    passed += gate.pass;
    std::printf("criterion %2d (%s): %s  [%s; %.1f s]\n", gate.id, gate.label.c_str(),
                gate.pass ? "PASS" : "FAIL", gate.detail.c_str(), gate.seconds);
  }
  std::printf("acceptance: %zu/11 criteria passed\n", passed);
  return passed == gates.size() ? 0 : 1;
}
