#include "cli_main.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <random>
#include <tuple>

#include "autospec/autodiff.hpp"
#include "autospec/experiments.hpp"
#include "autospec/linalg.hpp"
#include "autospec/report.hpp"

namespace fs = std::filesystem;

namespace autospec {

namespace {

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

std::string group_label(int group) {
  return group == SpectrumSnapshot::kAllGroups ? "all" : "g" + std::to_string(group);
}

int cmd_run(const std::vector<std::string>& paths) {
  std::vector<ExperimentConfig> cfgs;
  cfgs.reserve(paths.size());
  for (const std::string& p : paths) {
    for (ExperimentConfig& cfg : expand_sweep(load_config(p))) cfgs.push_back(std::move(cfg));
  }
  if (cfgs.size() == 1) {
    std::cout << run_panel(cfgs[0]) << "\n";
    return 0;
  }
  for (const std::string& dir : run_battery(cfgs)) std::cout << dir << "\n";
  return 0;
}

int cmd_plot(const std::string& spectra_path, std::string out_dir, const std::string& sig_path,
             bool linear) {
  const std::vector<SpectraRow> rows = read_spectra_csv(spectra_path);
  if (out_dir.empty()) out_dir = fs::path(spectra_path).parent_path().string();
  if (out_dir.empty()) out_dir = ".";
  fs::create_directories(out_dir);
  SvgOptions options;
  options.log_y = !linear;

  std::size_t written = 0;
  if (rows.empty()) {
    write_text(fs::path(out_dir) / "placeholder.svg", render_trajectory_svg({}, options));
    std::cout << "no spectra rows in '" << spectra_path << "'; wrote placeholder.svg\n";
    ++written;
  } else {
    // one svg per (experiment, layer, statistic, group) series
    using Key = std::tuple<std::string, int, int, int>;
    std::map<Key, std::vector<SpectraRow>> series;
    for (const SpectraRow& r : rows) {
      series[{r.experiment_id, r.layer_id, static_cast<int>(r.statistic), r.group}].push_back(r);
    }
    for (const auto& [key, srows] : series) {
      const std::string name = std::get<0>(key) + "_layer" + std::to_string(std::get<1>(key)) +
                               "_" + to_string(srows.front().statistic) + "_" +
                               group_label(std::get<3>(key)) + ".svg";
      write_text(fs::path(out_dir) / name, render_trajectory_svg(srows, options));
      ++written;
    }
  }

  if (!sig_path.empty()) {
    for (const SignificanceReport& rep : read_significance_csv(sig_path)) {
      const std::string name = "sig_layer" + std::to_string(rep.layer_id) + "_" +
                               to_string(rep.statistic) + "_" + group_label(rep.group_a) + "v" +
                               group_label(rep.group_b) + ".svg";
      write_text(fs::path(out_dir) / name, render_significance_svg(rep, rep.alpha));
      ++written;
    }
  }
  std::cout << "wrote " << written << " svg file(s) to " << out_dir << "\n";
  return 0;
}

int cmd_stats(const std::string& spectra_path, std::string out_path, const std::string& json_path,
              double alpha, Correction correction) {
  const auto rows = read_spectra_csv(spectra_path);
  const auto snapshots = snapshots_from_rows(rows);
  const auto trajectories = trajectories_from_snapshots(snapshots);
  const auto reports = pairwise_reports(trajectories, alpha, correction);

  if (out_path.empty()) {
    out_path = (fs::path(spectra_path).parent_path() / "significance_recomputed.csv").string();
  }
  write_significance_csv(reports, out_path);

  std::size_t epoch_hits = 0, sv_hits = 0;
  for (const SignificanceReport& rep : reports) {
    for (bool f : epoch_flags(rep)) epoch_hits += f;
    for (bool f : sv_flags(rep)) sv_hits += f;
  }

  if (!json_path.empty()) {
    nlohmann::json jreports = nlohmann::json::array();
    for (const SignificanceReport& rep : reports) {
      nlohmann::json j;
      j["layer_id"] = rep.layer_id;
      j["layer_name"] = rep.layer_name;
      j["statistic"] = to_string(rep.statistic);
      j["group_a"] = rep.group_a;
      j["group_b"] = rep.group_b;
      j["epochs"] = rep.epochs;
      j["per_epoch_p"] = rep.per_epoch_p;
      j["per_sv_p"] = rep.per_sv_p;
      j["alpha"] = rep.alpha;
      j["correction"] = to_string(rep.correction);
      j["epoch_flags"] = epoch_flags(rep);
      j["sv_flags"] = sv_flags(rep);
      jreports.push_back(std::move(j));
    }
    write_text(json_path, jreports.dump(2) + "\n");
  }

  std::cout << reports.size() << " group-pair report(s) -> " << out_path << " (" << epoch_hits
            << " epoch and " << sv_hits << " sv flags at alpha " << alpha << ", "
            << to_string(correction) << ")\n";
  return 0;
}

Tensor random_batch(const std::vector<std::size_t>& shape, std::mt19937_64& rng) {
  Tensor t(shape);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(rng);
  return t;
}

int cmd_check(std::uint64_t seed) {
  std::mt19937_64 rng(seed);

  struct Case {
    std::string label;
    ModelConfig mc;
    LossKind loss;
    std::vector<std::size_t> batch_shape;
  };
  std::vector<Case> cases;
  for (LossKind loss : {LossKind::mse, LossKind::cross_entropy}) {
    const Task task = loss == LossKind::mse ? Task::autoencode : Task::classify;
    {
      ModelConfig mc;
      mc.architecture = Arch::mlp;
      mc.task = task;
      mc.hidden_dims = {5};
      mc.activation = Activation::tanh;
      mc.input_dim = 6;
      mc.class_count = 3;
      cases.push_back({"mlp/" + to_string(loss), mc, loss, {3, 6}});
    }
    {
      ModelConfig mc;
      mc.architecture = Arch::conv1d;
      mc.task = task;
      mc.hidden_dims = {3};
      mc.activation = Activation::tanh;
      mc.in_channels = 2;
      mc.in_width = 8;
      mc.class_count = 3;
      cases.push_back({"conv1d/" + to_string(loss), mc, loss, {3, 2, 8}});
    }
    {
      ModelConfig mc;
      mc.architecture = Arch::conv2d;
      mc.task = task;
      mc.hidden_dims = {3};
      mc.activation = Activation::tanh;
      mc.in_channels = 1;
      mc.in_height = 5;
      mc.in_width = 5;
      mc.class_count = 3;
      cases.push_back({"conv2d/" + to_string(loss), mc, loss, {3, 1, 5, 5}});
    }
    {
      ModelConfig mc;
      mc.architecture = Arch::rnn;
      mc.task = task;
      mc.hidden_dims = {4};
      mc.activation = Activation::tanh;
      mc.seq_len = 5;
      mc.step_dim = 2;
      mc.class_count = 3;
      cases.push_back({"rnn/" + to_string(loss), mc, loss, {3, 5, 2}});
    }
  }

  double max_grad = 0.0;
  for (const Case& c : cases) {
    Model model = build_model(c.mc, seed);
    const Tensor batch = random_batch(c.batch_shape, rng);
    const double err = gradient_check(model, batch, c.loss, seed * 31 + 7);
    max_grad = std::max(max_grad, err);
    std::cout << "gradient check " << c.label << ": max relative error " << err << "\n";
  }

  double max_recon = 0.0, max_orth = 0.0;
  std::uniform_int_distribution<std::size_t> dim(1, 12);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t m = dim(rng), n = dim(rng);
    Tensor a({m, n});
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = val(rng);
    const SvdResult r = svd(a);
    const std::size_t k = r.sigma.size();

    Tensor us = r.u;  // scale columns by sigma, then rebuild u*diag(sigma)*v^T
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < k; ++j) us.at(i, j) *= r.sigma[j];
    }
    const Tensor rebuilt = matmul_a_bt(us, r.v);
    max_recon = std::max(
        max_recon, frobenius_distance(a, rebuilt) / std::max(1.0, frobenius_norm(a)));

    for (const Tensor& q : {r.u, r.v}) {
      const Tensor gram = matmul_at_b(q, q);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          max_orth = std::max(max_orth, std::abs(gram.at(i, j) - (i == j ? 1.0 : 0.0)));
        }
      }
    }
  }
  std::cout << "svd self-test: max reconstruction error " << max_recon
            << ", max orthogonality error " << max_orth << " over 25 random matrices\n";

  const bool ok = max_grad < 1e-4 && max_recon < 1e-9 && max_orth < 1e-9;
  std::cout << "self-test: " << (ok ? "PASS" : "FAIL") << " (max gradient-check error " << max_grad
            << ")\n";
  return ok ? 0 : 2;
}

}  // namespace

int cli_main(std::vector<std::string> args) {
  CLI::App app{"layer-gradient spectral probe: run experiment panels, plot spectra, test group significance"};
  app.require_subcommand(1);

  std::vector<std::string> config_paths;
  CLI::App* run = app.add_subcommand("run", "execute experiment config files (several run as a battery)");
  run->add_option("configs", config_paths, "key=value experiment config files")->required();

  ExperimentConfig cfg;
  std::string panel_id = "A";
  std::string arch_str = "mlp";
  std::string corr_str = "bonferroni";
  CLI::App* panel = app.add_subcommand("panel", "run one battery panel on a named dataset");
  panel->add_option("--id", panel_id, "panel id")
      ->required()
      ->check(CLI::IsMember({"A", "B", "C", "D", "E", "F", "G", "H"}));
  panel->add_option("--dataset", cfg.dataset, "dataset kind")
      ->required()
      ->check(CLI::IsMember({"mnist", "sinusoid", "tabular"}));
  panel->add_option("--images", cfg.images, "idx image file (mnist)");
  panel->add_option("--labels", cfg.labels, "idx label file (mnist)");
  panel->add_option("--keep", cfg.keep_classes, "classes to keep, empty keeps all (mnist)")
      ->delimiter(',');
  panel->add_option("--cap", cfg.cap_per_class, "per-class cap, 0 = unlimited (mnist)");
  panel->add_option("--classes", cfg.classes, "class/group count (generated datasets)");
  panel->add_option("--per-class", cfg.per_class, "samples per class (generated datasets)");
  panel->add_option("--length,--dim", cfg.length, "sinusoid length / tabular dimension");
  panel->add_option("--effect", cfg.effect, "tabular planted effect size");
  panel->add_option("--arch", arch_str, "model architecture")
      ->check(CLI::IsMember({"mlp", "rnn", "conv1d", "conv2d"}));
  panel->add_option("--lr", cfg.lr, "learning rate (0 freezes the parameters)");
  panel->add_option("--epochs", cfg.epochs, "training epochs");
  panel->add_option("--seed", cfg.seed, "seed for data generation and init");
  panel->add_option("--sweep", cfg.seed_sweep, "repeat the run under this many consecutive seeds");
  panel->add_option("--cadence", cfg.cadence, "probe every k-th epoch");
  panel->add_option("--alpha", cfg.alpha, "significance level");
  panel->add_option("--correction", corr_str, "multiple-testing correction")
      ->check(CLI::IsMember({"none", "bonferroni"}));
  panel->add_option("--out", cfg.out_dir, "output root directory");
  panel->add_option("--name", cfg.experiment_id, "run directory name override");

  std::string plot_spectra, plot_out, plot_sig;
  bool plot_linear = false;
  CLI::App* plot = app.add_subcommand("plot", "render spectrum trajectory svgs from a spectra.csv");
  plot->add_option("--spectra", plot_spectra, "spectra.csv to plot")->required();
  plot->add_option("--out", plot_out, "output directory (default: next to the csv)");
  plot->add_option("--significance", plot_sig,
                   "also render p-value strips from this significance.csv");
  plot->add_flag("--linear", plot_linear, "linear y axis instead of log10");

  std::string stats_spectra, stats_out, stats_json;
  double stats_alpha = 0.05;
  std::string stats_corr = "bonferroni";
  CLI::App* stats = app.add_subcommand("stats", "recompute group significance from a spectra.csv");
  stats->add_option("--spectra", stats_spectra, "spectra.csv to analyze")->required();
  stats->add_option("--out", stats_out,
                    "significance csv to write (default: significance_recomputed.csv)");
  stats->add_option("--json", stats_json, "also write the reports as json");
  stats->add_option("--alpha", stats_alpha, "significance level");
  stats->add_option("--correction", stats_corr, "multiple-testing correction")
      ->check(CLI::IsMember({"none", "bonferroni"}));

  std::uint64_t check_seed = 1;
  CLI::App* check =
      app.add_subcommand("check", "gradient-check every architecture and self-test the svd");
  check->add_option("--seed", check_seed, "seed for the random test instances");

  try {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const std::string& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (run->parsed()) return cmd_run(config_paths);
    if (panel->parsed()) {
      cfg.panel = panel_id[0];
      cfg.architecture = arch_from_string(arch_str);
      cfg.correction = correction_from_string(corr_str);
      std::vector<ExperimentConfig> cfgs = expand_sweep(cfg);
      if (cfgs.size() == 1) {
        std::cout << run_panel(cfgs[0]) << "\n";
      } else {
        for (const std::string& dir : run_battery(cfgs)) std::cout << dir << "\n";
      }
      return 0;
    }
    if (plot->parsed()) return cmd_plot(plot_spectra, plot_out, plot_sig, plot_linear);
    if (stats->parsed()) {
      return cmd_stats(stats_spectra, stats_out, stats_json, stats_alpha,
                       correction_from_string(stats_corr));
    }
    if (check->parsed()) return cmd_check(check_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace autospec
