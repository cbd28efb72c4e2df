#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "autospec/experiments.hpp"
#include "autospec/report.hpp"
#include "cli_main.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace autospec;
namespace fs = std::filesystem;

namespace {

// capture std::cout for one cli_main call so test output stays readable
struct CoutCapture {
  std::ostringstream captured;
  std::streambuf* saved;
  CoutCapture() : saved(std::cout.rdbuf(captured.rdbuf())) {}
  ~CoutCapture() { std::cout.rdbuf(saved); }
};

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "autospec");
  CoutCapture cap;
  const int rc = cli_main(args);
  if (out) *out = cap.captured.str();
  return rc;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("autospec_cli_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::vector<std::string> svg_files(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".svg") names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<std::string> panel_args(char id, const fs::path& out) {
  return {"panel",    "--id",      std::string(1, id),
          "--dataset", "tabular",  "--classes", "2",
          "--per-class", "4",      "--dim",     "8",
          "--effect",  "3",        "--epochs",  "6",
          "--seed",    "21",       "--out",     out.string()};
}

}  // namespace

TEST_CASE("cli rejects bad usage with exit 1") {
  CHECK(cli({}) == 1);                            // no subcommand
  CHECK(cli({"frobnicate"}) == 1);                // unknown subcommand
  CHECK(cli({"plot"}) == 1);                      // missing required flag
  CHECK(cli({"check", "--wobble"}) == 1);         // unknown flag
  CHECK(cli({"panel", "--id", "Z", "--dataset", "tabular"}) == 1);  // bad member value
  CHECK(cli({"panel", "--id", "A", "--dataset", "imagenet"}) == 1);
  CHECK(cli({"--help"}) == 0);
  CHECK(cli({"panel", "--help"}) == 0);
}

TEST_CASE("cli panel runs a panel end to end") {
  const fs::path out = fresh_dir("panel");
  std::string printed;
  REQUIRE(cli(panel_args('G', out), &printed) == 0);
  const std::string dir = (out / "panelG_tabular_mlp").string();
  CHECK(printed == dir + "\n");
  REQUIRE(fs::is_directory(dir));
  verify_manifest(dir);

  SUBCASE("runtime failures exit 2") {
    // mnist without idx paths fails config validation, not flag parsing
    CHECK(cli({"panel", "--id", "A", "--dataset", "mnist", "--out", out.string()}) == 2);
  }

  SUBCASE("--sweep expands into seed-suffixed sibling runs") {
    const fs::path sweep_out = fresh_dir("panel_sweep");
    std::vector<std::string> args = panel_args('A', sweep_out);
    args.insert(args.end(), {"--sweep", "2"});
    REQUIRE(cli(args, &printed) == 0);
    const std::string d21 = (sweep_out / "panelA_tabular_mlp_s21").string();
    const std::string d22 = (sweep_out / "panelA_tabular_mlp_s22").string();
    CHECK(printed == d21 + "\n" + d22 + "\n");
    verify_manifest(d21);
    verify_manifest(d22);
    // siblings really trained under different seeds
    CHECK(slurp(fs::path(d21) / "spectra.csv") != slurp(fs::path(d22) / "spectra.csv"));
  }
}

TEST_CASE("cli run executes config files, singly and as a battery") {
  const fs::path out = fresh_dir("run");
  ExperimentConfig cfg;
  cfg.panel = 'A';
  cfg.dataset = "tabular";
  cfg.classes = 2;
  cfg.per_class = 4;
  cfg.length = 8;
  cfg.epochs = 4;
  cfg.out_dir = out.string();
  const fs::path cfg_a = out / "a.cfg";
  std::ofstream(cfg_a) << to_config_text(cfg);
  cfg.panel = 'B';
  const fs::path cfg_b = out / "b.cfg";
  std::ofstream(cfg_b) << to_config_text(cfg);

  std::string printed;
  REQUIRE(cli({"run", cfg_a.string()}, &printed) == 0);
  CHECK(printed == (out / "panelA_tabular_mlp").string() + "\n");
  verify_manifest((out / "panelA_tabular_mlp").string());

  REQUIRE(cli({"run", cfg_a.string(), cfg_b.string()}, &printed) == 0);
  CHECK(printed == (out / "panelA_tabular_mlp").string() + "\n" +
                       (out / "panelB_tabular_mlp").string() + "\n");
  verify_manifest((out / "panelB_tabular_mlp").string());

  CHECK(cli({"run", (out / "missing.cfg").string()}) == 2);
}

TEST_CASE("cli plot renders one svg per series") {
  const fs::path out = fresh_dir("plot");
  REQUIRE(cli(panel_args('G', out)) == 0);
  const fs::path run_dir = out / "panelG_tabular_mlp";
  const fs::path plots = out / "plots";

  std::string printed;
  REQUIRE(cli({"plot", "--spectra", (run_dir / "spectra.csv").string(), "--out", plots.string()},
              &printed) == 0);
  // 2 layers x (grad/activation/adjoint on the whole batch + grad for each of
  // the 2 groups) = 10 series
  const auto names = svg_files(plots);
  REQUIRE(names.size() == 10);
  CHECK(names.front() == "panelG_tabular_mlp_layer0_activation_all.svg");
  CHECK(std::count_if(names.begin(), names.end(), [](const std::string& n) {
          return n.find("_grad_g") != std::string::npos;
        }) == 4);
  for (const std::string& name : names) {
    std::string why;
    CHECK_MESSAGE(oracle::xml_well_formed(slurp(plots / name), &why), name, ": ", why);
  }

  SUBCASE("significance strips are rendered on request") {
    REQUIRE(cli({"plot", "--spectra", (run_dir / "spectra.csv").string(), "--out",
                 plots.string(), "--significance", (run_dir / "significance.csv").string()}) ==
            0);
    const auto with_sig = svg_files(plots);
    CHECK(with_sig.size() == 12);  // + one strip per layer's (0 vs 1) report
    std::string why;
    CHECK(oracle::xml_well_formed(slurp(plots / "sig_layer0_grad_g0vg1.svg"), &why));
  }

  SUBCASE("header-only csv yields a placeholder and exit 0") {
    const fs::path empty_csv = out / "empty.csv";
    write_spectra_csv({}, empty_csv.string());
    const fs::path empty_plots = out / "empty_plots";
    REQUIRE(cli({"plot", "--spectra", empty_csv.string(), "--out", empty_plots.string()}) == 0);
    const auto placeholder = svg_files(empty_plots);
    REQUIRE(placeholder == std::vector<std::string>{"placeholder.svg"});
    std::string why;
    CHECK(oracle::xml_well_formed(slurp(empty_plots / "placeholder.svg"), &why));
  }

  SUBCASE("missing csv is a runtime failure") {
    CHECK(cli({"plot", "--spectra", (out / "nope.csv").string()}) == 2);
  }
}

TEST_CASE("cli stats reproduces the in-run significance reports") {
  const fs::path out = fresh_dir("stats");
  REQUIRE(cli(panel_args('G', out)) == 0);
  const fs::path run_dir = out / "panelG_tabular_mlp";
  const fs::path recomputed = out / "recomputed.csv";
  const fs::path json_out = out / "reports.json";

  std::string printed;
  REQUIRE(cli({"stats", "--spectra", (run_dir / "spectra.csv").string(), "--out",
               recomputed.string(), "--json", json_out.string()},
              &printed) == 0);
  CHECK(printed.find("2 group-pair report(s)") != std::string::npos);

  const auto in_run = read_significance_csv((run_dir / "significance.csv").string());
  const auto redone = read_significance_csv(recomputed.string());
  REQUIRE(in_run.size() == redone.size());
  for (std::size_t i = 0; i < in_run.size(); ++i) {
    // layer names are not part of the spectra.csv schema, so the recompute
    // synthesizes them; everything else must line up
    CHECK(in_run[i].layer_id == redone[i].layer_id);
    CHECK(in_run[i].statistic == redone[i].statistic);
    CHECK(in_run[i].group_a == redone[i].group_a);
    CHECK(in_run[i].group_b == redone[i].group_b);
    CHECK(in_run[i].epochs == redone[i].epochs);
    CHECK(in_run[i].alpha == redone[i].alpha);
    CHECK(in_run[i].correction == redone[i].correction);
    REQUIRE(in_run[i].per_epoch_p.size() == redone[i].per_epoch_p.size());
    REQUIRE(in_run[i].per_sv_p.size() == redone[i].per_sv_p.size());
    for (std::size_t j = 0; j < in_run[i].per_epoch_p.size(); ++j) {
      CHECK(std::abs(in_run[i].per_epoch_p[j] - redone[i].per_epoch_p[j]) <= 1e-12);
    }
    for (std::size_t j = 0; j < in_run[i].per_sv_p.size(); ++j) {
      CHECK(std::abs(in_run[i].per_sv_p[j] - redone[i].per_sv_p[j]) <= 1e-12);
    }
  }

  const nlohmann::json j = nlohmann::json::parse(slurp(json_out));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["statistic"] == "grad");
  CHECK(j[0]["per_epoch_p"].size() == 6);
  CHECK(j[0]["epoch_flags"].size() == 6);

  SUBCASE("header-only spectra produce zero reports") {
    const fs::path empty_csv = out / "empty.csv";
    write_spectra_csv({}, empty_csv.string());
    REQUIRE(cli({"stats", "--spectra", empty_csv.string(), "--out",
                 (out / "empty_sig.csv").string()},
                &printed) == 0);
    CHECK(printed.find("0 group-pair report(s)") != std::string::npos);
    CHECK(read_significance_csv((out / "empty_sig.csv").string()).empty());
  }
}

TEST_CASE("cli check passes on a healthy build") {
  std::string printed;
  REQUIRE(cli({"check", "--seed", "3"}, &printed) == 0);
  CHECK(printed.find("gradient check mlp/mse") != std::string::npos);
  CHECK(printed.find("gradient check rnn/cross_entropy") != std::string::npos);
  CHECK(printed.find("svd self-test") != std::string::npos);
  CHECK(printed.find("self-test: PASS") != std::string::npos);
}
