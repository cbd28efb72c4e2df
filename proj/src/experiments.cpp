#include "autospec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include "autospec/report.hpp"

namespace fs = std::filesystem;

namespace autospec {

namespace {

// decorrelates the model-init stream from the data-generation stream, which
// share the configured seed
constexpr std::uint64_t kInitSeedSalt = 0x517cc1b727220a95ULL;

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed on '" + path.string() + "'");
  return bytes;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[v & 0xf];
    v >>= 4;
  }
  return std::string(buf, 16);
}

}  // namespace

const std::vector<PanelSpec>& panel_table() {
  static const std::vector<PanelSpec> table = {
      {'A', Task::autoencode, {32}, Activation::relu, false},
      {'B', Task::classify, {32}, Activation::relu, false},
      {'C', Task::autoencode, {32}, Activation::tanh, false},
      {'D', Task::autoencode, {32}, Activation::sigmoid, false},
      {'E', Task::autoencode, {8}, Activation::relu, false},
      {'F', Task::autoencode, {64}, Activation::relu, false},
      {'G', Task::autoencode, {32}, Activation::relu, true},
      {'H', Task::classify, {32}, Activation::relu, true},
  };
  return table;
}

PanelSpec panel_by_id(char id) {
  for (const PanelSpec& p : panel_table()) {
    if (p.id == id) return p;
  }
  throw ConfigError("unknown panel '" + std::string(1, id) + "' (expected A..H)");
}

std::string ExperimentConfig::resolved_id() const {
  if (!experiment_id.empty()) return experiment_id;
  return "panel" + std::string(1, panel) + "_" + dataset + "_" + to_string(architecture);
}

void ExperimentConfig::validate() const {
  panel_by_id(panel);
  if (dataset != "mnist" && dataset != "sinusoid" && dataset != "tabular") {
    throw ConfigError("unknown dataset '" + dataset +
                      "' (expected mnist, sinusoid or tabular)");
  }
  if (dataset == "mnist" && (images.empty() || labels.empty())) {
    throw ConfigError("mnist dataset needs images= and labels= paths");
  }
  if (dataset != "mnist") {
    if (classes < 2) throw ConfigError("generated datasets need classes >= 2");
    if (per_class == 0) throw ConfigError("per_class must be positive");
    if (length == 0) throw ConfigError("length must be positive");
  }
  if (!std::isfinite(lr) || lr < 0.0) throw ConfigError("lr must be finite and >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (seed_sweep == 0) throw ConfigError("seed_sweep must be >= 1");
  if (cadence == 0) throw ConfigError("cadence must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
  if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
  const std::string id = resolved_id();
  if (id.find_first_of("/\\ \t,") != std::string::npos) {
    throw ConfigError("experiment id '" + id + "' must not contain separators or spaces");
  }
}

std::string to_config_text(const ExperimentConfig& cfg) {
  std::string out;
  out += "panel=" + std::string(1, cfg.panel) + "\n";
  out += "experiment_id=" + cfg.experiment_id + "\n";
  out += "dataset=" + cfg.dataset + "\n";
  out += "images=" + cfg.images + "\n";
  out += "labels=" + cfg.labels + "\n";
  out += "keep_classes=";
  for (std::size_t i = 0; i < cfg.keep_classes.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(cfg.keep_classes[i]);
  }
  out += "\n";
  out += "cap_per_class=" + std::to_string(cfg.cap_per_class) + "\n";
  out += "classes=" + std::to_string(cfg.classes) + "\n";
  out += "per_class=" + std::to_string(cfg.per_class) + "\n";
  out += "length=" + std::to_string(cfg.length) + "\n";
  out += "effect=" + fmt(cfg.effect) + "\n";
  out += "architecture=" + to_string(cfg.architecture) + "\n";
  out += "lr=" + fmt(cfg.lr) + "\n";
  out += "epochs=" + std::to_string(cfg.epochs) + "\n";
  out += "seed=" + std::to_string(cfg.seed) + "\n";
  out += "seed_sweep=" + std::to_string(cfg.seed_sweep) + "\n";
  out += "cadence=" + std::to_string(cfg.cadence) + "\n";
  out += "alpha=" + fmt(cfg.alpha) + "\n";
  out += "correction=" + to_string(cfg.correction) + "\n";
  out += "out_dir=" + cfg.out_dir + "\n";
  return out;
}

namespace {

template <typename T>
T parse_number(const std::string& value, std::size_t line) {
  T v{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError("config line " + std::to_string(line) + ": bad number '" + value + "'");
  }
  return v;
}

std::vector<int> parse_int_list(const std::string& value, std::size_t line) {
  std::vector<int> out;
  if (trim(value).empty()) return out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t pos = value.find(',', start);
    const std::string field = trim(value.substr(start, pos - start));
    out.push_back(parse_number<int>(field, line));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

ExperimentConfig config_from_text(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    std::string line = text.substr(start, nl == std::string::npos ? nl : nl - start);
    start = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value, got '" +
                        stripped + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.emplace(key, line_no).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                        "'");
    }
    if (key == "panel") {
      if (value.size() != 1) {
        throw ConfigError("config line " + std::to_string(line_no) + ": panel must be one letter");
      }
      cfg.panel = value[0];
    } else if (key == "experiment_id") {
      cfg.experiment_id = value;
    } else if (key == "dataset") {
      cfg.dataset = value;
    } else if (key == "images") {
      cfg.images = value;
    } else if (key == "labels") {
      cfg.labels = value;
    } else if (key == "keep_classes") {
      cfg.keep_classes = parse_int_list(value, line_no);
    } else if (key == "cap_per_class") {
      cfg.cap_per_class = parse_number<std::size_t>(value, line_no);
    } else if (key == "classes") {
      cfg.classes = parse_number<std::size_t>(value, line_no);
    } else if (key == "per_class") {
      cfg.per_class = parse_number<std::size_t>(value, line_no);
    } else if (key == "length") {
      cfg.length = parse_number<std::size_t>(value, line_no);
    } else if (key == "effect") {
      cfg.effect = parse_number<double>(value, line_no);
    } else if (key == "architecture") {
      cfg.architecture = arch_from_string(value);
    } else if (key == "lr") {
      cfg.lr = parse_number<double>(value, line_no);
    } else if (key == "epochs") {
      cfg.epochs = parse_number<long>(value, line_no);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(value, line_no);
    } else if (key == "seed_sweep") {
      cfg.seed_sweep = parse_number<std::size_t>(value, line_no);
    } else if (key == "cadence") {
      cfg.cadence = parse_number<std::size_t>(value, line_no);
    } else if (key == "alpha") {
      cfg.alpha = parse_number<double>(value, line_no);
    } else if (key == "correction") {
      cfg.correction = correction_from_string(value);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_text(read_text(path));
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.seed_sweep == 1) return {cfg};
  const std::string base = cfg.resolved_id();
  std::vector<ExperimentConfig> out;
  out.reserve(cfg.seed_sweep);
  for (std::size_t i = 0; i < cfg.seed_sweep; ++i) {
    ExperimentConfig child = cfg;
    child.seed = cfg.seed + i;
    child.seed_sweep = 1;
    child.experiment_id = base + "_s" + std::to_string(child.seed);
    out.push_back(std::move(child));
  }
  return out;
}

Dataset load_experiment_dataset(const ExperimentConfig& cfg) {
  if (cfg.dataset == "mnist") {
    return load_mnist_idx(cfg.images, cfg.labels, cfg.keep_classes, cfg.cap_per_class);
  }
  if (cfg.dataset == "sinusoid") {
    return gen_sinusoid(cfg.classes, cfg.per_class, cfg.length, cfg.seed);
  }
  return gen_grouped_tabular(cfg.classes, cfg.per_class, cfg.length, cfg.effect, cfg.seed);
}

namespace {

ModelConfig model_config_for(const ExperimentConfig& cfg, const PanelSpec& panel,
                             const Dataset& data) {
  ModelConfig mc;
  mc.architecture = cfg.architecture;
  mc.task = panel.task;
  mc.hidden_dims = panel.hidden_dims;
  mc.activation = panel.activation;
  if (panel.task == Task::classify) mc.class_count = data.class_count;
  switch (cfg.architecture) {
    case Arch::mlp:
      mc.input_dim = data.inputs.cols();
      break;
    case Arch::conv2d:
      if (data.height == 0) {
        throw ConfigError("dataset '" + data.name + "' has no 2d geometry for conv2d");
      }
      mc.in_channels = 1;
      mc.in_height = data.height;
      mc.in_width = data.width;
      break;
    case Arch::conv1d:
      mc.in_channels = 1;
      mc.in_width = data.inputs.cols();
      break;
    case Arch::rnn:
      mc.step_dim = 1;
      mc.seq_len = data.inputs.cols();
      break;
  }
  return mc;
}

void write_manifest(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  std::string manifest;
  for (const std::string& name : names) {
    manifest += hex16(fnv1a64(read_text(dir / name)));
    manifest += "  ";
    manifest += name;
    manifest += '\n';
  }
  write_text(dir / "manifest.txt", manifest);
}

}  // namespace

std::string run_panel(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.seed_sweep != 1) {
    throw ConfigError("seed_sweep > 1 must be expanded with expand_sweep and run as a battery");
  }
  Dataset data = load_experiment_dataset(cfg);
  data.validate();
  data.require_group_support(2);
  const PanelSpec panel = panel_by_id(cfg.panel);
  const ModelConfig mc = model_config_for(cfg, panel, data);

  Model model = build_model(mc, cfg.seed ^ kInitSeedSalt);
  SpectralProbe probe(data.groups, ProbeConfig{cfg.cadence, true, false});
  TrainConfig tc;
  tc.lr = cfg.lr;
  tc.epochs = cfg.epochs;
  const RunLog log = train(model, mc, data, tc, probe);

  const std::string id = cfg.resolved_id();
  const fs::path out_root(cfg.out_dir);
  fs::create_directories(out_root);
  const fs::path final_dir = out_root / id;
  const fs::path stage = out_root / (id + ".tmp");
  if (fs::exists(stage)) fs::remove_all(stage);  // stale stage from a crashed run
  fs::create_directories(stage);
  try {
    write_text(stage / "config.txt", to_config_text(cfg));

    std::string loss_csv = "epoch,loss\n";
    for (std::size_t e = 0; e < log.loss_curve.size(); ++e) {
      loss_csv += std::to_string(e) + "," + fmt(log.loss_curve[e]) + "\n";
    }
    write_text(stage / "loss.csv", loss_csv);

    write_spectra_csv(rows_from_snapshots(id, log.snapshots), (stage / "spectra.csv").string());

    if (panel.group_differences) {
      const auto trajectories = trajectories_from_snapshots(log.snapshots);
      const auto reports = pairwise_reports(trajectories, cfg.alpha, cfg.correction);
      write_significance_csv(reports, (stage / "significance.csv").string());
    }
    write_manifest(stage);
  } catch (...) {
    fs::remove_all(stage);
    throw;
  }
  if (fs::exists(final_dir)) fs::remove_all(final_dir);
  fs::rename(stage, final_dir);
  return final_dir.string();
}

std::vector<std::string> run_battery(const std::vector<ExperimentConfig>& cfgs) {
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    cfgs[i].validate();
    for (std::size_t j = i + 1; j < cfgs.size(); ++j) {
      if (cfgs[i].out_dir == cfgs[j].out_dir && cfgs[i].resolved_id() == cfgs[j].resolved_id()) {
        throw ConfigError("panels " + std::to_string(i) + " and " + std::to_string(j) +
                          " would write the same run directory '" + cfgs[i].resolved_id() + "'");
      }
    }
  }
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("AUTOSPEC_WORKERS")) {
    const std::string value(env);
    std::size_t parsed = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size() || parsed == 0) {
      throw ConfigError("AUTOSPEC_WORKERS must be a positive integer, got '" + value + "'");
    }
    workers = parsed;
  }
  workers = std::min(workers, std::max<std::size_t>(1, cfgs.size()));

  std::vector<std::string> dirs(cfgs.size());
  std::vector<std::exception_ptr> errors(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfgs.size()) return;
      try {
        dirs[i] = run_panel(cfgs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
  return dirs;
}

void verify_manifest(const std::string& dir) {
  const fs::path root(dir);
  const std::string manifest = read_text(root / "manifest.txt");
  std::map<std::string, std::string> expected;  // name -> hash
  std::size_t start = 0, line_no = 0;
  while (start < manifest.size()) {
    const std::size_t nl = manifest.find('\n', start);
    const std::string line =
        manifest.substr(start, nl == std::string::npos ? nl : nl - start);
    start = nl == std::string::npos ? manifest.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.size() < 19 || line.substr(16, 2) != "  ") {
      throw FormatError("manifest line " + std::to_string(line_no) + " malformed: '" + line +
                        "'");
    }
    expected[line.substr(18)] = line.substr(0, 16);
  }
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name == "manifest.txt") continue;
    const auto it = expected.find(name);
    if (it == expected.end()) {
      throw ContractError("'" + name + "' is not listed in the manifest");
    }
    const std::string actual = hex16(fnv1a64(read_text(entry.path())));
    if (actual != it->second) {
      throw ContractError("'" + name + "' hash " + actual + " does not match manifest " +
                          it->second);
    }
    expected.erase(it);
  }
  if (!expected.empty()) {
    throw ContractError("manifest lists missing file '" + expected.begin()->first + "'");
  }
}

}  // namespace autospec
