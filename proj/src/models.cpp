#include "autospec/models.hpp"

#include <cmath>
#include <random>

namespace autospec {

Arch arch_from_string(const std::string& s) {
  if (s == "mlp") return Arch::mlp;
  if (s == "rnn") return Arch::rnn;
  if (s == "conv1d") return Arch::conv1d;
  if (s == "conv2d") return Arch::conv2d;
  throw ConfigError("unknown architecture '" + s + "' (expected mlp, rnn, conv1d or conv2d)");
}

Task task_from_string(const std::string& s) {
  if (s == "autoencode") return Task::autoencode;
  if (s == "classify") return Task::classify;
  throw ConfigError("unknown task '" + s + "' (expected autoencode or classify)");
}

std::string to_string(Arch a) {
  switch (a) {
    case Arch::mlp: return "mlp";
    case Arch::rnn: return "rnn";
    case Arch::conv1d: return "conv1d";
    case Arch::conv2d: return "conv2d";
  }
  return "?";
}

std::string to_string(Task t) {
  return t == Task::autoencode ? "autoencode" : "classify";
}

std::size_t ModelConfig::input_numel() const {
  switch (architecture) {
    case Arch::mlp: return input_dim;
    case Arch::rnn: return seq_len * step_dim;
    case Arch::conv1d: return in_channels * in_width;
    case Arch::conv2d: return in_channels * in_height * in_width;
  }
  return 0;
}

void ModelConfig::validate() const {
  if (hidden_dims.empty()) throw ConfigError("hidden_dims must not be empty");
  for (std::size_t h : hidden_dims) {
    if (h == 0) throw ConfigError("hidden_dims entries must be positive");
  }
  if (task == Task::classify && class_count < 2) {
    throw ConfigError("classification needs class_count >= 2, got " +
                      std::to_string(class_count));
  }
  switch (architecture) {
    case Arch::mlp:
      if (input_dim == 0) throw ConfigError("mlp needs input_dim > 0");
      break;
    case Arch::rnn:
      if (seq_len == 0 || step_dim == 0) throw ConfigError("rnn needs seq_len and step_dim > 0");
      break;
    case Arch::conv1d:
      if (in_channels == 0 || in_width == 0) {
        throw ConfigError("conv1d needs in_channels and in_width > 0");
      }
      break;
    case Arch::conv2d:
      if (in_channels == 0 || in_height == 0 || in_width == 0) {
        throw ConfigError("conv2d needs in_channels, in_height and in_width > 0");
      }
      break;
  }
}

namespace {

constexpr std::size_t kConvKernel = 3;  // 3 for 1d, 3x3 for 2d

// Uniform +-sqrt(1/fan_in); every weight matrix here has fan_in rows.
void init_weights(Tensor& w, std::mt19937_64& rng) {
  const double lim = std::sqrt(1.0 / static_cast<double>(w.rows()));
  std::uniform_real_distribution<double> dist(-lim, lim);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = dist(rng);
}

void add_dense(Model& model, std::mt19937_64& rng, const std::string& name, std::size_t in,
               std::size_t out, Activation act) {
  auto layer = std::make_unique<DenseLayer>(name, in, out, act);
  init_weights(layer->w, rng);
  model.add(std::move(layer));
}

void build_mlp(Model& model, const ModelConfig& cfg, std::mt19937_64& rng) {
  // Encoder widths, then either mirrored decoder widths back to the input
  // (autoencode) or the logits width (classify). The last layer is identity.
  std::vector<std::size_t> dims{cfg.input_dim};
  dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
  if (cfg.task == Task::autoencode) {
    for (std::size_t i = cfg.hidden_dims.size() - 1; i-- > 0;) dims.push_back(cfg.hidden_dims[i]);
    dims.push_back(cfg.input_dim);
  } else {
    dims.push_back(cfg.class_count);
  }
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const bool last = i + 2 == dims.size();
    add_dense(model, rng, "dense" + std::to_string(i + 1), dims[i], dims[i + 1],
              last ? Activation::identity : cfg.activation);
  }
}

void build_conv(Model& model, const ModelConfig& cfg, std::mt19937_64& rng) {
  const bool two_d = cfg.architecture == Arch::conv2d;
  std::size_t ch = cfg.in_channels;
  std::size_t h = two_d ? cfg.in_height : 1;
  std::size_t w = cfg.in_width;
  for (std::size_t i = 0; i < cfg.hidden_dims.size(); ++i) {
    const std::string name = "conv" + std::to_string(i + 1);
    if (w < kConvKernel || (two_d && h < kConvKernel)) {
      throw ConfigError("layer '" + name + "' needs spatial extent >= " +
                        std::to_string(kConvKernel) + ", got " + std::to_string(h) + "x" +
                        std::to_string(w));
    }
    if (two_d) {
      auto layer = std::make_unique<Conv2dLayer>(name, ch, cfg.hidden_dims[i], kConvKernel,
                                                 kConvKernel, cfg.activation);
      init_weights(layer->w, rng);
      model.add(std::move(layer));
      h -= kConvKernel - 1;
    } else {
      auto layer =
          std::make_unique<Conv1dLayer>(name, ch, cfg.hidden_dims[i], kConvKernel, cfg.activation);
      init_weights(layer->w, rng);
      model.add(std::move(layer));
    }
    w -= kConvKernel - 1;
    ch = cfg.hidden_dims[i];
  }
  const std::size_t flat = ch * h * w;
  if (cfg.task == Task::autoencode) {
    add_dense(model, rng, "decode", flat, cfg.input_numel(), Activation::identity);
  } else {
    add_dense(model, rng, "logits", flat, cfg.class_count, Activation::identity);
  }
}

void build_rnn(Model& model, const ModelConfig& cfg, std::mt19937_64& rng) {
  // A stack of recurrences; inner layers pass their per-step readout to the
  // next recurrence, the last one carries the task readout.
  std::size_t prev = cfg.step_dim;
  for (std::size_t i = 0; i < cfg.hidden_dims.size(); ++i) {
    const std::string name = "rnn" + std::to_string(i + 1);
    const bool last = i + 1 == cfg.hidden_dims.size();
    std::size_t out;
    bool sequence;
    if (!last) {
      out = cfg.hidden_dims[i];
      sequence = true;
    } else if (cfg.task == Task::autoencode) {
      out = cfg.step_dim;  // per-step reconstruction of the input sequence
      sequence = true;
    } else {
      out = cfg.class_count;  // logits from the final hidden state
      sequence = false;
    }
    auto layer = std::make_unique<ElmanLayer>(name, prev, cfg.hidden_dims[i], out,
                                              cfg.activation, sequence, Activation::identity);
    init_weights(layer->wx, rng);
    init_weights(layer->wh, rng);
    init_weights(layer->wy, rng);
    model.add(std::move(layer));
    prev = cfg.hidden_dims[i];
  }
}

// Dataset rows are flat; give them the geometry the first layer expects.
Tensor shaped_inputs(const ModelConfig& cfg, const Tensor& inputs) {
  const std::size_t n = inputs.rows();
  switch (cfg.architecture) {
    case Arch::mlp: return inputs;
    case Arch::rnn: return inputs.reshaped({n, cfg.seq_len, cfg.step_dim});
    case Arch::conv1d: return inputs.reshaped({n, cfg.in_channels, cfg.in_width});
    case Arch::conv2d:
      return inputs.reshaped({n, cfg.in_channels, cfg.in_height, cfg.in_width});
  }
  return inputs;
}

}  // namespace

Model build_model(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  Model model;
  switch (cfg.architecture) {
    case Arch::mlp: build_mlp(model, cfg, rng); break;
    case Arch::rnn: build_rnn(model, cfg, rng); break;
    case Arch::conv1d:
    case Arch::conv2d: build_conv(model, cfg, rng); break;
  }
  return model;
}

RunLog train(Model& model, const ModelConfig& mcfg, const Dataset& data, const TrainConfig& tcfg,
             const SpectralProbe& probe) {
  if (tcfg.epochs < 1) {
    throw DomainError("train: epochs must be >= 1, got " + std::to_string(tcfg.epochs));
  }
  if (!std::isfinite(tcfg.lr) || tcfg.lr < 0.0) {
    throw DomainError("train: lr must be finite and >= 0, got " + std::to_string(tcfg.lr));
  }
  data.validate();
  const std::size_t n = data.count();
  if (data.inputs.cols() != mcfg.input_numel()) {
    throw DimensionError("train: dataset rows have " + std::to_string(data.inputs.cols()) +
                         " values but the model expects " + std::to_string(mcfg.input_numel()));
  }
  if (mcfg.task == Task::classify && mcfg.class_count != data.class_count) {
    throw ConfigError("train: model has " + std::to_string(mcfg.class_count) +
                      " classes but the dataset declares " + std::to_string(data.class_count));
  }
  if (probe.labeling().size() != n) {
    throw ContractError("train: probe labels " + std::to_string(probe.labeling().size()) +
                        " samples, dataset has " + std::to_string(n));
  }

  const Tensor shaped = shaped_inputs(mcfg, data.inputs);
  const Tensor* target = &data.inputs;
  if (mcfg.architecture == Arch::rnn) target = &shaped;  // sequence reconstruction

  RunLog log;
  log.loss_curve.reserve(static_cast<std::size_t>(tcfg.epochs));
  for (long epoch = 0; epoch < tcfg.epochs; ++epoch) {
    try {
      Tape tape;
      const Tensor pred = model.forward(shaped, tape);
      const LossResult loss = mcfg.task == Task::classify
                                  ? cross_entropy_loss(pred, data.labels)
                                  : mse_loss(pred, *target);
      if (!std::isfinite(loss.value)) {
        throw NumericError("loss is not finite");
      }
      log.loss_curve.push_back(loss.value);
      const std::vector<LayerRecord> records = model.backward(tape, loss.grad);
      if (probe.due(epoch)) {
        std::vector<SpectrumSnapshot> snaps = probe.observe(records, epoch);
        log.snapshots.insert(log.snapshots.end(), std::make_move_iterator(snaps.begin()),
                             std::make_move_iterator(snaps.end()));
      }
      if (tcfg.lr != 0.0) gd_step(model, records, tcfg.lr);
    } catch (const NumericError& e) {
      throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
    }
  }
  return log;
}

}  // namespace autospec
