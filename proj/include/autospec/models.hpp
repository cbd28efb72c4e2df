#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autospec/autodiff.hpp"
#include "autospec/dataset.hpp"
#include "autospec/probe.hpp"

namespace autospec {

enum class Arch { mlp, rnn, conv1d, conv2d };
enum class Task { autoencode, classify };

Arch arch_from_string(const std::string& s);
Task task_from_string(const std::string& s);
std::string to_string(Arch a);
std::string to_string(Task t);

// One cell of the architecture/task grid. hidden_dims are layer widths for
// the mlp, channel counts for the convs (kernel 3 / 3x3, stride 1, no
// padding), and hidden-state sizes for the rnn.
struct ModelConfig {
  Arch architecture = Arch::mlp;
  Task task = Task::autoencode;
  std::vector<std::size_t> hidden_dims{32};
  Activation activation = Activation::relu;

  // Input geometry; which fields matter depends on the architecture.
  std::size_t input_dim = 0;    // mlp: flat input size
  std::size_t in_channels = 1;  // conv1d / conv2d
  std::size_t in_height = 0;    // conv2d
  std::size_t in_width = 0;     // conv1d length / conv2d width
  std::size_t seq_len = 0;      // rnn steps
  std::size_t step_dim = 0;     // rnn per-step features

  std::size_t class_count = 0;  // classify only, >= 2

  std::size_t input_numel() const;
  void validate() const;  // ConfigError on any inconsistency
};

// Assembles the configured network with seeded deterministic initialization:
// weights uniform in +-sqrt(1/fan_in) drawn from one mt19937_64 stream in
// layer order, biases zero. Autoencoders mirror the encoder widths back to
// the input size (convolutional ones decode through a single dense layer);
// classifiers end in identity-activation logits.
Model build_model(const ModelConfig& cfg, std::uint64_t seed);

struct TrainConfig {
  double lr = 1e-3;
  long epochs = 1000;
};

struct RunLog {
  std::vector<double> loss_curve;          // one entry per epoch
  std::vector<SpectrumSnapshot> snapshots; // every probe observation, in epoch order
};

// Full-batch gradient descent: per epoch forward -> loss -> backward ->
// probe.observe -> gd_step. lr = 0 freezes the parameters (the probe still
// runs). Non-finite losses or activations abort with the epoch index.
RunLog train(Model& model, const ModelConfig& mcfg, const Dataset& data, const TrainConfig& tcfg,
             const SpectralProbe& probe);

}  // namespace autospec
