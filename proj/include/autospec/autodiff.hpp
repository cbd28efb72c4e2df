#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "autospec/loss.hpp"
#include "autospec/tensor.hpp"

namespace autospec {

enum class Activation { identity, relu, tanh, sigmoid };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

Tensor activate(const Tensor& pre, Activation act);
// grad_out elementwise-scaled by the activation derivative at the pre-activation.
Tensor activation_backward(const Tensor& pre, const Tensor& grad_out, Activation act);

enum class LayerKind { dense, conv1d, conv2d, elman_rnn };

std::string to_string(LayerKind k);

// One weight block's view of a backward pass. Rows of `a` and `delta` are
// slice-major: row r = t * batch + i is slice t (timestep / spatial position)
// of sample i, so restricting to a sample group is a row selection and
// concatenating the slices reproduces the stacked matrices exactly.
//
// grad_w is computed as a^T * delta -- the identity is the construction, and
// the test suite re-derives it against per-slice sums and finite differences.
struct LayerRecord {
  int layer_id = -1;       // position in the forward-ordered record list
  std::string name;        // matches the owning ParamBlock name
  LayerKind kind = LayerKind::dense;
  std::size_t batch = 0;   // N samples
  std::size_t slices = 1;  // weight-sharing multiplicity (1 for dense)
  Tensor a;                // (batch*slices) x h_in input factor
  Tensor delta;            // (batch*slices) x h_out pre-activation adjoints
  Tensor grad_w;           // h_in x h_out
  Tensor grad_b;           // [h_out], empty for blocks without a bias
  bool tied = false;       // true when slices share this block's weights

  std::size_t row_count() const { return batch * slices; }
  Tensor slice_a(std::size_t t) const;      // batch x h_in
  Tensor slice_delta(std::size_t t) const;  // batch x h_out
};

// Mutable view of one weight block, aligned by position and name with the
// LayerRecord stream that backward() produces.
struct ParamBlock {
  std::string name;
  Tensor* w = nullptr;
  Tensor* b = nullptr;  // null for bias-free blocks
};

// Everything a layer needs to replay its forward pass in reverse. Which
// fields are populated depends on the layer kind.
struct LayerCache {
  Tensor input;            // as received, original shape
  Tensor a;                // dense: flattened input; conv: unfolded patches
  Tensor pre;              // pre-activation, rows aligned with `a`
  std::vector<Tensor> h;   // rnn hidden states h_0 .. h_T
  std::vector<Tensor> zh;  // rnn hidden pre-activations z_1 .. z_T
  std::vector<Tensor> zy;  // rnn readout pre-activations (per step, or one)
};

class Model;

// Forward-pass transcript. A tape is only meaningful for the model that wrote
// it and for the parameter values at the time of writing.
struct Tape {
  const Model* owner = nullptr;
  std::size_t batch = 0;
  std::vector<long> sample_ids;  // aligned with batch rows, unique
  std::vector<std::size_t> output_shape;
  std::vector<LayerCache> caches;  // one per layer, forward order
};

class Layer {
public:
  Layer(std::string name, Activation act) : name_(std::move(name)), act_(act) {}
  virtual ~Layer() = default;

  const std::string& name() const { return name_; }
  Activation activation() const { return act_; }
  virtual LayerKind kind() const = 0;

  virtual Tensor forward(const Tensor& x, LayerCache& cache) const = 0;
  // Consumes grad wrt this layer's output, appends this layer's records
  // (forward block order), returns grad wrt the layer input.
  virtual Tensor backward(const LayerCache& cache, const Tensor& grad_out,
                          std::vector<LayerRecord>& records) const = 0;
  virtual void collect_blocks(std::vector<ParamBlock>& out) = 0;

protected:
  std::string name_;
  Activation act_;
};

class DenseLayer : public Layer {
public:
  DenseLayer(std::string name, std::size_t in_dim, std::size_t out_dim, Activation act);
  LayerKind kind() const override { return LayerKind::dense; }
  Tensor forward(const Tensor& x, LayerCache& cache) const override;
  Tensor backward(const LayerCache& cache, const Tensor& grad_out,
                  std::vector<LayerRecord>& records) const override;
  void collect_blocks(std::vector<ParamBlock>& out) override;

  Tensor w;  // in x out
  Tensor b;  // [out]
};

class Conv1dLayer : public Layer {
public:
  Conv1dLayer(std::string name, std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
              Activation act);
  LayerKind kind() const override { return LayerKind::conv1d; }
  Tensor forward(const Tensor& x, LayerCache& cache) const override;
  Tensor backward(const LayerCache& cache, const Tensor& grad_out,
                  std::vector<LayerRecord>& records) const override;
  void collect_blocks(std::vector<ParamBlock>& out) override;

  std::size_t in_ch, out_ch, kernel;
  Tensor w;  // (in_ch * kernel) x out_ch
  Tensor b;  // [out_ch]
};

class Conv2dLayer : public Layer {
public:
  Conv2dLayer(std::string name, std::size_t in_ch, std::size_t out_ch, std::size_t kh,
              std::size_t kw, Activation act);
  LayerKind kind() const override { return LayerKind::conv2d; }
  Tensor forward(const Tensor& x, LayerCache& cache) const override;
  Tensor backward(const LayerCache& cache, const Tensor& grad_out,
                  std::vector<LayerRecord>& records) const override;
  void collect_blocks(std::vector<ParamBlock>& out) override;

  std::size_t in_ch, out_ch, kh, kw;
  Tensor w;  // (in_ch * kh * kw) x out_ch
  Tensor b;  // [out_ch]
};

// Elman recurrence: z_t = x_t Wx + h_{t-1} Wh + bh, h_t = act(z_t), with a
// linear readout y = h Wy + by either per step ("sequence") or from the final
// state. Three weight blocks, so backward emits three records: name.wx
// (carries the hidden bias), name.wh (bias-free), name.wy.
class ElmanLayer : public Layer {
public:
  ElmanLayer(std::string name, std::size_t in_dim, std::size_t hidden, std::size_t out_dim,
             Activation act, bool sequence_output, Activation readout_act = Activation::identity);
  LayerKind kind() const override { return LayerKind::elman_rnn; }
  Tensor forward(const Tensor& x, LayerCache& cache) const override;
  Tensor backward(const LayerCache& cache, const Tensor& grad_out,
                  std::vector<LayerRecord>& records) const override;
  void collect_blocks(std::vector<ParamBlock>& out) override;

  std::size_t in_dim, hidden, out_dim;
  bool sequence_output;
  Activation readout_act;
  Tensor wx, wh, wy;  // in x H, H x H, H x out
  Tensor bh, by;      // [H], [out]
};

class Model {
public:
  Model() = default;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  void add(std::unique_ptr<Layer> layer);
  const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }

  // Runs the batch through every layer, filling the tape. Non-finite layer
  // outputs raise NumericError naming the layer.
  Tensor forward(const Tensor& batch, Tape& tape) const;

  // Reverse pass from d loss / d output. Returns one record per weight block
  // in forward order with layer_id = 0, 1, ... The tape must come from this
  // model and loss_grad must match the taped output shape (ContractError).
  std::vector<LayerRecord> backward(const Tape& tape, const Tensor& loss_grad) const;

  std::vector<ParamBlock> blocks();
  std::size_t param_count();

private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

// In-place vanilla gradient descent over every block: w -= lr * grad_w,
// b -= lr * grad_b. Records must align with the model's blocks by name.
// lr must be positive; non-finite gradients raise NumericError naming the block.
void gd_step(Model& model, const std::vector<LayerRecord>& records, double lr);

// Central finite differences over every parameter against the analytic
// backward pass. Targets are synthesised deterministically from `seed`.
// Returns the worst relative disagreement. Models above 10k parameters are
// rejected (DomainError) -- this is a test instrument, not a trainer.
double gradient_check(Model& model, const Tensor& batch, LossKind loss,
                      std::uint64_t seed = 0x5eedULL);

}  // namespace autospec
