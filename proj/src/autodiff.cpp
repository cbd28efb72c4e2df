#include "autospec/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace autospec {

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  if (s == "sigmoid") return Activation::sigmoid;
  throw ConfigError("unknown activation '" + s + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
  }
  throw ConfigError("unhandled activation enum value");
}

std::string to_string(LayerKind k) {
  switch (k) {
    case LayerKind::dense: return "dense";
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::elman_rnn: return "elman_rnn";
  }
  throw ConfigError("unhandled layer kind enum value");
}

namespace {

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor activate(const Tensor& pre, Activation act) {
  Tensor out = pre;
  switch (act) {
    case Activation::identity:
      break;
    case Activation::relu:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigmoid_scalar(out[i]);
      break;
  }
  return out;
}

Tensor activation_backward(const Tensor& pre, const Tensor& grad_out, Activation act) {
  if (!pre.same_shape(grad_out)) {
    throw DimensionError("activation_backward: pre " + pre.shape_str() + " vs grad " +
                         grad_out.shape_str());
  }
  Tensor out = grad_out;
  switch (act) {
    case Activation::identity:
      break;
    case Activation::relu:
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (pre[i] <= 0.0) out[i] = 0.0;
      }
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = std::tanh(pre[i]);
        out[i] *= 1.0 - t * t;
      }
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double s = sigmoid_scalar(pre[i]);
        out[i] *= s * (1.0 - s);
      }
      break;
  }
  return out;
}

Tensor LayerRecord::slice_a(std::size_t t) const {
  if (t >= slices) {
    throw DimensionError("slice " + std::to_string(t) + " out of range, record has " +
                         std::to_string(slices));
  }
  return a.rows_slice(t * batch, batch);
}

Tensor LayerRecord::slice_delta(std::size_t t) const {
  if (t >= slices) {
    throw DimensionError("slice " + std::to_string(t) + " out of range, record has " +
                         std::to_string(slices));
  }
  return delta.rows_slice(t * batch, batch);
}

namespace {

void add_bias_rows(Tensor& m, const Tensor& b) {
  const std::size_t r = m.rows(), c = m.cols();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.at(i, j) += b[j];
}

Tensor flatten_batch(const Tensor& x) {
  if (x.rank() < 2) {
    throw DimensionError("layer input must have a batch axis, got shape " + x.shape_str());
  }
  if (x.rank() == 2) return x;
  const std::size_t n = x.extent(0);
  return x.reshaped({n, x.size() / n});
}

LayerRecord make_record(std::string name, LayerKind kind, std::size_t batch, std::size_t slices,
                        Tensor a, Tensor delta, bool with_bias) {
  LayerRecord rec;
  rec.name = std::move(name);
  rec.kind = kind;
  rec.batch = batch;
  rec.slices = slices;
  rec.tied = kind != LayerKind::dense;  // conv/rnn blocks are weight-tied even at one slice
  rec.grad_w = matmul_at_b(a, delta);  // Eq. of the framework: the gradient IS this product
  if (with_bias) rec.grad_b = column_sums(delta);
  rec.a = std::move(a);
  rec.delta = std::move(delta);
  require_finite(rec.grad_w, "gradient for block '" + rec.name + "'");
  return rec;
}

}  // namespace

// ---------------------------------------------------------------- DenseLayer

DenseLayer::DenseLayer(std::string name, std::size_t in_dim, std::size_t out_dim, Activation act)
    : Layer(std::move(name), act), w({in_dim, out_dim}), b({out_dim}) {}

Tensor DenseLayer::forward(const Tensor& x, LayerCache& cache) const {
  Tensor flat = flatten_batch(x);
  if (flat.cols() != w.rows()) {
    throw DimensionError("layer '" + name_ + "': input " + flat.shape_str() +
                         " does not match weights " + w.shape_str());
  }
  cache.input = x;
  cache.pre = matmul(flat, w);
  add_bias_rows(cache.pre, b);
  cache.a = std::move(flat);
  return activate(cache.pre, act_);
}

Tensor DenseLayer::backward(const LayerCache& cache, const Tensor& grad_out,
                            std::vector<LayerRecord>& records) const {
  Tensor delta = activation_backward(cache.pre, grad_out, act_);
  Tensor grad_in = matmul_a_bt(delta, w);  // N x in
  records.push_back(make_record(name_, LayerKind::dense, cache.a.rows(), 1, cache.a,
                                std::move(delta), true));
  return grad_in.reshaped(cache.input.shape());
}

void DenseLayer::collect_blocks(std::vector<ParamBlock>& out) {
  out.push_back({name_, &w, &b});
}

// --------------------------------------------------------------- Conv1dLayer

Conv1dLayer::Conv1dLayer(std::string name, std::size_t in_ch_, std::size_t out_ch_,
                         std::size_t kernel_, Activation act)
    : Layer(std::move(name), act),
      in_ch(in_ch_),
      out_ch(out_ch_),
      kernel(kernel_),
      w({in_ch_ * kernel_, out_ch_}),
      b({out_ch_}) {}

Tensor Conv1dLayer::forward(const Tensor& x, LayerCache& cache) const {
  if (x.rank() != 3 || x.extent(1) != in_ch) {
    throw DimensionError("layer '" + name_ + "': expected input [N x " + std::to_string(in_ch) +
                         " x L], got " + x.shape_str());
  }
  const std::size_t n = x.extent(0), len = x.extent(2);
  if (len < kernel) {
    throw DimensionError("layer '" + name_ + "': length " + std::to_string(len) +
                         " shorter than kernel " + std::to_string(kernel));
  }
  const std::size_t p_count = len - kernel + 1;
  // unfolded patches, slice-major rows: row r = p * n + i
  Tensor a({p_count * n, in_ch * kernel});
  const double* px = x.data();
  for (std::size_t p = 0; p < p_count; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      double* row = a.data() + (p * n + i) * a.cols();
      for (std::size_t c = 0; c < in_ch; ++c) {
        const double* src = px + (i * in_ch + c) * len + p;
        for (std::size_t j = 0; j < kernel; ++j) row[c * kernel + j] = src[j];
      }
    }
  }
  cache.input = x;
  cache.pre = matmul(a, w);
  add_bias_rows(cache.pre, b);
  cache.a = std::move(a);
  // repack rows (p, i, out) -> [N x out_ch x P]
  Tensor out({n, out_ch, p_count});
  Tensor act_mat = activate(cache.pre, act_);
  for (std::size_t p = 0; p < p_count; ++p)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t o = 0; o < out_ch; ++o)
        out[(i * out_ch + o) * p_count + p] = act_mat.at(p * n + i, o);
  return out;
}

Tensor Conv1dLayer::backward(const LayerCache& cache, const Tensor& grad_out,
                             std::vector<LayerRecord>& records) const {
  const std::size_t n = cache.input.extent(0), len = cache.input.extent(2);
  const std::size_t p_count = len - kernel + 1;
  Tensor g_mat({p_count * n, out_ch});
  for (std::size_t p = 0; p < p_count; ++p)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t o = 0; o < out_ch; ++o)
        g_mat.at(p * n + i, o) = grad_out[(i * out_ch + o) * p_count + p];
  Tensor delta = activation_backward(cache.pre, g_mat, act_);
  Tensor da = matmul_a_bt(delta, w);  // (P*N) x (in_ch*kernel)
  Tensor dx(cache.input.shape());
  for (std::size_t p = 0; p < p_count; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = da.data() + (p * n + i) * da.cols();
      for (std::size_t c = 0; c < in_ch; ++c) {
        double* dst = dx.data() + (i * in_ch + c) * len + p;
        for (std::size_t j = 0; j < kernel; ++j) dst[j] += row[c * kernel + j];
      }
    }
  }
  records.push_back(make_record(name_, LayerKind::conv1d, n, p_count, cache.a, std::move(delta),
                                true));
  return dx;
}

void Conv1dLayer::collect_blocks(std::vector<ParamBlock>& out) {
  out.push_back({name_, &w, &b});
}

// --------------------------------------------------------------- Conv2dLayer

Conv2dLayer::Conv2dLayer(std::string name, std::size_t in_ch_, std::size_t out_ch_,
                         std::size_t kh_, std::size_t kw_, Activation act)
    : Layer(std::move(name), act),
      in_ch(in_ch_),
      out_ch(out_ch_),
      kh(kh_),
      kw(kw_),
      w({in_ch_ * kh_ * kw_, out_ch_}),
      b({out_ch_}) {}

Tensor Conv2dLayer::forward(const Tensor& x, LayerCache& cache) const {
  if (x.rank() != 4 || x.extent(1) != in_ch) {
    throw DimensionError("layer '" + name_ + "': expected input [N x " + std::to_string(in_ch) +
                         " x H x W], got " + x.shape_str());
  }
  const std::size_t n = x.extent(0), h = x.extent(2), wd = x.extent(3);
  if (h < kh || wd < kw) {
    throw DimensionError("layer '" + name_ + "': input " + x.shape_str() +
                         " smaller than kernel " + std::to_string(kh) + "x" + std::to_string(kw));
  }
  const std::size_t ho = h - kh + 1, wo = wd - kw + 1, p_count = ho * wo;
  Tensor a({p_count * n, in_ch * kh * kw});
  for (std::size_t py = 0; py < ho; ++py) {
    for (std::size_t px_ = 0; px_ < wo; ++px_) {
      const std::size_t p = py * wo + px_;
      for (std::size_t i = 0; i < n; ++i) {
        double* row = a.data() + (p * n + i) * a.cols();
        for (std::size_t c = 0; c < in_ch; ++c) {
          for (std::size_t u = 0; u < kh; ++u) {
            const double* src = x.data() + ((i * in_ch + c) * h + py + u) * wd + px_;
            for (std::size_t v = 0; v < kw; ++v) row[(c * kh + u) * kw + v] = src[v];
          }
        }
      }
    }
  }
  cache.input = x;
  cache.pre = matmul(a, w);
  add_bias_rows(cache.pre, b);
  cache.a = std::move(a);
  Tensor act_mat = activate(cache.pre, act_);
  Tensor out({n, out_ch, ho, wo});
  for (std::size_t p = 0; p < p_count; ++p)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t o = 0; o < out_ch; ++o)
        out[(i * out_ch + o) * p_count + p] = act_mat.at(p * n + i, o);
  return out;
}

Tensor Conv2dLayer::backward(const LayerCache& cache, const Tensor& grad_out,
                             std::vector<LayerRecord>& records) const {
  const std::size_t n = cache.input.extent(0), h = cache.input.extent(2),
                    wd = cache.input.extent(3);
  const std::size_t ho = h - kh + 1, wo = wd - kw + 1, p_count = ho * wo;
  Tensor g_mat({p_count * n, out_ch});
  for (std::size_t p = 0; p < p_count; ++p)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t o = 0; o < out_ch; ++o)
        g_mat.at(p * n + i, o) = grad_out[(i * out_ch + o) * p_count + p];
  Tensor delta = activation_backward(cache.pre, g_mat, act_);
  Tensor da = matmul_a_bt(delta, w);
  Tensor dx(cache.input.shape());
  for (std::size_t py = 0; py < ho; ++py) {
    for (std::size_t px_ = 0; px_ < wo; ++px_) {
      const std::size_t p = py * wo + px_;
      for (std::size_t i = 0; i < n; ++i) {
        const double* row = da.data() + (p * n + i) * da.cols();
        for (std::size_t c = 0; c < in_ch; ++c) {
          for (std::size_t u = 0; u < kh; ++u) {
            double* dst = dx.data() + ((i * in_ch + c) * h + py + u) * wd + px_;
            for (std::size_t v = 0; v < kw; ++v) dst[v] += row[(c * kh + u) * kw + v];
          }
        }
      }
    }
  }
  records.push_back(make_record(name_, LayerKind::conv2d, n, p_count, cache.a, std::move(delta),
                                true));
  return dx;
}

void Conv2dLayer::collect_blocks(std::vector<ParamBlock>& out) {
  out.push_back({name_, &w, &b});
}

// ---------------------------------------------------------------- ElmanLayer

ElmanLayer::ElmanLayer(std::string name, std::size_t in_dim_, std::size_t hidden_,
                       std::size_t out_dim_, Activation act, bool sequence_output_,
                       Activation readout_act_)
    : Layer(std::move(name), act),
      in_dim(in_dim_),
      hidden(hidden_),
      out_dim(out_dim_),
      sequence_output(sequence_output_),
      readout_act(readout_act_),
      wx({in_dim_, hidden_}),
      wh({hidden_, hidden_}),
      wy({hidden_, out_dim_}),
      bh({hidden_}),
      by({out_dim_}) {}

Tensor ElmanLayer::forward(const Tensor& x, LayerCache& cache) const {
  if (x.rank() != 3 || x.extent(2) != in_dim) {
    throw DimensionError("layer '" + name_ + "': expected input [N x T x " +
                         std::to_string(in_dim) + "], got " + x.shape_str());
  }
  const std::size_t n = x.extent(0), t_count = x.extent(1);
  cache.input = x;
  cache.h.assign(1, Tensor({n, hidden}));  // h_0 = 0
  cache.zh.clear();
  cache.zy.clear();
  for (std::size_t t = 0; t < t_count; ++t) {
    Tensor xt({n, in_dim});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < in_dim; ++j) xt.at(i, j) = x[(i * t_count + t) * in_dim + j];
    Tensor z = matmul(xt, wx) + matmul(cache.h.back(), wh);
    add_bias_rows(z, bh);
    cache.h.push_back(activate(z, act_));
    cache.zh.push_back(std::move(z));
  }
  if (sequence_output) {
    Tensor out({n, t_count, out_dim});
    for (std::size_t t = 0; t < t_count; ++t) {
      Tensor zy = matmul(cache.h[t + 1], wy);
      add_bias_rows(zy, by);
      Tensor yt = activate(zy, readout_act);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < out_dim; ++j)
          out[(i * t_count + t) * out_dim + j] = yt.at(i, j);
      cache.zy.push_back(std::move(zy));
    }
    return out;
  }
  Tensor zy = matmul(cache.h.back(), wy);
  add_bias_rows(zy, by);
  Tensor out = activate(zy, readout_act);
  cache.zy.push_back(std::move(zy));
  return out;
}

Tensor ElmanLayer::backward(const LayerCache& cache, const Tensor& grad_out,
                            std::vector<LayerRecord>& records) const {
  const std::size_t n = cache.input.extent(0), t_count = cache.input.extent(1);

  // readout adjoints
  std::vector<Tensor> delta_y;
  if (sequence_output) {
    delta_y.reserve(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
      Tensor gy({n, out_dim});
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < out_dim; ++j)
          gy.at(i, j) = grad_out[(i * t_count + t) * out_dim + j];
      delta_y.push_back(activation_backward(cache.zy[t], gy, readout_act));
    }
  } else {
    delta_y.push_back(activation_backward(cache.zy[0], grad_out, readout_act));
  }

  // backward through time; delta_h[t] is the adjoint of z_{t+1}
  std::vector<Tensor> delta_h(t_count);
  Tensor carry({n, hidden});
  for (std::size_t t = t_count; t-- > 0;) {
    Tensor gh = std::move(carry);
    if (sequence_output) {
      gh += matmul_a_bt(delta_y[t], wy);
    } else if (t + 1 == t_count) {
      gh += matmul_a_bt(delta_y[0], wy);
    }
    delta_h[t] = activation_backward(cache.zh[t], gh, act_);
    carry = matmul_a_bt(delta_h[t], wh);
  }

  // stacked factors, slice-major: row r = t * n + i
  auto stack = [&](std::size_t width, auto&& row_source) {
    Tensor out({t_count * n, width});
    for (std::size_t t = 0; t < t_count; ++t)
      for (std::size_t i = 0; i < n; ++i) {
        const double* src = row_source(t, i);
        double* dst = out.data() + (t * n + i) * width;
        std::copy(src, src + width, dst);
      }
    return out;
  };
  const Tensor& x = cache.input;
  Tensor a_wx = stack(in_dim, [&](std::size_t t, std::size_t i) {
    return x.data() + (i * t_count + t) * in_dim;
  });
  Tensor a_wh = stack(hidden, [&](std::size_t t, std::size_t i) {
    return cache.h[t].data() + i * hidden;
  });
  Tensor d_h = stack(hidden, [&](std::size_t t, std::size_t i) {
    return delta_h[t].data() + i * hidden;
  });

  // input gradient
  Tensor dx(x.shape());
  for (std::size_t t = 0; t < t_count; ++t) {
    Tensor dxt = matmul_a_bt(delta_h[t], wx);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < in_dim; ++j)
        dx[(i * t_count + t) * in_dim + j] = dxt.at(i, j);
  }

  records.push_back(
      make_record(name_ + ".wx", LayerKind::elman_rnn, n, t_count, std::move(a_wx), d_h, true));
  records.push_back(make_record(name_ + ".wh", LayerKind::elman_rnn, n, t_count, std::move(a_wh),
                                std::move(d_h), false));
  if (sequence_output) {
    Tensor a_wy = stack(hidden, [&](std::size_t t, std::size_t i) {
      return cache.h[t + 1].data() + i * hidden;
    });
    Tensor d_y = stack(out_dim, [&](std::size_t t, std::size_t i) {
      return delta_y[t].data() + i * out_dim;
    });
    records.push_back(make_record(name_ + ".wy", LayerKind::elman_rnn, n, t_count,
                                  std::move(a_wy), std::move(d_y), true));
  } else {
    records.push_back(make_record(name_ + ".wy", LayerKind::elman_rnn, n, 1, cache.h.back(),
                                  std::move(delta_y[0]), true));
  }
  return dx;
}

void ElmanLayer::collect_blocks(std::vector<ParamBlock>& out) {
  out.push_back({name_ + ".wx", &wx, &bh});
  out.push_back({name_ + ".wh", &wh, nullptr});
  out.push_back({name_ + ".wy", &wy, &by});
}

// ---------------------------------------------------------------------- Model

void Model::add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }

Tensor Model::forward(const Tensor& batch, Tape& tape) const {
  if (layers_.empty()) throw ContractError("model has no layers");
  if (batch.rank() < 2) {
    throw DimensionError("batch must have a leading sample axis, got shape " + batch.shape_str());
  }
  tape.owner = this;
  tape.batch = batch.extent(0);
  tape.sample_ids.resize(tape.batch);
  for (std::size_t i = 0; i < tape.batch; ++i) tape.sample_ids[i] = static_cast<long>(i);
  tape.caches.assign(layers_.size(), LayerCache{});
  Tensor x = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i]->forward(x, tape.caches[i]);
    if (!x.all_finite()) {
      throw NumericError("layer '" + layers_[i]->name() + "' produced a non-finite activation");
    }
  }
  tape.output_shape = x.shape();
  return x;
}

std::vector<LayerRecord> Model::backward(const Tape& tape, const Tensor& loss_grad) const {
  if (tape.owner != this) {
    throw ContractError("tape does not belong to this model (stale or foreign tape)");
  }
  if (tape.caches.size() != layers_.size()) {
    throw ContractError("tape has " + std::to_string(tape.caches.size()) + " layer caches for " +
                        std::to_string(layers_.size()) + " layers (stale tape)");
  }
  if (loss_grad.shape() != tape.output_shape) {
    throw ContractError("loss gradient shape " + loss_grad.shape_str() +
                        " does not match taped output " + shape_to_string(tape.output_shape));
  }
  {
    std::set<long> seen(tape.sample_ids.begin(), tape.sample_ids.end());
    if (seen.size() != tape.sample_ids.size() || tape.sample_ids.size() != tape.batch) {
      throw ContractError("tape sample ids must be unique and aligned with the batch");
    }
  }
  require_finite(loss_grad, "loss gradient");

  std::vector<std::vector<LayerRecord>> per_layer(layers_.size());
  Tensor g = loss_grad;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    g = layers_[i]->backward(tape.caches[i], g, per_layer[i]);
  }
  std::vector<LayerRecord> records;
  for (auto& group : per_layer)
    for (auto& rec : group) records.push_back(std::move(rec));
  for (std::size_t i = 0; i < records.size(); ++i) records[i].layer_id = static_cast<int>(i);
  return records;
}

std::vector<ParamBlock> Model::blocks() {
  std::vector<ParamBlock> out;
  for (auto& l : layers_) l->collect_blocks(out);
  return out;
}

std::size_t Model::param_count() {
  std::size_t total = 0;
  for (const ParamBlock& blk : blocks()) {
    total += blk.w->size();
    if (blk.b) total += blk.b->size();
  }
  return total;
}

void gd_step(Model& model, const std::vector<LayerRecord>& records, double lr) {
  if (!(lr > 0.0)) {
    throw DomainError("gd_step: learning rate must be positive, got " + std::to_string(lr));
  }
  std::vector<ParamBlock> blks = model.blocks();
  if (blks.size() != records.size()) {
    throw ContractError("gd_step: " + std::to_string(records.size()) + " records for " +
                        std::to_string(blks.size()) + " parameter blocks");
  }
  for (std::size_t i = 0; i < blks.size(); ++i) {
    const LayerRecord& rec = records[i];
    ParamBlock& blk = blks[i];
    if (rec.name != blk.name) {
      throw ContractError("gd_step: record '" + rec.name + "' does not match block '" +
                          blk.name + "'");
    }
    if (!rec.grad_w.same_shape(*blk.w)) {
      throw DimensionError("gd_step: gradient " + rec.grad_w.shape_str() + " vs weights " +
                           blk.w->shape_str() + " for block '" + blk.name + "'");
    }
    if (!rec.grad_w.all_finite() || (blk.b && !rec.grad_b.all_finite())) {
      throw NumericError("gd_step: non-finite gradient for block '" + blk.name + "'");
    }
    for (std::size_t j = 0; j < blk.w->size(); ++j) (*blk.w)[j] -= lr * rec.grad_w[j];
    if (blk.b) {
      if (!rec.grad_b.same_shape(*blk.b)) {
        throw DimensionError("gd_step: bias gradient " + rec.grad_b.shape_str() + " vs bias " +
                             blk.b->shape_str() + " for block '" + blk.name + "'");
      }
      for (std::size_t j = 0; j < blk.b->size(); ++j) (*blk.b)[j] -= lr * rec.grad_b[j];
    }
  }
}

namespace {

double eval_loss(Model& model, const Tensor& batch, LossKind kind, const Tensor& mse_target,
                 const std::vector<int>& labels) {
  Tape tape;
  Tensor pred = model.forward(batch, tape);
  if (kind == LossKind::mse) return mse_loss(pred, mse_target).value;
  return cross_entropy_loss(pred, labels).value;
}

}  // namespace

double gradient_check(Model& model, const Tensor& batch, LossKind loss, std::uint64_t seed) {
  const std::size_t n_params = model.param_count();
  if (n_params > 10000) {
    throw DomainError("gradient_check: " + std::to_string(n_params) +
                      " parameters exceed the 10k finite-difference budget");
  }

  Tape tape;
  Tensor pred = model.forward(batch, tape);
  std::mt19937_64 rng(seed);
  Tensor mse_target;
  std::vector<int> labels;
  if (loss == LossKind::mse) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    mse_target = Tensor(pred.shape());
    for (std::size_t i = 0; i < mse_target.size(); ++i) mse_target[i] = dist(rng);
  } else {
    if (pred.rank() != 2) {
      throw DimensionError("gradient_check with cross_entropy needs rank-2 logits, got " +
                           pred.shape_str());
    }
    std::uniform_int_distribution<int> dist(0, static_cast<int>(pred.cols()) - 1);
    labels.resize(pred.rows());
    for (int& l : labels) l = dist(rng);
  }

  const LossResult lr = loss == LossKind::mse ? mse_loss(pred, mse_target)
                                              : cross_entropy_loss(pred, labels);
  const std::vector<LayerRecord> records = model.backward(tape, lr.grad);

  std::vector<ParamBlock> blks = model.blocks();
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t bi = 0; bi < blks.size(); ++bi) {
    auto probe_tensor = [&](Tensor* param, const Tensor& analytic) {
      for (std::size_t j = 0; j < param->size(); ++j) {
        const double saved = (*param)[j];
        (*param)[j] = saved + h;
        const double up = eval_loss(model, batch, loss, mse_target, labels);
        (*param)[j] = saved - h;
        const double down = eval_loss(model, batch, loss, mse_target, labels);
        (*param)[j] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double a = analytic[j];
        const double rel = std::fabs(a - numeric) / std::max({1e-8, std::fabs(a), std::fabs(numeric)});
        worst = std::max(worst, rel);
      }
    };
    probe_tensor(blks[bi].w, records[bi].grad_w);
    if (blks[bi].b) probe_tensor(blks[bi].b, records[bi].grad_b);
  }
  return worst;
}

}  // namespace autospec
