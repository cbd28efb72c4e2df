#include "autospec/loss.hpp"

#include <cmath>

namespace autospec {

LossKind loss_from_string(const std::string& s) {
  if (s == "mse") return LossKind::mse;
  if (s == "cross_entropy") return LossKind::cross_entropy;
  throw ConfigError("unknown loss '" + s + "' (expected mse or cross_entropy)");
}

std::string to_string(LossKind k) {
  return k == LossKind::mse ? "mse" : "cross_entropy";
}

LossResult mse_loss(const Tensor& pred, const Tensor& target) {
  if (!pred.same_shape(target)) {
    throw DimensionError("mse_loss: prediction " + pred.shape_str() + " vs target " +
                         target.shape_str());
  }
  require_finite(pred, "mse_loss prediction");
  const double inv = 1.0 / static_cast<double>(pred.size());
  LossResult out;
  out.grad = Tensor(pred.shape());
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
    out.grad[i] = 2.0 * d * inv;
  }
  out.value = acc * inv;
  return out;
}

LossResult cross_entropy_loss(const Tensor& logits, const std::vector<int>& labels) {
  if (logits.rank() != 2) {
    throw DimensionError("cross_entropy_loss: logits must be rank-2, got " + logits.shape_str());
  }
  const std::size_t n = logits.rows(), c = logits.cols();
  if (labels.size() != n) {
    throw DimensionError("cross_entropy_loss: " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(n) + " rows");
  }
  require_finite(logits, "cross_entropy_loss logits");
  LossResult out;
  out.grad = Tensor(logits.shape());
  const double inv_n = 1.0 / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= c) {
      throw DomainError("cross_entropy_loss: label " + std::to_string(y) + " at row " +
                        std::to_string(i) + " outside [0, " + std::to_string(c) + ")");
    }
    double row_max = logits.at(i, 0);
    for (std::size_t j = 1; j < c; ++j) row_max = std::max(row_max, logits.at(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(logits.at(i, j) - row_max);
    const double log_z = std::log(z) + row_max;
    acc += log_z - logits.at(i, static_cast<std::size_t>(y));
    for (std::size_t j = 0; j < c; ++j) {
      const double p = std::exp(logits.at(i, j) - log_z);
      out.grad.at(i, j) = (p - (static_cast<std::size_t>(y) == j ? 1.0 : 0.0)) * inv_n;
    }
  }
  out.value = acc * inv_n;
  return out;
}

}  // namespace autospec
