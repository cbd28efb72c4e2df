#pragma once

#include <string>
#include <vector>

#include "autospec/tensor.hpp"

namespace autospec {

enum class LossKind { mse, cross_entropy };

LossKind loss_from_string(const std::string& s);
std::string to_string(LossKind k);

struct LossResult {
  double value = 0.0;
  Tensor grad;  // d value / d prediction, same shape as the prediction
};

// Mean squared error over every element. The mean reduction lives in the
// returned gradient (2 * (pred - target) / numel), so downstream parameter
// gradients are mean-reduced and comparable across batch sizes.
LossResult mse_loss(const Tensor& pred, const Tensor& target);

// Softmax cross entropy from logits, mean over the batch. grad is
// (softmax - onehot) / N. Labels must lie in [0, class_count).
LossResult cross_entropy_loss(const Tensor& logits, const std::vector<int>& labels);

}  // namespace autospec
