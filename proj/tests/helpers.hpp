#pragma once

// Shared model/tensor builders for the test suite.

#include <memory>
#include <random>
#include <vector>

#include "autospec/autodiff.hpp"

namespace testutil {

inline void randomize(autospec::Tensor& t, std::uint64_t seed, double scale = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = dist(rng);
}

inline void randomize_params(autospec::Model& m, std::uint64_t seed, double scale = 0.5) {
  std::uint64_t s = seed;
  for (autospec::ParamBlock& blk : m.blocks()) {
    randomize(*blk.w, s++, scale);
    if (blk.b) randomize(*blk.b, s++, scale * 0.3);
  }
}

inline autospec::Model make_mlp(std::uint64_t seed, std::size_t in,
                                std::vector<std::size_t> dims, autospec::Activation act,
                                autospec::Activation last = autospec::Activation::identity) {
  autospec::Model m;
  std::size_t prev = in;
  for (std::size_t li = 0; li < dims.size(); ++li) {
    m.add(std::make_unique<autospec::DenseLayer>("dense" + std::to_string(li), prev, dims[li],
                                                 li + 1 == dims.size() ? last : act));
    prev = dims[li];
  }
  randomize_params(m, seed);
  return m;
}

inline autospec::Model make_conv1d_net(std::uint64_t seed) {
  autospec::Model m;
  m.add(std::make_unique<autospec::Conv1dLayer>("conv0", 2, 3, 2, autospec::Activation::tanh));
  m.add(std::make_unique<autospec::DenseLayer>("dense1", 9, 2, autospec::Activation::identity));
  randomize_params(m, seed);
  return m;
}

inline autospec::Model make_conv2d_net(std::uint64_t seed) {
  autospec::Model m;
  m.add(std::make_unique<autospec::Conv2dLayer>("conv0", 1, 2, 2, 2,
                                                autospec::Activation::sigmoid));
  m.add(std::make_unique<autospec::DenseLayer>("dense1", 8, 2, autospec::Activation::identity));
  randomize_params(m, seed);
  return m;
}

inline autospec::Model make_rnn_net(std::uint64_t seed, bool sequence) {
  autospec::Model m;
  m.add(std::make_unique<autospec::ElmanLayer>("rnn0", 2, 4, 3, autospec::Activation::tanh,
                                               sequence));
  randomize_params(m, seed);
  return m;
}

}  // namespace testutil
