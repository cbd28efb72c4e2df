#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autospec/probe.hpp"
#include "autospec/tensor.hpp"

namespace autospec {

// A fully materialized training set. Inputs are stored flat (N x numel); the
// model config carries the geometry (channels, sequence length, ...) needed to
// reshape them for a particular architecture.
struct Dataset {
  std::string name;
  std::string note;         // where the data came from: files or generator parameters
  Tensor inputs;            // N x numel
  std::vector<int> labels;  // one label per row, in [0, class_count)
  std::size_t class_count = 0;
  GroupLabeling groups;     // usually the class labels

  // Row geometry where one exists: images carry height x width, sequences and
  // tabular rows carry width only. 0 means "not applicable".
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t count() const { return inputs.rank() > 0 ? inputs.extent(0) : 0; }

  // Alignment and range checks: rank-2 finite inputs, one label and one group
  // id per row, labels within class_count.
  void validate() const;

  // Every distinct group must have at least `min_per_group` samples. Loaders
  // do not enforce this (singleton filters are legitimate for inspection);
  // statistical pipelines do.
  void require_group_support(std::size_t min_per_group) const;
};

// Group labeling that mirrors the class labels one-to-one.
GroupLabeling labels_as_groups(const std::vector<int>& labels);

// Reads an MNIST-format IDX image/label file pair. Pixels are scaled to
// [0, 1]; rows are filtered to keep_classes (in file order) with at most
// cap_per_class samples each (0 = unlimited). Group ids are the original
// digit labels. FormatError (with the byte offset) on malformed files.
Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path,
                       const std::vector<int>& keep_classes = {0, 1, 2, 3},
                       std::size_t cap_per_class = 0);

// Writes an IDX image/label pair in the same format load_mnist_idx reads:
// images as unsigned bytes (count x rows x cols), labels as unsigned bytes.
void write_idx_pair(const std::vector<std::uint8_t>& images, std::size_t count, std::size_t rows,
                    std::size_t cols, const std::vector<std::uint8_t>& labels,
                    const std::string& images_path, const std::string& labels_path);

// Synthetic sequence classes: class c is sin(2*pi*f_c*t/T + phi) + noise with
// f_c = c + 1 cycles, phi uniform per sample, Gaussian noise sigma = 0.05.
// noise_sigma and random_phase are exposed so tests can pin the clean signal.
Dataset gen_sinusoid(std::size_t classes, std::size_t per_class, std::size_t length,
                     std::uint64_t seed, double noise_sigma = 0.05, bool random_phase = true);

// Synthetic grouped tabular data: group g is standard Gaussian shifted by
// effect * g along a seeded random unit direction. effect = 0 is an exact
// null; labels and groups are the group index.
Dataset gen_grouped_tabular(std::size_t groups, std::size_t per_group, std::size_t dim,
                            double effect, std::uint64_t seed);

}  // namespace autospec
