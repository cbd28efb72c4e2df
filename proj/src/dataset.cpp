#include "autospec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

namespace autospec {

void Dataset::validate() const {
  if (inputs.rank() != 2) {
    throw DimensionError("dataset '" + name + "': inputs must be rank-2, got " +
                         inputs.shape_str());
  }
  const std::size_t n = inputs.rows();
  if (n == 0) throw DomainError("dataset '" + name + "' is empty");
  require_finite(inputs, "dataset '" + name + "' inputs");
  if (labels.size() != n) {
    throw DimensionError("dataset '" + name + "': " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(n) + " rows");
  }
  if (class_count == 0) throw ConfigError("dataset '" + name + "': class_count is 0");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= class_count) {
      throw DomainError("dataset '" + name + "': label " + std::to_string(labels[i]) +
                        " at row " + std::to_string(i) + " outside [0, " +
                        std::to_string(class_count) + ")");
    }
  }
  if (groups.size() != n) {
    throw ContractError("dataset '" + name + "': " + std::to_string(groups.size()) +
                        " group ids for " + std::to_string(n) + " rows");
  }
  groups.validate();
}

void Dataset::require_group_support(std::size_t min_per_group) const {
  std::map<int, std::size_t> counts;
  for (int g : groups.group_ids) ++counts[g];
  for (const auto& [g, c] : counts) {
    if (c < min_per_group) {
      throw DomainError("dataset '" + name + "': group " + std::to_string(g) + " has " +
                        std::to_string(c) + " samples, need at least " +
                        std::to_string(min_per_group));
    }
  }
}

GroupLabeling labels_as_groups(const std::vector<int>& labels) {
  GroupLabeling gl;
  gl.group_ids = labels;
  return gl;
}

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed on '" + path + "'");
  return bytes;
}

std::uint32_t read_u32_be(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                          const std::string& path) {
  if (offset + 4 > bytes.size()) {
    throw FormatError("'" + path + "' truncated at byte offset " + std::to_string(offset));
  }
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

void append_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::string hex_u32(std::uint32_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s = "0x";
  for (int shift = 28; shift >= 0; shift -= 4) s += digits[(v >> shift) & 0xf];
  return s;
}

}  // namespace

Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path,
                       const std::vector<int>& keep_classes, std::size_t cap_per_class) {
  const std::vector<std::uint8_t> img = read_file(images_path);
  const std::vector<std::uint8_t> lbl = read_file(labels_path);

  const std::uint32_t img_magic = read_u32_be(img, 0, images_path);
  if (img_magic != 0x00000803u) {
    throw FormatError("'" + images_path + "': bad magic " + hex_u32(img_magic) +
                      " at byte offset 0, expected 0x00000803");
  }
  const std::uint32_t count = read_u32_be(img, 4, images_path);
  const std::uint32_t rows = read_u32_be(img, 8, images_path);
  const std::uint32_t cols = read_u32_be(img, 12, images_path);
  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  const std::size_t img_expect = 16 + static_cast<std::size_t>(count) * pixels;
  if (img.size() != img_expect) {
    throw FormatError("'" + images_path + "': has " + std::to_string(img.size()) +
                      " bytes, expected " + std::to_string(img_expect) + " (truncated at byte " +
                      std::to_string(std::min(img.size(), img_expect)) + ")");
  }

  const std::uint32_t lbl_magic = read_u32_be(lbl, 0, labels_path);
  if (lbl_magic != 0x00000801u) {
    throw FormatError("'" + labels_path + "': bad magic " + hex_u32(lbl_magic) +
                      " at byte offset 0, expected 0x00000801");
  }
  const std::uint32_t lbl_count = read_u32_be(lbl, 4, labels_path);
  if (lbl_count != count) {
    throw FormatError("'" + labels_path + "': " + std::to_string(lbl_count) + " labels for " +
                      std::to_string(count) + " images");
  }
  if (lbl.size() != 8 + static_cast<std::size_t>(count)) {
    throw FormatError("'" + labels_path + "': has " + std::to_string(lbl.size()) +
                      " bytes, expected " + std::to_string(8 + static_cast<std::size_t>(count)));
  }

  // File-order scan with an optional class filter and per-class cap.
  std::map<int, std::size_t> taken;
  std::vector<std::size_t> picked;
  int max_label = -1;
  for (std::size_t i = 0; i < count; ++i) {
    const int label = lbl[8 + i];
    if (!keep_classes.empty() &&
        std::find(keep_classes.begin(), keep_classes.end(), label) == keep_classes.end()) {
      continue;
    }
    if (cap_per_class > 0 && taken[label] >= cap_per_class) continue;
    ++taken[label];
    picked.push_back(i);
    max_label = std::max(max_label, label);
  }
  if (picked.empty()) {
    throw DomainError("'" + images_path + "': no samples survive the class filter");
  }

  Dataset out;
  out.name = "mnist";
  out.note = "idx files " + images_path + ", " + labels_path + "; " +
             std::to_string(picked.size()) + " of " + std::to_string(count) + " samples kept";
  out.inputs = Tensor({picked.size(), pixels});
  out.labels.reserve(picked.size());
  for (std::size_t r = 0; r < picked.size(); ++r) {
    const std::uint8_t* src = img.data() + 16 + picked[r] * pixels;
    double* dst = out.inputs.data() + r * pixels;
    for (std::size_t p = 0; p < pixels; ++p) dst[p] = static_cast<double>(src[p]) / 255.0;
    out.labels.push_back(lbl[8 + picked[r]]);
  }
  out.class_count = static_cast<std::size_t>(max_label) + 1;
  out.groups = labels_as_groups(out.labels);
  out.height = rows;
  out.width = cols;
  return out;
}

void write_idx_pair(const std::vector<std::uint8_t>& images, std::size_t count, std::size_t rows,
                    std::size_t cols, const std::vector<std::uint8_t>& labels,
                    const std::string& images_path, const std::string& labels_path) {
  if (images.size() != count * rows * cols) {
    throw DimensionError("write_idx_pair: " + std::to_string(images.size()) +
                         " image bytes for " + std::to_string(count) + "x" +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (labels.size() != count) {
    throw DimensionError("write_idx_pair: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(count) + " images");
  }
  std::vector<std::uint8_t> img_bytes;
  img_bytes.reserve(16 + images.size());
  append_u32_be(img_bytes, 0x00000803u);
  append_u32_be(img_bytes, static_cast<std::uint32_t>(count));
  append_u32_be(img_bytes, static_cast<std::uint32_t>(rows));
  append_u32_be(img_bytes, static_cast<std::uint32_t>(cols));
  img_bytes.insert(img_bytes.end(), images.begin(), images.end());

  std::vector<std::uint8_t> lbl_bytes;
  lbl_bytes.reserve(8 + labels.size());
  append_u32_be(lbl_bytes, 0x00000801u);
  append_u32_be(lbl_bytes, static_cast<std::uint32_t>(count));
  lbl_bytes.insert(lbl_bytes.end(), labels.begin(), labels.end());

  for (const auto& [path, bytes] : {std::pair{images_path, &img_bytes},
                                    std::pair{labels_path, &lbl_bytes}}) {
    std::ofstream outf(path, std::ios::binary | std::ios::trunc);
    if (!outf) throw IoError("cannot open '" + path + "' for writing");
    outf.write(reinterpret_cast<const char*>(bytes->data()),
               static_cast<std::streamsize>(bytes->size()));
    if (!outf) throw IoError("write failed on '" + path + "'");
  }
}

Dataset gen_sinusoid(std::size_t classes, std::size_t per_class, std::size_t length,
                     std::uint64_t seed, double noise_sigma, bool random_phase) {
  if (classes < 2) throw DomainError("gen_sinusoid: need at least 2 classes");
  if (length < 8) throw DomainError("gen_sinusoid: need length >= 8");
  if (per_class == 0) throw DomainError("gen_sinusoid: per_class must be positive");
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::normal_distribution<double> noise(0.0, noise_sigma);

  Dataset out;
  out.name = "sinusoid";
  out.note = std::to_string(classes) + " classes x " + std::to_string(per_class) +
             " samples, length " + std::to_string(length) + ", sigma " +
             std::to_string(noise_sigma);
  out.inputs = Tensor({classes * per_class, length});
  out.labels.reserve(classes * per_class);
  for (std::size_t c = 0; c < classes; ++c) {
    const double freq = static_cast<double>(c + 1);
    for (std::size_t s = 0; s < per_class; ++s) {
      const double phi = random_phase ? phase(rng) : 0.0;
      double* row = out.inputs.data() + (c * per_class + s) * length;
      for (std::size_t t = 0; t < length; ++t) {
        row[t] = std::sin(kTwoPi * freq * static_cast<double>(t) / static_cast<double>(length) +
                          phi);
        if (noise_sigma > 0.0) row[t] += noise(rng);
      }
      out.labels.push_back(static_cast<int>(c));
    }
  }
  out.class_count = classes;
  out.groups = labels_as_groups(out.labels);
  out.width = length;
  return out;
}

Dataset gen_grouped_tabular(std::size_t groups, std::size_t per_group, std::size_t dim,
                            double effect, std::uint64_t seed) {
  if (dim < 2) throw DomainError("gen_grouped_tabular: need dim >= 2");
  if (groups == 0 || per_group == 0) {
    throw DomainError("gen_grouped_tabular: groups and per_group must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // seeded random unit direction for the planted shift
  std::vector<double> dir(dim);
  double norm2 = 0.0;
  for (double& v : dir) {
    v = gauss(rng);
    norm2 += v * v;
  }
  const double inv_norm = 1.0 / std::sqrt(norm2);
  for (double& v : dir) v *= inv_norm;

  Dataset out;
  out.name = "grouped_tabular";
  out.note = std::to_string(groups) + " groups x " + std::to_string(per_group) + " samples, dim " +
             std::to_string(dim) + ", effect " + std::to_string(effect);
  out.inputs = Tensor({groups * per_group, dim});
  out.labels.reserve(groups * per_group);
  for (std::size_t g = 0; g < groups; ++g) {
    const double shift = effect * static_cast<double>(g);
    for (std::size_t s = 0; s < per_group; ++s) {
      double* row = out.inputs.data() + (g * per_group + s) * dim;
      for (std::size_t j = 0; j < dim; ++j) row[j] = gauss(rng) + shift * dir[j];
      out.labels.push_back(static_cast<int>(g));
    }
  }
  out.class_count = groups;
  out.groups = labels_as_groups(out.labels);
  out.width = dim;
  return out;
}

}  // namespace autospec
