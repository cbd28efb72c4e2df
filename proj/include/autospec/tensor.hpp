#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "autospec/error.hpp"

namespace autospec {

// Dense row-major tensor of doubles. Rank is dynamic; everything the framework
// does lives in ranks 1..4. Value semantics throughout -- copies are real copies.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);  // zero-filled
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor matrix(std::size_t rows, std::size_t cols);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor identity(std::size_t n);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t axis) const;

  // Rank-2 conveniences; throw on other ranks.
  std::size_t rows() const;
  std::size_t cols() const;
  double& at(std::size_t i, std::size_t j);
  double at(std::size_t i, std::size_t j) const;

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool empty() const { return data_.empty(); }
  bool all_finite() const;
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  Tensor reshaped(std::vector<std::size_t> new_shape) const;  // size-preserving
  Tensor transposed() const;                                  // rank-2 only
  Tensor row(std::size_t i) const;                            // rank-2, as 1 x cols
  Tensor rows_slice(std::size_t begin, std::size_t count) const;

  std::string shape_str() const;  // "[2x3]"

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double s);

private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(double s, Tensor a);

// C = A * B for rank-2 tensors; inner extents must agree.
Tensor matmul(const Tensor& a, const Tensor& b);
// C = A^T * B without materialising the transpose (the gradient identity path).
Tensor matmul_at_b(const Tensor& a, const Tensor& b);
// C = A * B^T.
Tensor matmul_a_bt(const Tensor& a, const Tensor& b);

Tensor hadamard(const Tensor& a, const Tensor& b);
// Sum over rows of a rank-2 tensor -> rank-1 [cols].
Tensor column_sums(const Tensor& m);

double frobenius_norm(const Tensor& a);
double frobenius_distance(const Tensor& a, const Tensor& b);

// Throws NumericError mentioning `context` when a non-finite entry exists.
void require_finite(const Tensor& t, const std::string& context);

std::string shape_to_string(const std::vector<std::size_t>& shape);

}  // namespace autospec
