#include "autospec/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace autospec {

namespace {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return shape.empty() ? 0 : n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_numel(shape_), 0.0) {
  for (std::size_t e : shape_) {
    if (e == 0) throw DimensionError("tensor shape " + shape_to_string(shape_) + " has a zero extent");
  }
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  for (std::size_t e : shape_) {
    if (e == 0) throw DimensionError("tensor shape " + shape_to_string(shape_) + " has a zero extent");
  }
  if (data_.size() != shape_numel(shape_)) {
    throw DimensionError("shape " + shape_to_string(shape_) + " wants " +
                         std::to_string(shape_numel(shape_)) + " values, got " +
                         std::to_string(data_.size()));
  }
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols) { return Tensor({rows, cols}); }

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  if (r == 0) throw DimensionError("from_rows needs at least one row");
  const std::size_t c = rows.begin()->size();
  Tensor out({r, c});
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) {
      throw DimensionError("from_rows: row " + std::to_string(i) + " has " +
                           std::to_string(row.size()) + " entries, expected " + std::to_string(c));
    }
    std::size_t j = 0;
    for (double v : row) out.at(i, j++) = v;
    ++i;
  }
  return out;
}

Tensor Tensor::identity(std::size_t n) {
  Tensor out({n, n});
  for (std::size_t i = 0; i < n; ++i) out.at(i, i) = 1.0;
  return out;
}

std::size_t Tensor::extent(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " + shape_str());
  }
  return shape_[axis];
}

std::size_t Tensor::rows() const {
  if (rank() != 2) throw DimensionError("rows() needs a rank-2 tensor, got shape " + shape_str());
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw DimensionError("cols() needs a rank-2 tensor, got shape " + shape_str());
  return shape_[1];
}

double& Tensor::at(std::size_t i, std::size_t j) {
  return data_[i * cols() + j];
}

double Tensor::at(std::size_t i, std::size_t j) const {
  return data_[i * cols() + j];
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor Tensor::reshaped(std::vector<std::size_t> new_shape) const {
  if (shape_numel(new_shape) != size()) {
    throw DimensionError("cannot reshape " + shape_str() + " to " + shape_to_string(new_shape) +
                         ": element counts differ");
  }
  return Tensor(std::move(new_shape), data_);
}

Tensor Tensor::transposed() const {
  const std::size_t r = rows(), c = cols();
  Tensor out({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(j, i) = at(i, j);
  return out;
}

Tensor Tensor::row(std::size_t i) const {
  return rows_slice(i, 1);
}

Tensor Tensor::rows_slice(std::size_t begin, std::size_t count) const {
  const std::size_t r = rows(), c = cols();
  if (begin + count > r) {
    throw DimensionError("row slice [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of range for " + shape_str());
  }
  Tensor out({count, c});
  std::copy(data_.begin() + static_cast<std::ptrdiff_t>(begin * c),
            data_.begin() + static_cast<std::ptrdiff_t>((begin + count) * c), out.data());
  return out;
}

std::string Tensor::shape_str() const { return shape_to_string(shape_); }

Tensor& Tensor::operator+=(const Tensor& other) {
  if (!same_shape(other)) {
    throw DimensionError("elementwise add: shapes " + shape_str() + " vs " + other.shape_str());
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  if (!same_shape(other)) {
    throw DimensionError("elementwise subtract: shapes " + shape_str() + " vs " + other.shape_str());
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(double s, Tensor a) { return a *= s; }

namespace {

void require_rank2(const Tensor& t, const char* who) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(who) + " needs rank-2 operands, got shape " + t.shape_str());
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw DimensionError("matmul: inner extents disagree, " + a.shape_str() + " vs " + b.shape_str());
  }
  Tensor c({m, n});
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
  // i-k-j order: the inner loop is a contiguous axpy over row j of B, which the
  // compiler vectorises, and the accumulation order is fixed (deterministic).
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = pa + i * k;
    double* crow = pc + i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double aik = arow[kk];
      if (aik == 0.0) continue;
      const double* brow = pb + kk * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Tensor matmul_at_b(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul_at_b");
  require_rank2(b, "matmul_at_b");
  const std::size_t n = a.rows(), p = a.cols(), q = b.cols();
  if (b.rows() != n) {
    throw DimensionError("matmul_at_b: row counts disagree, " + a.shape_str() + " vs " +
                         b.shape_str());
  }
  Tensor c({p, q});
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = pa + i * p;
    const double* brow = pb + i * q;
    for (std::size_t r = 0; r < p; ++r) {
      const double air = arow[r];
      if (air == 0.0) continue;
      double* crow = pc + r * q;
      for (std::size_t j = 0; j < q; ++j) crow[j] += air * brow[j];
    }
  }
  return c;
}

Tensor matmul_a_bt(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul_a_bt");
  require_rank2(b, "matmul_a_bt");
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  if (b.cols() != k) {
    throw DimensionError("matmul_a_bt: column counts disagree, " + a.shape_str() + " vs " +
                         b.shape_str());
  }
  Tensor c({m, n});
  const double* pa = a.data();
  const double* pb = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = pa + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = pb + j * k;
      double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      std::size_t t = 0;
      for (; t + 4 <= k; t += 4) {
        s0 += arow[t] * brow[t];
        s1 += arow[t + 1] * brow[t + 1];
        s2 += arow[t + 2] * brow[t + 2];
        s3 += arow[t + 3] * brow[t + 3];
      }
      for (; t < k; ++t) s0 += arow[t] * brow[t];
      c.at(i, j) = (s0 + s1) + (s2 + s3);
    }
  }
  return c;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("hadamard: shapes " + a.shape_str() + " vs " + b.shape_str());
  }
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

Tensor column_sums(const Tensor& m) {
  require_rank2(m, "column_sums");
  Tensor out({m.cols()});
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += m.at(i, j);
  return out;
}

double frobenius_norm(const Tensor& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i];
  return std::sqrt(s);
}

double frobenius_distance(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("frobenius_distance: shapes " + a.shape_str() + " vs " + b.shape_str());
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void require_finite(const Tensor& t, const std::string& context) {
  if (!t.all_finite()) {
    throw NumericError(context + ": tensor of shape " + t.shape_str() +
                       " contains a non-finite value");
  }
}

std::string shape_to_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

}  // namespace autospec
