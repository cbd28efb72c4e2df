#pragma once

#include <cstddef>
#include <vector>

#include "autospec/tensor.hpp"

namespace autospec {

// Thin SVD, m x n input, k = min(m, n):
//   u: m x k with orthonormal columns, v: n x k with orthonormal columns,
//   sigma: k values, descending, all >= 0, with u * diag(sigma) * v^T == input.
struct SvdResult {
  Tensor u;
  std::vector<double> sigma;
  Tensor v;
};

// One-sided cyclic Jacobi (Hestenes). Deterministic: fixed pivot order, no
// randomisation, so identical inputs give bitwise identical results. Wide
// inputs are transposed internally and the factors swapped on the way out.
// Throws NumericError on non-finite input and ConvergenceError if the sweep
// budget runs out.
SvdResult svd(const Tensor& m);

// Same rotation path as svd() but skips factor accumulation; the returned
// values are bitwise identical to svd(m).sigma. This is what the per-epoch
// probes call, so it is worth the separate entry point.
std::vector<double> singular_values(const Tensor& m);

// Number of sigma[i] above sigma[0] * max(m, n) * machine-eps. A sigma that is
// not sorted descending (or carries a negative value) is a contract violation.
// An all-zero spectrum has rank 0.
std::size_t effective_rank(const std::vector<double>& sigma, std::size_t m, std::size_t n);

}  // namespace autospec
