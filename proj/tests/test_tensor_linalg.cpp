#include <cmath>
#include <cstring>
#include <limits>

#include "autospec/linalg.hpp"
#include "autospec/tensor.hpp"
#include "doctest.h"
#include "oracles.hpp"

using autospec::ContractError;
using autospec::DimensionError;
using autospec::effective_rank;
using autospec::frobenius_distance;
using autospec::frobenius_norm;
using autospec::matmul;
using autospec::matmul_at_b;
using autospec::NumericError;
using autospec::singular_values;
using autospec::svd;
using autospec::SvdResult;
using autospec::Tensor;

namespace {

double max_abs(const Tensor& t) {
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) m = std::max(m, std::fabs(t[i]));
  return m;
}

// max |(U^T U - I)_ij|
double orthonormality_defect(const Tensor& u) {
  Tensor g = matmul_at_b(u, u);
  for (std::size_t i = 0; i < g.rows(); ++i) g.at(i, i) -= 1.0;
  return max_abs(g);
}

double reconstruction_error(const Tensor& m, const SvdResult& r) {
  Tensor scaled = r.u;  // m x k, columns scaled by sigma
  for (std::size_t i = 0; i < scaled.rows(); ++i)
    for (std::size_t j = 0; j < scaled.cols(); ++j) scaled.at(i, j) *= r.sigma[j];
  Tensor rebuilt = autospec::matmul_a_bt(scaled, r.v);
  return frobenius_distance(m, rebuilt);
}

void check_svd_invariants(const Tensor& m) {
  CAPTURE(m.shape_str());
  const SvdResult r = svd(m);
  const std::size_t k = std::min(m.rows(), m.cols());
  REQUIRE(r.sigma.size() == k);
  REQUIRE(r.u.shape() == std::vector<std::size_t>{m.rows(), k});
  REQUIRE(r.v.shape() == std::vector<std::size_t>{m.cols(), k});
  for (std::size_t i = 0; i < k; ++i) {
    CHECK(r.sigma[i] >= 0.0);
    if (i > 0) CHECK(r.sigma[i] <= r.sigma[i - 1]);
  }
  CHECK(orthonormality_defect(r.u) <= 1e-10);
  CHECK(orthonormality_defect(r.v) <= 1e-10);
  CHECK(reconstruction_error(m, r) <= 1e-10 * std::max(1.0, frobenius_norm(m)));
}

}  // namespace

TEST_CASE("matmul against identity and a worked example") {
  const Tensor m = oracle::random_matrix(3, 5, 11);
  CHECK(frobenius_distance(matmul(Tensor::identity(3), m), m) == 0.0);

  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  const Tensor b = Tensor::from_rows({{0}, {1}});
  const Tensor c = matmul(a, b);
  CHECK(c.at(0, 0) == 2.0);
  CHECK(c.at(1, 0) == 4.0);
}

TEST_CASE("matmul matches the naive triple loop") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Tensor a = oracle::random_matrix(5, 4, seed);
    const Tensor b = oracle::random_matrix(4, 3, seed + 100);
    CHECK(frobenius_distance(matmul(a, b), oracle::naive_matmul(a, b)) <= 1e-12);
  }
}

TEST_CASE("matmul variants match explicit transposition") {
  const Tensor a = oracle::random_matrix(6, 4, 21);
  const Tensor b = oracle::random_matrix(6, 3, 22);
  CHECK(frobenius_distance(matmul_at_b(a, b), matmul(a.transposed(), b)) <= 1e-12);
  const Tensor c = oracle::random_matrix(3, 4, 23);
  CHECK(frobenius_distance(autospec::matmul_a_bt(a, c), matmul(a, c.transposed())) <= 1e-12);
}

TEST_CASE("matmul names both shapes on mismatch") {
  const Tensor a = Tensor::matrix(2, 3);
  const Tensor b = Tensor::matrix(4, 2);
  try {
    matmul(a, b);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[2x3]") != std::string::npos);
    CHECK(msg.find("[4x2]") != std::string::npos);
  }
}

TEST_CASE("frobenius distance basics") {
  const Tensor m = oracle::random_matrix(4, 4, 31);
  CHECK(frobenius_distance(m, m) == 0.0);
  CHECK(frobenius_distance(Tensor::from_rows({{3, 4}}), Tensor::from_rows({{0, 0}})) ==
        doctest::Approx(5.0).epsilon(1e-14));
  CHECK_THROWS_AS(frobenius_distance(Tensor::matrix(2, 2), Tensor::matrix(2, 3)), DimensionError);

  const Tensor a = oracle::random_matrix(5, 3, 32);
  const Tensor b = oracle::random_matrix(5, 3, 33);
  double direct = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) direct += (a[i] - b[i]) * (a[i] - b[i]);
  CHECK(frobenius_distance(a, b) == doctest::Approx(std::sqrt(direct)).epsilon(1e-12));
}

TEST_CASE("svd of identity and of a diagonal") {
  const SvdResult r = svd(Tensor::identity(4));
  for (double s : r.sigma) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));

  Tensor d = Tensor::matrix(3, 3);
  d.at(0, 0) = 3.0;
  d.at(1, 1) = 2.0;
  d.at(2, 2) = 1.0;
  const SvdResult rd = svd(d);
  CHECK(rd.sigma[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(rd.sigma[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rd.sigma[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("svd sigma agrees with the Gram-matrix eigensolver") {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const Tensor m = oracle::random_matrix(6, 4, seed, -2.0, 2.0);
    const auto mine = svd(m).sigma;
    const auto ref = oracle::gram_singular_values(m);
    REQUIRE(mine.size() == ref.size());
    for (std::size_t i = 0; i < mine.size(); ++i) {
      CHECK(mine[i] == doctest::Approx(ref[i]).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("svd invariants hold across shapes, ranks and degeneracies") {
  // tall, wide, square, random content
  check_svd_invariants(oracle::random_matrix(12, 5, 41));
  check_svd_invariants(oracle::random_matrix(5, 12, 42));
  check_svd_invariants(oracle::random_matrix(9, 9, 43));
  check_svd_invariants(oracle::random_matrix(1, 7, 44));
  check_svd_invariants(oracle::random_matrix(7, 1, 45));
  check_svd_invariants(oracle::random_matrix(1, 1, 46));

  // rank-deficient: products of thin factors
  for (std::uint64_t seed = 50; seed < 56; ++seed) {
    const Tensor a = oracle::random_matrix(10, 2, seed);
    const Tensor b = oracle::random_matrix(2, 8, seed + 10);
    check_svd_invariants(matmul(a, b));
  }

  // exact zeros: whole matrix, single zero column
  check_svd_invariants(Tensor::matrix(6, 3));
  Tensor with_zero_col = oracle::random_matrix(6, 4, 60);
  for (std::size_t i = 0; i < 6; ++i) with_zero_col.at(i, 2) = 0.0;
  check_svd_invariants(with_zero_col);

  // wider sweep of random shapes
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 30; ++iter) {
    const std::size_t m = 1 + rng() % 32;
    const std::size_t n = 1 + rng() % 32;
    check_svd_invariants(oracle::random_matrix(m, n, 1000 + iter));
  }
}

TEST_CASE("svd scales homogeneously") {
  const Tensor m = oracle::random_matrix(7, 5, 70);
  const auto base = svd(m).sigma;
  const auto scaled = svd(-2.5 * m).sigma;
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(scaled[i] == doctest::Approx(2.5 * base[i]).epsilon(1e-12));
  }
}

TEST_CASE("svd rejects non-finite input") {
  Tensor m = oracle::random_matrix(3, 3, 80);
  m.at(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(svd(m), NumericError);
  m.at(1, 2) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(svd(m), NumericError);
  CHECK_THROWS_AS(svd(Tensor({3})), DimensionError);
}

TEST_CASE("svd is deterministic and sigma-only path matches bitwise") {
  const Tensor m = oracle::random_matrix(14, 9, 81);
  const SvdResult r1 = svd(m);
  const SvdResult r2 = svd(m);
  CHECK(std::memcmp(r1.u.data(), r2.u.data(), r1.u.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(r1.v.data(), r2.v.data(), r1.v.size() * sizeof(double)) == 0);
  CHECK(r1.sigma == r2.sigma);

  const auto sig = singular_values(m);
  REQUIRE(sig.size() == r1.sigma.size());
  for (std::size_t i = 0; i < sig.size(); ++i) {
    CHECK(std::memcmp(&sig[i], &r1.sigma[i], sizeof(double)) == 0);
  }
}

TEST_CASE("effective rank thresholds and contract checks") {
  CHECK(effective_rank({0.0, 0.0}, 4, 2) == 0);
  CHECK(effective_rank(svd(Tensor::identity(4)).sigma, 4, 4) == 4);

  // rank-1 outer product
  Tensor outer({8, 8});
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) outer.at(i, j) = (1.0 + i) * (0.5 + j);
  CHECK(effective_rank(svd(outer).sigma, 8, 8) == 1);

  CHECK_THROWS_AS(effective_rank({1.0, 2.0}, 4, 4), ContractError);
  CHECK_THROWS_AS(effective_rank({1.0, -0.5}, 4, 4), ContractError);
  CHECK(effective_rank({}, 3, 3) == 0);
}

TEST_CASE("effective rank of a product never exceeds either factor") {
  for (std::uint64_t seed = 200; seed < 206; ++seed) {
    const Tensor a = oracle::random_matrix(9, 4, seed);
    const Tensor b = oracle::random_matrix(4, 7, seed + 50);
    const Tensor ab = matmul(a, b);
    const std::size_t ra = effective_rank(svd(a).sigma, 9, 4);
    const std::size_t rb = effective_rank(svd(b).sigma, 4, 7);
    const std::size_t rab = effective_rank(svd(ab).sigma, 9, 7);
    CHECK(rab <= std::min(ra, rb));
  }
}

TEST_CASE("zero columns produce zero sigma with an orthonormal completion") {
  Tensor m({5, 3});
  for (std::size_t i = 0; i < 5; ++i) m.at(i, 0) = 1.0 + static_cast<double>(i);
  // columns 1 and 2 all zero
  const SvdResult r = svd(m);
  CHECK(r.sigma[1] == 0.0);
  CHECK(r.sigma[2] == 0.0);
  CHECK(orthonormality_defect(r.u) <= 1e-10);
  CHECK(reconstruction_error(m, r) <= 1e-10 * std::max(1.0, frobenius_norm(m)));
}
