#include "autospec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace autospec {

namespace {

constexpr double kPairTol = 1e-12;  // relative off-diagonal threshold per column pair
constexpr int kMaxSweeps = 60;

double col_dot(const double* x, const double* y, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  double s4 = 0.0, s5 = 0.0, s6 = 0.0, s7 = 0.0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
    s4 += x[i + 4] * y[i + 4];
    s5 += x[i + 5] * y[i + 5];
    s6 += x[i + 6] * y[i + 6];
    s7 += x[i + 7] * y[i + 7];
  }
  for (; i < n; ++i) s0 += x[i] * y[i];
  return ((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7));
}

void col_rotate(double* x, double* y, std::size_t n, double c, double s) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

// Column-major working state for the Hestenes iteration. The input is stored
// tall (rows >= cols) so every dot/rotation streams contiguous memory.
struct JacobiState {
  std::size_t m = 0;        // rows of the working matrix
  std::size_t n = 0;        // columns (= k of the thin SVD)
  std::vector<double> b;    // m*n, column-major
  std::vector<double> v;    // n*n, column-major; empty unless factors requested
  std::vector<double> sq;   // squared column norms, refreshed each sweep
  double floor_sq = 0.0;    // deflation floor: (eps * largest column norm)^2
};

void refresh_norms(JacobiState& st) {
  double max_sq = 0.0;
  for (std::size_t j = 0; j < st.n; ++j) {
    const double* col = st.b.data() + j * st.m;
    st.sq[j] = col_dot(col, col, st.m);
    max_sq = std::max(max_sq, st.sq[j]);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  st.floor_sq = max_sq * eps * eps;
}

// Runs cyclic sweeps until every pair satisfies |b_p . b_q| <= tol*|b_p||b_q|.
// The pivot decisions depend only on the working columns, never on whether V
// is being accumulated, so sigma-only and full runs rotate identically.
void jacobi_sweeps(JacobiState& st, bool accumulate_v) {
  const std::size_t m = st.m, n = st.n;
  if (accumulate_v) {
    st.v.assign(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) st.v[j * n + j] = 1.0;
  }
  st.sq.assign(n, 0.0);
  double worst_rel = 0.0;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    refresh_norms(st);
    bool rotated = false;
    worst_rel = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        // Columns below machine resolution of the matrix are numerically zero;
        // grinding their rounding junk against the relative pair criterion
        // would never terminate. They are dropped to exact zeros afterwards.
        if (st.sq[p] <= st.floor_sq || st.sq[q] <= st.floor_sq) continue;
        double* bp = st.b.data() + p * m;
        double* bq = st.b.data() + q * m;
        const double gamma = col_dot(bp, bq, m);
        const double norm_p = std::sqrt(std::max(st.sq[p], 0.0));
        const double norm_q = std::sqrt(std::max(st.sq[q], 0.0));
        const double bound = kPairTol * norm_p * norm_q;
        if (std::fabs(gamma) <= bound) continue;
        if (norm_p > 0.0 && norm_q > 0.0) {
          worst_rel = std::max(worst_rel, std::fabs(gamma) / (norm_p * norm_q));
        }
        const double zeta = (st.sq[q] - st.sq[p]) / (2.0 * gamma);
        double t;
        if (std::fabs(zeta) > 1e150) {
          t = 1.0 / (2.0 * zeta);  // avoid overflow in zeta^2; same limit
        } else {
          t = ((zeta >= 0.0) ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        col_rotate(bp, bq, m, c, s);
        if (accumulate_v) col_rotate(st.v.data() + p * n, st.v.data() + q * n, n, c, s);
        // Analytic norm updates are cheap but cancel catastrophically when a
        // column collapses (rank-deficient input); fall back to an exact dot
        // whenever an update loses more than half the cached value, so the
        // pair bounds never see a spuriously zero norm.
        const double new_p = st.sq[p] - t * gamma;
        const double new_q = st.sq[q] + t * gamma;
        st.sq[p] = (new_p > 0.5 * st.sq[p]) ? new_p : col_dot(bp, bp, m);
        st.sq[q] = (new_q > 0.5 * st.sq[q]) ? new_q : col_dot(bq, bq, m);
        rotated = true;
      }
    }
    if (!rotated) return;  // clean sweep: every pair met the bound with fresh norms
  }
  std::ostringstream os;
  os << "jacobi svd: no convergence after " << kMaxSweeps
     << " sweeps (worst relative off-diagonal " << worst_rel << ")";
  throw ConvergenceError(os.str());
}

JacobiState load_state(const Tensor& m, bool transpose) {
  JacobiState st;
  if (!transpose) {
    st.m = m.rows();
    st.n = m.cols();
    st.b.resize(st.m * st.n);
    for (std::size_t i = 0; i < st.m; ++i)
      for (std::size_t j = 0; j < st.n; ++j) st.b[j * st.m + i] = m.at(i, j);
  } else {
    st.m = m.cols();
    st.n = m.rows();
    // transposed load: working column j is row j of the input, already contiguous
    st.b.assign(m.data(), m.data() + m.size());
  }
  st.sq.assign(st.n, 0.0);
  return st;
}

void check_input(const Tensor& m) {
  if (m.rank() != 2) {
    throw DimensionError("svd needs a rank-2 tensor, got shape " + m.shape_str());
  }
  require_finite(m, "svd input");
}

std::vector<std::size_t> descending_order(const std::vector<double>& sigma) {
  std::vector<std::size_t> idx(sigma.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });
  return idx;
}

std::vector<double> column_norms(const JacobiState& st) {
  std::vector<double> out(st.n);
  double max_norm = 0.0;
  for (std::size_t j = 0; j < st.n; ++j) {
    const double* col = st.b.data() + j * st.m;
    out[j] = std::sqrt(col_dot(col, col, st.m));
    max_norm = std::max(max_norm, out[j]);
  }
  // Deflated columns carry only rounding junk; report them as exact zeros so
  // the left factor can be completed orthonormally instead of normalising noise.
  const double floor = max_norm * std::numeric_limits<double>::epsilon();
  for (double& v : out) {
    if (v <= floor) v = 0.0;
  }
  return out;
}

// Left factor from the rotated columns. Zero columns (exactly zero sigma) get
// deterministic orthonormal fill-ins: canonical basis vectors, Gram-Schmidt
// purged against everything already placed.
Tensor build_u(const JacobiState& st, const std::vector<double>& sigma,
               const std::vector<std::size_t>& order) {
  const std::size_t m = st.m, k = st.n;
  Tensor u({m, k});
  std::vector<std::size_t> fill_slots;
  for (std::size_t out_j = 0; out_j < k; ++out_j) {
    const std::size_t src = order[out_j];
    if (sigma[src] > 0.0) {
      const double inv = 1.0 / sigma[src];
      const double* col = st.b.data() + src * m;
      for (std::size_t i = 0; i < m; ++i) u.at(i, out_j) = col[i] * inv;
    } else {
      fill_slots.push_back(out_j);
    }
  }
  std::size_t candidate = 0;
  std::vector<double> work(m);
  for (std::size_t slot : fill_slots) {
    for (; candidate < m; ++candidate) {
      std::fill(work.begin(), work.end(), 0.0);
      work[candidate] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < slot; ++j) {
          double proj = 0.0;
          for (std::size_t i = 0; i < m; ++i) proj += work[i] * u.at(i, j);
          for (std::size_t i = 0; i < m; ++i) work[i] -= proj * u.at(i, j);
        }
      }
      double norm2 = 0.0;
      for (double w : work) norm2 += w * w;
      if (norm2 > 0.25) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < m; ++i) u.at(i, slot) = work[i] * inv;
        ++candidate;
        break;
      }
    }
  }
  return u;
}

Tensor build_v(const JacobiState& st, const std::vector<std::size_t>& order) {
  const std::size_t n = st.n;
  Tensor v({n, n});
  for (std::size_t out_j = 0; out_j < n; ++out_j) {
    const double* col = st.v.data() + order[out_j] * n;
    for (std::size_t i = 0; i < n; ++i) v.at(i, out_j) = col[i];
  }
  return v;
}

}  // namespace

SvdResult svd(const Tensor& m) {
  check_input(m);
  const bool transpose = m.rows() < m.cols();
  JacobiState st = load_state(m, transpose);
  jacobi_sweeps(st, /*accumulate_v=*/true);
  const std::vector<double> norms = column_norms(st);
  const std::vector<std::size_t> order = descending_order(norms);

  SvdResult out;
  out.sigma.resize(st.n);
  for (std::size_t j = 0; j < st.n; ++j) out.sigma[j] = norms[order[j]];
  Tensor left = build_u(st, norms, order);
  Tensor right = build_v(st, order);
  if (transpose) {
    out.u = std::move(right);
    out.v = std::move(left);
  } else {
    out.u = std::move(left);
    out.v = std::move(right);
  }
  return out;
}

std::vector<double> singular_values(const Tensor& m) {
  check_input(m);
  const bool transpose = m.rows() < m.cols();
  JacobiState st = load_state(m, transpose);
  jacobi_sweeps(st, /*accumulate_v=*/false);
  std::vector<double> norms = column_norms(st);
  const std::vector<std::size_t> order = descending_order(norms);
  std::vector<double> sigma(st.n);
  for (std::size_t j = 0; j < st.n; ++j) sigma[j] = norms[order[j]];
  return sigma;
}

std::size_t effective_rank(const std::vector<double>& sigma, std::size_t m, std::size_t n) {
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] < 0.0) {
      throw ContractError("effective_rank: sigma[" + std::to_string(i) + "] is negative");
    }
    if (i > 0 && sigma[i] > sigma[i - 1]) {
      throw ContractError("effective_rank: sigma is not sorted descending at index " +
                          std::to_string(i));
    }
  }
  if (sigma.empty() || sigma[0] == 0.0) return 0;
  const double tau =
      sigma[0] * static_cast<double>(std::max(m, n)) * std::numeric_limits<double>::epsilon();
  std::size_t r = 0;
  for (double s : sigma) {
    if (s > tau) ++r;
  }
  return r;
}

}  // namespace autospec
