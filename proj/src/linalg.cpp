#include "dynareg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dynareg/kernels.hpp"

namespace dynareg {

namespace {

constexpr double kJacobiTol = 1e-15;

// Column-major scratch for the Jacobi sweeps; columns are contiguous.
struct ColumnStore {
  std::size_t rows;
  std::vector<double> data;
  std::span<double> col(std::size_t j) { return {data.data() + j * rows, rows}; }
};

// Extends the orthonormal columns [0, filled) of u with unit vectors
// orthogonal to them, for zero singular values.
void complete_basis(ColumnStore& u, std::size_t filled, std::size_t total) {
  std::size_t probe = 0;
  for (std::size_t j = filled; j < total; ++j) {
    for (;; ++probe) {
      auto c = u.col(j);
      std::fill(c.begin(), c.end(), 0.0);
      c[probe % u.rows] = 1.0;
      // Two Gram-Schmidt passes for orthogonality to working precision.
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < j; ++k) {
          auto q = u.col(k);
          const double proj = dot(q, c);
          for (std::size_t i = 0; i < c.size(); ++i) c[i] -= proj * q[i];
        }
      }
      const double nrm = norm2(c);
      if (nrm > 0.5) {
        for (double& x : c) x /= nrm;
        ++probe;
        break;
      }
    }
  }
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

SvdResult svd(const DenseMatrix& a, int max_sweeps) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  if (n < m) throw std::invalid_argument("svd: requires rows >= cols");
  if (!all_finite(a.data())) throw std::invalid_argument("svd: non-finite entry");

  ColumnStore w{n, std::vector<double>(n * m)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) w.data[j * n + i] = a(i, j);
  ColumnStore v{m, std::vector<double>(m * m, 0.0)};
  for (std::size_t j = 0; j < m; ++j) v.data[j * m + j] = 1.0;

  bool converged = m < 2;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        auto cp = w.col(p);
        auto cq = w.col(q);
        const double alpha = dot(cp, cp);
        const double beta = dot(cq, cq);
        const double gamma = dot(cp, cq);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= kJacobiTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double x = cp[i];
          const double y = cq[i];
          cp[i] = cs * x - sn * y;
          cq[i] = sn * x + cs * y;
        }
        auto vp = v.col(p);
        auto vq = v.col(q);
        for (std::size_t i = 0; i < m; ++i) {
          const double x = vp[i];
          const double y = vq[i];
          vp[i] = cs * x - sn * y;
          vq[i] = sn * x + cs * y;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) throw ConvergenceError("svd: Jacobi sweeps did not converge");

  std::vector<double> norms(m);
  for (std::size_t j = 0; j < m; ++j) norms[j] = norm2(w.col(j));
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  const double smax = m == 0 ? 0.0 : norms[order[0]];
  // Columns that collapsed to rounding noise carry no usable direction; their
  // left singular vectors come from basis completion instead.
  const double noise = smax * std::numeric_limits<double>::epsilon() * static_cast<double>(n);
  ColumnStore u{n, std::vector<double>(n * m, 0.0)};
  SvdResult out{DenseMatrix(n, m), DenseVector(m, 0.0), DenseMatrix(m, m)};
  std::size_t filled = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = norms[j];
    if (filled == k && norms[j] > 0.0 && norms[j] > noise) {
      auto src = w.col(j);
      auto dst = u.col(k);
      for (std::size_t i = 0; i < n; ++i) dst[i] = src[i] / norms[j];
      filled = k + 1;
    }
  }
  complete_basis(u, filled, m);

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) out.u(i, k) = u.data[k * n + i];
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < m; ++i) out.vt(k, i) = v.data[order[k] * m + i];
  return out;
}

DenseMatrix pinv_from_svd(const SvdResult& s) {
  const std::size_t n = s.u.rows();
  const std::size_t m = s.sigma.size();
  DenseMatrix out(m, n);
  if (m == 0) return out;
  const double cutoff = kPinvCutoff * s.sigma[0];
  // out = V * diag(1/sigma) * U^T
  for (std::size_t k = 0; k < m; ++k) {
    const double sk = s.sigma[k];
    if (!(sk > cutoff)) continue;
    const double inv = 1.0 / sk;
    for (std::size_t i = 0; i < m; ++i) {
      const double vik = s.vt(k, i) * inv;
      if (vik == 0.0) continue;
      auto row = out.row(i);
      for (std::size_t j = 0; j < n; ++j) row[j] += vik * s.u(j, k);
    }
  }
  return out;
}

DenseMatrix pinv(const DenseMatrix& a) {
  if (a.rows() >= a.cols()) return pinv_from_svd(svd(a));
  return transpose(pinv_from_svd(svd(transpose(a))));
}

DenseVector pinv_vector(std::span<const double> x) {
  const double nrm = norm2(x);
  DenseVector out(x.size(), 0.0);
  if (nrm == 0.0) return out;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] / nrm) / nrm;
  return out;
}

DenseVector least_squares_solve(const DenseMatrix& a, std::span<const double> b) {
  if (a.rows() != b.size()) throw std::invalid_argument("least_squares_solve: rows of A differ from length of b");
  return pinv(a) * b;
}

DenseVector fwht_normalized(std::span<const double> v) {
  if (!is_power_of_two(v.size())) throw std::invalid_argument("fwht_normalized: length must be a power of two");
  DenseMatrix work = DenseMatrix::from_rows(v.size(), 1, DenseVector(v.begin(), v.end()));
  kernels::parallel::fwht_columns(work);
  const double scale = 1.0 / std::sqrt(static_cast<double>(v.size()));
  DenseVector out(work.data().begin(), work.data().end());
  for (double& x : out) x *= scale;
  return out;
}

}  // namespace dynareg
