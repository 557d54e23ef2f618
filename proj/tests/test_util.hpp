#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing here
// calls into the kernels it is used to check.

#include <cmath>
#include <cstdint>
#include <random>

#include "dynareg/dense.hpp"

namespace dynareg::testing {

inline DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  DenseMatrix a(rows, cols);
  for (double& x : a.data()) x = dist(rng);
  return a;
}

inline DenseVector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  DenseVector v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

/// Plain triple loop, independent of the library's gemm kernel.
inline DenseMatrix naive_product(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline double frob(const DenseMatrix& a) {
  double s = 0.0;
  for (double x : a.data()) s += x * x;
  return std::sqrt(s);
}

inline double frob_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double asymmetry(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s = std::max(s, std::abs(a(i, j) - a(j, i)));
  return s;
}

struct PenroseResiduals {
  double axa;   // ||A X A - A|| / ||A||
  double xax;   // ||X A X - X|| / ||X||
  double ax_sym;
  double xa_sym;
  double worst() const { return std::max(std::max(axa, xax), std::max(ax_sym, xa_sym)); }
};

/// The four Penrose conditions, relative where a norm is available.
inline PenroseResiduals penrose(const DenseMatrix& a, const DenseMatrix& x) {
  const DenseMatrix ax = naive_product(a, x);
  const DenseMatrix xa = naive_product(x, a);
  const double na = std::max(frob(a), 1e-300);
  const double nx = std::max(frob(x), 1e-300);
  PenroseResiduals r{};
  r.axa = frob_diff(naive_product(ax, a), a) / na;
  r.xax = frob_diff(naive_product(xa, x), x) / nx;
  r.ax_sym = asymmetry(ax);
  r.xa_sym = asymmetry(xa);
  return r;
}

/// Explicit normalized Hadamard matrix from the bit-parity formula.
inline DenseMatrix explicit_hadamard(std::size_t n) {
  DenseMatrix h(n, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = (__builtin_popcountll(i & j) % 2 == 0) ? s : -s;
  return h;
}

/// Solves the normal equations (A^T A) x = A^T b by Gaussian elimination
/// with partial pivoting.
inline DenseVector normal_equations_solve(const DenseMatrix& a, const DenseVector& b) {
  const std::size_t m = a.cols();
  DenseMatrix g(m, m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, i) * a(r, j);
      g(i, j) = s;
    }
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, i) * b[r];
    g(i, m) = s;
  }
  for (std::size_t p = 0; p < m; ++p) {
    std::size_t best = p;
    for (std::size_t r = p + 1; r < m; ++r)
      if (std::abs(g(r, p)) > std::abs(g(best, p))) best = r;
    for (std::size_t j = 0; j <= m; ++j) std::swap(g(p, j), g(best, j));
    for (std::size_t r = p + 1; r < m; ++r) {
      const double f = g(r, p) / g(p, p);
      for (std::size_t j = p; j <= m; ++j) g(r, j) -= f * g(p, j);
    }
  }
  DenseVector x(m);
  for (std::size_t p = m; p-- > 0;) {
    double s = g(p, m);
    for (std::size_t j = p + 1; j < m; ++j) s -= g(p, j) * x[j];
    x[p] = s / g(p, p);
  }
  return x;
}

}  // namespace dynareg::testing
