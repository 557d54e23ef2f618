#include "dynareg/kernels.hpp"

#include <algorithm>

namespace dynareg::kernels {

namespace {

// Below this many scalar operations the thread fork costs more than it saves.
constexpr std::size_t kParallelThreshold = 1 << 15;

inline void butterfly_rows(DenseMatrix& a, std::size_t top, std::size_t bottom) {
  auto x = a.row(top);
  auto y = a.row(bottom);
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double s = x[c];
    const double t = y[c];
    x[c] = s + t;
    y[c] = s - t;
  }
}

}  // namespace

namespace serial {

void gemm(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  c = DenseMatrix(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      auto brow = b.row(k);
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += aik * brow[j];
    }
  }
}

void fwht_columns(DenseMatrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) butterfly_rows(a, j, j + h);
    }
  }
}

void countsketch_apply(std::span<const SketchEntry> entries, const DenseMatrix& m, DenseMatrix& out) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto dst = out.row(entries[i].row);
    auto src = m.row(i);
    const double s = entries[i].sign;
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += s * src[j];
  }
}

}  // namespace serial

namespace parallel {

void gemm(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c) {
  c = DenseMatrix(a.rows(), b.cols());
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
  const bool big = a.rows() * a.cols() * b.cols() >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    auto out = c.row(static_cast<std::size_t>(i));
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(static_cast<std::size_t>(i), k);
      auto brow = b.row(k);
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += aik * brow[j];
    }
  }
}

void fwht_columns(DenseMatrix& a) {
  const std::size_t n = a.rows();
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  const bool big = n * a.cols() >= kParallelThreshold;
  for (std::size_t h = 1; h < n; h <<= 1) {
    // Each stage is n/2 independent butterflies; pair p maps to rows (top, top + h).
#pragma omp parallel for schedule(static) if (big)
    for (std::ptrdiff_t p = 0; p < half; ++p) {
      const auto up = static_cast<std::size_t>(p);
      const std::size_t top = (up / h) * 2 * h + up % h;
      butterfly_rows(a, top, top + h);
    }
  }
}

void countsketch_apply(std::span<const SketchEntry> entries, const DenseMatrix& m, DenseMatrix& out) {
  // Split by output column so each accumulator sees rows in the serial order.
  const auto cols = static_cast<std::ptrdiff_t>(m.cols());
  const bool big = entries.size() * m.cols() >= kParallelThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t j = 0; j < cols; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out(entries[i].row, uj) += entries[i].sign * m(i, uj);
    }
  }
}

}  // namespace parallel

}  // namespace dynareg::kernels
