#pragma once

// Data-parallel kernels used by preprocessing. Each kernel has a serial
// reference in `serial::` and an OpenMP version in `parallel::`; the two
// produce bitwise-identical results because parallelism never reorders a
// floating-point reduction.

#include <cstddef>
#include <cstdint>
#include <span>

#include "dynareg/dense.hpp"

namespace dynareg::kernels {

/// One CountSketch column entry: the nonzero row and its sign.
struct SketchEntry {
  std::uint32_t row = 0;
  std::int8_t sign = 1;
  bool operator==(const SketchEntry&) const = default;
};

namespace serial {

/// c = a * b
void gemm(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c);

/// Unnormalized in-place Walsh-Hadamard butterflies on every column of a
/// row-major matrix whose row count is a power of two.
void fwht_columns(DenseMatrix& a);

/// out(k, :) = sum over i with entries[i].row == k of sign_i * m(i, :)
void countsketch_apply(std::span<const SketchEntry> entries, const DenseMatrix& m, DenseMatrix& out);

}  // namespace serial

namespace parallel {

void gemm(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c);
void fwht_columns(DenseMatrix& a);
void countsketch_apply(std::span<const SketchEntry> entries, const DenseMatrix& m, DenseMatrix& out);

}  // namespace parallel

}  // namespace dynareg::kernels
