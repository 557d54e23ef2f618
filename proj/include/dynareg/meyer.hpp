#pragma once

// Rank-one update of a Moore-Penrose pseudoinverse, following Meyer's
// classification of (A + c d^T)^+ into six cases. With
//   k = A^+ c,  h = d^T A^+,  u = (I - A A^+) c,  v = d^T (I - A^+ A),
//   beta = 1 + d^T A^+ c,
// the branch depends on whether u and v vanish (c in range(A), d in range(A^T))
// and whether beta vanishes. Every branch costs O(rows * cols).

#include <cstdint>
#include <span>
#include <string_view>

#include "dynareg/dense.hpp"

namespace dynareg {

enum class MeyerCase : std::uint8_t {
  kBothOutside = 1,         // u != 0, v != 0
  kColumnInsideSingular,    // u == 0, v != 0, beta == 0
  kColumnInsideRegular,     // u == 0, beta != 0
  kRowInsideSingular,       // u != 0, v == 0, beta == 0
  kRowInsideRegular,        // v == 0, beta != 0 (u != 0)
  kBothInsideSingular,      // u == 0, v == 0, beta == 0
};

std::string_view to_string(MeyerCase c);

/// Relative tolerance for the range-membership and beta == 0 tests. The
/// membership tests scale it by max(1, ||A||_F ||A+||_F).
inline constexpr double kMeyerTolerance = 1e-10;

struct MeyerUpdate {
  DenseMatrix pinv;
  MeyerCase branch;
};

/// Computes pinv(a + c d^T) from a and a_pinv = pinv(a). Throws
/// std::invalid_argument on dimension mismatch.
MeyerUpdate meyer_update(const DenseMatrix& a, const DenseMatrix& a_pinv, std::span<const double> c,
                         std::span<const double> d, double tol = kMeyerTolerance);

inline DenseMatrix meyer_rank_one_pinv_update(const DenseMatrix& a, const DenseMatrix& a_pinv,
                                              std::span<const double> c, std::span<const double> d) {
  return meyer_update(a, a_pinv, c, d).pinv;
}

}  // namespace dynareg
