#pragma once

#include <stdexcept>
#include <string>

#include "dynareg/dense.hpp"

namespace dynareg {

/// Raised when the Jacobi SVD exceeds its sweep cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thin SVD a = u * diag(sigma) * vt with u n x m, sigma non-increasing.
struct SvdResult {
  DenseMatrix u;
  DenseVector sigma;
  DenseMatrix vt;
};

/// Singular values at or below this fraction of the largest are treated as zero.
inline constexpr double kPinvCutoff = 1e-12;

/// One-sided Jacobi SVD. Requires a.rows() >= a.cols() and finite entries.
SvdResult svd(const DenseMatrix& a, int max_sweeps = 100);

/// Moore-Penrose pseudoinverse of any shape.
DenseMatrix pinv(const DenseMatrix& a);
DenseMatrix pinv_from_svd(const SvdResult& s);

/// x / ||x||^2, or zero for the zero vector.
DenseVector pinv_vector(std::span<const double> x);

/// Minimum-norm least-squares solution pinv(a) * b.
DenseVector least_squares_solve(const DenseMatrix& a, std::span<const double> b);

/// Normalized Walsh-Hadamard transform H * v with H[i,j] = (-1)^popcount(i & j) / sqrt(n).
DenseVector fwht_normalized(std::span<const double> v);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

}  // namespace dynareg
