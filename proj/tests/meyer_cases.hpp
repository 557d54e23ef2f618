#pragma once

// Seeded generator for rank-one pseudoinverse update instances that land in
// a requested branch of Meyer's classification.

#include <random>

#include "dynareg/linalg.hpp"
#include "dynareg/meyer.hpp"
#include "test_util.hpp"

namespace dynareg::testing {

struct MeyerInstance {
  DenseMatrix a;
  DenseVector c;
  DenseVector d;
};

/// rows x cols matrix of the given rank (rank <= cols <= rows).
inline DenseMatrix random_rank_matrix(std::size_t rows, std::size_t cols, std::size_t rank, std::mt19937_64& rng) {
  return naive_product(random_matrix(rows, rank, rng), random_matrix(rank, cols, rng));
}

inline MeyerInstance make_meyer_instance(MeyerCase target, std::mt19937_64& rng, std::size_t rows = 8,
                                         std::size_t cols = 3) {
  const bool need_v_nonzero = target == MeyerCase::kBothOutside || target == MeyerCase::kColumnInsideSingular;
  const bool c_inside = target == MeyerCase::kColumnInsideSingular || target == MeyerCase::kColumnInsideRegular ||
                        target == MeyerCase::kBothInsideSingular;
  const bool d_inside = target == MeyerCase::kRowInsideSingular || target == MeyerCase::kRowInsideRegular ||
                        target == MeyerCase::kBothInsideSingular;
  const bool singular = target == MeyerCase::kColumnInsideSingular || target == MeyerCase::kRowInsideSingular ||
                        target == MeyerCase::kBothInsideSingular;

  // A row space that is a proper subspace is needed for d outside range(A^T);
  // otherwise half the instances use full column rank.
  std::bernoulli_distribution coin(0.5);
  const std::size_t rank = (need_v_nonzero || (!d_inside && coin(rng)) || coin(rng)) ? cols - 1 : cols;
  MeyerInstance inst{random_rank_matrix(rows, cols, rank, rng), {}, {}};
  const DenseMatrix& a = inst.a;

  if (c_inside) {
    inst.c = a * random_vector(cols, rng);
  } else {
    inst.c = random_vector(rows, rng);
  }
  if (d_inside) {
    inst.d = transpose(a) * random_vector(rows, rng);
  } else {
    inst.d = random_vector(cols, rng);
  }
  if (singular) {
    // Shift d along k = A^+ c (which lies in range(A^T)) so that d^T k = -1.
    const DenseVector k = pinv(a) * inst.c;
    const double kk = dot(k, k);
    const double t = (1.0 + dot(inst.d, k)) / kk;
    for (std::size_t j = 0; j < cols; ++j) inst.d[j] -= t * k[j];
  }
  return inst;
}

inline constexpr MeyerCase kAllMeyerCases[] = {
    MeyerCase::kBothOutside,        MeyerCase::kColumnInsideSingular, MeyerCase::kColumnInsideRegular,
    MeyerCase::kRowInsideSingular,  MeyerCase::kRowInsideRegular,     MeyerCase::kBothInsideSingular,
};

}  // namespace dynareg::testing
