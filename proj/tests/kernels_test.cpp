#include <gtest/gtest.h>

#include <random>

#include "dynareg/kernels.hpp"
#include "test_util.hpp"

using namespace dynareg;
using namespace dynareg::testing;

TEST(Kernels, GemmParallelMatchesSerialBitwise) {
  std::mt19937_64 rng(1);
  for (std::size_t rows : {3u, 700u, 5000u}) {
    const DenseMatrix a = random_matrix(rows, 6, rng);
    const DenseMatrix b = random_matrix(6, 5, rng);
    DenseMatrix s, p;
    kernels::serial::gemm(a, b, s);
    kernels::parallel::gemm(a, b, p);
    EXPECT_EQ(s, p);
    EXPECT_LE(frob_diff(s, naive_product(a, b)), 1e-12 * frob(s));
  }
}

TEST(Kernels, FwhtParallelMatchesSerialBitwise) {
  std::mt19937_64 rng(2);
  for (std::size_t rows : {1u, 2u, 64u, 16384u}) {
    DenseMatrix s = random_matrix(rows, 4, rng);
    DenseMatrix p = s;
    kernels::serial::fwht_columns(s);
    kernels::parallel::fwht_columns(p);
    EXPECT_EQ(s, p) << rows;
  }
}

TEST(Kernels, FwhtColumnsMatchesExplicitHadamard) {
  std::mt19937_64 rng(3);
  const DenseMatrix m = random_matrix(32, 3, rng);
  DenseMatrix out = m;
  kernels::serial::fwht_columns(out);
  const DenseMatrix expected = (std::sqrt(32.0)) * naive_product(explicit_hadamard(32), m);
  EXPECT_LE(frob_diff(out, expected), 1e-11 * frob(expected));
}

TEST(Kernels, CountSketchParallelMatchesSerialBitwise) {
  std::mt19937_64 rng(4);
  for (std::size_t n : {0u, 10u, 20000u}) {
    const DenseMatrix m = random_matrix(n, 4, rng);
    std::vector<kernels::SketchEntry> entries(n);
    for (auto& e : entries) {
      e.row = static_cast<std::uint32_t>(rng() % 37);
      e.sign = (rng() & 1) ? 1 : -1;
    }
    DenseMatrix s(37, 4), p(37, 4);
    kernels::serial::countsketch_apply(entries, m, s);
    kernels::parallel::countsketch_apply(entries, m, p);
    EXPECT_EQ(s, p) << n;
  }
}
