#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dynareg/dense.hpp"
#include "dynareg/kernels.hpp"
#include "dynareg/rng.hpp"

namespace dynareg {

enum class SizingMode : std::uint8_t { kPaperExact, kPractical };

inline constexpr double kDefaultSrhtConstant = 10.0;
inline constexpr double kDefaultCountSketchConstant = 4.0;

struct SampleCount {
  std::size_t rows = 1;
  bool clamped = false;  // paper-exact size exceeded the padded row count
};

/// Number of SRHT sample rows for an n x m problem at accuracy eps.
///
/// kPaperExact evaluates
///   max{48^2 m ln(40nm) ln(100^2 m ln(40nm)), 40 m ln(40nm) / eps}
/// with natural logarithms, rounds up and clamps to the padded row count.
/// kPractical returns ceil(c1 * m * (ln m ln n + ln n / eps)), at least 1.
SampleCount srht_sample_count(std::size_t n, std::size_t m, double eps, SizingMode mode,
                              double c1 = kDefaultSrhtConstant);

/// Number of CountSketch rows: kPaperExact is ceil(m^2/eps^2 (ln(m/eps) + 1)^6),
/// kPractical is ceil(c2 m^2 / eps^2). Both are at least 1.
std::size_t countsketch_sample_count(std::size_t m, double eps, SizingMode mode,
                                     double c2 = kDefaultCountSketchConstant);

/// Implicit P * H * D over the zero-padded row space.
struct SrhtSketch {
  std::size_t n_logical = 0;
  std::size_t n_padded = 0;
  std::size_t r = 0;
  std::vector<std::int8_t> signs;      // diagonal of D, one per padded row
  std::vector<std::uint64_t> samples;  // sampled Hadamard rows, with replacement
  double scale = 0.0;                  // sqrt(n_padded / r)
  std::uint64_t seed = 0;

  bool operator==(const SrhtSketch&) const = default;
};

SrhtSketch srht_new(std::size_t n, std::size_t r, std::uint64_t seed);

/// Returns the r x cols matrix scale * P * H * D * [m; 0].
DenseMatrix srht_apply(const SrhtSketch& s, const DenseMatrix& m);
DenseVector srht_apply(const SrhtSketch& s, std::span<const double> b);

/// Column i of the sketch, S * e_i, in O(r) without materializing S.
DenseVector srht_column(const SrhtSketch& s, std::size_t i);

/// Sparse q x n sketch with a single +-1 per column. Column order follows
/// the row order of the sketched matrix.
class CountSketch {
 public:
  CountSketch() = default;
  CountSketch(std::size_t n, std::size_t q, std::uint64_t seed);

  std::size_t q() const { return q_; }
  std::size_t n() const { return entries_.size(); }
  std::uint64_t seed() const { return seed_; }
  std::span<const kernels::SketchEntry> entries() const { return entries_; }
  const kernels::SketchEntry& entry(std::size_t column) const { return entries_.at(column); }

  /// Appends a column drawn from the sketch's own stream. `at` must equal n().
  kernels::SketchEntry add_column(std::size_t at);

  /// Removes column `at`; later columns shift down by one.
  kernels::SketchEntry remove_column(std::size_t at);

  /// Dense S * e_i of length q.
  DenseVector column(std::size_t i) const;

  DenseMatrix apply(const DenseMatrix& m) const;
  DenseVector apply(std::span<const double> b) const;

  std::uint64_t rng_state() const { return rng_.state(); }

  /// Rebuilds a sketch from persisted fields.
  static CountSketch restore(std::size_t q, std::uint64_t seed, std::uint64_t rng_state,
                             std::vector<kernels::SketchEntry> entries);

  bool operator==(const CountSketch& o) const {
    return q_ == o.q_ && seed_ == o.seed_ && rng_.state() == o.rng_.state() && entries_ == o.entries_;
  }

 private:
  kernels::SketchEntry draw();

  std::size_t q_ = 0;
  std::uint64_t seed_ = 0;
  SplitMix64 rng_;
  std::vector<kernels::SketchEntry> entries_;
};

inline CountSketch countsketch_new(std::size_t n, std::size_t q, std::uint64_t seed) { return {n, q, seed}; }

}  // namespace dynareg
