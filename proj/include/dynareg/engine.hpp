#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dynareg/delta.hpp"
#include "dynareg/dense.hpp"
#include "dynareg/embedding.hpp"
#include "dynareg/sketch.hpp"

namespace dynareg {

enum class Backend : std::uint8_t { kSrht, kCountSketch, kExact };

std::string_view to_string(Backend b);
Backend parse_backend(std::string_view name);

struct SolverConfig {
  Backend backend = Backend::kCountSketch;
  double eps = 0.3;
  SizingMode mode = SizingMode::kPractical;
  double srht_constant = kDefaultSrhtConstant;
  double countsketch_constant = kDefaultCountSketchConstant;
  std::uint64_t seed = 0;
  /// Fixed sketch row count; 0 derives it from the sizing mode.
  std::size_t sketch_rows = 0;
  /// Recompute the pseudoinverse by SVD after this many updates; 0 disables.
  std::size_t refresh_interval = 1000;

  bool operator==(const SolverConfig&) const = default;
};

using Sketch = std::variant<std::monostate, SrhtSketch, CountSketch>;

/// Sketch-and-solve state: S*M, pinv(S*M), S*b and x' = pinv(S*M) * S*b.
/// The exact backend stores M and b themselves with no sketch.
struct RegressionState {
  SolverConfig config;
  Sketch sketch;
  DenseMatrix sm;
  DenseMatrix sm_pinv;
  DenseVector sb;
  DenseVector x_approx;
  std::size_t m_width = 0;
  std::size_t updates_since_refresh = 0;
  std::size_t rebuilds = 0;
  /// Pseudoinverse recomputations, scheduled or triggered by the probe.
  std::size_t pinv_refreshes = 0;
  std::vector<std::string> warnings;

  std::size_t sketch_rows() const { return sm.rows(); }
  bool operator==(const RegressionState&) const = default;
};

/// Builds the sketch, the sketched system and its solution. Throws
/// std::invalid_argument on misaligned inputs, non-finite entries or an eps
/// outside (0, 1). A rank warning is recorded when the smallest singular
/// value of S*M is at most 1e-10 times the largest.
RegressionState preprocess(const DenseMatrix& m, std::span<const double> b, const SolverConfig& config);

/// After each incremental update the Penrose conditions are probed along
/// random directions; a residual above this triggers an SVD recomputation.
inline constexpr double kPinvProbeTolerance = 1e-10;

/// Largest relative residual of the four Penrose conditions of (a, x) along
/// random probe directions drawn from seed. Costs O(rows * cols).
double penrose_probe(const DenseMatrix& a, const DenseMatrix& x, std::uint64_t seed);

struct UpdateOutcome {
  bool rebuilt = false;
  bool pinv_refreshed = false;
  std::size_t rank_one_updates = 0;
};

/// The embedding and measured values passed in are the post-update ones;
/// only the exact backend and SRHT node operations read them.
UpdateOutcome update_edge(RegressionState& state, const GraphDelta& delta, const EmbeddingMatrix& m_after,
                          std::span<const double> b_after);
UpdateOutcome update_node_insert(RegressionState& state, const GraphDelta& delta, const EmbeddingMatrix& m_after,
                                 std::span<const double> b_after);
UpdateOutcome update_node_delete(RegressionState& state, const GraphDelta& delta, const EmbeddingMatrix& m_after,
                                 std::span<const double> b_after);

/// Dispatches on delta.kind.
UpdateOutcome apply_update(RegressionState& state, const GraphDelta& delta, const EmbeddingMatrix& m_after,
                           std::span<const double> b_after);

/// Minimum-norm least-squares solution via SVD.
DenseVector exact_solve(const DenseMatrix& m, std::span<const double> b);

/// ||m x - b||_2
double residual(const DenseMatrix& m, std::span<const double> b, std::span<const double> x);

struct ConsistencyReport {
  double sm_deviation = 0.0;
  double pinv_deviation = 0.0;
  double sb_deviation = 0.0;
  double x_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  double worst() const;
};

inline constexpr double kConsistencyTolerance = 1e-8;

/// Recomputes every derived quantity from m and b with the state's current
/// sketch. Deviations are max-abs differences relative to the largest
/// magnitude of the recomputed quantity.
ConsistencyReport verify_consistency(const RegressionState& state, const DenseMatrix& m, std::span<const double> b,
                                     double tolerance = kConsistencyTolerance);

}  // namespace dynareg
