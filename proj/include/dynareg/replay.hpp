#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynareg/engine.hpp"
#include "dynareg/session.hpp"

namespace dynareg {

struct UpdateReport {
  std::size_t index = 0;  // 1-based position in the stream
  std::string op;
  std::int64_t wall_ns = 0;
  double approx_residual = 0.0;
  double exact_residual = 0.0;
  double residual_ratio = 1.0;
  std::size_t sketch_rows = 0;
  bool rebuilt = false;
  bool pinv_refreshed = false;
  std::size_t pairs = 0;
};

struct ReplayOptions {
  /// Run verify_consistency after every this many updates; 0 never.
  std::size_t verify_every = 0;
  double tolerance = kConsistencyTolerance;
  /// Compute the exact baseline after each update for residual ratios.
  bool residuals = true;
};

struct ReplayResult {
  std::vector<UpdateReport> updates;
  std::size_t verifications = 0;
};

/// A record could not be applied; the session holds all earlier records.
class ReplayError : public std::runtime_error {
 public:
  ReplayError(std::size_t index, const std::string& what);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class ConsistencyFailure : public std::runtime_error {
 public:
  ConsistencyFailure(std::size_t index, const ConsistencyReport& report);
  std::size_t index() const { return index_; }
  const ConsistencyReport& report() const { return report_; }

 private:
  std::size_t index_;
  ConsistencyReport report_;
};

/// approx / exact, with 1 when both vanish and infinity when only exact does.
double residual_ratio(double approx, double exact);

ReplayResult replay(RegressionSession& session, std::span<const UpdateRecord> records, const ReplayOptions& options);

struct BenchRun {
  SolverConfig config;
  std::size_t n = 0;
  std::size_t m = 0;
  std::int64_t preprocess_ns = 0;
  std::size_t sketch_rows = 0;
  std::vector<std::string> warnings;
  ReplayResult result;
};

struct BenchSummary {
  Backend backend = Backend::kCountSketch;
  std::size_t runs = 0;
  std::size_t updates = 0;
  double median_update_ns = 0.0;
  double median_preprocess_ns = 0.0;
  double ratio_min = 0.0;
  double ratio_median = 0.0;
  double ratio_max = 0.0;
  /// Share of updates with residual ratio <= 1 + eps.
  double within_eps = 0.0;
  std::size_t rebuilds = 0;
  std::size_t sketch_rows = 0;
};

double median(std::vector<double> v);

/// One summary per backend, in first-seen order.
std::vector<BenchSummary> summarize(std::span<const BenchRun> runs);

/// Which backend the ln n versus 1/eps rule favors, and which had the lower
/// median update time among the randomized backends present.
struct CrossoverObservation {
  double ln_n = 0.0;
  double inv_eps = 0.0;
  std::string predicted;
  std::string observed;  // empty when fewer than two randomized backends ran
};

CrossoverObservation crossover(std::size_t n, double eps, std::span<const BenchSummary> summaries);

// Reports. Reals are written with 17 significant digits.
void write_updates_jsonl(std::ostream& out, const BenchRun& run);
void write_updates_csv_header(std::ostream& out);
void write_updates_csv(std::ostream& out, const BenchRun& run);
void write_summary_jsonl(std::ostream& out, std::span<const BenchSummary> summaries, const CrossoverObservation& c);
void write_summary_csv(std::ostream& out, std::span<const BenchSummary> summaries);

}  // namespace dynareg
