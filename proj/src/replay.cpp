#include "dynareg/replay.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace dynareg {

namespace {

const char* op_name(const UpdateRecord& r) {
  switch (r.index()) {
    case 0: return "+e";
    case 1: return "-e";
    case 2: return "+n";
    default: return "-n";
  }
}

std::string num(double x) {
  if (std::isnan(x)) return "null";
  if (std::isinf(x)) return x > 0 ? "1e999" : "-1e999";
  return fmt::format("{:.17g}", x);
}

std::string config_fields(const SolverConfig& c) {
  return fmt::format(R"("backend":"{}","seed":{},"eps":{},"mode":"{}")", to_string(c.backend), c.seed, num(c.eps),
                     c.mode == SizingMode::kPractical ? "practical" : "paper-exact");
}

}  // namespace

ReplayError::ReplayError(std::size_t index, const std::string& what)
    : std::runtime_error(fmt::format("record {}: {}", index, what)), index_(index) {}

ConsistencyFailure::ConsistencyFailure(std::size_t index, const ConsistencyReport& report)
    : std::runtime_error(fmt::format("consistency check failed after record {}: worst deviation {:.3e} > {:.1e}",
                                     index, report.worst(), report.tolerance)),
      index_(index),
      report_(report) {}

double residual_ratio(double approx, double exact) {
  if (exact > 0.0) return approx / exact;
  return approx > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

ReplayResult replay(RegressionSession& session, std::span<const UpdateRecord> records, const ReplayOptions& options) {
  ReplayResult result;
  result.updates.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    UpdateReport rep;
    rep.index = i + 1;
    rep.op = op_name(records[i]);
    const auto start = std::chrono::steady_clock::now();
    SessionStep step;
    try {
      step = session.apply(records[i]);
    } catch (const std::invalid_argument& e) {
      throw ReplayError(rep.index, e.what());
    }
    rep.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
    rep.sketch_rows = session.state().sketch_rows();
    rep.rebuilt = step.outcome.rebuilt;
    rep.pinv_refreshed = step.outcome.pinv_refreshed;
    rep.pairs = step.delta.rank();
    if (options.residuals) {
      rep.approx_residual = session.approx_residual();
      rep.exact_residual = session.exact_residual();
      rep.residual_ratio = residual_ratio(rep.approx_residual, rep.exact_residual);
    }
    result.updates.push_back(std::move(rep));
    if (options.verify_every != 0 && (i + 1) % options.verify_every == 0) {
      const ConsistencyReport check = session.verify(options.tolerance);
      ++result.verifications;
      if (!check.pass) throw ConsistencyFailure(i + 1, check);
    }
  }
  return result;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

std::vector<BenchSummary> summarize(std::span<const BenchRun> runs) {
  std::vector<Backend> order;
  for (const auto& r : runs)
    if (std::find(order.begin(), order.end(), r.config.backend) == order.end()) order.push_back(r.config.backend);

  std::vector<BenchSummary> out;
  for (Backend b : order) {
    BenchSummary s;
    s.backend = b;
    std::vector<double> times, ratios, pre;
    std::size_t within = 0;
    for (const auto& r : runs) {
      if (r.config.backend != b) continue;
      ++s.runs;
      pre.push_back(static_cast<double>(r.preprocess_ns));
      s.sketch_rows = std::max(s.sketch_rows, r.sketch_rows);
      for (const auto& u : r.result.updates) {
        times.push_back(static_cast<double>(u.wall_ns));
        ratios.push_back(u.residual_ratio);
        within += u.residual_ratio <= 1.0 + r.config.eps ? 1 : 0;
        s.rebuilds += u.rebuilt ? 1 : 0;
      }
    }
    s.updates = times.size();
    s.median_update_ns = median(times);
    s.median_preprocess_ns = median(pre);
    if (!ratios.empty()) {
      s.ratio_min = *std::min_element(ratios.begin(), ratios.end());
      s.ratio_max = *std::max_element(ratios.begin(), ratios.end());
      s.ratio_median = median(ratios);
      s.within_eps = static_cast<double>(within) / static_cast<double>(ratios.size());
    }
    out.push_back(s);
  }
  return out;
}

CrossoverObservation crossover(std::size_t n, double eps, std::span<const BenchSummary> summaries) {
  CrossoverObservation c;
  c.ln_n = std::log(static_cast<double>(std::max<std::size_t>(n, 1)));
  c.inv_eps = 1.0 / eps;
  c.predicted = c.ln_n < c.inv_eps ? "srht" : "countsketch";
  const BenchSummary* srht = nullptr;
  const BenchSummary* cs = nullptr;
  for (const auto& s : summaries) {
    if (s.backend == Backend::kSrht) srht = &s;
    if (s.backend == Backend::kCountSketch) cs = &s;
  }
  if (srht != nullptr && cs != nullptr && srht->updates > 0 && cs->updates > 0)
    c.observed = srht->median_update_ns < cs->median_update_ns ? "srht" : "countsketch";
  return c;
}

void write_updates_jsonl(std::ostream& out, const BenchRun& run) {
  out << fmt::format(R"({{"type":"config",{},"n":{},"m":{},"sketch_rows":{},"preprocess_ns":{},"warnings":{}}})",
                     config_fields(run.config), run.n, run.m, run.sketch_rows, run.preprocess_ns,
                     run.warnings.size())
      << '\n';
  for (const auto& u : run.result.updates) {
    out << fmt::format(
               R"({{"type":"update",{},"index":{},"op":"{}","wall_ns":{},"approx_residual":{},"exact_residual":{},)"
               R"("residual_ratio":{},"sketch_rows":{},"rebuilt":{},"pinv_refreshed":{},"pairs":{}}})",
               config_fields(run.config), u.index, u.op, u.wall_ns, num(u.approx_residual), num(u.exact_residual),
               num(u.residual_ratio), u.sketch_rows, u.rebuilt, u.pinv_refreshed, u.pairs)
        << '\n';
  }
}

void write_updates_csv_header(std::ostream& out) {
  out << "backend,seed,eps,index,op,wall_ns,approx_residual,exact_residual,residual_ratio,sketch_rows,rebuilt,"
         "pinv_refreshed,pairs\n";
}

void write_updates_csv(std::ostream& out, const BenchRun& run) {
  for (const auto& u : run.result.updates) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(run.config.backend), run.config.seed,
                       num(run.config.eps), u.index, u.op, u.wall_ns, num(u.approx_residual), num(u.exact_residual),
                       num(u.residual_ratio), u.sketch_rows, u.rebuilt ? 1 : 0, u.pinv_refreshed ? 1 : 0, u.pairs);
  }
}

void write_summary_jsonl(std::ostream& out, std::span<const BenchSummary> summaries, const CrossoverObservation& c) {
  for (const auto& s : summaries) {
    out << fmt::format(
               R"({{"type":"summary","backend":"{}","runs":{},"updates":{},"median_update_ns":{},)"
               R"("median_preprocess_ns":{},"ratio_min":{},"ratio_median":{},"ratio_max":{},"within_eps":{},)"
               R"("rebuilds":{},"sketch_rows":{}}})",
               to_string(s.backend), s.runs, s.updates, num(s.median_update_ns), num(s.median_preprocess_ns),
               num(s.ratio_min), num(s.ratio_median), num(s.ratio_max), num(s.within_eps), s.rebuilds, s.sketch_rows)
        << '\n';
  }
  out << fmt::format(R"({{"type":"crossover","ln_n":{},"inv_eps":{},"predicted":"{}","observed":{}}})", num(c.ln_n),
                     num(c.inv_eps), c.predicted, c.observed.empty() ? "null" : "\"" + c.observed + "\"")
      << '\n';
}

void write_summary_csv(std::ostream& out, std::span<const BenchSummary> summaries) {
  out << "backend,runs,updates,median_update_ns,median_preprocess_ns,ratio_min,ratio_median,ratio_max,within_eps,"
         "rebuilds,sketch_rows\n";
  for (const auto& s : summaries) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", to_string(s.backend), s.runs, s.updates,
                       num(s.median_update_ns), num(s.median_preprocess_ns), num(s.ratio_min), num(s.ratio_median),
                       num(s.ratio_max), num(s.within_eps), s.rebuilds, s.sketch_rows);
  }
}

}  // namespace dynareg
