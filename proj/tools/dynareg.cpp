#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "dynareg/io.hpp"
#include "dynareg/linalg.hpp"
#include "dynareg/replay.hpp"
#include "dynareg/session.hpp"

using namespace dynareg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConsistency = 2;

struct SolverFlags {
  std::string backend = "countsketch";
  double eps = 0.3;
  std::optional<std::size_t> m;
  std::uint64_t seed = 0;
  std::string mode = "practical";
  std::size_t sketch_rows = 0;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f, bool backend_flag = true) {
  if (backend_flag)
    cmd->add_option("--backend", f.backend, "srht, countsketch or exact")
        ->check(CLI::IsMember({"srht", "countsketch", "exact"}))
        ->capture_default_str();
  cmd->add_option("--eps", f.eps, "approximation parameter in (0, 1)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--m", f.m, "embedding width; defaults to the graph header")->check(CLI::PositiveNumber);
  cmd->add_option("--mode", f.mode, "sketch sizing: paper-exact or practical")
      ->check(CLI::IsMember({"paper-exact", "practical"}))
      ->capture_default_str();
  cmd->add_option("--sketch-rows", f.sketch_rows, "fixed sketch row count; 0 derives it from --mode")
      ->capture_default_str();
}

SolverConfig make_config(const SolverFlags& f, Backend backend, std::uint64_t seed) {
  if (!(f.eps > 0.0 && f.eps < 1.0)) throw std::invalid_argument("--eps must lie strictly between 0 and 1");
  SolverConfig c;
  c.backend = backend;
  c.eps = f.eps;
  c.seed = seed;
  c.mode = f.mode == "paper-exact" ? SizingMode::kPaperExact : SizingMode::kPractical;
  c.sketch_rows = f.sketch_rows;
  return c;
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("dynareg");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("DYNAREG_LOG");
  const std::string level = env != nullptr ? env : "info";
  if (level == "error")
    spdlog::set_level(spdlog::level::err);
  else if (level == "debug")
    spdlog::set_level(spdlog::level::debug);
  else
    spdlog::set_level(spdlog::level::info);
}

std::int64_t elapsed_ns(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - since).count();
}

std::string vec_str(std::span<const double> v) {
  std::vector<std::string> parts;
  for (double x : v) parts.push_back(fmt::format("{:.17g}", x));
  return fmt::format("[{}]", fmt::join(parts, ", "));
}

void log_warnings(const RegressionState& s) {
  for (const auto& w : s.warnings) spdlog::warn("{}", w);
}

struct Inputs {
  io::GraphFile graph;
  std::vector<double> values;
  std::size_t m = 0;
};

Inputs load_inputs(const std::string& graph_path, const std::string& values_path, const SolverFlags& f) {
  Inputs in{io::read_graph(graph_path), io::read_values(values_path), 0};
  in.m = f.m.value_or(in.graph.m_embed);
  if (in.values.size() != in.graph.graph.node_count())
    throw std::invalid_argument(fmt::format("{} has {} values but the graph has {} nodes", values_path,
                                            in.values.size(), in.graph.graph.node_count()));
  return in;
}

void open_reports(const std::string& base, std::ofstream& jsonl, std::ofstream& csv) {
  jsonl.open(base + ".jsonl", std::ios::trunc);
  csv.open(base + ".csv", std::ios::trunc);
  if (!jsonl || !csv) throw std::runtime_error("cannot write report files at " + base);
}

int cmd_preprocess(const std::string& graph_path, const std::string& values_path, const SolverFlags& f,
                   const std::string& out) {
  const Inputs in = load_inputs(graph_path, values_path, f);
  const SolverConfig config = make_config(f, parse_backend(f.backend), f.seed);
  spdlog::debug("building embedding with m = {} for {} nodes", in.m, in.values.size());
  const auto start = std::chrono::steady_clock::now();
  RegressionSession session(in.graph.graph, in.m, in.values, config);
  const std::int64_t ns = elapsed_ns(start);
  log_warnings(session.state());
  io::save_state_file(out, session);
  spdlog::info("wrote {}", out);

  const RegressionState& s = session.state();
  std::cout << fmt::format("n {}\nm {}\nbackend {}\nsketch_rows {}\npreprocess_ns {}\nrank_warning {}\nx {}\n",
                           in.values.size(), in.m, to_string(config.backend), s.sketch_rows(), ns,
                           s.warnings.empty() ? "no" : "yes", vec_str(s.x_approx));
  return kExitOk;
}

int cmd_replay(const std::string& state_path, const std::string& updates_path, std::size_t verify_every,
               const std::string& out, const std::string& report) {
  RegressionSession session = io::load_state_file(state_path);
  const std::vector<UpdateRecord> records = io::read_updates(updates_path);
  spdlog::info("replaying {} records on {} nodes", records.size(), session.graph().node_count());

  BenchRun run;
  run.config = session.state().config;
  run.n = session.graph().node_count();
  run.m = session.width();
  run.sketch_rows = session.state().sketch_rows();
  ReplayOptions options;
  options.verify_every = verify_every;
  run.result = replay(session, records, options);
  const std::string target = out.empty() ? state_path : out;
  io::save_state_file(target, session);
  spdlog::info("wrote {}", target);

  if (!report.empty()) {
    std::ofstream jsonl, csv;
    open_reports(report, jsonl, csv);
    write_updates_jsonl(jsonl, run);
    write_updates_csv_header(csv);
    write_updates_csv(csv, run);
  }
  std::vector<double> times;
  for (const auto& u : run.result.updates) times.push_back(static_cast<double>(u.wall_ns));
  const double final_ratio = run.result.updates.empty() ? 1.0 : run.result.updates.back().residual_ratio;
  std::cout << fmt::format("records {}\nverifications {}\nmedian_update_ns {:.17g}\nfinal_residual_ratio {:.17g}\nx {}\n",
                           run.result.updates.size(), run.result.verifications, median(times), final_ratio,
                           vec_str(session.state().x_approx));
  return kExitOk;
}

int cmd_bench(const std::string& graph_path, const std::string& values_path, const std::string& updates_path,
              const SolverFlags& f, std::vector<std::string> backends, std::vector<std::uint64_t> seeds,
              std::size_t verify_every, const std::string& report) {
  const Inputs in = load_inputs(graph_path, values_path, f);
  const std::vector<UpdateRecord> records = io::read_updates(updates_path);
  if (backends.empty()) backends = {"srht", "countsketch"};
  if (seeds.empty()) seeds = {0};

  std::vector<BenchRun> runs;
  for (const auto& name : backends) {
    for (std::uint64_t seed : seeds) {
      BenchRun run;
      run.config = make_config(f, parse_backend(name), seed);
      run.n = in.values.size();
      run.m = in.m;
      spdlog::info("bench {} seed {}", name, seed);
      const auto start = std::chrono::steady_clock::now();
      RegressionSession session(in.graph.graph, in.m, in.values, run.config);
      run.preprocess_ns = elapsed_ns(start);
      run.sketch_rows = session.state().sketch_rows();
      run.warnings = session.state().warnings;
      log_warnings(session.state());
      ReplayOptions options;
      options.verify_every = verify_every;
      run.result = replay(session, records, options);
      runs.push_back(std::move(run));
    }
  }

  const std::vector<BenchSummary> summaries = summarize(runs);
  const CrossoverObservation cross = crossover(in.values.size(), f.eps, summaries);
  if (!report.empty()) {
    std::ofstream jsonl, csv;
    open_reports(report, jsonl, csv);
    for (const auto& run : runs) write_updates_jsonl(jsonl, run);
    write_summary_jsonl(jsonl, summaries, cross);
    write_updates_csv_header(csv);
    for (const auto& run : runs) write_updates_csv(csv, run);
    std::ofstream summary_csv(report + ".summary.csv", std::ios::trunc);
    write_summary_csv(summary_csv, summaries);
  }
  write_summary_csv(std::cout, summaries);
  std::cout << fmt::format("crossover ln_n {:.17g} inv_eps {:.17g} predicted {} observed {}\n", cross.ln_n,
                           cross.inv_eps, cross.predicted, cross.observed.empty() ? "n/a" : cross.observed);
  return kExitOk;
}

int cmd_verify(const std::string& state_path, double tolerance) {
  const RegressionSession session = io::load_state_file(state_path);
  const ConsistencyReport rep = session.verify(tolerance);
  std::cout << fmt::format(
      "sm_deviation {:.17g}\npinv_deviation {:.17g}\nsb_deviation {:.17g}\nx_deviation {:.17g}\ntolerance {:.17g}\n"
      "pass {}\n",
      rep.sm_deviation, rep.pinv_deviation, rep.sb_deviation, rep.x_deviation, rep.tolerance, rep.pass);
  if (!rep.pass) spdlog::error("state {} is inconsistent (worst deviation {:.3e})", state_path, rep.worst());
  return rep.pass ? kExitOk : kExitConsistency;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Dynamic graph regression with sketched least squares"};
  app.require_subcommand(1);

  SolverFlags flags;
  std::string graph_path, values_path, updates_path, state_path, out, report;
  std::size_t verify_every = 0;
  double tolerance = kConsistencyTolerance;
  std::vector<std::string> backends;
  std::vector<std::uint64_t> seeds;

  auto* pre = app.add_subcommand("preprocess", "embed a graph, sketch and solve, write a state file");
  pre->add_option("GRAPH", graph_path, "graph file")->required()->check(CLI::ExistingFile);
  pre->add_option("VALUES", values_path, "measured values file")->required()->check(CLI::ExistingFile);
  add_solver_flags(pre, flags);
  pre->add_option("--seed", flags.seed, "sketch seed")->capture_default_str();
  pre->add_option("--out", out, "state file to write")->default_val("state.bin");

  auto* rep = app.add_subcommand("replay", "apply an update stream to a state file");
  rep->add_option("STATE", state_path, "state file")->required()->check(CLI::ExistingFile);
  rep->add_option("UPDATES", updates_path, "update stream")->required()->check(CLI::ExistingFile);
  rep->add_option("--verify-every", verify_every, "check consistency every N updates; 0 never")
      ->capture_default_str();
  rep->add_option("--out", out, "state file to write; defaults to STATE");
  rep->add_option("--report", report, "write REPORT.jsonl and REPORT.csv");

  auto* bench = app.add_subcommand("bench", "compare backends and seeds on one update stream");
  bench->add_option("GRAPH", graph_path, "graph file")->required()->check(CLI::ExistingFile);
  bench->add_option("VALUES", values_path, "measured values file")->required()->check(CLI::ExistingFile);
  bench->add_option("UPDATES", updates_path, "update stream")->required()->check(CLI::ExistingFile);
  add_solver_flags(bench, flags, false);
  bench->add_option("--backend", backends, "backend to run; repeatable")
      ->check(CLI::IsMember({"srht", "countsketch", "exact"}));
  bench->add_option("--seed", seeds, "seed to run; repeatable");
  bench->add_option("--verify-every", verify_every, "check consistency every N updates; 0 never")
      ->capture_default_str();
  bench->add_option("--report", report, "write REPORT.jsonl, REPORT.csv and REPORT.summary.csv");

  auto* ver = app.add_subcommand("verify", "recompute a state from scratch and compare");
  ver->add_option("STATE", state_path, "state file")->required()->check(CLI::ExistingFile);
  ver->add_option("--tolerance", tolerance, "relative tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (pre->parsed()) return cmd_preprocess(graph_path, values_path, flags, out);
    if (rep->parsed()) return cmd_replay(state_path, updates_path, verify_every, out, report);
    if (bench->parsed())
      return cmd_bench(graph_path, values_path, updates_path, flags, backends, seeds, verify_every, report);
    return cmd_verify(state_path, tolerance);
  } catch (const ConsistencyFailure& e) {
    spdlog::error("{}", e.what());
    return kExitConsistency;
  } catch (const ReplayError& e) {
    spdlog::error("{}", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitValidation;
  }
}
