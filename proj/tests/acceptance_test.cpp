// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "dynareg/io.hpp"
#include "dynareg/linalg.hpp"
#include "dynareg/meyer.hpp"
#include "dynareg/replay.hpp"
#include "dynareg/session.hpp"
#include "graph_fixtures.hpp"
#include "meyer_cases.hpp"
#include "stream_fixtures.hpp"
#include "test_util.hpp"

using namespace dynareg;
using namespace dynareg::testing;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

bool run_criterion(int id, const char* name, double budget_s, const std::function<Verdict()>& body) {
  const auto start = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, fmt::format("exception: {}", e.what())};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool in_budget = secs < budget_s;
  const bool pass = v.pass && in_budget;
  std::printf("%s [%d] %s: %s (%.1f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), secs,
              budget_s, in_budget ? "" : ", exceeded");
  std::fflush(stdout);
  return pass;
}

// 1. Rank-one pseudoinverse updates against the SVD oracle.
Verdict meyer_oracle() {
  std::mt19937_64 rng(20240601);
  constexpr int kPerCase = 100;
  std::size_t instances = 0, misrouted = 0;
  double worst = 0.0;
  for (MeyerCase target : kAllMeyerCases) {
    for (int t = 0; t < kPerCase; ++t) {
      const MeyerInstance inst = make_meyer_instance(target, rng);
      const MeyerUpdate up = meyer_update(inst.a, pinv(inst.a), inst.c, inst.d);
      DenseMatrix updated = inst.a;
      add_outer(updated, 1.0, inst.c, inst.d);
      const double err = frob_diff(up.pinv, pinv(updated)) / (1.0 + frob(updated));
      worst = std::max(worst, err);
      misrouted += up.branch != target ? 1 : 0;
      ++instances;
    }
  }
  const bool pass = instances >= 500 && misrouted == 0 && worst <= 1e-8;
  return {pass, fmt::format("{} instances over 6 cases, {} misrouted, worst error {:.2e} (limit 1e-8 scaled)",
                            instances, misrouted, worst)};
}

// 2. Delta-patched embedding equals the rebuild and Q covers the changed rows.
Verdict embedding_oracle() {
  std::mt19937_64 rng(777);
  std::size_t ops = 0, mismatches = 0, uncovered = 0;
  for (int graph = 0; graph < 200; ++graph) {
    const std::size_t n = 10 + rng() % 191;
    const std::size_t m = 1 + graph % 3;
    DynamicGraph g = sparse_random_graph(n, 1.0 + static_cast<double>(rng() % 40) / 10.0, rng);
    EmbeddingMatrix emb = build_embedding(g, m);
    RandomUpdater update{rng, static_cast<NodeId>(n + 1)};
    for (int op = 0; op < 50; ++op) {
      const auto before = row_map(g, emb);
      const GraphDelta delta = update(g, emb);
      apply_delta(emb, delta);
      const EmbeddingMatrix rebuilt = brute_force_embedding(g, m);
      mismatches += emb == rebuilt ? 0 : 1;
      if (emb != rebuilt) emb = rebuilt;
      for (NodeId id : changed_between(before, row_map(g, rebuilt)))
        uncovered += std::binary_search(delta.candidates.begin(), delta.candidates.end(), id) ? 0 : 1;
      ++ops;
    }
  }
  return {mismatches == 0 && uncovered == 0,
          fmt::format("200 graphs, {} ops, {} patched/rebuilt mismatches, {} changed rows outside Q", ops, mismatches,
                      uncovered)};
}

// 3. Incremental state equals the from-scratch state.
Verdict sketch_consistency() {
  std::string detail;
  bool pass = true;
  for (Backend backend : {Backend::kSrht, Backend::kCountSketch}) {
    std::size_t checks = 0, failures = 0, rebuilds = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      std::mt19937_64 rng(seed * 1000 + static_cast<std::uint64_t>(backend));
      SolverConfig c;
      c.backend = backend;
      c.seed = seed;
      RegressionSession s(sparse_random_graph(256, 3.0, rng), 3, random_values(256, rng), c);
      NodeId next = 257;
      for (int step = 1; step <= 500; ++step) {
        s.apply(random_record(s.graph(), rng, next));
        if (step % 10 != 0) continue;
        const ConsistencyReport rep = s.verify(kConsistencyTolerance);
        worst = std::max(worst, rep.worst());
        failures += rep.pass ? 0 : 1;
        ++checks;
      }
      rebuilds += s.state().rebuilds;
    }
    pass = pass && failures == 0;
    detail += fmt::format("{}{}: 4x500 updates, {} checks, {} failures, worst {:.2e}, {} rebuilds",
                          detail.empty() ? "" : "; ", to_string(backend), checks, failures, worst, rebuilds);
  }
  return {pass, detail};
}

// 4. Empirical probability that the sketched residual is within 1 + eps.
struct QualityRun {
  std::size_t rows = 0;
  std::size_t successes = 0;
};

QualityRun quality_trials(Backend backend, std::size_t rows) {
  constexpr std::size_t n = 1024, m = 4;
  constexpr double eps = 0.3;
  QualityRun out{rows, 0};
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(900000 + trial);
    DenseMatrix a;
    for (;;) {
      a = build_embedding(sparse_random_graph(n, 3.0, rng), m).to_dense();
      const SvdResult dec = svd(a);
      if (dec.sigma.back() > 1e-10 * dec.sigma.front()) break;
    }
    const DenseVector b = random_vector(n, rng);
    SolverConfig c;
    c.backend = backend;
    c.eps = eps;
    c.seed = trial + 1;
    c.sketch_rows = rows;
    const RegressionState s = preprocess(a, b, c);
    const double approx = residual(a, b, s.x_approx);
    const double best = residual(a, b, exact_solve(a, b));
    out.successes += approx <= (1.0 + eps) * best ? 1 : 0;
  }
  return out;
}

Verdict residual_quality() {
  std::string detail;
  bool pass = true;
  struct Target {
    Backend backend;
    std::size_t bar;
    std::size_t start;
  };
  const Target targets[] = {
      {Backend::kSrht, 80, srht_sample_count(1024, 4, 0.3, SizingMode::kPractical).rows},
      {Backend::kCountSketch, 67, countsketch_sample_count(4, 0.3, SizingMode::kPractical)},
  };
  for (const Target& t : targets) {
    QualityRun run = quality_trials(t.backend, t.start);
    std::string trail = fmt::format("{}:{}", run.rows, run.successes);
    while (run.successes < t.bar && run.rows < (std::size_t{1} << 16)) {
      run = quality_trials(t.backend, run.rows * 2);
      trail += fmt::format(" {}:{}", run.rows, run.successes);
    }
    pass = pass && run.successes >= t.bar;
    detail += fmt::format("{}{} {}/100 (bar {}) at {} rows [size:successes {}]", detail.empty() ? "" : "; ",
                          to_string(t.backend), run.successes, t.bar, run.rows, trail);
  }
  return {pass, detail};
}

// 5. Per-update cost versus n.
void apply_to_graph(DynamicGraph& g, const UpdateRecord& r) {
  if (const auto* e = std::get_if<EdgeInsert>(&r)) {
    g.add_edge(e->u, e->v);
  } else if (const auto* e = std::get_if<EdgeDelete>(&r)) {
    g.remove_edge(e->u, e->v);
  } else if (const auto* e = std::get_if<NodeInsert>(&r)) {
    g.add_node(e->id);
    for (NodeId nb : e->neighbors) g.add_edge(e->id, nb);
  } else {
    const NodeId id = std::get<NodeDelete>(r).id;
    const std::vector<NodeId> nbrs(g.neighbors(id).begin(), g.neighbors(id).end());
    for (NodeId nb : nbrs) g.remove_edge(id, nb);
    g.remove_node(id);
  }
}

double median_update_ns(Backend backend, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SolverConfig c;
  c.backend = backend;
  c.eps = 0.3;
  c.seed = seed;
  RegressionSession s(sparse_random_graph(n, 3.0, rng), 4, random_values(n, rng), c);
  std::vector<UpdateRecord> records;
  DynamicGraph shadow = s.graph();
  NodeId next = static_cast<NodeId>(n + 1);
  for (int i = 0; i < 300; ++i) {
    records.push_back(random_record(shadow, rng, next));
    apply_to_graph(shadow, records.back());
  }
  const ReplayResult res = replay(s, records, {.verify_every = 0, .residuals = false});
  std::vector<double> times;
  for (const auto& u : res.updates) times.push_back(static_cast<double>(u.wall_ns));
  return median(times);
}

Verdict update_scaling() {
  constexpr std::size_t small = 1u << 10, large = 1u << 14;
  const double cs_small = median_update_ns(Backend::kCountSketch, small, 5);
  const double cs_large = median_update_ns(Backend::kCountSketch, large, 5);
  const double ex_small = median_update_ns(Backend::kExact, small, 5);
  const double ex_large = median_update_ns(Backend::kExact, large, 5);
  const double cs_ratio = cs_large / cs_small;
  const double ex_ratio = ex_large / ex_small;
  return {cs_ratio < 3.0 && ex_ratio > 8.0,
          fmt::format("countsketch median {:.0f} -> {:.0f} ns (x{:.2f}, limit < 3); exact median {:.0f} -> {:.0f} ns "
                      "(x{:.2f}, limit > 8)",
                      cs_small, cs_large, cs_ratio, ex_small, ex_large, ex_ratio)};
}

// 6. Structural invariants.
Verdict structural_invariants() {
  std::mt19937_64 rng(4242);
  std::vector<std::string> failed;

  double fwht_err = 0.0;
  for (std::size_t len : {1u, 2u, 16u, 1024u, 4096u}) {
    const DenseVector v = random_vector(len, rng);
    fwht_err = std::max(fwht_err, max_abs_diff(fwht_normalized(fwht_normalized(v)), v) / (1.0 + max_abs(v)));
  }
  if (fwht_err > 1e-12) failed.push_back("fwht involution");

  double penrose_worst = 0.0;
  for (Backend backend : {Backend::kSrht, Backend::kCountSketch}) {
    SolverConfig c;
    c.backend = backend;
    c.seed = 99;
    RegressionSession s(sparse_random_graph(128, 3.0, rng), 3, random_values(128, rng), c);
    NodeId next = 129;
    for (int step = 0; step < 200; ++step) {
      s.apply(random_record(s.graph(), rng, next));
      penrose_worst = std::max(penrose_worst, penrose(s.state().sm, s.state().sm_pinv).worst());
    }
  }
  if (penrose_worst > 1e-8) failed.push_back("penrose after every update");

  double pad_err = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t rows = 5 + rng() % 40, cols = 1 + rng() % 5, pad = 1 + rng() % 30;
    const DenseMatrix a = random_matrix(rows, cols, rng);
    const DenseVector b = random_vector(rows, rng);
    DenseMatrix padded(rows + pad, cols);
    DenseVector pb(rows + pad, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) padded(i, j) = a(i, j);
      pb[i] = b[i];
    }
    const DenseVector x = least_squares_solve(a, b);
    pad_err = std::max(pad_err, max_abs_diff(least_squares_solve(padded, pb), x) / (1.0 + max_abs(x)));
  }
  if (pad_err > 1e-10) failed.push_back("zero-padding neutrality");

  std::size_t bad_columns = 0;
  for (int t = 0; t < 20; ++t) {
    CountSketch cs(50, 1 + rng() % 20, rng());
    for (int op = 0; op < 200; ++op) {
      if (cs.n() > 0 && rng() % 2 == 0)
        cs.remove_column(rng() % cs.n());
      else
        cs.add_column(cs.n());
    }
    for (std::size_t j = 0; j < cs.n(); ++j) {
      const DenseVector col = cs.column(j);
      std::size_t nonzero = 0;
      bool unit = true;
      for (double x : col) {
        if (x != 0.0) ++nonzero;
        if (x != 0.0 && x != 1.0 && x != -1.0) unit = false;
      }
      bad_columns += nonzero == 1 && unit ? 0 : 1;
    }
  }
  if (bad_columns != 0) failed.push_back("countsketch single nonzero per column");

  bool identical = true;
  for (Backend backend : {Backend::kSrht, Backend::kCountSketch}) {
    std::string bytes[2];
    for (std::string& out : bytes) {
      std::mt19937_64 local(31337);
      SolverConfig c;
      c.backend = backend;
      c.seed = 5;
      RegressionSession s(sparse_random_graph(96, 3.0, local), 3, random_values(96, local), c);
      NodeId next = 97;
      for (int step = 0; step < 60; ++step) s.apply(random_record(s.graph(), local, next));
      std::ostringstream os(std::ios::binary);
      io::save_state(os, s);
      out = os.str();
    }
    identical = identical && bytes[0] == bytes[1];
  }
  if (!identical) failed.push_back("seed determinism");

  std::string detail = fmt::format(
      "fwht {:.1e}, penrose {:.1e}, padding {:.1e}, bad sketch columns {}, state files {}", fwht_err, penrose_worst,
      pad_err, bad_columns, identical ? "identical" : "differ");
  if (!failed.empty()) {
    detail += "; failed:";
    for (const auto& f : failed) detail += " " + f + ";";
  }
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  int failures = 0;
  failures += run_criterion(1, "meyer-oracle", 10, meyer_oracle) ? 0 : 1;
  failures += run_criterion(2, "embedding-oracle", 120, embedding_oracle) ? 0 : 1;
  failures += run_criterion(3, "sketch-consistency", 300, sketch_consistency) ? 0 : 1;
  failures += run_criterion(4, "residual-quality", 600, residual_quality) ? 0 : 1;
  failures += run_criterion(5, "update-scaling", 600, update_scaling) ? 0 : 1;
  failures += run_criterion(6, "structural-invariants", 60, structural_invariants) ? 0 : 1;
  std::printf("%d of 6 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
