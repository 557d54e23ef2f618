#include "dynareg/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dynareg/linalg.hpp"
#include "dynareg/meyer.hpp"
#include "dynareg/rng.hpp"

namespace dynareg {

namespace {

constexpr double kRankWarningRatio = 1e-10;

void refresh_solution(RegressionState& s) { s.x_approx = s.sm_pinv * s.sb; }

void check_rank(RegressionState& s, const SvdResult& dec) {
  const std::size_t m = s.sm.cols();
  if (m == 0) return;
  if (s.sm.rows() < m) {
    s.warnings.push_back("sketched matrix has fewer rows (" + std::to_string(s.sm.rows()) + ") than columns (" +
                         std::to_string(m) + "); it cannot have full column rank");
    return;
  }
  const double smax = dec.sigma.front();
  const double smin = dec.sigma.back();
  if (smin <= kRankWarningRatio * smax) {
    s.warnings.push_back("sketched matrix is not of full column rank (sigma_min = " + std::to_string(smin) +
                         ", sigma_max = " + std::to_string(smax) + "); the approximation guarantee does not apply");
  }
}

void solve_sketched(RegressionState& s) {
  if (s.sm.rows() >= s.sm.cols()) {
    const SvdResult dec = svd(s.sm);
    check_rank(s, dec);
    s.sm_pinv = pinv_from_svd(dec);
  } else {
    check_rank(s, {});
    s.sm_pinv = pinv(s.sm);
  }
  refresh_solution(s);
}

void check_pair(const RegressionState& s, const UpdateVectorPair& p, std::size_t rows) {
  if (p.c_index >= rows) throw std::invalid_argument("update pair row index out of range");
  if (p.d.size() != s.m_width) throw std::invalid_argument("update pair width differs from embedding width");
}

// sm_pinv <- pinv(sm + c d^T), then sm <- sm + c d^T.
void rank_one(RegressionState& s, std::span<const double> c, std::span<const double> d) {
  s.sm_pinv = meyer_rank_one_pinv_update(s.sm, s.sm_pinv, c, d);
  add_outer(s.sm, 1.0, c, d);
}

std::size_t apply_pairs(RegressionState& s, const GraphDelta& delta) {
  std::size_t count = 0;
  if (auto* srht = std::get_if<SrhtSketch>(&s.sketch)) {
    for (const auto& p : delta.pairs) {
      check_pair(s, p, srht->n_logical);
      DenseVector col = srht_column(*srht, p.c_index);
      if (p.c_value != 1.0)
        for (double& x : col) x *= p.c_value;
      rank_one(s, col, p.d);
      ++count;
    }
  } else if (auto* cs = std::get_if<CountSketch>(&s.sketch)) {
    for (const auto& p : delta.pairs) {
      check_pair(s, p, cs->n());
      DenseVector col = cs->column(p.c_index);
      if (p.c_value != 1.0)
        for (double& x : col) x *= p.c_value;
      rank_one(s, col, p.d);
      ++count;
    }
  }
  return count;
}

void finish_update(RegressionState& s, UpdateOutcome& out) {
  ++s.updates_since_refresh;
  const bool scheduled = s.config.refresh_interval != 0 && s.updates_since_refresh >= s.config.refresh_interval;
  const std::uint64_t probe_seed = s.config.seed ^ (0x9e3779b97f4a7c15ULL * (s.pinv_refreshes + 1)) ^
                                   (s.updates_since_refresh << 32);
  if (scheduled || penrose_probe(s.sm, s.sm_pinv, probe_seed) > kPinvProbeTolerance) {
    s.sm_pinv = pinv(s.sm);
    s.updates_since_refresh = 0;
    ++s.pinv_refreshes;
    out.pinv_refreshed = true;
  }
  refresh_solution(s);
}

DenseVector probe_vector(std::size_t n, SplitMix64& rng) {
  DenseVector v(n);
  for (double& x : v) x = rng.sign();
  return v;
}

double ratio(double num, double den) { return den > 0.0 ? num / den : num; }

// The exact backend recomputes on every update; only sketched states count
// this as a rebuild.
UpdateOutcome rebuild(RegressionState& s, const EmbeddingMatrix& m_after, std::span<const double> b_after) {
  const bool sketched = s.config.backend != Backend::kExact;
  const std::size_t rebuilds = s.rebuilds + (sketched ? 1 : 0);
  s = preprocess(m_after.to_dense(), b_after, s.config);
  s.rebuilds = rebuilds;
  return {sketched, 0};
}

double relative_deviation(std::span<const double> got, std::span<const double> ref) {
  if (got.size() != ref.size()) return INFINITY;
  const double diff = max_abs_diff(got, ref);
  const double scale = max_abs(ref);
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::kSrht: return "srht";
    case Backend::kCountSketch: return "countsketch";
    case Backend::kExact: return "exact";
  }
  return "unknown";
}

Backend parse_backend(std::string_view name) {
  if (name == "srht") return Backend::kSrht;
  if (name == "countsketch") return Backend::kCountSketch;
  if (name == "exact") return Backend::kExact;
  throw std::invalid_argument("unknown backend '" + std::string(name) + "'");
}

RegressionState preprocess(const DenseMatrix& m, std::span<const double> b, const SolverConfig& config) {
  if (m.rows() != b.size()) throw std::invalid_argument("preprocess: measured values do not match embedding rows");
  if (!(config.eps > 0.0 && config.eps < 1.0)) throw std::invalid_argument("preprocess: eps must lie in (0, 1)");
  if (!all_finite(m.data()) || !all_finite(b)) throw std::invalid_argument("preprocess: non-finite input");

  RegressionState s;
  s.config = config;
  s.m_width = m.cols();
  const std::size_t n = m.rows();
  const std::size_t width = std::max<std::size_t>(m.cols(), 1);

  switch (config.backend) {
    case Backend::kSrht: {
      std::size_t r = config.sketch_rows;
      if (r == 0) {
        const SampleCount count =
            srht_sample_count(std::max(n, width), width, config.eps, config.mode, config.srht_constant);
        if (count.clamped)
          s.warnings.push_back("paper-exact SRHT sample count exceeds the padded row count; clamped to " +
                               std::to_string(count.rows));
        r = count.rows;
      }
      SrhtSketch sk = srht_new(n, r, config.seed);
      s.sm = srht_apply(sk, m);
      s.sb = srht_apply(sk, b);
      s.sketch = std::move(sk);
      break;
    }
    case Backend::kCountSketch: {
      const std::size_t q = config.sketch_rows != 0
                                ? config.sketch_rows
                                : countsketch_sample_count(width, config.eps, config.mode, config.countsketch_constant);
      CountSketch sk(n, q, config.seed);
      s.sm = sk.apply(m);
      s.sb = sk.apply(b);
      s.sketch = std::move(sk);
      break;
    }
    case Backend::kExact:
      s.sm = m;
      s.sb.assign(b.begin(), b.end());
      break;
  }
  solve_sketched(s);
  return s;
}

UpdateOutcome update_edge(RegressionState& state, const GraphDelta& delta, const EmbeddingMatrix& m_after,
                          std::span<const double> b_after) {
  if (delta.kind != DeltaKind::kEdgeInsert && delta.kind != DeltaKind::kEdgeDelete)
    throw std::invalid_argument("update_edge: delta is not an edge operation");
  if (state.config.backend == Backend::kExact) return rebuild(state, m_after, b_after);
  UpdateOutcome out;
  out.rank_one_updates = apply_pairs(state, delta);
  finish_update(state, out);
  return out;
}

UpdateOutcome update_node_insert(RegressionState& state, const GraphDelta& delta, const EmbeddingMatrix& m_after,
                                 std::span<const double> b_after) {
  if (delta.kind != DeltaKind::kNodeInsert || !delta.new_row || !delta.measured_value)
    throw std::invalid_argument("update_node_insert: malformed node insertion delta");
  auto* cs = std::get_if<CountSketch>(&state.sketch);
  if (cs == nullptr) return rebuild(state, m_after, b_after);
  if (delta.new_row->size() != state.m_width) throw std::invalid_argument("update_node_insert: row width mismatch");

  const kernels::SketchEntry e = cs->add_column(delta.node_index);
  DenseVector c(cs->q(), 0.0);
  c[e.row] = e.sign;
  rank_one(state, c, *delta.new_row);
  UpdateOutcome out;
  out.rank_one_updates = 1 + apply_pairs(state, delta);
  state.sb[e.row] += e.sign * *delta.measured_value;
  finish_update(state, out);
  return out;
}

UpdateOutcome update_node_delete(RegressionState& state, const GraphDelta& delta, const EmbeddingMatrix& m_after,
                                 std::span<const double> b_after) {
  if (delta.kind != DeltaKind::kNodeDelete || !delta.removed_row || !delta.measured_value)
    throw std::invalid_argument("update_node_delete: malformed node deletion delta");
  auto* cs = std::get_if<CountSketch>(&state.sketch);
  if (cs == nullptr) return rebuild(state, m_after, b_after);
  if (delta.removed_row->size() != state.m_width) throw std::invalid_argument("update_node_delete: row width mismatch");

  const kernels::SketchEntry e = cs->remove_column(delta.node_index);
  DenseVector c(cs->q(), 0.0);
  c[e.row] = -e.sign;
  rank_one(state, c, *delta.removed_row);
  UpdateOutcome out;
  out.rank_one_updates = 1 + apply_pairs(state, delta);
  state.sb[e.row] -= e.sign * *delta.measured_value;
  finish_update(state, out);
  return out;
}

UpdateOutcome apply_update(RegressionState& state, const GraphDelta& delta, const EmbeddingMatrix& m_after,
                           std::span<const double> b_after) {
  switch (delta.kind) {
    case DeltaKind::kEdgeInsert:
    case DeltaKind::kEdgeDelete: return update_edge(state, delta, m_after, b_after);
    case DeltaKind::kNodeInsert: return update_node_insert(state, delta, m_after, b_after);
    case DeltaKind::kNodeDelete: return update_node_delete(state, delta, m_after, b_after);
  }
  throw std::invalid_argument("apply_update: unknown delta kind");
}

double penrose_probe(const DenseMatrix& a, const DenseMatrix& x, std::uint64_t seed) {
  if (a.rows() != x.cols() || a.cols() != x.rows()) throw std::invalid_argument("penrose_probe: shape mismatch");
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  SplitMix64 rng(seed);
  const DenseVector w = probe_vector(a.cols(), rng);
  const DenseVector t = probe_vector(a.cols(), rng);
  const DenseVector y = probe_vector(a.rows(), rng);
  const DenseVector z = probe_vector(a.rows(), rng);

  // A X A w = A w
  const DenseVector aw = a * w;
  const DenseVector axaw = a * (x * aw);
  double worst = ratio(max_abs_diff(axaw, aw), max_abs(aw));
  // X A X z = X z
  const DenseVector xz = x * z;
  const DenseVector xaxz = x * (a * xz);
  worst = std::max(worst, ratio(max_abs_diff(xaxz, xz), max_abs(xz)));
  // (A X)^T = A X, probed as y^T (A X) z = z^T (A X) y
  const DenseVector axz = a * xz;
  const DenseVector axy = a * (x * y);
  worst = std::max(worst, ratio(std::abs(dot(y, axz) - dot(z, axy)), norm2(y) * norm2(z)));
  // (X A)^T = X A
  const DenseVector xat = x * (a * t);
  const DenseVector xaw = x * aw;
  worst = std::max(worst, ratio(std::abs(dot(w, xat) - dot(t, xaw)), norm2(w) * norm2(t)));
  return worst;
}

DenseVector exact_solve(const DenseMatrix& m, std::span<const double> b) { return least_squares_solve(m, b); }

double residual(const DenseMatrix& m, std::span<const double> b, std::span<const double> x) {
  if (m.rows() != b.size() || m.cols() != x.size()) throw std::invalid_argument("residual: dimension mismatch");
  DenseVector r = m * x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return norm2(r);
}

double ConsistencyReport::worst() const {
  return std::max(std::max(sm_deviation, pinv_deviation), std::max(sb_deviation, x_deviation));
}

ConsistencyReport verify_consistency(const RegressionState& state, const DenseMatrix& m, std::span<const double> b,
                                     double tolerance) {
  ConsistencyReport rep;
  rep.tolerance = tolerance;
  if (m.rows() != b.size() || m.cols() != state.m_width) {
    rep.sm_deviation = rep.pinv_deviation = rep.sb_deviation = rep.x_deviation = INFINITY;
    return rep;
  }
  DenseMatrix sm;
  DenseVector sb;
  if (const auto* srht = std::get_if<SrhtSketch>(&state.sketch)) {
    if (srht->n_logical != m.rows()) {
      rep.sm_deviation = rep.pinv_deviation = rep.sb_deviation = rep.x_deviation = INFINITY;
      return rep;
    }
    sm = srht_apply(*srht, m);
    sb = srht_apply(*srht, b);
  } else if (const auto* cs = std::get_if<CountSketch>(&state.sketch)) {
    if (cs->n() != m.rows()) {
      rep.sm_deviation = rep.pinv_deviation = rep.sb_deviation = rep.x_deviation = INFINITY;
      return rep;
    }
    sm = cs->apply(m);
    sb = cs->apply(b);
  } else {
    sm = m;
    sb.assign(b.begin(), b.end());
  }
  const DenseMatrix sm_pinv = pinv(sm);
  const DenseVector x = sm_pinv * sb;
  rep.sm_deviation = state.sm.rows() == sm.rows() ? relative_deviation(state.sm.data(), sm.data()) : INFINITY;
  rep.pinv_deviation =
      state.sm_pinv.rows() == sm_pinv.rows() ? relative_deviation(state.sm_pinv.data(), sm_pinv.data()) : INFINITY;
  rep.sb_deviation = relative_deviation(state.sb, sb);
  rep.x_deviation = relative_deviation(state.x_approx, x);
  rep.pass = rep.worst() <= tolerance;
  return rep;
}

}  // namespace dynareg
