#include "dynareg/delta.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace dynareg {

namespace {

// BFS from `source` whose only first step is `through`.
void pruned_bfs(const DynamicGraph& g, NodeId source, NodeId through, std::size_t m,
                std::unordered_set<NodeId>& out) {
  std::unordered_set<NodeId> seen{source, through};
  std::deque<std::pair<NodeId, std::size_t>> queue{{through, 1}};
  while (!queue.empty()) {
    const auto [x, depth] = queue.front();
    queue.pop_front();
    if (depth >= m) continue;
    // A hub at depth >= 2 already has m nodes strictly closer to each of its
    // neighbors than `source`.
    if (depth >= 2 && g.degree(x) > m) continue;
    for (NodeId y : g.neighbors(x)) {
      if (!seen.insert(y).second) continue;
      out.insert(y);
      queue.emplace_back(y, depth + 1);
    }
  }
}

void check_edge_args(const DynamicGraph& g, NodeId u, NodeId v) {
  if (u == v) throw std::invalid_argument("self-loop on node " + std::to_string(u));
  if (!g.has_node(u)) throw std::invalid_argument("unknown node " + std::to_string(u));
  if (!g.has_node(v)) throw std::invalid_argument("unknown node " + std::to_string(v));
}

DenseVector row_difference(std::span<const NodeId> now, std::span<const NodeId> before) {
  DenseVector d(now.size());
  for (std::size_t j = 0; j < now.size(); ++j) d[j] = static_cast<double>(now[j]) - static_cast<double>(before[j]);
  return d;
}

// Re-embeds every candidate still in g and records rows that moved.
// old_index maps a node's current position to its row in emb.
template <typename OldIndex>
void collect_pairs(const DynamicGraph& g, const std::unordered_set<NodeId>& candidates, const EmbeddingMatrix& emb,
                   OldIndex old_index, GraphDelta& delta, NodeId skip = kSentinel) {
  std::vector<NodeId> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  delta.candidates = sorted;
  std::vector<std::pair<std::size_t, DenseVector>> found;
  for (NodeId w : sorted) {
    if (w == skip || !g.has_node(w)) continue;
    const std::size_t now = g.index_of(w);
    const auto before = emb.row(old_index(now));
    const std::vector<NodeId> fresh = mnn_embed_node(g, w, emb.width());
    if (std::equal(fresh.begin(), fresh.end(), before.begin())) continue;
    found.emplace_back(now, row_difference(fresh, before));
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [index, d] : found) delta.pairs.push_back({index, 1.0, std::move(d)});
}

NodeId to_id(double x) { return static_cast<NodeId>(std::llround(x)); }

}  // namespace

std::vector<NodeId> affected_candidates(const DynamicGraph& g, NodeId u, NodeId v, std::size_t m) {
  if (!g.has_edge(u, v))
    throw std::invalid_argument("affected_candidates: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                ") is absent");
  std::unordered_set<NodeId> q{u, v};
  pruned_bfs(g, v, u, m, q);
  pruned_bfs(g, u, v, m, q);
  std::vector<NodeId> out(q.begin(), q.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> affected_candidates_insert(const DynamicGraph& g_after, NodeId u, NodeId v, std::size_t m) {
  return affected_candidates(g_after, u, v, m);
}

std::vector<NodeId> affected_candidates_delete(const DynamicGraph& g_before, NodeId u, NodeId v, std::size_t m) {
  return affected_candidates(g_before, u, v, m);
}

GraphDelta delta_for_edge(DynamicGraph& g, EdgeOp op, NodeId u, NodeId v, const EmbeddingMatrix& emb) {
  check_edge_args(g, u, v);
  if (emb.rows() != g.node_count()) throw std::invalid_argument("delta_for_edge: embedding does not match graph");
  GraphDelta delta;
  const std::size_t m = emb.width();
  std::vector<NodeId> q;
  if (op == EdgeOp::kInsert) {
    g.add_edge(u, v);  // throws on duplicates
    q = affected_candidates(g, u, v, m);
    delta.kind = DeltaKind::kEdgeInsert;
  } else {
    q = affected_candidates(g, u, v, m);  // throws when absent
    g.remove_edge(u, v);
    delta.kind = DeltaKind::kEdgeDelete;
  }
  collect_pairs(g, std::unordered_set<NodeId>(q.begin(), q.end()), emb, [](std::size_t i) { return i; }, delta);
  return delta;
}

GraphDelta delta_for_node_insert(DynamicGraph& g, NodeId new_id, std::span<const NodeId> neighbors,
                                 double measured_value, const EmbeddingMatrix& emb, std::size_t max_edges) {
  if (new_id == kSentinel) throw std::invalid_argument("node id 0 is reserved");
  if (g.has_node(new_id)) throw std::invalid_argument("duplicate node " + std::to_string(new_id));
  if (neighbors.size() > max_edges)
    throw std::invalid_argument("node " + std::to_string(new_id) + " brings " + std::to_string(neighbors.size()) +
                                " edges, limit is " + std::to_string(max_edges));
  if (emb.rows() != g.node_count()) throw std::invalid_argument("delta_for_node_insert: embedding does not match graph");
  std::unordered_set<NodeId> distinct;
  for (NodeId nb : neighbors) {
    if (nb == new_id) throw std::invalid_argument("self-loop on node " + std::to_string(new_id));
    if (!g.has_node(nb)) throw std::invalid_argument("unknown neighbor " + std::to_string(nb));
    if (!distinct.insert(nb).second) throw std::invalid_argument("repeated neighbor " + std::to_string(nb));
  }

  GraphDelta delta;
  delta.kind = DeltaKind::kNodeInsert;
  delta.node_id = new_id;
  delta.node_index = g.node_count();
  delta.measured_value = measured_value;

  // Isolated insertion changes no existing row; each edge is then a plain
  // insertion whose candidates accumulate.
  g.add_node(new_id);
  std::unordered_set<NodeId> q{new_id};
  for (NodeId nb : neighbors) {
    g.add_edge(new_id, nb);
    for (NodeId w : affected_candidates(g, new_id, nb, emb.width())) q.insert(w);
  }
  const std::vector<NodeId> row = mnn_embed_node(g, new_id, emb.width());
  delta.new_row = DenseVector(row.begin(), row.end());
  collect_pairs(g, q, emb, [](std::size_t i) { return i; }, delta, new_id);
  return delta;
}

GraphDelta delta_for_node_delete(DynamicGraph& g, NodeId id, const EmbeddingMatrix& emb, std::size_t max_edges) {
  if (!g.has_node(id)) throw std::invalid_argument("unknown node " + std::to_string(id));
  if (g.degree(id) > max_edges)
    throw std::invalid_argument("node " + std::to_string(id) + " has degree " + std::to_string(g.degree(id)) +
                                ", limit is " + std::to_string(max_edges));
  if (emb.rows() != g.node_count()) throw std::invalid_argument("delta_for_node_delete: embedding does not match graph");

  GraphDelta delta;
  delta.kind = DeltaKind::kNodeDelete;
  delta.node_id = id;
  const std::size_t removed = g.index_of(id);
  delta.node_index = removed;
  const auto old_row = emb.row(removed);
  delta.removed_row = DenseVector(old_row.begin(), old_row.end());

  std::unordered_set<NodeId> q{id};
  const std::vector<NodeId> incident(g.neighbors(id).begin(), g.neighbors(id).end());
  for (NodeId nb : incident) {
    for (NodeId w : affected_candidates(g, id, nb, emb.width())) q.insert(w);
    g.remove_edge(id, nb);
  }
  g.remove_node(id);
  collect_pairs(g, q, emb, [removed](std::size_t i) { return i >= removed ? i + 1 : i; }, delta, id);
  return delta;
}

void apply_delta(EmbeddingMatrix& emb, const GraphDelta& delta) {
  const std::size_t m = emb.width();
  std::vector<NodeId> row(m);
  if (delta.kind == DeltaKind::kNodeInsert) {
    if (!delta.new_row || delta.new_row->size() != m) throw std::invalid_argument("apply_delta: missing new row");
    std::transform(delta.new_row->begin(), delta.new_row->end(), row.begin(), to_id);
    emb.append_row(row);
  } else if (delta.kind == DeltaKind::kNodeDelete) {
    emb.erase_row(delta.node_index);
  }
  for (const auto& p : delta.pairs) {
    if (p.d.size() != m) throw std::invalid_argument("apply_delta: update vector width mismatch");
    const auto current = emb.row(p.c_index);
    for (std::size_t j = 0; j < m; ++j) row[j] = to_id(static_cast<double>(current[j]) + p.c_value * p.d[j]);
    emb.set_row(p.c_index, row);
  }
}

}  // namespace dynareg
