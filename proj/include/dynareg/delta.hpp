#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dynareg/dense.hpp"
#include "dynareg/embedding.hpp"
#include "dynareg/graph.hpp"

namespace dynareg {

/// Rank-one row patch M += e_{c_index} * d^T.
struct UpdateVectorPair {
  std::size_t c_index = 0;
  double c_value = 1.0;
  DenseVector d;  // new row minus old row
};

enum class DeltaKind : std::uint8_t { kEdgeInsert, kEdgeDelete, kNodeInsert, kNodeDelete };

/// Everything the regression engine needs to follow one graph mutation.
/// Pair indices refer to the row order after the mutation.
struct GraphDelta {
  DeltaKind kind = DeltaKind::kEdgeInsert;
  std::vector<UpdateVectorPair> pairs;
  std::optional<DenseVector> new_row;      // node insertion: the appended row
  std::optional<DenseVector> removed_row;  // node deletion: the row before any edge removal
  std::optional<double> measured_value;    // node operations
  std::optional<NodeId> node_id;
  std::size_t node_index = 0;              // node operations: appended / removed row
  std::vector<NodeId> candidates;          // affected-candidate set that was re-embedded

  std::size_t rank() const { return pairs.size(); }
};

inline constexpr std::size_t kDefaultMaxNodeEdges = 16;

/// Nodes whose m-nearest neighborhood may change when edge (u, v) is
/// inserted (g has the edge) or deleted (g still has the edge). Pruned BFS
/// from each endpoint whose first step is forced through the other endpoint;
/// nodes past depth m are not visited and nodes at depth >= 2 with degree > m
/// are kept but not expanded. Returns a sorted id list containing u and v.
std::vector<NodeId> affected_candidates(const DynamicGraph& g, NodeId u, NodeId v, std::size_t m);

/// Same traversal; named for the graph state each variant expects.
std::vector<NodeId> affected_candidates_insert(const DynamicGraph& g_after, NodeId u, NodeId v, std::size_t m);
std::vector<NodeId> affected_candidates_delete(const DynamicGraph& g_before, NodeId u, NodeId v, std::size_t m);

enum class EdgeOp : std::uint8_t { kInsert, kDelete };

/// Applies the edge operation to g and returns the row patches against emb.
/// Throws std::invalid_argument if the operation is not applicable; g is
/// left untouched in that case.
GraphDelta delta_for_edge(DynamicGraph& g, EdgeOp op, NodeId u, NodeId v, const EmbeddingMatrix& emb);

GraphDelta delta_for_node_insert(DynamicGraph& g, NodeId new_id, std::span<const NodeId> neighbors,
                                 double measured_value, const EmbeddingMatrix& emb,
                                 std::size_t max_edges = kDefaultMaxNodeEdges);

/// measured_value is left empty; the caller owns the measured values.
GraphDelta delta_for_node_delete(DynamicGraph& g, NodeId id, const EmbeddingMatrix& emb,
                                 std::size_t max_edges = kDefaultMaxNodeEdges);

/// Applies a delta produced against emb. Row values stay integral.
void apply_delta(EmbeddingMatrix& emb, const GraphDelta& delta);

}  // namespace dynareg
