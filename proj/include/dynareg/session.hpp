#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "dynareg/delta.hpp"
#include "dynareg/embedding.hpp"
#include "dynareg/engine.hpp"
#include "dynareg/graph.hpp"

namespace dynareg {

struct EdgeInsert {
  NodeId u = 0;
  NodeId v = 0;
};
struct EdgeDelete {
  NodeId u = 0;
  NodeId v = 0;
};
struct NodeInsert {
  NodeId id = 0;
  double value = 0.0;
  std::vector<NodeId> neighbors;
};
struct NodeDelete {
  NodeId id = 0;
};

using UpdateRecord = std::variant<EdgeInsert, EdgeDelete, NodeInsert, NodeDelete>;

struct SessionStep {
  GraphDelta delta;
  UpdateOutcome outcome;
};

/// Graph, embedding, measured values and regression state kept in step.
class RegressionSession {
 public:
  RegressionSession(DynamicGraph graph, std::size_t m, std::vector<double> values, const SolverConfig& config,
                    std::size_t max_node_edges = kDefaultMaxNodeEdges);

  /// Reassembles a session from a stored state; the embedding is rebuilt.
  static RegressionSession restore(DynamicGraph graph, std::size_t m, std::vector<double> values,
                                   RegressionState state, std::size_t max_node_edges = kDefaultMaxNodeEdges);

  /// Validation failures throw std::invalid_argument and leave the session unchanged.
  SessionStep apply(const UpdateRecord& record);

  ConsistencyReport verify(double tolerance = kConsistencyTolerance) const;
  double approx_residual() const;
  double exact_residual() const;

  const DynamicGraph& graph() const { return graph_; }
  const EmbeddingMatrix& embedding() const { return emb_; }
  std::span<const double> values() const { return values_; }
  const RegressionState& state() const { return state_; }
  RegressionState& mutable_state() { return state_; }
  std::size_t width() const { return m_; }
  std::size_t max_node_edges() const { return max_node_edges_; }

 private:
  RegressionSession() = default;

  DynamicGraph graph_;
  std::size_t m_ = 0;
  EmbeddingMatrix emb_;
  std::vector<double> values_;
  RegressionState state_;
  std::size_t max_node_edges_ = kDefaultMaxNodeEdges;
};

}  // namespace dynareg
