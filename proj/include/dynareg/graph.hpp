#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace dynareg {

/// Node identifiers are positive; 0 is reserved as the embedding sentinel.
using NodeId = std::uint32_t;
inline constexpr NodeId kSentinel = 0;

/// Undirected simple graph whose node order is insertion order. A node's
/// position in that order is its row in the embedding matrix.
class DynamicGraph {
 public:
  DynamicGraph() = default;

  /// Nodes 1..n in order, no edges.
  static DynamicGraph with_nodes(std::size_t n);

  std::size_t node_count() const { return order_.size(); }
  std::size_t edge_count() const { return edges_; }
  std::span<const NodeId> nodes() const { return order_; }

  bool has_node(NodeId id) const { return adj_.contains(id); }
  bool has_edge(NodeId u, NodeId v) const;

  /// Sorted neighbor list. Throws std::out_of_range for unknown ids.
  std::span<const NodeId> neighbors(NodeId id) const;
  std::size_t degree(NodeId id) const { return neighbors(id).size(); }

  /// Row index of the node. Throws std::out_of_range for unknown ids.
  std::size_t index_of(NodeId id) const;
  NodeId node_at(std::size_t index) const { return order_.at(index); }

  /// Appends an isolated node. Throws on id 0 or duplicates.
  void add_node(NodeId id);
  /// Removes an isolated node; later nodes shift down by one position.
  void remove_node(NodeId id);

  /// Throws std::invalid_argument on self-loops, duplicates or unknown ends.
  void add_edge(NodeId u, NodeId v);
  /// Throws std::invalid_argument when the edge is absent.
  void remove_edge(NodeId u, NodeId v);

  bool operator==(const DynamicGraph& o) const { return order_ == o.order_ && adj_ == o.adj_; }

 private:
  std::vector<NodeId> order_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::unordered_map<NodeId, std::vector<NodeId>> adj_;
  std::size_t edges_ = 0;
};

}  // namespace dynareg
