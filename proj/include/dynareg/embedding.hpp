#pragma once

#include <span>
#include <vector>

#include "dynareg/dense.hpp"
#include "dynareg/graph.hpp"

namespace dynareg {

/// n x m matrix of node ids: row i lists the m nearest nodes of the i-th
/// node, ordered by (hop distance, id), padded with the sentinel 0.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  explicit EmbeddingMatrix(std::size_t m) : m_(m) {}

  std::size_t width() const { return m_; }
  std::size_t rows() const { return m_ == 0 ? 0 : ids_.size() / m_; }

  std::span<const NodeId> row(std::size_t i) const { return {ids_.data() + i * m_, m_}; }
  void set_row(std::size_t i, std::span<const NodeId> r);
  void append_row(std::span<const NodeId> r);
  void erase_row(std::size_t i);

  DenseMatrix to_dense() const;

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::size_t m_ = 0;
  std::vector<NodeId> ids_;
};

/// m-nearest neighborhood of v by breadth-first search, ties broken by id.
/// Throws std::out_of_range for an unknown node.
std::vector<NodeId> mnn_embed_node(const DynamicGraph& g, NodeId v, std::size_t m);

EmbeddingMatrix build_embedding(const DynamicGraph& g, std::size_t m);

}  // namespace dynareg
