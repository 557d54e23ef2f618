#include "dynareg/embedding.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace dynareg {

void EmbeddingMatrix::set_row(std::size_t i, std::span<const NodeId> r) {
  if (r.size() != m_) throw std::invalid_argument("EmbeddingMatrix: row width mismatch");
  if (i >= rows()) throw std::out_of_range("EmbeddingMatrix: row index out of range");
  std::copy(r.begin(), r.end(), ids_.begin() + static_cast<std::ptrdiff_t>(i * m_));
}

void EmbeddingMatrix::append_row(std::span<const NodeId> r) {
  if (r.size() != m_) throw std::invalid_argument("EmbeddingMatrix: row width mismatch");
  ids_.insert(ids_.end(), r.begin(), r.end());
}

void EmbeddingMatrix::erase_row(std::size_t i) {
  if (i >= rows()) throw std::out_of_range("EmbeddingMatrix: row index out of range");
  auto first = ids_.begin() + static_cast<std::ptrdiff_t>(i * m_);
  ids_.erase(first, first + static_cast<std::ptrdiff_t>(m_));
}

DenseMatrix EmbeddingMatrix::to_dense() const {
  DenseMatrix out(rows(), m_);
  auto dst = out.data();
  for (std::size_t i = 0; i < ids_.size(); ++i) dst[i] = static_cast<double>(ids_[i]);
  return out;
}

std::vector<NodeId> mnn_embed_node(const DynamicGraph& g, NodeId v, std::size_t m) {
  if (!g.has_node(v)) throw std::out_of_range("mnn_embed_node: unknown node " + std::to_string(v));
  std::vector<NodeId> row;
  row.reserve(m);
  std::unordered_set<NodeId> seen{v};
  std::vector<NodeId> frontier{v};
  std::vector<NodeId> next;
  // Whole levels are gathered before cutting so the id tie-break is exact.
  while (row.size() < m && !frontier.empty()) {
    next.clear();
    for (NodeId x : frontier)
      for (NodeId y : g.neighbors(x))
        if (seen.insert(y).second) next.push_back(y);
    std::sort(next.begin(), next.end());
    for (NodeId y : next) {
      if (row.size() == m) break;
      row.push_back(y);
    }
    frontier.swap(next);
  }
  row.resize(m, kSentinel);
  return row;
}

EmbeddingMatrix build_embedding(const DynamicGraph& g, std::size_t m) {
  if (m == 0) throw std::invalid_argument("build_embedding: width must be at least 1");
  EmbeddingMatrix emb(m);
  for (NodeId v : g.nodes()) emb.append_row(mnn_embed_node(g, v, m));
  return emb;
}

}  // namespace dynareg
