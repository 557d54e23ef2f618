#include "dynareg/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace dynareg {

namespace {

std::string describe(NodeId u, NodeId v) { return "(" + std::to_string(u) + ", " + std::to_string(v) + ")"; }

}  // namespace

DynamicGraph DynamicGraph::with_nodes(std::size_t n) {
  DynamicGraph g;
  g.order_.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) g.add_node(static_cast<NodeId>(i));
  return g;
}

bool DynamicGraph::has_edge(NodeId u, NodeId v) const {
  auto it = adj_.find(u);
  if (it == adj_.end()) return false;
  return std::binary_search(it->second.begin(), it->second.end(), v);
}

std::span<const NodeId> DynamicGraph::neighbors(NodeId id) const {
  auto it = adj_.find(id);
  if (it == adj_.end()) throw std::out_of_range("unknown node " + std::to_string(id));
  return it->second;
}

std::size_t DynamicGraph::index_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown node " + std::to_string(id));
  return it->second;
}

void DynamicGraph::add_node(NodeId id) {
  if (id == kSentinel) throw std::invalid_argument("node id 0 is reserved");
  if (has_node(id)) throw std::invalid_argument("duplicate node " + std::to_string(id));
  index_.emplace(id, order_.size());
  order_.push_back(id);
  adj_.emplace(id, std::vector<NodeId>{});
}

void DynamicGraph::remove_node(NodeId id) {
  const std::size_t at = index_of(id);
  if (!adj_.at(id).empty()) throw std::invalid_argument("node " + std::to_string(id) + " still has edges");
  order_.erase(order_.begin() + static_cast<std::ptrdiff_t>(at));
  for (std::size_t i = at; i < order_.size(); ++i) index_[order_[i]] = i;
  index_.erase(id);
  adj_.erase(id);
}

void DynamicGraph::add_edge(NodeId u, NodeId v) {
  if (u == v) throw std::invalid_argument("self-loop on node " + std::to_string(u));
  if (!has_node(u) || !has_node(v)) throw std::invalid_argument("edge " + describe(u, v) + " has an unknown endpoint");
  auto& nu = adj_[u];
  auto pos = std::lower_bound(nu.begin(), nu.end(), v);
  if (pos != nu.end() && *pos == v) throw std::invalid_argument("duplicate edge " + describe(u, v));
  nu.insert(pos, v);
  auto& nv = adj_[v];
  nv.insert(std::lower_bound(nv.begin(), nv.end(), u), u);
  ++edges_;
}

void DynamicGraph::remove_edge(NodeId u, NodeId v) {
  if (!has_edge(u, v)) throw std::invalid_argument("edge " + describe(u, v) + " is absent");
  auto& nu = adj_[u];
  nu.erase(std::lower_bound(nu.begin(), nu.end(), v));
  auto& nv = adj_[v];
  nv.erase(std::lower_bound(nv.begin(), nv.end(), u));
  --edges_;
}

}  // namespace dynareg
