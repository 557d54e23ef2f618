#include "dynareg/session.hpp"

#include <stdexcept>
#include <utility>

namespace dynareg {

RegressionSession::RegressionSession(DynamicGraph graph, std::size_t m, std::vector<double> values,
                                     const SolverConfig& config, std::size_t max_node_edges)
    : graph_(std::move(graph)), m_(m), values_(std::move(values)), max_node_edges_(max_node_edges) {
  if (values_.size() != graph_.node_count())
    throw std::invalid_argument("expected " + std::to_string(graph_.node_count()) + " measured values, got " +
                                std::to_string(values_.size()));
  emb_ = build_embedding(graph_, m_);
  state_ = preprocess(emb_.to_dense(), values_, config);
}

RegressionSession RegressionSession::restore(DynamicGraph graph, std::size_t m, std::vector<double> values,
                                             RegressionState state, std::size_t max_node_edges) {
  if (values.size() != graph.node_count()) throw std::invalid_argument("stored values do not match the graph");
  if (state.m_width != m) throw std::invalid_argument("stored state width does not match the embedding width");
  RegressionSession s;
  s.graph_ = std::move(graph);
  s.m_ = m;
  s.values_ = std::move(values);
  s.state_ = std::move(state);
  s.max_node_edges_ = max_node_edges;
  s.emb_ = build_embedding(s.graph_, m);
  return s;
}

SessionStep RegressionSession::apply(const UpdateRecord& record) {
  SessionStep step;
  if (const auto* r = std::get_if<EdgeInsert>(&record)) {
    step.delta = delta_for_edge(graph_, EdgeOp::kInsert, r->u, r->v, emb_);
  } else if (const auto* r = std::get_if<EdgeDelete>(&record)) {
    step.delta = delta_for_edge(graph_, EdgeOp::kDelete, r->u, r->v, emb_);
  } else if (const auto* r = std::get_if<NodeInsert>(&record)) {
    step.delta = delta_for_node_insert(graph_, r->id, r->neighbors, r->value, emb_, max_node_edges_);
    values_.push_back(r->value);
  } else {
    const NodeId id = std::get<NodeDelete>(record).id;
    const double value = graph_.has_node(id) ? values_[graph_.index_of(id)] : 0.0;
    step.delta = delta_for_node_delete(graph_, id, emb_, max_node_edges_);
    step.delta.measured_value = value;
    values_.erase(values_.begin() + static_cast<std::ptrdiff_t>(step.delta.node_index));
  }
  apply_delta(emb_, step.delta);
  step.outcome = apply_update(state_, step.delta, emb_, values_);
  return step;
}

ConsistencyReport RegressionSession::verify(double tolerance) const {
  return verify_consistency(state_, emb_.to_dense(), values_, tolerance);
}

double RegressionSession::approx_residual() const { return residual(emb_.to_dense(), values_, state_.x_approx); }

double RegressionSession::exact_residual() const {
  const DenseMatrix m = emb_.to_dense();
  return residual(m, values_, exact_solve(m, values_));
}

}  // namespace dynareg
