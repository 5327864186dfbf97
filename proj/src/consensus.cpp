#include "sentinet/consensus.hpp"

#include <algorithm>
#include <stdexcept>

namespace sentinet {

Eigen::MatrixXd metropolis_weights(const Graph& g) {
  auto deg = g.degrees();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(g.node_count, g.node_count);
  for (auto [i, j] : g.edges) {
    double wij = 1.0 / (1.0 + std::max(deg[i], deg[j]));
    w(i, j) = wij;
    w(j, i) = wij;
  }
  for (int i = 0; i < g.node_count; ++i) w(i, i) = 1.0 - w.row(i).sum();
  return w;
}

Eigen::VectorXd average_consensus_step(const Eigen::VectorXd& x,
                                       const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols() || w.rows() != x.size())
    throw std::invalid_argument("average_consensus_step: dimension mismatch");
  return w * x;
}

namespace {

// Ids of up to f neighbors to drop on one side of own. `above` selects the
// side; extremes go first, ties broken toward the lower node id.
void mark_trimmed(const std::vector<NeighborValue>& neighbors, double own, int f,
                  bool above, std::vector<char>& dropped) {
  std::vector<int> idx;
  for (size_t i = 0; i < neighbors.size(); ++i) {
    if (above ? neighbors[i].value > own : neighbors[i].value < own)
      idx.push_back(static_cast<int>(i));
  }
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (neighbors[a].value != neighbors[b].value)
      return above ? neighbors[a].value > neighbors[b].value
                   : neighbors[a].value < neighbors[b].value;
    return neighbors[a].node < neighbors[b].node;
  });
  for (int i = 0; i < std::min<int>(f, static_cast<int>(idx.size())); ++i)
    dropped[idx[i]] = 1;
}

}  // namespace

WmsrResult wmsr_step(double own, double own_weight,
                     const std::vector<NeighborValue>& neighbors, int f) {
  if (f < 0) throw std::invalid_argument("wmsr_step: f must be >= 0");
  if (own_weight <= 0) throw std::invalid_argument("wmsr_step: own weight must be positive");
  std::vector<char> dropped(neighbors.size(), 0);
  mark_trimmed(neighbors, own, f, true, dropped);
  mark_trimmed(neighbors, own, f, false, dropped);

  double total = own_weight;
  double acc = own_weight * own;
  WmsrResult out;
  for (size_t i = 0; i < neighbors.size(); ++i) {
    if (dropped[i]) continue;
    if (neighbors[i].weight < 0)
      throw std::invalid_argument("wmsr_step: negative neighbor weight");
    total += neighbors[i].weight;
    acc += neighbors[i].weight * neighbors[i].value;
    out.kept.push_back(neighbors[i].node);
  }
  std::sort(out.kept.begin(), out.kept.end());
  out.value = acc / total;
  return out;
}

double step_value_update(NodeRole role, double x, double p_own,
                         const std::vector<NeighborValue>& steps, int f) {
  if (role == NodeRole::reliable) return p_own;
  if (f < 0) throw std::invalid_argument("step_value_update: f must be >= 0");

  // Discard the f largest and f smallest step values outright.
  std::vector<int> order(steps.size());
  for (size_t i = 0; i < steps.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (steps[a].value != steps[b].value) return steps[a].value < steps[b].value;
    return steps[a].node < steps[b].node;
  });
  int n = static_cast<int>(order.size());
  int lo = std::min(f, n), hi = std::max(lo, n - f);

  double acc = 0;
  for (int i = lo; i < hi; ++i) {
    const auto& s = steps[order[i]];
    if (s.weight < 0) throw std::invalid_argument("step_value_update: negative weight");
    acc += s.weight * s.value;
  }
  return x + acc;
}

double adaptive_weight(double distance, double c) {
  if (c <= 0) throw std::invalid_argument("adaptive_weight: c must be positive");
  double r = distance / c;
  return 1.0 / (1.0 + r * r);
}

Eigen::VectorXd adaptive_weight_step(const Eigen::VectorXd& x,
                                     const std::vector<Eigen::VectorXd>& neighbors,
                                     const std::vector<double>& weights, double c) {
  if (neighbors.size() != weights.size())
    throw std::invalid_argument("adaptive_weight_step: weights/neighbors mismatch");
  Eigen::VectorXd out = x;
  for (size_t l = 0; l < neighbors.size(); ++l) {
    if (neighbors[l].size() != x.size())
      throw std::invalid_argument("adaptive_weight_step: neighbor dimension mismatch");
    Eigen::VectorXd diff = neighbors[l] - x;
    out += weights[l] * adaptive_weight(diff.norm(), c) * diff;
  }
  return out;
}

}  // namespace sentinet
