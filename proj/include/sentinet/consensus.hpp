#pragma once
// Scalar consensus primitives and their attack-hardened variants:
//  - plain weighted averaging with Metropolis weights,
//  - W-MSR trimming (discard up to F extreme neighbor values on each side),
//  - a trimmed step-value estimator built on relative offset measurements,
//    where designated reliable agents anchor the absolute values,
//  - distance-adaptive reweighting that mutes diverging neighbors smoothly.

#include <Eigen/Dense>
#include <vector>

#include "sentinet/graph.hpp"

namespace sentinet {

// w_ij = 1 / (1 + max(deg_i, deg_j)) on edges, diagonal fills the slack.
// Symmetric and doubly stochastic, so averaging preserves the state sum.
Eigen::MatrixXd metropolis_weights(const Graph& g);

Eigen::VectorXd average_consensus_step(const Eigen::VectorXd& x,
                                       const Eigen::MatrixXd& w);

struct NeighborValue {
  double value = 0.0;
  double weight = 0.0;
  int node = 0;
};

struct WmsrResult {
  double value = 0.0;
  std::vector<int> kept;  // surviving neighbor ids, ascending
};

// Removes up to f neighbor values strictly greater than own (largest first,
// ties broken toward the lower node id) and up to f strictly smaller
// (smallest first), then averages survivors and self with weights
// renormalized over what remains.
WmsrResult wmsr_step(double own, double own_weight,
                     const std::vector<NeighborValue>& neighbors, int f);

enum class NodeRole { normal, reliable };

// One step-value update. Each entry of `steps` is a neighbor's step value
// s_l = x_l - x_n - xi_ln (xi_ln: measured relative offset). The f largest
// and f smallest step values are discarded outright; the rest move the state
// by their weighted sum. Reliable agents ignore all of it and output their
// own anchor value p_own.
double step_value_update(NodeRole role, double x, double p_own,
                         const std::vector<NeighborValue>& steps, int f);

// Smooth down-weighting of disagreeing neighbors: multiplier on a neighbor
// at distance d is 1 / (1 + (d/c)^2).
double adaptive_weight(double distance, double c);

// Consensus step with adaptively reweighted neighbors:
//   x' = x + sum_l w_l * g(|x_l - x|) * (x_l - x).
Eigen::VectorXd adaptive_weight_step(const Eigen::VectorXd& x,
                                     const std::vector<Eigen::VectorXd>& neighbors,
                                     const std::vector<double>& weights, double c);

}  // namespace sentinet
