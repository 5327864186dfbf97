#pragma once
// Attack models. A compromised agent either lies on the channel (broadcast
// attacks: it sends crafted vectors instead of its state) or lies to itself
// (measurement falsification: an additive offset on its own sensor reading).
//
// The interesting broadcast attack is the threshold-aware one: bias the
// neighborhood as far as possible along one component while provably staying
// inside every honest neighbor's detection ball of radius rho_safety * gamma.

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "sentinet/graph.hpp"
#include "sentinet/measurement.hpp"

namespace sentinet {

struct ConstantBroadcast {
  Eigen::VectorXd value;
};

// Fresh uniform draw on [-scale, scale]^m every round.
struct RandomBroadcast {
  double scale = 1.0;
};

// Broadcast = neighborhood mean pushed along direction * e_component as far
// as the detection constraints allow, optionally stopping at a target value
// for that component. `pin_factor` is resolved against the true parameter at
// run start into an absolute `cap` (cap = pin_factor * theta[component]).
struct StealthyBias {
  int component = 0;
  double direction = 1.0;  // +1 or -1
  std::optional<double> cap;
  std::optional<double> pin_factor;
};

// Honest on the channel, corrupted at the sensor: y -> y + offset.
struct MeasurementOffset {
  Eigen::VectorXd offset;
};

using AttackStrategy =
    std::variant<ConstantBroadcast, RandomBroadcast, StealthyBias, MeasurementOffset>;

bool is_broadcast_attack(const AttackStrategy& s);

struct AttackSpec {
  // Compromised agent -> its strategy. Fixed for the whole run.
  std::map<int, AttackStrategy> agents;

  bool compromised(int node) const { return agents.count(node) > 0; }
};

// Replaces pin_factor markers with absolute caps for a concrete theta.
AttackSpec resolve_pins(const AttackSpec& spec, const Eigen::VectorXd& theta);

// What a compromised agent sends this round. `visible` holds the states of
// its UNCOMPROMISED neighbors (what the stealthy strategy must respect);
// gamma is the current detection threshold. Must not be called for
// MeasurementOffset agents - they broadcast their true state.
Eigen::VectorXd byzantine_broadcast(const AttackStrategy& strategy,
                                    const std::vector<Eigen::VectorXd>& visible,
                                    double gamma, double rho_safety, int m,
                                    uint64_t seed, uint32_t node, uint32_t t);

Eigen::VectorXd falsify_measurement(const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& offset);

// Every sensor of the given sector is compromised and cooperatively pins that
// sector's estimate at pin_factor times its true value. Removing the sector's
// sensors destroys observability, so honest agents cannot cross-check it.
AttackSpec scenario_strong(const std::vector<int>& assignment, int sector,
                           double pin_factor = 1.5);

// Same attack, but only floor(half) of the sector's sensors, chosen uniformly
// at random such that the uncompromised subnetwork stays connected and
// jointly observable (resamples up to retry_cap times, then throws RunError).
AttackSpec scenario_weak(const Graph& g, const std::vector<Eigen::MatrixXd>& h_list,
                         const std::vector<int>& assignment, int sector,
                         double pin_factor, uint64_t seed, int retry_cap = 200);

}  // namespace sentinet
