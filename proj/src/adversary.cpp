#include "sentinet/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sentinet/errors.hpp"
#include "sentinet/rng.hpp"

namespace sentinet {

bool is_broadcast_attack(const AttackStrategy& s) {
  return !std::holds_alternative<MeasurementOffset>(s);
}

AttackSpec resolve_pins(const AttackSpec& spec, const Eigen::VectorXd& theta) {
  AttackSpec out = spec;
  for (auto& [node, strategy] : out.agents) {
    if (auto* sb = std::get_if<StealthyBias>(&strategy)) {
      if (sb->component < 0 || sb->component >= theta.size())
        throw std::invalid_argument("resolve_pins: component out of range");
      if (sb->pin_factor) {
        sb->cap = *sb->pin_factor * theta(sb->component);
        sb->pin_factor.reset();
      }
    }
  }
  return out;
}

namespace {

Eigen::VectorXd stealthy_broadcast(const StealthyBias& sb,
                                   const std::vector<Eigen::VectorXd>& visible,
                                   double gamma, double rho_safety, int m) {
  if (sb.component < 0 || sb.component >= m)
    throw std::invalid_argument("byzantine_broadcast: component out of range");
  if (visible.empty()) return Eigen::VectorXd::Zero(m);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
  for (const auto& v : visible) {
    if (v.size() != m)
      throw std::invalid_argument("byzantine_broadcast: neighbor dimension mismatch");
    mean += v;
  }
  mean /= static_cast<double>(visible.size());

  // Find the displacement s >= ... along dir * e_c keeping the broadcast
  // within radius rho_safety * gamma of every visible neighbor:
  //   |mean + s*dir*e_c - x_l|^2 <= r^2 for all l.
  // Each constraint is an interval in s; intersect them all.
  const double dir = sb.direction >= 0 ? 1.0 : -1.0;
  const double r = rho_safety * gamma;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool feasible = true;
  for (const auto& v : visible) {
    Eigen::VectorXd g = mean - v;
    double gc = g(sb.component) * dir;  // component along the push direction
    double d = r * r - g.squaredNorm() + gc * gc;
    if (d < 0) {
      feasible = false;
      break;
    }
    double root = std::sqrt(d);
    lo = std::max(lo, -gc - root);
    hi = std::min(hi, -gc + root);
  }
  if (!feasible || lo > hi) return mean;  // neighbors too spread out: hide at the mean

  // Maximal admissible push, stopping at the cap when one is set.
  double s = hi;
  if (sb.cap) s = std::clamp(dir * (*sb.cap - mean(sb.component)), lo, hi);
  Eigen::VectorXd out = mean;
  out(sb.component) += dir * s;
  return out;
}

}  // namespace

Eigen::VectorXd byzantine_broadcast(const AttackStrategy& strategy,
                                    const std::vector<Eigen::VectorXd>& visible,
                                    double gamma, double rho_safety, int m,
                                    uint64_t seed, uint32_t node, uint32_t t) {
  if (m < 1) throw std::invalid_argument("byzantine_broadcast: m must be >= 1");
  if (const auto* cb = std::get_if<ConstantBroadcast>(&strategy)) {
    if (cb->value.size() != m)
      throw std::invalid_argument("byzantine_broadcast: constant value dimension mismatch");
    return cb->value;
  }
  if (const auto* rb = std::get_if<RandomBroadcast>(&strategy)) {
    rng::CounterRng r(seed, rng::Stream::attack, node, t);
    Eigen::VectorXd out(m);
    for (int i = 0; i < m; ++i) out(i) = rb->scale * (2.0 * r.uniform() - 1.0);
    return out;
  }
  if (const auto* sb = std::get_if<StealthyBias>(&strategy)) {
    if (sb->pin_factor)
      throw std::invalid_argument(
          "byzantine_broadcast: unresolved pin_factor (call resolve_pins first)");
    return stealthy_broadcast(*sb, visible, gamma, rho_safety, m);
  }
  throw std::invalid_argument(
      "byzantine_broadcast: measurement-offset agents broadcast their true state");
}

Eigen::VectorXd falsify_measurement(const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& offset) {
  if (y.size() != offset.size())
    throw std::invalid_argument("falsify_measurement: dimension mismatch");
  return y + offset;
}

AttackSpec scenario_strong(const std::vector<int>& assignment, int sector,
                           double pin_factor) {
  AttackSpec spec;
  for (size_t n = 0; n < assignment.size(); ++n) {
    if (assignment[n] == sector) {
      StealthyBias sb;
      sb.component = sector;
      sb.direction = 1.0;
      sb.pin_factor = pin_factor;
      spec.agents.emplace(static_cast<int>(n), sb);
    }
  }
  return spec;
}

AttackSpec scenario_weak(const Graph& g, const std::vector<Eigen::MatrixXd>& h_list,
                         const std::vector<int>& assignment, int sector,
                         double pin_factor, uint64_t seed, int retry_cap) {
  if (static_cast<int>(assignment.size()) != g.node_count)
    throw std::invalid_argument("scenario_weak: assignment size mismatch");
  std::vector<int> candidates;
  for (int n = 0; n < g.node_count; ++n)
    if (assignment[n] == sector) candidates.push_back(n);
  const int take = static_cast<int>(candidates.size()) / 2;
  if (take == 0) return AttackSpec{};  // nothing to compromise

  for (int attempt = 0; attempt < retry_cap; ++attempt) {
    // Partial Fisher-Yates: the first `take` entries are a uniform subset.
    rng::CounterRng r(seed, rng::Stream::scenario, 0, static_cast<uint32_t>(attempt));
    std::vector<int> pool = candidates;
    for (int i = 0; i < take; ++i) {
      int j = i + static_cast<int>(r.uniform_below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    std::vector<char> keep(g.node_count, 1);
    for (int i = 0; i < take; ++i) keep[pool[i]] = 0;
    std::vector<int> kept;
    for (int n = 0; n < g.node_count; ++n)
      if (keep[n]) kept.push_back(n);

    if (!is_connected_subset(g, keep)) continue;
    if (!is_globally_observable(h_list, kept)) continue;

    AttackSpec spec;
    for (int i = 0; i < take; ++i) {
      StealthyBias sb;
      sb.component = sector;
      sb.direction = 1.0;
      sb.pin_factor = pin_factor;
      spec.agents.emplace(pool[i], sb);
    }
    return spec;
  }
  throw RunError(
      "scenario_weak: no compromised subset of sector " + std::to_string(sector) +
      " leaves the remaining network connected and observable after " +
      std::to_string(retry_cap) + " attempts");
}

}  // namespace sentinet
