#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "sentinet/adversary.hpp"
#include "sentinet/errors.hpp"
#include "sentinet/graph.hpp"

using namespace sentinet;

namespace {
Eigen::VectorXd e_times(int m, int c, double v) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  x(c) = v;
  return x;
}
}  // namespace

TEST_CASE("stealthy bias: single neighbor, push to the ball boundary") {
  // neighbor at x, gamma = 2, rho_safety = 0.5 -> allowed deviation 1,
  // broadcast = x + 1 * e_component
  StealthyBias sb;
  sb.component = 1;
  Eigen::VectorXd x(3);
  x << 4.0, -1.0, 2.0;
  Eigen::VectorXd b = byzantine_broadcast(sb, {x}, 2.0, 0.5, 3, 1, 0, 0);
  Eigen::VectorXd want = x;
  want(1) += 1.0;
  CHECK((b - want).norm() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("stealthy bias: two neighbors intersect the feasible intervals") {
  // neighbors 0 and 2*e_c, gamma = 4, rho_safety = 0.5 -> s in [-1, 1],
  // broadcast component = mean_c + 1 = 2
  StealthyBias sb;
  sb.component = 0;
  Eigen::VectorXd n1 = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd n2 = e_times(2, 0, 2.0);
  Eigen::VectorXd b = byzantine_broadcast(sb, {n1, n2}, 4.0, 0.5, 2, 1, 0, 0);
  CHECK(b(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(b(1) == doctest::Approx(0.0));
}

TEST_CASE("stealthy bias: infeasible constraints fall back to the mean") {
  // neighbors 0 and 10*e_c with gamma = 1, rho_safety = 0.5: balls of radius
  // 0.5 around each are disjoint from the mean's reachable set
  StealthyBias sb;
  sb.component = 0;
  Eigen::VectorXd n1 = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd n2 = e_times(2, 0, 10.0);
  Eigen::VectorXd b = byzantine_broadcast(sb, {n1, n2}, 1.0, 0.5, 2, 1, 0, 0);
  CHECK(b(0) == doctest::Approx(5.0));
  CHECK(b(1) == doctest::Approx(0.0));
}

TEST_CASE("stealthy bias: cap stops the push at the pinned value") {
  StealthyBias sb;
  sb.component = 0;
  sb.cap = 3.0;
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd b = byzantine_broadcast(sb, {origin}, 1000.0, 0.9, 2, 1, 0, 0);
  CHECK(b(0) == doctest::Approx(3.0));
  // negative direction: cap below the mean
  StealthyBias down;
  down.component = 0;
  down.direction = -1.0;
  down.cap = -3.0;
  Eigen::VectorXd bd = byzantine_broadcast(down, {origin}, 1000.0, 0.9, 2, 1, 0, 0);
  CHECK(bd(0) == doctest::Approx(-3.0));
}

TEST_CASE("stealthy bias: no visible honest neighbors sends zeros") {
  StealthyBias sb;
  Eigen::VectorXd b = byzantine_broadcast(sb, {}, 5.0, 0.9, 3, 1, 0, 0);
  CHECK(b.size() == 3);
  CHECK(b.norm() == 0.0);
}

TEST_CASE("stealthy bias: unresolved pin factor is a programming error") {
  StealthyBias sb;
  sb.pin_factor = 1.5;  // resolve_pins was never called
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(byzantine_broadcast(sb, {origin}, 1.0, 0.9, 2, 1, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("resolve_pins turns factors into absolute caps") {
  AttackSpec spec;
  StealthyBias sb;
  sb.component = 2;
  sb.pin_factor = 1.5;
  spec.agents.emplace(4, sb);
  Eigen::VectorXd theta(3);
  theta << 1.0, 2.0, 10.0;
  AttackSpec resolved = resolve_pins(spec, theta);
  const auto& out = std::get<StealthyBias>(resolved.agents.at(4));
  REQUIRE(out.cap.has_value());
  CHECK(*out.cap == doctest::Approx(15.0));
  CHECK_FALSE(out.pin_factor.has_value());
}

TEST_CASE("constant broadcast checks its dimension") {
  ConstantBroadcast cb{Eigen::VectorXd::Ones(3)};
  Eigen::VectorXd b = byzantine_broadcast(cb, {}, 1.0, 0.9, 3, 1, 0, 0);
  CHECK((b - Eigen::VectorXd::Ones(3)).norm() == 0.0);
  CHECK_THROWS_AS(byzantine_broadcast(cb, {}, 1.0, 0.9, 2, 1, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("random broadcast is bounded and counter-addressed") {
  RandomBroadcast rb{5.0};
  Eigen::VectorXd a = byzantine_broadcast(rb, {}, 1.0, 0.9, 4, 9, 3, 7);
  Eigen::VectorXd b = byzantine_broadcast(rb, {}, 1.0, 0.9, 4, 9, 3, 7);
  Eigen::VectorXd c = byzantine_broadcast(rb, {}, 1.0, 0.9, 4, 9, 3, 8);
  CHECK((a - b).norm() == 0.0);
  CHECK((a - c).norm() != 0.0);
  for (int i = 0; i < 4; ++i) {
    CHECK(a(i) >= -5.0);
    CHECK(a(i) <= 5.0);
  }
}

TEST_CASE("measurement falsification adds the offset; broadcasting it is an error") {
  Eigen::VectorXd y(2), off(2);
  y << 1.0, 2.0;
  off << 0.5, -0.5;
  Eigen::VectorXd out = falsify_measurement(y, off);
  CHECK(out(0) == 1.5);
  CHECK(out(1) == 1.5);
  CHECK_THROWS_AS(falsify_measurement(y, Eigen::VectorXd::Ones(3)),
                  std::invalid_argument);
  MeasurementOffset mo{off};
  CHECK_THROWS_AS(byzantine_broadcast(mo, {}, 1.0, 0.9, 2, 1, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("strong scenario compromises exactly the sector's sensors") {
  std::vector<int> assignment{0, 4, 4, 2, 4};
  AttackSpec spec = scenario_strong(assignment, 4, 1.5);
  CHECK(spec.agents.size() == 3);
  CHECK(spec.compromised(1));
  CHECK(spec.compromised(2));
  CHECK(spec.compromised(4));
  CHECK_FALSE(spec.compromised(0));
  const auto& sb = std::get<StealthyBias>(spec.agents.at(1));
  CHECK(sb.component == 4);
  REQUIRE(sb.pin_factor.has_value());
  CHECK(*sb.pin_factor == doctest::Approx(1.5));
}

TEST_CASE("weak scenario keeps the honest subnetwork connected and observable") {
  Graph g = random_geometric_graph(30, 100.0, 45.0, 5);
  REQUIRE(is_connected(g));
  std::vector<int> assignment;
  std::vector<Eigen::MatrixXd> h;
  for (int i = 0; i < 30; ++i) {
    assignment.push_back(i % 3);
    Eigen::MatrixXd hn = Eigen::MatrixXd::Zero(1, 3);
    hn(0, i % 3) = 1.0;
    h.push_back(hn);
  }
  AttackSpec spec = scenario_weak(g, h, assignment, 1, 1.5, 77);
  int sector_size = 10;
  CHECK(static_cast<int>(spec.agents.size()) == sector_size / 2);
  std::vector<char> keep(30, 1);
  std::vector<int> honest;
  for (const auto& [node, strategy] : spec.agents) {
    CHECK(assignment[node] == 1);  // only center-sector sensors
    keep[node] = 0;
  }
  for (int i = 0; i < 30; ++i)
    if (keep[i]) honest.push_back(i);
  CHECK(is_connected_subset(g, keep));
  CHECK(is_globally_observable(h, honest));
}

TEST_CASE("weak scenario: empty sector yields an empty attack") {
  Graph g = make_graph(3, {{0, 1}, {1, 2}});
  std::vector<int> assignment{0, 0, 1};
  std::vector<Eigen::MatrixXd> h;
  for (int s : assignment) {
    Eigen::MatrixXd hn = Eigen::MatrixXd::Zero(1, 2);
    hn(0, s) = 1.0;
    h.push_back(hn);
  }
  AttackSpec spec = scenario_weak(g, h, assignment, 1, 1.5, 1);
  CHECK(spec.agents.empty());
}

TEST_CASE("weak scenario: gives up when every choice breaks the network") {
  // path-ish graph where removing either center-sector node disconnects it
  Graph g = make_graph(4, {{2, 0}, {0, 1}, {1, 3}});
  std::vector<int> assignment{1, 1, 0, 2};  // center sector {0, 1}
  std::vector<Eigen::MatrixXd> h;
  for (int s : assignment) {
    Eigen::MatrixXd hn = Eigen::MatrixXd::Zero(1, 3);
    hn(0, s) = 1.0;
    h.push_back(hn);
  }
  CHECK_THROWS_AS(scenario_weak(g, h, assignment, 1, 1.5, 1, 50), RunError);
}
