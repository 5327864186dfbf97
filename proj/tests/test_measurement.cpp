#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "sentinet/measurement.hpp"

using namespace sentinet;

TEST_CASE("sample_parameter draws inside the box and bounds the norm") {
  Parameter p = sample_parameter(9, 0.0, 160.0, 42);
  REQUIRE(p.theta.size() == 9);
  for (int i = 0; i < 9; ++i) {
    CHECK(p.theta(i) >= 0.0);
    CHECK(p.theta(i) <= 160.0);
  }
  CHECK(p.eta == doctest::Approx(3.0 * 160.0));  // sqrt(9) * 160
  CHECK(p.theta.norm() <= p.eta);

  Parameter q = sample_parameter(9, 0.0, 160.0, 42);
  CHECK((p.theta - q.theta).norm() == 0.0);  // deterministic
  Parameter r = sample_parameter(9, 0.0, 160.0, 43);
  CHECK((p.theta - r.theta).norm() != 0.0);

  Parameter neg = sample_parameter(2, -5.0, 3.0, 1);
  CHECK(neg.eta == doctest::Approx(std::sqrt(2.0) * 5.0));
}

TEST_CASE("sector assignment is row-major with clamped edges") {
  std::vector<std::array<double, 2>> pos{
      {100, 100},    // col 0, row 0
      {1000, 100},   // col 1, row 0
      {100, 1900},   // col 0, row 2
      {2000, 2000},  // boundary clamps into the last cell
      {1999, 50},    // col 2, row 0
  };
  auto sec = sector_assignment(pos, 2000.0, 3);
  CHECK(sec == std::vector<int>{0, 1, 6, 8, 2});
  CHECK(center_sector(3) == 4);
  CHECK(center_sector(1) == 0);
  CHECK(center_sector(5) == 12);
  // grid 1: everything is sector 0
  CHECK(sector_assignment(pos, 2000.0, 1) == std::vector<int>(5, 0));
}

TEST_CASE("sector selector spec shape") {
  MeasurementSpec spec = sector_selector_spec(4, {2, 0, 3}, 1.5);
  REQUIRE(spec.node_count() == 3);
  CHECK(spec.m == 4);
  CHECK(spec.h[0](0, 2) == 1.0);
  CHECK(spec.h[0].sum() == 1.0);
  CHECK(spec.sigma[1](0, 0) == 1.5);
  CHECK(spec.sigma_sqrt[1](0, 0) == doctest::Approx(std::sqrt(1.5)));
}

TEST_CASE("measurement spec validation") {
  Eigen::MatrixXd h1 = Eigen::MatrixXd::Ones(1, 2);
  Eigen::MatrixXd good = Eigen::MatrixXd::Identity(1, 1);
  CHECK_NOTHROW(make_measurement_spec({h1}, {good}));
  CHECK_THROWS_AS(make_measurement_spec({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_measurement_spec({h1}, {}), std::invalid_argument);
  Eigen::MatrixXd wrong_shape = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(make_measurement_spec({h1}, {wrong_shape}), std::invalid_argument);
  Eigen::MatrixXd negative = -Eigen::MatrixXd::Identity(1, 1);
  CHECK_THROWS_AS(make_measurement_spec({h1}, {negative}), std::invalid_argument);
  Eigen::MatrixXd h2 = Eigen::MatrixXd::Ones(2, 2);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.2, 1;
  CHECK_THROWS_AS(make_measurement_spec({h2}, {asym}), std::invalid_argument);
}

TEST_CASE("measure: zero noise returns H theta exactly") {
  MeasurementSpec spec = sector_selector_spec(3, {0, 1, 2}, 0.0);
  Eigen::VectorXd theta(3);
  theta << 5.0, -2.0, 7.0;
  for (int node = 0; node < 3; ++node) {
    Eigen::VectorXd y = measure(spec, node, theta, 11, 0);
    CHECK(y.size() == 1);
    CHECK(y(0) == theta(node));
  }
}

TEST_CASE("measure: deterministic in (seed, node, t), fresh over t") {
  MeasurementSpec spec = sector_selector_spec(2, {0, 1}, 4.0);
  Eigen::VectorXd theta(2);
  theta << 1.0, 2.0;
  Eigen::VectorXd a = measure(spec, 0, theta, 5, 17);
  Eigen::VectorXd b = measure(spec, 0, theta, 5, 17);
  CHECK(a(0) == b(0));
  CHECK(measure(spec, 0, theta, 5, 18)(0) != a(0));
  CHECK(measure(spec, 1, theta, 5, 17)(0) != a(0));
  CHECK(measure(spec, 0, theta, 6, 17)(0) != a(0));
}

TEST_CASE("measure: noise has the configured moments") {
  const double var = 4.0;
  MeasurementSpec spec = sector_selector_spec(1, {0}, var);
  Eigen::VectorXd theta(1);
  theta << 10.0;
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < n; ++t) {
    double w = measure(spec, 0, theta, 123, static_cast<uint32_t>(t))(0) - 10.0;
    sum += w;
    sum2 += w * w;
  }
  double mean = sum / n;
  double variance = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(variance - var) < 0.1);
}

TEST_CASE("mean snr in decibels") {
  // single sensor: |H theta|^2 = 100, tr Sigma = 10 -> 10 dB
  MeasurementSpec spec = sector_selector_spec(1, {0}, 10.0);
  Eigen::VectorXd theta(1);
  theta << 10.0;
  CHECK(mean_snr_db(spec, theta) == doctest::Approx(10.0).epsilon(1e-12));

  // two sensors at 10 dB and 20 dB -> mean 15 dB
  MeasurementSpec two = sector_selector_spec(2, {0, 1}, 10.0);
  Eigen::VectorXd t2(2);
  t2 << 10.0, std::sqrt(1000.0);
  CHECK(mean_snr_db(two, t2) == doctest::Approx(15.0).epsilon(1e-12));

  // noiseless sensors are skipped
  MeasurementSpec noiseless = sector_selector_spec(1, {0}, 0.0);
  CHECK(std::isnan(mean_snr_db(noiseless, theta)));
}
