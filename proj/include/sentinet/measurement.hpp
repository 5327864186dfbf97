#pragma once
// Static-field sensing model: a fixed parameter vector theta observed by N
// sensors through per-sensor linear maps H_n under additive Gaussian noise,
//   y_n(t) = H_n * theta + w_n(t),   w_n(t) ~ N(0, Sigma_n), iid over n and t.
// The workhorse instance is the sector-selector model, where the region is a
// grid of sectors and each sensor reads the scalar field value of its sector.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

namespace sentinet {

struct Parameter {
  Eigen::VectorXd theta;
  // A-priori norm bound used by the detector's initial threshold:
  // sqrt(m) * max(|low|, |high|) for a box draw, so |theta| <= eta always.
  double eta = 0.0;
};

// Component-wise uniform draw on [low, high]; deterministic in seed.
Parameter sample_parameter(int m, double low, double high, uint64_t seed);

struct MeasurementSpec {
  std::vector<Eigen::MatrixXd> h;           // k_n x m per sensor
  std::vector<Eigen::MatrixXd> sigma;       // k_n x k_n PSD per sensor
  std::vector<Eigen::MatrixXd> sigma_sqrt;  // symmetric square roots (cached)
  int m = 0;

  int node_count() const { return static_cast<int>(h.size()); }
};

// Validates shapes and PSD-ness, caches Sigma^(1/2).
MeasurementSpec make_measurement_spec(std::vector<Eigen::MatrixXd> h,
                                      std::vector<Eigen::MatrixXd> sigma);

// Maps each position to a cell of a grid x grid partition of [0, side]^2,
// numbered row-major (sector = row * grid + col, row from y, col from x).
std::vector<int> sector_assignment(const std::vector<std::array<double, 2>>& positions,
                                   double side, int grid);

// The middle cell of the grid (for odd grids the exact center).
int center_sector(int grid);

// Scalar sector-selector spec: H_n = e_{assignment[n]}^T, Sigma_n = [variance].
MeasurementSpec sector_selector_spec(int sectors, const std::vector<int>& assignment,
                                     double noise_variance);

// One measurement draw, a pure function of (seed, node, t).
Eigen::VectorXd measure(const MeasurementSpec& spec, int node,
                        const Eigen::VectorXd& theta, uint64_t seed, uint32_t t);

// Mean over sensors of 10*log10(|H_n theta|^2 / trace(Sigma_n)), the
// per-sensor signal-to-noise ratio in dB. Noiseless sensors are skipped;
// returns NaN if every sensor is noiseless.
double mean_snr_db(const MeasurementSpec& spec, const Eigen::VectorXd& theta);

}  // namespace sentinet
