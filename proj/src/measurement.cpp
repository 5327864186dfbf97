#include "sentinet/measurement.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sentinet/errors.hpp"
#include "sentinet/rng.hpp"

namespace sentinet {

Parameter sample_parameter(int m, double low, double high, uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sample_parameter: m must be >= 1");
  if (!(low <= high)) throw std::invalid_argument("sample_parameter: low > high");
  rng::CounterRng r(seed, rng::Stream::parameter);
  Parameter p;
  p.theta.resize(m);
  for (int c = 0; c < m; ++c) p.theta(c) = low + (high - low) * r.uniform();
  p.eta = std::sqrt(static_cast<double>(m)) * std::max(std::abs(low), std::abs(high));
  return p;
}

MeasurementSpec make_measurement_spec(std::vector<Eigen::MatrixXd> h,
                                      std::vector<Eigen::MatrixXd> sigma) {
  if (h.empty()) throw std::invalid_argument("measurement spec: no sensors");
  if (h.size() != sigma.size())
    throw std::invalid_argument("measurement spec: h/sigma count mismatch");
  MeasurementSpec spec;
  spec.m = static_cast<int>(h[0].cols());
  for (size_t n = 0; n < h.size(); ++n) {
    if (h[n].cols() != spec.m)
      throw std::invalid_argument("measurement spec: inconsistent parameter dimension");
    if (sigma[n].rows() != h[n].rows() || sigma[n].cols() != h[n].rows())
      throw std::invalid_argument("measurement spec: sigma shape mismatch at sensor " +
                                  std::to_string(n));
    double scale = std::max(1.0, sigma[n].cwiseAbs().maxCoeff());
    if ((sigma[n] - sigma[n].transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument("measurement spec: sigma not symmetric at sensor " +
                                  std::to_string(n));
    // Symmetric PSD square root; tiny negative eigenvalues are clamped to 0.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma[n]);
    Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) {
      if (ev(i) < -1e-10 * scale)
        throw std::invalid_argument("measurement spec: sigma not PSD at sensor " +
                                    std::to_string(n));
      ev(i) = std::sqrt(std::max(0.0, ev(i)));
    }
    spec.sigma_sqrt.push_back(es.eigenvectors() * ev.asDiagonal() *
                              es.eigenvectors().transpose());
  }
  spec.h = std::move(h);
  spec.sigma = std::move(sigma);
  return spec;
}

std::vector<int> sector_assignment(const std::vector<std::array<double, 2>>& positions,
                                   double side, int grid) {
  if (grid < 1) throw std::invalid_argument("sector_assignment: grid must be >= 1");
  if (side <= 0) throw std::invalid_argument("sector_assignment: side must be positive");
  std::vector<int> out(positions.size());
  const double cell = side / grid;
  for (size_t i = 0; i < positions.size(); ++i) {
    int col = std::min(static_cast<int>(positions[i][0] / cell), grid - 1);
    int row = std::min(static_cast<int>(positions[i][1] / cell), grid - 1);
    col = std::max(col, 0);
    row = std::max(row, 0);
    out[i] = row * grid + col;
  }
  return out;
}

int center_sector(int grid) { return (grid / 2) * grid + grid / 2; }

MeasurementSpec sector_selector_spec(int sectors, const std::vector<int>& assignment,
                                     double noise_variance) {
  if (sectors < 1) throw std::invalid_argument("sector_selector_spec: sectors must be >= 1");
  if (noise_variance < 0)
    throw std::invalid_argument("sector_selector_spec: negative noise variance");
  std::vector<Eigen::MatrixXd> h, sigma;
  for (size_t n = 0; n < assignment.size(); ++n) {
    int s = assignment[n];
    if (s < 0 || s >= sectors)
      throw std::invalid_argument("sector_selector_spec: sector index out of range at node " +
                                  std::to_string(n));
    Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, sectors);
    row(0, s) = 1.0;
    h.push_back(row);
    sigma.push_back(Eigen::MatrixXd::Constant(1, 1, noise_variance));
  }
  return make_measurement_spec(std::move(h), std::move(sigma));
}

Eigen::VectorXd measure(const MeasurementSpec& spec, int node,
                        const Eigen::VectorXd& theta, uint64_t seed, uint32_t t) {
  if (node < 0 || node >= spec.node_count())
    throw std::invalid_argument("measure: node out of range");
  if (theta.size() != spec.m) throw std::invalid_argument("measure: theta dimension mismatch");
  Eigen::VectorXd y = spec.h[node] * theta;
  const auto& root = spec.sigma_sqrt[node];
  if (root.cwiseAbs().maxCoeff() > 0) {
    rng::CounterRng r(seed, rng::Stream::noise, static_cast<uint32_t>(node), t);
    Eigen::VectorXd g(y.size());
    for (int i = 0; i < g.size(); ++i) g(i) = r.gaussian();
    y += root * g;
  }
  return y;
}

double mean_snr_db(const MeasurementSpec& spec, const Eigen::VectorXd& theta) {
  double sum = 0;
  int counted = 0;
  for (int n = 0; n < spec.node_count(); ++n) {
    double power = (spec.h[n] * theta).squaredNorm();
    double noise = spec.sigma[n].trace();
    if (noise <= 0) continue;
    sum += 10.0 * std::log10(power / noise);
    counted++;
  }
  return counted ? sum / counted : std::nan("");
}

}  // namespace sentinet
