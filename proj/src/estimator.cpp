#include "sentinet/estimator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sentinet/errors.hpp"
#include "sentinet/spectral.hpp"

namespace sentinet {

Eigen::VectorXd update_running_average(const Eigen::VectorXd& ybar_prev,
                                       const Eigen::VectorXd& y, long t) {
  if (ybar_prev.size() != y.size())
    throw std::invalid_argument("update_running_average: dimension mismatch");
  if (t < 1) throw std::invalid_argument("update_running_average: t must be >= 1");
  double td = static_cast<double>(t);
  return (td / (td + 1.0)) * ybar_prev + y / (td + 1.0);
}

Eigen::VectorXd consensus_innovations_core(const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& neighbor_sum,
                                           int neighbor_count,
                                           const Eigen::VectorXd& ybar,
                                           const Eigen::MatrixXd& h, double alpha,
                                           double beta) {
  return x + beta * (neighbor_sum - neighbor_count * x) +
         alpha * (h.transpose() * (ybar - h * x));
}

Eigen::VectorXd consensus_innovations_step(const Eigen::VectorXd& x,
                                           const std::vector<Eigen::VectorXd>& neighbors,
                                           const Eigen::VectorXd& ybar,
                                           const Eigen::MatrixXd& h, double alpha,
                                           double beta) {
  if (h.cols() != x.size())
    throw std::invalid_argument("consensus_innovations_step: h/x dimension mismatch");
  if (h.rows() != ybar.size())
    throw std::invalid_argument("consensus_innovations_step: h/ybar dimension mismatch");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.size());
  for (const auto& nb : neighbors) {
    if (nb.size() != x.size())
      throw std::invalid_argument("consensus_innovations_step: neighbor dimension mismatch");
    sum += nb;
  }
  return consensus_innovations_core(x, sum, static_cast<int>(neighbors.size()), ybar, h,
                                    alpha, beta);
}

Flag detect_step(const Eigen::VectorXd& x,
                 const std::vector<Eigen::VectorXd>& neighbor_broadcasts, Flag current,
                 double gamma) {
  if (current == Flag::raised) return Flag::raised;
  const double g2 = gamma * gamma;
  for (const auto& b : neighbor_broadcasts) {
    if (b.size() != x.size())
      throw std::invalid_argument("detect_step: neighbor dimension mismatch");
    if ((x - b).squaredNorm() > g2) return Flag::raised;
  }
  return Flag::clear;
}

double initial_threshold(double eta, int n) {
  if (eta < 0 || n < 1) throw std::invalid_argument("initial_threshold: bad arguments");
  return 2.0 * eta * std::sqrt(static_cast<double>(n));
}

double threshold_step(double gamma, long t, const ThresholdParams& p) {
  if (!(p.tau > 0 && p.tau < 0.5))
    throw std::invalid_argument("threshold_step: tau must lie in (0, 1/2)");
  if (!(p.r1 > 0 && p.r1 <= 1))
    throw std::invalid_argument("threshold_step: r1 must lie in (0, 1]");
  if (p.big_k <= 0) throw std::invalid_argument("threshold_step: K must be positive");
  if (t < 0) throw std::invalid_argument("threshold_step: t must be >= 0");
  return (1.0 - p.r1) * gamma +
         p.alpha * 2.0 * p.big_k / std::pow(static_cast<double>(t) + 1.0, p.tau);
}

namespace {

// y = B x with B = beta (L (x) I_m) + alpha blockdiag(H_n^T H_n),
// evaluated block by block without forming the big matrix.
struct ErrorOperator {
  const std::vector<std::vector<int>>& adj;
  const std::vector<Eigen::MatrixXd>& hth;  // precomputed H_n^T H_n
  int m;
  double alpha, beta;

  void apply(const double* in, double* out) const {
    const int n = static_cast<int>(adj.size());
    for (int node = 0; node < n; ++node) {
      Eigen::Map<const Eigen::VectorXd> x(in + static_cast<size_t>(node) * m, m);
      Eigen::Map<Eigen::VectorXd> y(out + static_cast<size_t>(node) * m, m);
      Eigen::VectorXd acc = beta * static_cast<double>(adj[node].size()) * x;
      for (int nb : adj[node])
        acc -= beta * Eigen::Map<const Eigen::VectorXd>(in + static_cast<size_t>(nb) * m, m);
      acc += alpha * (hth[node] * x);
      y = acc;
    }
  }
};

}  // namespace

double error_dynamics_spectral_radius(const Graph& g,
                                      const std::vector<Eigen::MatrixXd>& h_list,
                                      double alpha, double beta, int method) {
  if (static_cast<int>(h_list.size()) != g.node_count)
    throw std::invalid_argument("error_dynamics_spectral_radius: one H per node required");
  if (h_list.empty()) throw std::invalid_argument("error_dynamics_spectral_radius: empty");
  const int m = static_cast<int>(h_list[0].cols());
  const int dim = g.node_count * m;

  std::vector<Eigen::MatrixXd> hth;
  hth.reserve(h_list.size());
  for (const auto& h : h_list) {
    if (h.cols() != m)
      throw std::invalid_argument("error_dynamics_spectral_radius: H column mismatch");
    hth.push_back(h.transpose() * h);
  }

  EigenRange range;
  bool dense = method == 1 || (method == 0 && dim <= 300);
  if (dense) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd lap = laplacian(g);
    for (int i = 0; i < g.node_count; ++i)
      for (int j = 0; j < g.node_count; ++j)
        if (lap(i, j) != 0)
          b.block(i * m, j * m, m, m) =
              beta * lap(i, j) * Eigen::MatrixXd::Identity(m, m);
    for (int i = 0; i < g.node_count; ++i)
      b.block(i * m, i * m, m, m) += alpha * hth[i];
    range = dense_extremes(b);
  } else {
    auto adj = g.adjacency();
    ErrorOperator op{adj, hth, m, alpha, beta};
    range = lanczos_extremes(
        dim, [&op](const double* in, double* out) { op.apply(in, out); }, 160, 1e-9);
  }
  return std::max(std::abs(1.0 - range.lo), std::abs(1.0 - range.hi));
}

GainChoice choose_gains(const Graph& g, const std::vector<Eigen::MatrixXd>& h_list,
                        const GainSearchOptions& opt) {
  if (opt.alpha_points < 1 || opt.beta_points < 1 || opt.alpha_min <= 0 ||
      opt.alpha_min > opt.alpha_max)
    throw std::invalid_argument("choose_gains: bad search options");

  // beta must stay below 2 / lambda_max(L); a single-node network has no
  // consensus term at all, so any beta placeholder works there.
  double beta_cap;
  if (g.node_count > 1) {
    Eigen::MatrixXd lap = laplacian(g);
    double lmax = dense_extremes(lap).hi;
    if (lmax <= 0) lmax = 1.0;  // edgeless graph: the term is inert anyway
    beta_cap = 2.0 / lmax;
  } else {
    beta_cap = 1.0;
  }

  auto log_space = [](double lo, double hi, int k, int i) {
    if (k == 1) return lo;
    return lo * std::pow(hi / lo, static_cast<double>(i) / (k - 1));
  };

  GainChoice best;
  best.spectral_radius = std::numeric_limits<double>::infinity();
  for (int ia = 0; ia < opt.alpha_points; ++ia) {
    double alpha = log_space(opt.alpha_min, opt.alpha_max, opt.alpha_points, ia);
    for (int ib = 0; ib < opt.beta_points; ++ib) {
      // keep beta strictly inside (0, beta_cap)
      double beta = log_space(beta_cap * 1e-3, beta_cap * 0.95, opt.beta_points, ib);
      double rho = error_dynamics_spectral_radius(g, h_list, alpha, beta, opt.method);
      if (rho < best.spectral_radius) {
        best.alpha = alpha;
        best.beta = beta;
        best.spectral_radius = rho;
      }
    }
  }
  // Anything this close to 1 is numerically indistinguishable from a
  // non-contraction (and would give a useless r1), so treat it as failure.
  if (!(best.spectral_radius < 1.0 - 1e-9))
    throw RunError(
        "gain search: no (alpha, beta) on the grid makes the error dynamics a "
        "contraction (best spectral radius " +
        std::to_string(best.spectral_radius) +
        "); check that the graph is connected and the sensors are jointly "
        "observable, or widen the search ranges");
  best.r1 = (1.0 - best.spectral_radius) / 2.0;
  return best;
}

}  // namespace sentinet
