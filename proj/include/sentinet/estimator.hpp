#pragma once
// The resilient distributed estimator each agent runs:
//
//   ybar_n(t) = (t/(t+1)) ybar_n(t-1) + (1/(t+1)) y_n(t)        running average
//   x_n(t+1)  = x_n(t) - beta * sum_{l in nbrs} (x_n - x_l)
//                      + alpha * H_n^T (ybar_n - H_n x_n)       consensus + innovations
//   flag_n    = raised once any neighbor's broadcast is farther than gamma_t
//               from x_n (and stays raised)                     local detector
//   gamma_t+1 = (1 - r1) gamma_t + alpha * 2K / (t+1)^tau       shrinking threshold
//
// plus the offline gain search that picks (alpha, beta) so the noise-free
// error dynamics are a contraction, and r1 from the contraction margin.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sentinet/graph.hpp"

namespace sentinet {

enum class Flag : int { clear = 0, raised = 1 };

struct ThresholdParams {
  double alpha = 0.0;   // innovation gain (shared with the state update)
  double big_k = 40.0;  // noise-floor scale K
  double tau = 0.45;    // decay exponent, in (0, 1/2)
  double r1 = 0.1;      // forgetting rate, in (0, 1]
};

// Recursive mean: t is the index of the incoming sample, t >= 1
// (at t = 0 the average IS the first sample).
Eigen::VectorXd update_running_average(const Eigen::VectorXd& ybar_prev,
                                       const Eigen::VectorXd& y, long t);

// Aggregated-core form used by both the public op and the round kernels, so
// every code path performs the identical floating-point computation.
// neighbor_sum must be the sum of neighbor broadcasts in ascending node order.
Eigen::VectorXd consensus_innovations_core(const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& neighbor_sum,
                                           int neighbor_count,
                                           const Eigen::VectorXd& ybar,
                                           const Eigen::MatrixXd& h, double alpha,
                                           double beta);

Eigen::VectorXd consensus_innovations_step(const Eigen::VectorXd& x,
                                           const std::vector<Eigen::VectorXd>& neighbors,
                                           const Eigen::VectorXd& ybar,
                                           const Eigen::MatrixXd& h, double alpha,
                                           double beta);

// Latching neighborhood-disagreement detector: once raised, stays raised;
// otherwise raises iff some |x - b_l| > gamma (strict).
Flag detect_step(const Eigen::VectorXd& x,
                 const std::vector<Eigen::VectorXd>& neighbor_broadcasts, Flag current,
                 double gamma);

// gamma_0 for an n-agent network given the parameter norm bound eta.
double initial_threshold(double eta, int n);

// One step of the threshold recursion; t is the current round index.
double threshold_step(double gamma, long t, const ThresholdParams& p);

// Spectral radius of the noise-free error iteration matrix
//   M = I - beta (L (x) I_m) - alpha blockdiag(H_n^T H_n).
// method: 0 auto (dense when N*m <= 300), 1 dense, 2 matrix-free Lanczos.
double error_dynamics_spectral_radius(const Graph& g,
                                      const std::vector<Eigen::MatrixXd>& h_list,
                                      double alpha, double beta, int method = 0);

struct GainChoice {
  double alpha = 0.0;
  double beta = 0.0;
  double r1 = 0.0;              // (1 - rho) / 2
  double spectral_radius = 0.0; // rho at the chosen gains
};

struct GainSearchOptions {
  double alpha_min = 1e-3;
  double alpha_max = 0.1;
  int alpha_points = 12;
  int beta_points = 12;
  int method = 0;  // forwarded to error_dynamics_spectral_radius
};

// Log-spaced grid search over alpha in [alpha_min, alpha_max] and
// beta in (0, 2/lambda_max(L)), minimizing the spectral radius above.
// Throws RunError when no grid point is a contraction.
GainChoice choose_gains(const Graph& g, const std::vector<Eigen::MatrixXd>& h_list,
                        const GainSearchOptions& opt = {});

}  // namespace sentinet
