#pragma once
// Fusion-center baselines: least squares on stacked measurements, residual
// alarms, unobservable-subspace (undetectable) injections, sparse attack
// identification, the dynamic-sequence variant, and vote-counting fusion of
// binary decisions under a fraction of always-lying sensors.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace sentinet {

// Least squares theta = argmin |y - H theta|; requires full column rank.
Eigen::VectorXd ls_estimate(const Eigen::MatrixXd& h, const Eigen::VectorXd& y);

struct DetectResult {
  bool alarm = false;
  double residual_norm = 0.0;
};

// Alarm iff |y - H ls_estimate(h, y)| > tau (strict).
DetectResult residual_detect(const Eigen::MatrixXd& h, const Eigen::VectorXd& y,
                             double tau);

// Column-space injection a = H c: shifts the estimate by exactly c while
// leaving the residual untouched, hence invisible to residual_detect.
Eigen::VectorXd stealthy_attack(const Eigen::MatrixXd& h, const Eigen::VectorXd& c);

struct IdentifyResult {
  Eigen::VectorXd theta;
  Eigen::VectorXd attack;    // per-row injection estimate
  std::vector<int> support;  // rows with |attack| above the reporting threshold
};

// Exhaustive sparse identification: smallest support (by size, then
// lexicographic) such that deleting those rows leaves a consistent
// full-column-rank system; per-row consistency tolerance eps. Throws
// RunError when the candidate count exceeds `budget` or nothing fits.
IdentifyResult identify_l0(const Eigen::MatrixXd& h, const Eigen::VectorXd& y,
                           int s_max, double eps = 1e-8,
                           uint64_t budget = 2000000);

// Convex relaxation: minimize |y - H theta|_1 by iteratively reweighted
// least squares (damping delta = 1e-8; stop when the iterate moves < 1e-10
// or after max_iter rounds). attack = y - H theta at the solution.
IdentifyResult identify_l1(const Eigen::MatrixXd& h, const Eigen::VectorXd& y,
                           int max_iter = 500);

// Residual alarm over a T-step linear evolution theta_{t+1} = A theta_t:
// least squares on the stacked system [H; HA; HA^2; ...] vs y_seq (T blocks
// of H's row count, stacked in time order).
DetectResult dynamic_residual_detect(const Eigen::MatrixXd& h,
                                     const Eigen::MatrixXd& a,
                                     const Eigen::VectorXd& y_seq, int steps,
                                     double tau);

// --- vote-counting fusion ------------------------------------------------

// Declare H1 iff at least k of the votes are 1.
int counting_fusion(const std::vector<int>& votes, int k);

struct FusionProblem {
  int n = 0;                  // total sensors
  double accuracy = 0.9;      // P(honest vote correct) under either hypothesis
  double byz_fraction = 0.0;  // floor(byz_fraction * n) sensors always lie
  double p0 = 0.5, p1 = 0.5;  // prior probabilities of H0 / H1
};

// Exact Bayes error of the k-out-of-n rule under the always-wrong attack
// (byzantines vote 1 under H0 and 0 under H1 - the worst deterministic
// strategy against monotone counting rules).
double fusion_bayes_error(const FusionProblem& prob, int k);

struct FusionChoice {
  int k = 1;
  double bayes_error = 0.0;
};

// Enumerates k = 1..n, smallest k on ties.
FusionChoice choose_k_star(const FusionProblem& prob);

}  // namespace sentinet
