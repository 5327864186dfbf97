#pragma once
// Extreme eigenvalues of symmetric operators: a dense solver for small
// problems and matrix-free Lanczos (full reorthogonalization) for the large
// block operators that show up in gain selection.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

namespace sentinet {

struct EigenRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Smallest and largest eigenvalue of a symmetric matrix (dense path).
EigenRange dense_extremes(const Eigen::MatrixXd& sym);

// Matrix-free Lanczos on a symmetric operator. `apply` computes y = A*x.
// Runs until both Ritz extremes stabilize to `tol` (relative) or max_iter
// steps; deterministic for a fixed seed.
EigenRange lanczos_extremes(int dim,
                            const std::function<void(const double*, double*)>& apply,
                            int max_iter = 200, double tol = 1e-9,
                            uint64_t seed = 0x5eedbeef);

// Second-smallest Laplacian eigenvalue (algebraic connectivity).
double laplacian_lambda2(const Eigen::MatrixXd& lap);

}  // namespace sentinet
