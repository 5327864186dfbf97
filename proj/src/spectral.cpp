#include "sentinet/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sentinet/rng.hpp"

namespace sentinet {

EigenRange dense_extremes(const Eigen::MatrixXd& sym) {
  if (sym.rows() != sym.cols() || sym.rows() == 0)
    throw std::invalid_argument("dense_extremes: need a nonempty square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

EigenRange lanczos_extremes(int dim,
                            const std::function<void(const double*, double*)>& apply,
                            int max_iter, double tol, uint64_t seed) {
  if (dim <= 0) throw std::invalid_argument("lanczos_extremes: dim must be positive");
  if (dim == 1) {
    double x = 1.0, y = 0.0;
    apply(&x, &y);
    return {y, y};
  }
  max_iter = std::min(max_iter, dim);

  rng::CounterRng r(seed, rng::Stream::generic);
  Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(dim, [&](Eigen::Index) {
    return r.gaussian();
  });
  v.normalize();

  std::vector<Eigen::VectorXd> basis;  // kept for full reorthogonalization
  basis.reserve(max_iter);
  Eigen::VectorXd w(dim);
  std::vector<double> alpha, beta;  // tridiagonal entries
  double prev_lo = 0, prev_hi = 0;
  bool have_prev = false;
  EigenRange out{0, 0};

  for (int k = 0; k < max_iter; ++k) {
    basis.push_back(v);
    apply(v.data(), w.data());
    double a = v.dot(w);
    alpha.push_back(a);

    // Full reorthogonalization, twice, to keep the basis numerically clean.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) w -= q.dot(w) * q;

    // Ritz extremes of the current tridiagonal section.
    int kk = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(kk, kk);
    for (int i = 0; i < kk; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < kk) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
    out.lo = es.eigenvalues()(0);
    out.hi = es.eigenvalues()(kk - 1);

    double scale = std::max({std::abs(out.lo), std::abs(out.hi), 1e-30});
    if (have_prev && std::abs(out.lo - prev_lo) <= tol * scale &&
        std::abs(out.hi - prev_hi) <= tol * scale)
      break;
    prev_lo = out.lo;
    prev_hi = out.hi;
    have_prev = true;

    double b = w.norm();
    if (b < 1e-13 * std::max(1.0, std::abs(a))) break;  // invariant subspace found
    beta.push_back(b);
    v = w / b;
  }
  return out;
}

double laplacian_lambda2(const Eigen::MatrixXd& lap) {
  if (lap.rows() < 2) throw std::invalid_argument("laplacian_lambda2: need >= 2 nodes");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1);
}

}  // namespace sentinet
