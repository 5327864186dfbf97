#include "sentinet/central.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sentinet/errors.hpp"

namespace sentinet {

namespace {

// Rank-checked least squares on selected rows (all rows when `rows` empty).
bool try_ls(const Eigen::MatrixXd& h, const Eigen::VectorXd& y,
            const std::vector<int>& rows, Eigen::VectorXd& theta) {
  Eigen::MatrixXd hs;
  Eigen::VectorXd ys;
  if (rows.empty()) {
    hs = h;
    ys = y;
  } else {
    hs.resize(rows.size(), h.cols());
    ys.resize(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      hs.row(i) = h.row(rows[i]);
      ys(i) = y(rows[i]);
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(hs);
  qr.setThreshold(1e-10);
  if (qr.rank() < h.cols()) return false;
  theta = qr.solve(ys);
  return true;
}

}  // namespace

Eigen::VectorXd ls_estimate(const Eigen::MatrixXd& h, const Eigen::VectorXd& y) {
  if (h.rows() != y.size()) throw std::invalid_argument("ls_estimate: h/y row mismatch");
  if (h.rows() < h.cols())
    throw std::invalid_argument("ls_estimate: fewer measurements than unknowns");
  Eigen::VectorXd theta;
  if (!try_ls(h, y, {}, theta))
    throw std::invalid_argument("ls_estimate: h is column-rank deficient");
  return theta;
}

DetectResult residual_detect(const Eigen::MatrixXd& h, const Eigen::VectorXd& y,
                             double tau) {
  if (tau < 0) throw std::invalid_argument("residual_detect: tau must be >= 0");
  Eigen::VectorXd theta = ls_estimate(h, y);
  double rn = (y - h * theta).norm();
  return {rn > tau, rn};
}

Eigen::VectorXd stealthy_attack(const Eigen::MatrixXd& h, const Eigen::VectorXd& c) {
  if (h.cols() != c.size())
    throw std::invalid_argument("stealthy_attack: dimension mismatch");
  return h * c;
}

namespace {

uint64_t binom_count(int n, int k) {
  // Saturates instead of overflowing; callers only compare against budgets.
  long double acc = 1;
  for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc > 1e18L ? static_cast<uint64_t>(1e18L) : static_cast<uint64_t>(acc + 0.5L);
}

std::vector<int> complement_rows(int p, const std::vector<int>& removed) {
  std::vector<char> gone(p, 0);
  for (int r : removed) gone[r] = 1;
  std::vector<int> out;
  for (int i = 0; i < p; ++i)
    if (!gone[i]) out.push_back(i);
  return out;
}

IdentifyResult finish_identify(const Eigen::MatrixXd& h, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& theta) {
  IdentifyResult res;
  res.theta = theta;
  res.attack = y - h * theta;
  double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  for (int i = 0; i < res.attack.size(); ++i)
    if (std::abs(res.attack(i)) > 1e-6 * scale) res.support.push_back(i);
  return res;
}

}  // namespace

IdentifyResult identify_l0(const Eigen::MatrixXd& h, const Eigen::VectorXd& y,
                           int s_max, double eps, uint64_t budget) {
  const int p = static_cast<int>(h.rows());
  if (h.rows() != y.size()) throw std::invalid_argument("identify_l0: h/y row mismatch");
  if (s_max < 0 || s_max > p) throw std::invalid_argument("identify_l0: bad s_max");

  uint64_t candidates = 0;
  for (int s = 0; s <= s_max; ++s) candidates += binom_count(p, s);
  if (candidates > budget)
    throw RunError("identify_l0: " + std::to_string(candidates) +
                   " candidate supports exceed the budget of " + std::to_string(budget) +
                   "; lower s_max or raise the budget");

  const double tol = eps * std::max(1.0, y.cwiseAbs().maxCoeff());
  // Sizes ascending, supports in lexicographic order within a size, so the
  // first hit is the sparsest (then lexicographically smallest) explanation.
  for (int s = 0; s <= s_max; ++s) {
    std::vector<int> comb(s);
    for (int i = 0; i < s; ++i) comb[i] = i;
    while (true) {
      auto kept = complement_rows(p, comb);
      Eigen::VectorXd theta;
      if (static_cast<int>(kept.size()) >= h.cols() && try_ls(h, y, kept, theta)) {
        bool consistent = true;
        for (int i : kept) {
          if (std::abs(y(i) - h.row(i).dot(theta)) > tol) {
            consistent = false;
            break;
          }
        }
        if (consistent) {
          auto res = finish_identify(h, y, theta);
          // Zero out the numerically-tiny residuals off the removed set.
          for (int i : kept) res.attack(i) = 0.0;
          res.support.clear();
          double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
          for (int i = 0; i < res.attack.size(); ++i)
            if (std::abs(res.attack(i)) > 1e-6 * scale) res.support.push_back(i);
          return res;
        }
      }
      // next combination
      if (s == 0) break;
      int i = s - 1;
      while (i >= 0 && comb[i] == p - s + i) --i;
      if (i < 0) break;
      comb[i]++;
      for (int j = i + 1; j < s; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  throw RunError("identify_l0: no support of size <= " + std::to_string(s_max) +
                 " explains the data at tolerance " + std::to_string(eps) +
                 " (is the sparsity bound right for this instance?)");
}

IdentifyResult identify_l1(const Eigen::MatrixXd& h, const Eigen::VectorXd& y,
                           int max_iter) {
  if (h.rows() != y.size()) throw std::invalid_argument("identify_l1: h/y row mismatch");
  const double delta = 1e-8;
  Eigen::VectorXd theta = ls_estimate(h, y);  // also validates rank
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd r = y - h * theta;
    Eigen::VectorXd w(r.size());
    for (int i = 0; i < r.size(); ++i) w(i) = 1.0 / std::max(std::abs(r(i)), delta);
    // Weighted normal equations for argmin sum_i w_i r_i^2.
    Eigen::MatrixXd hw = w.asDiagonal() * h;
    Eigen::VectorXd next =
        (h.transpose() * hw).ldlt().solve(h.transpose() * (w.asDiagonal() * y));
    double move = (next - theta).norm();
    theta = next;
    if (move < 1e-10) break;
  }
  return finish_identify(h, y, theta);
}

DetectResult dynamic_residual_detect(const Eigen::MatrixXd& h,
                                     const Eigen::MatrixXd& a,
                                     const Eigen::VectorXd& y_seq, int steps,
                                     double tau) {
  const int p = static_cast<int>(h.rows());
  const int m = static_cast<int>(h.cols());
  if (a.rows() != m || a.cols() != m)
    throw std::invalid_argument("dynamic_residual_detect: A must be m x m");
  if (steps < 1) throw std::invalid_argument("dynamic_residual_detect: steps must be >= 1");
  if (y_seq.size() != static_cast<long>(p) * steps)
    throw std::invalid_argument("dynamic_residual_detect: y_seq must stack `steps` blocks");

  Eigen::MatrixXd stacked(p * steps, m);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(m, m);
  for (int t = 0; t < steps; ++t) {
    stacked.middleRows(t * p, p) = h * power;
    power = a * power;
  }
  return residual_detect(stacked, y_seq, tau);
}

int counting_fusion(const std::vector<int>& votes, int k) {
  int ones = 0;
  for (int v : votes) {
    if (v != 0 && v != 1) throw std::invalid_argument("counting_fusion: votes must be 0/1");
    ones += v;
  }
  return ones >= k ? 1 : 0;
}

namespace {

// pmf of Binomial(n, q) computed in log space for stability.
std::vector<double> binom_pmf(int n, double q) {
  std::vector<double> pmf(n + 1);
  if (q <= 0) {
    pmf[0] = 1;
    return pmf;
  }
  if (q >= 1) {
    pmf[n] = 1;
    return pmf;
  }
  for (int k = 0; k <= n; ++k) {
    double lg = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                k * std::log(q) + (n - k) * std::log1p(-q);
    pmf[k] = std::exp(lg);
  }
  return pmf;
}

}  // namespace

double fusion_bayes_error(const FusionProblem& prob, int k) {
  if (prob.n < 1) throw std::invalid_argument("fusion: n must be >= 1");
  if (prob.accuracy < 0 || prob.accuracy > 1 || prob.byz_fraction < 0 ||
      prob.byz_fraction > 1)
    throw std::invalid_argument("fusion: accuracy/byz_fraction must lie in [0,1]");
  if (std::abs(prob.p0 + prob.p1 - 1.0) > 1e-12)
    throw std::invalid_argument("fusion: priors must sum to 1");
  const int nb = static_cast<int>(prob.byz_fraction * prob.n);
  const int honest = prob.n - nb;

  // Always-wrong byzantines: vote 1 under H0 and 0 under H1.
  auto pmf1 = binom_pmf(honest, prob.accuracy);        // votes under H1
  auto pmf0 = binom_pmf(honest, 1.0 - prob.accuracy);  // honest mistakes under H0

  double p_false_alarm = 0;  // votes >= k under H0, honest votes shifted by nb
  for (int v = 0; v <= honest; ++v)
    if (nb + v >= k) p_false_alarm += pmf0[v];
  double p_miss = 0;  // votes < k under H1
  for (int v = 0; v <= honest; ++v)
    if (v < k) p_miss += pmf1[v];

  return prob.p0 * p_false_alarm + prob.p1 * p_miss;
}

FusionChoice choose_k_star(const FusionProblem& prob) {
  FusionChoice best;
  best.k = 1;
  best.bayes_error = fusion_bayes_error(prob, 1);
  for (int k = 2; k <= prob.n; ++k) {
    double err = fusion_bayes_error(prob, k);
    if (err < best.bayes_error) {
      best.k = k;
      best.bayes_error = err;
    }
  }
  return best;
}

}  // namespace sentinet
