#include "blindmimo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace blindmimo {

namespace {

struct PairScore {
  double eta = 0.0;
  int shift = 0;
  bool zero = false;
};

// Score one (true user, estimate column) pair over the delay-shift search.
PairScore score_pair(const std::vector<MatrixXcd>& H_hat, const std::vector<MatrixXcd>& H_true,
                     int k_true, int k_hat, int T_D) {
  const int T = static_cast<int>(H_true.size());
  double norm_true = 0.0, norm_hat = 0.0;
  VectorXcd c(T);
  for (int m = 0; m < T; ++m) {
    c(m) = H_true[m].col(k_true).dot(H_hat[m].col(k_hat));
    norm_true += H_true[m].col(k_true).squaredNorm();
    norm_hat += H_hat[m].col(k_hat).squaredNorm();
  }
  PairScore out;
  if (norm_hat <= 0.0 || norm_true <= 0.0) {
    out.zero = true;
    return out;
  }
  const double den = std::sqrt(norm_true * norm_hat);
  for (int d = -T_D; d <= T_D; ++d) {
    cxd acc(0.0, 0.0);
    for (int m = 0; m < T; ++m) {
      const double phase = -2.0 * kPi * d * m / T;
      acc += c(m) * cxd(std::cos(phase), std::sin(phase));
    }
    const double eta = std::abs(acc) / den;
    if (eta > out.eta) {
      out.eta = eta;
      out.shift = d;
    }
  }
  out.eta = std::min(out.eta, 1.0);
  return out;
}

EtaResult assemble(const std::vector<MatrixXcd>& H_hat, const std::vector<MatrixXcd>& H_true,
                   int T_D, const std::vector<int>& perm) {
  const int K = static_cast<int>(H_true[0].cols());
  EtaResult res;
  res.eta.resize(K);
  res.best_shift.resize(K);
  res.permutation = perm;
  res.zero_estimate.resize(K);
  for (int k = 0; k < K; ++k) {
    const PairScore s = score_pair(H_hat, H_true, k, perm[k], T_D);
    res.eta(k) = s.eta;
    res.best_shift[k] = s.shift;
    res.zero_estimate[k] = s.zero ? 1 : 0;
  }
  return res;
}

}  // namespace

EtaResult eta_metric(const std::vector<MatrixXcd>& H_hat, const std::vector<MatrixXcd>& H_true,
                     int T_D) {
  if (H_hat.size() != H_true.size() || H_hat.empty())
    throw std::invalid_argument("eta_metric: sequence length mismatch");
  if (H_hat[0].rows() != H_true[0].rows() || H_hat[0].cols() != H_true[0].cols())
    throw std::invalid_argument("eta_metric: dimension mismatch");
  std::vector<int> identity(H_true[0].cols());
  std::iota(identity.begin(), identity.end(), 0);
  return assemble(H_hat, H_true, T_D, identity);
}

std::vector<int> best_assignment(const MatrixXd& score) {
  const int K = static_cast<int>(score.rows());
  if (score.cols() != K) throw std::invalid_argument("best_assignment: score must be square");
  std::vector<int> perm(K);
  std::iota(perm.begin(), perm.end(), 0);

  if (K <= 8) {
    std::vector<int> best = perm;
    double best_sum = -1.0;
    std::vector<int> p = perm;
    std::sort(p.begin(), p.end());
    do {
      double s = 0.0;
      for (int k = 0; k < K; ++k) s += score(k, p[k]);
      if (s > best_sum) {
        best_sum = s;
        best = p;
      }
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
  }

  // Hungarian algorithm (potentials form) on cost = -score.
  const int n = K;
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, 1e300);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = 1e300;
      int j1 = 0;
      for (int j = 1; j <= n; ++j)
        if (!used[j]) {
          const double cur = -score(i0 - 1, j - 1) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> result(n);
  for (int j = 1; j <= n; ++j)
    if (match[j] > 0) result[match[j] - 1] = j - 1;
  return result;
}

EtaResult resolve_permutation(const std::vector<MatrixXcd>& H_hat,
                              const std::vector<MatrixXcd>& H_true, int T_D) {
  if (H_hat.size() != H_true.size() || H_hat.empty())
    throw std::invalid_argument("resolve_permutation: sequence length mismatch");
  const int K = static_cast<int>(H_true[0].cols());
  MatrixXd score(K, K);
  for (int kt = 0; kt < K; ++kt)
    for (int kh = 0; kh < K; ++kh) score(kt, kh) = score_pair(H_hat, H_true, kt, kh, T_D).eta;
  return assemble(H_hat, H_true, T_D, best_assignment(score));
}

CcdfTable ccdf(const std::vector<double>& values, const VectorXd& grid) {
  if (grid.size() == 0) throw std::invalid_argument("ccdf: empty threshold grid");
  if (values.empty()) throw std::invalid_argument("ccdf: no samples");
  CcdfTable table;
  table.thresholds = grid;
  table.prob.resize(grid.size());
  table.n_samples = static_cast<int>(values.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    int count = 0;
    for (const double v : values)
      if (v >= grid(i)) ++count;
    table.prob(i) = static_cast<double>(count) / static_cast<double>(values.size());
  }
  return table;
}

}  // namespace blindmimo
