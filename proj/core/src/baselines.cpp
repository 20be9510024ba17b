#include "blindmimo/baselines.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "prox_solver.hpp"

namespace blindmimo {

MatrixXcd orthogonal_pilots(int K, int T_T, double rho) {
  if (T_T < K) throw std::invalid_argument("orthogonal_pilots: pilot length must be >= K");
  MatrixXcd x(K, T_T);
  const double amp = std::sqrt(rho);
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T_T; ++t) {
      const double phase = -2.0 * kPi * static_cast<double>((k * t) % T_T) / T_T;
      x(k, t) = amp * cxd(std::cos(phase), std::sin(phase));
    }
  return x;
}

SparseEstimate pilot_ls_estimate(const MatrixXcd& Y_T, const MatrixXcd& X_T,
                                 const Dictionary& dict, const SolverConfig& config) {
  config.validate();
  if (!dict.single_F())
    throw std::invalid_argument("pilot_ls_estimate: narrowband (single-F) dictionary required");
  const MatrixXcd& F = dict.F(0);
  const int K = static_cast<int>(X_T.rows());
  if (Y_T.cols() != X_T.cols()) throw std::invalid_argument("pilot_ls_estimate: pilot block mismatch");
  if (X_T.cols() < K) throw std::invalid_argument("pilot_ls_estimate: pilot length must be >= K");

  Eigen::JacobiSVD<MatrixXcd> svd(X_T);
  const bool rank_deficient =
      svd.singularValues()(K - 1) <= 1e-12 * std::max(1.0, svd.singularValues()(0));

  detail::ProxProblem prob;
  prob.objective = [&](const MatrixXcd& s) { return -(F * s * X_T - Y_T).squaredNorm(); };
  prob.descent = [&](const MatrixXcd& s) -> MatrixXcd {
    return F.adjoint() * (F * s * X_T - Y_T) * X_T.adjoint();
  };

  SparseEstimate est = detail::run_prox_loop(MatrixXcd::Zero(dict.P(), K), config, prob);
  est.rank_deficient = rank_deficient;
  est.kkt_residual = kkt_residual_from_gradient(est.S_hat, prob.descent(est.S_hat), config.lambda);
  return est;
}

double semiblind_objective(const MatrixXcd& H, const MatrixXcd& Y_T, const MatrixXcd& Y_D,
                           const MatrixXcd& X_T, double rho) {
  const int K = static_cast<int>(H.cols());
  const double t_data = static_cast<double>(Y_D.cols());
  const MatrixXcd W = MatrixXcd::Identity(K, K) + rho * (H.adjoint() * H);
  Eigen::LLT<MatrixXcd> llt(W);
  double logdet = 0.0;
  for (int i = 0; i < K; ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i).real());

  const MatrixXcd t = H.adjoint() * Y_D;
  const double quad = Y_D.squaredNorm() - rho * (t.conjugate().cwiseProduct(llt.solve(t))).sum().real();
  double value = -quad - t_data * logdet;
  if (X_T.cols() > 0) value -= (H * X_T - Y_T).squaredNorm();
  return value;
}

MatrixXcd semiblind_gradient(const MatrixXcd& H, const MatrixXcd& Y_T, const MatrixXcd& Y_D,
                             const MatrixXcd& X_T, double rho) {
  const int K = static_cast<int>(H.cols());
  const double t_data = static_cast<double>(Y_D.cols());
  const MatrixXcd id = MatrixXcd::Identity(K, K);
  const MatrixXcd W = id + rho * (H.adjoint() * H);
  const MatrixXcd Winv = Eigen::LLT<MatrixXcd>(W).solve(id);
  const MatrixXcd P4 = H * Winv;                    // Q^{-1} H
  const MatrixXcd t = H.adjoint() * Y_D;
  const MatrixXcd U = Y_D - rho * (P4 * t);          // Q^{-1} Y_D
  const MatrixXcd Wm = P4.adjoint() * Y_D;
  MatrixXcd ascent = rho * (U * Wm.adjoint()) - t_data * rho * P4;
  if (X_T.cols() > 0) ascent -= (H * X_T - Y_T) * X_T.adjoint();
  return -ascent;
}

SemiblindEstimate semiblind_estimate(const MatrixXcd& Y_T, const MatrixXcd& Y_D,
                                     const MatrixXcd& X_T, const Dictionary& dict, double rho,
                                     const SolverConfig& config) {
  config.validate();
  if (!dict.single_F())
    throw std::invalid_argument("semiblind_estimate: narrowband (single-F) dictionary required");
  if (X_T.rows() < 1)
    throw std::invalid_argument("semiblind_estimate: X_T must have K rows (may have zero columns)");

  // Subspace initialization from the full received block; pilots then fix the
  // rotation ambiguity via least squares.
  MatrixXcd Y_full(Y_T.rows(), Y_T.cols() + Y_D.cols());
  Y_full << Y_T, Y_D;
  const double T_total = static_cast<double>(Y_full.cols());
  Dictionary init_dict = dict;
  init_dict.T = static_cast<int>(Y_full.cols());
  SparseEstimate sub = detail::subspace_core(Y_full, init_dict, static_cast<int>(X_T.rows()),
                                             1.0 / std::sqrt(T_total * rho));
  MatrixXcd H0 = dict.F(0) * sub.S_hat;
  if (X_T.cols() > 0) {
    const MatrixXcd R = H0.completeOrthogonalDecomposition().solve(Y_T) *
                        X_T.completeOrthogonalDecomposition().pseudoInverse();
    H0 = H0 * R;
  }

  detail::ProxProblem prob;
  prob.objective = [&](const MatrixXcd& h) { return semiblind_objective(h, Y_T, Y_D, X_T, rho); };
  prob.descent = [&](const MatrixXcd& h) { return semiblind_gradient(h, Y_T, Y_D, X_T, rho); };

  SolverConfig cfg = config;
  cfg.lambda = 0.0;  // no sparsity on the unstructured channel
  SparseEstimate est = detail::run_prox_loop(H0, cfg, prob);

  SemiblindEstimate out;
  out.H = std::move(est.S_hat);
  out.objective_trace = std::move(est.objective_trace);
  out.iterations = est.iterations;
  out.converged = est.converged;
  return out;
}

}  // namespace blindmimo
