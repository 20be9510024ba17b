#include "blindmimo/blind_ideal.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "prox_solver.hpp"

namespace blindmimo {

namespace {

void check_inputs(const MatrixXcd& S, const RxBlock& rx, const Dictionary& dict, double rho) {
  if (rho <= 0.0) throw std::invalid_argument("blind_ideal: rho must be > 0");
  if (S.rows() != dict.P()) throw std::invalid_argument("blind_ideal: S rows must equal N*(T_D+1)");
  if (rx.y_freq.rows() != dict.N() || rx.y_freq.cols() != dict.T)
    throw std::invalid_argument("blind_ideal: observation block does not match dictionary");
  if (!S.allFinite()) throw std::invalid_argument("blind_ideal: non-finite input");
}

double logdet_hpd(const Eigen::LLT<MatrixXcd>& llt) {
  double v = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) v += std::log(l(i, i).real());
  return 2.0 * v;
}

}  // namespace

void SolverConfig::validate() const {
  if (lambda < 0.0) throw std::invalid_argument("solver: lambda must be >= 0");
  if (mu0 <= 0.0) throw std::invalid_argument("solver: mu0 must be > 0");
  if (beta <= 0.0 || beta >= 1.0) throw std::invalid_argument("solver: beta must be in (0,1)");
  if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
  if (tol_rel_obj < 0.0) throw std::invalid_argument("solver: tol_rel_obj must be >= 0");
  if (min_step <= 0.0) throw std::invalid_argument("solver: min_step must be > 0");
}

double loglikelihood(const MatrixXcd& S, const RxBlock& rx, const Dictionary& dict, double rho) {
  check_inputs(S, rx, dict, rho);
  const MatrixXcd& Y = rx.y_freq;
  const int T = dict.T;
  const int Kc = static_cast<int>(S.cols());
  double value = -Y.squaredNorm();

  if (dict.single_F()) {
    const MatrixXcd P1 = dict.F(0) * S;
    const MatrixXcd W = MatrixXcd::Identity(Kc, Kc) + rho * (P1.adjoint() * P1);
    Eigen::LLT<MatrixXcd> llt(W);
    const MatrixXcd t = P1.adjoint() * Y;           // Kc x T
    const MatrixXcd x = llt.solve(t);
    value += rho * (t.conjugate().cwiseProduct(x)).sum().real();
    value -= T * logdet_hpd(llt);
    return value;
  }

  for (int m = 0; m < T; ++m) {
    const MatrixXcd P1 = dict.F(m) * S;
    const MatrixXcd W = MatrixXcd::Identity(Kc, Kc) + rho * (P1.adjoint() * P1);
    Eigen::LLT<MatrixXcd> llt(W);
    const VectorXcd t = P1.adjoint() * Y.col(m);
    value += rho * t.dot(llt.solve(t)).real();
    value -= logdet_hpd(llt);
  }
  return value;
}

MatrixXcd likelihood_gradient(const MatrixXcd& S, const RxBlock& rx, const Dictionary& dict,
                              double rho) {
  check_inputs(S, rx, dict, rho);
  const MatrixXcd& Y = rx.y_freq;
  const int T = dict.T;
  const int Kc = static_cast<int>(S.cols());
  const MatrixXcd id = MatrixXcd::Identity(Kc, Kc);

  if (dict.single_F()) {
    const MatrixXcd& F = dict.F(0);
    const MatrixXcd P1 = F * S;
    const MatrixXcd W = id + rho * (P1.adjoint() * P1);
    const MatrixXcd Winv = Eigen::LLT<MatrixXcd>(W).solve(id);
    const MatrixXcd P4 = P1 * Winv;                    // Q^{-1} F S
    const MatrixXcd t = P1.adjoint() * Y;              // Kc x T
    const MatrixXcd U = Y - rho * (P4 * t);            // Q^{-1} y[m] columns
    const MatrixXcd Wm = P4.adjoint() * Y;             // Kc x T
    return rho * (F.adjoint() * (static_cast<double>(T) * P4 - U * Wm.adjoint()));
  }

  MatrixXcd delta = MatrixXcd::Zero(dict.P(), Kc);
  for (int m = 0; m < T; ++m) {
    const MatrixXcd& F = dict.F(m);
    const MatrixXcd P1 = F * S;
    const MatrixXcd W = id + rho * (P1.adjoint() * P1);
    const MatrixXcd Winv = Eigen::LLT<MatrixXcd>(W).solve(id);
    const MatrixXcd P4 = P1 * Winv;
    const VectorXcd t = P1.adjoint() * Y.col(m);
    const VectorXcd u = Y.col(m) - rho * (P4 * t);
    const VectorXcd w = P4.adjoint() * Y.col(m);
    delta.noalias() += rho * (F.adjoint() * (P4 - u * w.adjoint()));
  }
  return delta;
}

MatrixXcd soft_threshold(const MatrixXcd& m, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft_threshold: tau must be >= 0");
  MatrixXcd out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const cxd v = m(i, j);
      const double mag = std::abs(v);
      out(i, j) = (mag > tau) ? cxd(v * ((mag - tau) / mag)) : cxd(0.0, 0.0);
    }
  return out;
}

namespace detail {

// Shared eigen-step of the two subspace initializers: top-K eigenpairs of
// sum_m F_m^H (v[m] v[m]^H - I) F_m with negative eigenvalues clipped, before
// the estimator-specific scaling.
SparseEstimate subspace_core(const MatrixXcd& V, const Dictionary& dict, int K, double scale) {
  const int T = dict.T;
  const int P = dict.P();
  MatrixXcd M(P, P);
  if (dict.single_F()) {
    const MatrixXcd& F = dict.F(0);
    const MatrixXcd syy = V * V.adjoint() - static_cast<double>(T) * MatrixXcd::Identity(dict.N(), dict.N());
    M = F.adjoint() * syy * F;
  } else {
    M.setZero();
    for (int m = 0; m < T; ++m) {
      const MatrixXcd& F = dict.F(m);
      const VectorXcd p = F.adjoint() * V.col(m);
      M.noalias() += p * p.adjoint();
      M.noalias() -= F.adjoint() * F;
    }
  }

  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig((M + M.adjoint()) * 0.5);
  SparseEstimate est;
  est.S_hat = MatrixXcd::Zero(P, K);
  est.converged = true;
  for (int k = 0; k < K; ++k) {
    const int idx = P - 1 - k;  // eigenvalues ascending; take the largest K
    const double ev = eig.eigenvalues()(idx);
    if (ev > 0.0) {
      est.S_hat.col(k) = scale * std::sqrt(ev) * eig.eigenvectors().col(idx);
    } else {
      est.rank_deficient = true;
    }
  }
  return est;
}

}  // namespace detail

SparseEstimate subspace_init(const RxBlock& rx, const Dictionary& dict, double rho, int K) {
  if (rho <= 0.0) throw std::invalid_argument("subspace_init: rho must be > 0");
  return detail::subspace_core(rx.y_freq, dict, K, 1.0 / std::sqrt(dict.T * rho));
}

SparseEstimate estimate_blind(const RxBlock& rx, const Dictionary& dict, double rho,
                              const SolverConfig& config) {
  config.validate();
  SparseEstimate init = subspace_init(rx, dict, rho, rx.dims.K);

  detail::ProxProblem prob;
  prob.objective = [&](const MatrixXcd& s) { return loglikelihood(s, rx, dict, rho); };
  prob.descent = [&](const MatrixXcd& s) { return likelihood_gradient(s, rx, dict, rho); };

  SparseEstimate est = detail::run_prox_loop(init.S_hat, config, prob);
  est.rank_deficient = init.rank_deficient;
  est.kkt_residual = kkt_residual(est.S_hat, rx, dict, rho, config.lambda);
  return est;
}

double kkt_residual_from_gradient(const MatrixXcd& S, const MatrixXcd& descent_grad, double lambda) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < S.cols(); ++j)
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
      const cxd s = S(i, j);
      const cxd d = descent_grad(i, j);
      double r;
      if (s != cxd(0.0, 0.0)) {
        r = std::abs(d + (lambda / 2.0) * (s / std::abs(s)));
      } else {
        r = std::max(std::abs(d) - lambda / 2.0, 0.0);
      }
      worst = std::max(worst, r);
    }
  return worst;
}

double kkt_residual(const MatrixXcd& S, const RxBlock& rx, const Dictionary& dict, double rho,
                    double lambda) {
  return kkt_residual_from_gradient(S, likelihood_gradient(S, rx, dict, rho), lambda);
}

}  // namespace blindmimo
