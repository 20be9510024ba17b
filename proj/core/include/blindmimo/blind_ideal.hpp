#pragma once

#include <vector>

#include "blindmimo/dictionary.hpp"
#include "blindmimo/txrx.hpp"
#include "blindmimo/types.hpp"

namespace blindmimo {

/// Proximal-gradient solver settings shared by the blind estimators and the
/// pilot baseline. Only lambda has a problem-level meaning; the rest are
/// backtracking knobs.
struct SolverConfig {
  double lambda = 4.0;       ///< l1 weight
  double mu0 = 1.0;          ///< initial step size
  double beta = 0.5;         ///< backtracking shrink factor, in (0,1)
  int max_iters = 500;       ///< accepted-iteration cap
  double tol_rel_obj = 1e-6; ///< relative objective-change stop threshold
  double min_step = 1e-12;   ///< step floor; falling below stops the solver

  void validate() const;
};

/// Solver output. objective_trace holds the regularized objective at the
/// initial point and after each accepted iteration; step_gains holds the
/// per-step objective gain under the objective used for acceptance (for the
/// EM solver that objective is the current surrogate, so gains rather than
/// the raw trace carry the monotonicity guarantee).
struct SparseEstimate {
  MatrixXcd S_hat;
  std::vector<double> objective_trace;
  std::vector<double> step_gains;
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;
  bool rank_deficient = false;
};

/// Blind log-likelihood of the coefficient matrix S given one block of
/// unquantized observations:
///   L(S) = -sum_m y[m]^H Q_m^{-1} y[m] - sum_m log|Q_m|,
///   Q_m = rho * F_m S S^H F_m^H + I.
/// Evaluated through the K x K determinant/inverse identities; agrees with
/// the direct N x N form to rounding.
double loglikelihood(const MatrixXcd& S, const RxBlock& rx, const Dictionary& dict, double rho);

/// Closed-form rank-K initializer: eigendecomposition of
/// sum_m F_m^H (y[m] y[m]^H - I) F_m, keeping the top K eigenpairs with
/// negative eigenvalues clipped to zero. rank_deficient is set when fewer
/// than K positive eigenvalues exist.
SparseEstimate subspace_init(const RxBlock& rx, const Dictionary& dict, double rho, int K);

/// Descent direction Delta = -dL/dS* (Wirtinger convention), computed with
/// the K x K inversion-lemma form.
MatrixXcd likelihood_gradient(const MatrixXcd& S, const RxBlock& rx, const Dictionary& dict,
                              double rho);

/// Complex soft-threshold: entrywise e^{j*angle} * max(|value| - tau, 0).
MatrixXcd soft_threshold(const MatrixXcd& m, double tau);

/// Blind l1-regularized estimation: subspace initialization followed by the
/// gradient/threshold iteration with backtracking on the regularized
/// objective. Non-convergence is reported through the converged flag.
SparseEstimate estimate_blind(const RxBlock& rx, const Dictionary& dict, double rho,
                              const SolverConfig& config);

/// Max-norm violation of the first-order stationarity conditions of the
/// regularized problem at S:
///   |Delta_ij + (lambda/2) e^{j*angle(s_ij)}|  where s_ij != 0,
///   max(|Delta_ij| - lambda/2, 0)              where s_ij == 0.
double kkt_residual(const MatrixXcd& S, const RxBlock& rx, const Dictionary& dict, double rho,
                    double lambda);

/// Same stationarity residual for a precomputed descent gradient.
double kkt_residual_from_gradient(const MatrixXcd& S, const MatrixXcd& descent_grad, double lambda);

}  // namespace blindmimo
