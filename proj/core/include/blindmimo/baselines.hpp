#pragma once

#include "blindmimo/blind_ideal.hpp"
#include "blindmimo/dictionary.hpp"
#include "blindmimo/types.hpp"

namespace blindmimo {

/// K orthogonal pilot sequences of length T_T (DFT rows scaled by sqrt(rho)):
/// X X^H = rho * T_T * I.
MatrixXcd orthogonal_pilots(int K, int T_T, double rho);

/// Pilot-only sparse reconstruction baseline:
///   min_S ||F S X_T - Y_T||_F^2 + lambda ||S||_1,1
/// solved with the same gradient/threshold machinery as the blind estimator.
/// Narrowband scope (single-F dictionary). rank_deficient flags pilots that
/// do not excite all K users.
SparseEstimate pilot_ls_estimate(const MatrixXcd& Y_T, const MatrixXcd& X_T,
                                 const Dictionary& dict, const SolverConfig& config);

/// Semi-blind baseline output; the estimate is an unstructured channel matrix.
struct SemiblindEstimate {
  MatrixXcd H;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

/// Semi-blind objective
///   -tr(Y_D^H Q^{-1} Y_D) - (T - T_T) log|Q| - ||H X_T - Y_T||_F^2,
/// Q = rho H H^H + I; with no pilots it reduces to the blind log-likelihood
/// of an unstructured channel.
double semiblind_objective(const MatrixXcd& H, const MatrixXcd& Y_T, const MatrixXcd& Y_D,
                           const MatrixXcd& X_T, double rho);

/// Descent gradient -d(objective)/dH*.
MatrixXcd semiblind_gradient(const MatrixXcd& H, const MatrixXcd& Y_T, const MatrixXcd& Y_D,
                             const MatrixXcd& X_T, double rho);

/// Gradient ascent with backtracking from the subspace solution, with the
/// rotation ambiguity fixed against the pilots. Narrowband scope.
SemiblindEstimate semiblind_estimate(const MatrixXcd& Y_T, const MatrixXcd& Y_D,
                                     const MatrixXcd& X_T, const Dictionary& dict, double rho,
                                     const SolverConfig& config);

}  // namespace blindmimo
