#pragma once

#include <vector>

#include "blindmimo/types.hpp"

namespace blindmimo {

/// Per-user correlation metric between an estimate and the ground truth,
/// maximized over the admissible ambiguities (global phase comes free in the
/// modulus; integer delay shifts are searched over [-T_D, T_D]; user
/// permutations are handled by resolve_permutation).
struct EtaResult {
  VectorXd eta;                       // per true-user, in [0,1]
  std::vector<int> best_shift;        // maximizing delay shift per user
  std::vector<int> permutation;       // estimate column assigned to each true user
  std::vector<uint8_t> zero_estimate; // set where the estimate had zero norm
};

/// eta_k for aligned users (estimate column k scored against true user k):
///   eta_k = max_{|d| <= T_D} |sum_m h_k[m]^H hhat_k[m] e^{-j 2 pi d m / T}|
///           / sqrt(sum_m ||h_k[m]||^2 * sum_m ||hhat_k[m]||^2).
EtaResult eta_metric(const std::vector<MatrixXcd>& H_hat, const std::vector<MatrixXcd>& H_true,
                     int T_D);

/// eta under the user assignment maximizing sum_k eta_k: exhaustive for
/// K <= 8, Hungarian assignment beyond.
EtaResult resolve_permutation(const std::vector<MatrixXcd>& H_hat,
                              const std::vector<MatrixXcd>& H_true, int T_D);

/// Assignment maximizing sum_k score(k, perm[k]); score must be square.
std::vector<int> best_assignment(const MatrixXd& score);

/// Empirical complementary CDF Pr(X >= t) over a threshold grid.
struct CcdfTable {
  VectorXd thresholds;
  VectorXd prob;
  int n_samples = 0;
};

CcdfTable ccdf(const std::vector<double>& values, const VectorXd& grid);

}  // namespace blindmimo
