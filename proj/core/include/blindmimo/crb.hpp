#pragma once

#include <vector>

#include "blindmimo/dictionary.hpp"
#include "blindmimo/types.hpp"

namespace blindmimo {

enum class FisherKind { IdealExact, IdealLowSnr, OneBitLowSnrFlat, OneBitLowSnrWideband };

/// Clairvoyant Fisher information for the coefficient matrix, laid out
/// user-major: row/column P*(k) + i addresses coefficient i of user k+1,
/// P = N*(T_D+1). Hermitian PSD.
struct FisherMatrix {
  MatrixXcd J;
  std::vector<int> support;  // empty for the full matrix
  FisherKind kind = FisherKind::IdealExact;
};

/// Exact clairvoyant Fisher matrix for unquantized observations:
/// J = sum_m rho^2 (H[m]^H Q_m^{-1} H[m])^T (x) (F_m^H Q_m^{-1} F_m),
/// Q_m = rho H[m] H[m]^H + I. The transpose on the K x K factor keeps the
/// compact form elementwise equal to the defining trace formula.
FisherMatrix fisher_ideal(const std::vector<MatrixXcd>& H, const Dictionary& dict, double rho);

/// Low-SNR limit: J = rho^2 sum_m (H[m]^H H[m])^T (x) (F_m^H F_m).
FisherMatrix fisher_ideal_lowsnr(const std::vector<MatrixXcd>& H, const Dictionary& dict, double rho);

/// One-bit low-SNR Fisher matrix for flat fading (F_m = F for all m):
/// the ideal low-SNR structure scaled by (2/pi)^2 minus the diagonal-product
/// correction that reflects the loss of amplitude information.
FisherMatrix fisher_onebit_flat(const MatrixXcd& H, const MatrixXcd& F, double rho, int T);

/// One-bit low-SNR Fisher matrix for the general wideband model. Guarded to
/// N*T <= 2048.
FisherMatrix fisher_onebit_wideband(const std::vector<MatrixXcd>& H, const Dictionary& dict,
                                    double rho);

/// Row/column restriction of J to the support of S_true (entries != 0),
/// user-major order. Throws on an empty support.
FisherMatrix reduce_support(const FisherMatrix& fisher, const MatrixXcd& S_true);

struct EtaCrb {
  double value = 0.0;
  bool reliable = true;
};

/// Performance predictor per user:
///   eta_k = 1 / sqrt(1 + sum_m tr[F_m Pi_k J~^{-1} Pi_k^H F_m^H] / sum_m ||h_k[m]||^2),
/// with Pi_k selecting user k's support coefficients. A singular reduced
/// Fisher matrix yields value 0 with reliable = false; condition numbers
/// beyond 1e12 keep the value but clear the flag.
std::vector<EtaCrb> eta_crb(const FisherMatrix& J_reduced, const MatrixXcd& S_pattern,
                            const std::vector<MatrixXcd>& H_true, const Dictionary& dict);

/// Support index set of S (user-major), shared by reduce_support and eta_crb.
std::vector<int> support_indices(const MatrixXcd& S);

}  // namespace blindmimo
