#pragma once

#include <utility>
#include <vector>

#include "blindmimo/blind_ideal.hpp"
#include "blindmimo/dictionary.hpp"
#include "blindmimo/txrx.hpp"
#include "blindmimo/types.hpp"

namespace blindmimo {

/// Windowed circular sample autocorrelation of the one-bit signal. Only the
/// non-negative lags 0..T_D are stored; lags T-T_D..T-1 follow by conjugate
/// symmetry and everything between is zero (rectangular lag window).
struct QuantizedCovariance {
  int T = 0;
  int T_D = 0;
  std::vector<MatrixXcd> lags;  // lags[l] for l = 0..T_D

  /// Lag n in [0, T): stored value, conjugate mirror, or zero in the window.
  MatrixXcd lag(int n) const;
};

/// C_r[l] = (1/T) sum_n r[(n+l) mod T] r[n]^H from the time-domain one-bit
/// block (N x T). Requires T > 2*T_D. The diagonal of lag 0 is exactly 1.
QuantizedCovariance sample_quantized_autocorr(const MatrixXcd& r_time, int T_D);

/// Arcsine law, elementwise on real and imaginary parts:
/// (2/pi) * arcsin(.), valid for a unit-diagonal-normalized correlation
/// matrix. Entries with |Re| or |Im| beyond 1 are rejected.
MatrixXcd arcsine_forward(const MatrixXcd& c_normalized);

/// Inverse map sin((pi/2) * .) applied elementwise to real and imaginary
/// parts; exact inverse of arcsine_forward on [-1, 1].
MatrixXcd sin_halfpi(const MatrixXcd& c);

/// Per-antenna variance profile D = (1/T) sum_m diag(rho F_m S S^H F_m^H + I)
/// used to undo the amplitude loss of one-bit quantization.
VectorXd estep_scale_diag(const MatrixXcd& S_prev, const Dictionary& dict, double rho);

/// E-step covariance reconstruction:
///   Phi_y[m] = D^{1/2} [ sum_{retained n} sin((pi/2) C_r[n]) e^{-j 2 pi n m / T} ] D^{1/2}.
/// The scaling is pinned by the invariant that S_prev = 0 (D = I) with white
/// one-bit data gives Phi_y[m] ~= I.
std::vector<MatrixXcd> estep_cov(const QuantizedCovariance& c_r, const MatrixXcd& S_prev,
                                 const Dictionary& dict, double rho);

/// EM surrogate objective -sum_m tr(Phi_y[m] Q_m^{-1}) - sum_m log|Q_m| for a
/// fixed reconstructed covariance. phi_y may hold one matrix shared by all
/// bins (flat case) or one per bin.
double em_surrogate(const MatrixXcd& S, const std::vector<MatrixXcd>& phi_y,
                    const Dictionary& dict, double rho);

/// Descent gradient -dL/dS* of the surrogate; with the unquantized plug-in
/// Phi_y[m] = y[m] y[m]^H this coincides with likelihood_gradient.
MatrixXcd em_gradient(const MatrixXcd& S_prev, const std::vector<MatrixXcd>& phi_y,
                      const Dictionary& dict, double rho);

/// Rank-K initializer from one-bit data: the Eq.-(12)-style eigen-step applied
/// to sum_m F_m^H (r[m] r[m]^H - I) F_m, scaled by sqrt(pi/(2 T rho)).
SparseEstimate onebit_subspace_init(const RxBlock& rx, const Dictionary& dict, double rho, int K);

/// Blind l1-regularized estimation from one-bit observations: EM loop with
/// the arcsine-law E-step and the gradient/threshold M-step.
SparseEstimate estimate_blind_onebit(const RxBlock& rx, const Dictionary& dict, double rho,
                                     const SolverConfig& config);

/// First-order (low-SNR) approximation of the one-bit observation probability
/// in the flat single-sample setting:
///   (1/4^N) (1 + rho (2/pi) tr(H^H (r r^H - I) H)).
double onebit_prob_firstorder(const VectorXcd& r, const MatrixXcd& H, double rho);

/// Algebraically equivalent form (1/4^N)(1 + rho (2/pi) r^H nondiag(H H^H) r).
double onebit_prob_firstorder_nondiag(const VectorXcd& r, const MatrixXcd& H, double rho);

/// Both sides of the QPSK sign-vector moment identity
///   (1/4^N) sum_r (r^H D r)(r^H B r) = tr(D nondiag(B)) + tr(D) tr(B),
/// the left side by full enumeration (N <= 8).
std::pair<cxd, cxd> sign_enumeration_identity(const MatrixXcd& D, const MatrixXcd& B);

}  // namespace blindmimo
